#include "qcbm/config.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "qcbm/fock.hpp"

namespace qcbm {

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::simulate: return "simulate";
    case RunMode::train: return "train";
    case RunMode::mitigate_bench: return "mitigate-bench";
    case RunMode::permanent_bench: return "permanent-bench";
  }
  return "unknown";
}

RunMode run_mode_from_string(const std::string& name) {
  if (name == "simulate") return RunMode::simulate;
  if (name == "train") return RunMode::train;
  if (name == "mitigate-bench") return RunMode::mitigate_bench;
  if (name == "permanent-bench") return RunMode::permanent_bench;
  throw InputError("unknown mode '" + name + "'");
}

FockState default_input_state(int m, int n) {
  if (m < 1 || n < 0) throw InputError("default_input_state: need m >= 1 and n >= 0");
  if (2 * n > m + 1)
    throw InputError("default_input_state: " + std::to_string(n) + " photons do not fit an alternating pattern on " +
                     std::to_string(m) + " modes; set circuit.input_occupations explicitly");
  std::vector<int> occ(static_cast<std::size_t>(m), 0);
  for (int i = 0; i < n; ++i) occ[static_cast<std::size_t>(2 * i)] = 1;
  return FockState(std::move(occ));
}

namespace {

/// Strict schema reader that records problems instead of throwing.
class SchemaReader {
 public:
  std::vector<std::string> problems;

  void problem(const std::string& path, const std::string& message) { problems.push_back(path + ": " + message); }

  /// True when `j` is an object; flags keys outside `allowed`.
  bool object(const Json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) {
      problem(path.empty() ? "$" : path, "expected an object");
      return false;
    }
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j.items())
      if (!keys.count(key)) problem(join(path, key), "unknown key");
    return true;
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  const Json* find(const Json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
  }

  void read(const Json& v, const std::string& path, int& out) {
    if (!v.is_number_integer()) return problem(path, "expected an integer");
    out = v.get<int>();
  }
  void read(const Json& v, const std::string& path, std::uint64_t& out) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) return problem(path, "expected a non-negative integer");
    out = v.get<std::uint64_t>();
  }
  void read(const Json& v, const std::string& path, unsigned& out) {
    std::uint64_t tmp = 0;
    const auto before = problems.size();
    read(v, path, tmp);
    if (problems.size() == before) out = static_cast<unsigned>(tmp);
  }
  void read(const Json& v, const std::string& path, double& out) {
    if (!v.is_number()) return problem(path, "expected a number");
    out = v.get<double>();
  }
  void read(const Json& v, const std::string& path, bool& out) {
    if (!v.is_boolean()) return problem(path, "expected a boolean");
    out = v.get<bool>();
  }
  void read(const Json& v, const std::string& path, std::string& out) {
    if (!v.is_string()) return problem(path, "expected a string");
    out = v.get<std::string>();
  }
  template <typename T>
  void read(const Json& v, const std::string& path, std::vector<T>& out) {
    if (!v.is_array()) return problem(path, "expected an array");
    std::vector<T> values(v.size());
    const auto before = problems.size();
    for (std::size_t i = 0; i < v.size(); ++i) read(v[i], path + "[" + std::to_string(i) + "]", values[i]);
    if (problems.size() == before) out = std::move(values);
  }
  template <typename T>
  void read(const Json& v, const std::string& path, std::optional<T>& out) {
    if (v.is_null()) {
      out.reset();
      return;
    }
    T value{};
    const auto before = problems.size();
    read(v, path, value);
    if (problems.size() == before) out = std::move(value);
  }

  template <typename T>
  void field(const Json& obj, const std::string& path, const char* key, T& out) {
    if (const Json* v = find(obj, key)) read(*v, join(path, key), out);
  }

  template <typename Enum, typename Parse>
  void enum_field(const Json& obj, const std::string& path, const char* key, Enum& out, Parse parse) {
    const Json* v = find(obj, key);
    if (!v) return;
    if (!v->is_string()) return problem(join(path, key), "expected a string");
    try {
      out = parse(v->get<std::string>());
    } catch (const InputError& e) {
      problem(join(path, key), e.what());
    }
  }
};

void check_invariants(const RunConfig& c, std::vector<std::string>& problems) {
  auto bad = [&](const std::string& path, const std::string& msg) { problems.push_back(path + ": " + msg); };
  const auto& circ = c.circuit;
  if (circ.m < 2 || circ.m > 64) bad("circuit.m", "must lie in [2, 64]");
  if (circ.n < 1) bad("circuit.n", "must be >= 1");
  if (circ.n > circ.m) bad("circuit.n", "must not exceed circuit.m");
  if (circ.k < 1) bad("circuit.k", "must be >= 1");
  if (static_cast<int>(circ.input_occupations.size()) != circ.m)
    bad("circuit.input_occupations", "length " + std::to_string(circ.input_occupations.size()) +
                                         " does not match circuit.m = " + std::to_string(circ.m));
  if (std::any_of(circ.input_occupations.begin(), circ.input_occupations.end(), [](int x) { return x < 0; }))
    bad("circuit.input_occupations", "occupations must be >= 0");
  const int sum = std::accumulate(circ.input_occupations.begin(), circ.input_occupations.end(), 0);
  if (sum != circ.n)
    bad("circuit.input_occupations", "photon sum " + std::to_string(sum) + " does not match circuit.n = " +
                                         std::to_string(circ.n));
  if (circ.phases && circ.m >= 2 && circ.k >= 1) {
    const auto expected = static_cast<std::size_t>(circ.k) * static_cast<std::size_t>(circ.m) *
                          static_cast<std::size_t>(circ.m - 1);
    if (circ.phases->size() != expected)
      bad("circuit.phases", "expected " + std::to_string(expected) + " entries, got " +
                                std::to_string(circ.phases->size()));
  }
  if (!(c.eta >= 0.0 && c.eta <= 1.0)) bad("noise.eta", "must lie in [0, 1]");
  if (c.shots_per_evaluation < 1) bad("sampling.shots_per_evaluation", "must be >= 1");
  if (c.threads < 1) bad("sampling.threads", "must be >= 1");
  if (c.mitigation.max_iters < 1) bad("mitigation.max_iters", "must be >= 1");
  if (!(c.mitigation.tol > 0.0)) bad("mitigation.tol", "must be > 0");
  if (c.train_methods.empty()) bad("train.methods", "must list at least one method");

  const auto& t = c.target;
  if (t.bins < 1) bad("target.bins", "must be >= 1");
  if (c.mode == RunMode::train && circ.m >= 1 && circ.n >= 0 && circ.n <= circ.m && t.bins >= 1) {
    const auto patterns = binomial(static_cast<std::uint64_t>(circ.m), static_cast<std::uint64_t>(circ.n));
    if (static_cast<std::uint64_t>(t.bins) > patterns)
      bad("target.bins", std::to_string(t.bins) + " bins exceed the " + std::to_string(patterns) + " output patterns");
  }
  if (t.kind == TargetKind::gaussian_mixture) {
    if (!(t.gaussian.x_min < t.gaussian.x_max)) bad("target.x_min", "must be below target.x_max");
    if (!(t.gaussian.sigma1 > 0.0)) bad("target.sigma1", "must be > 0");
    if (!(t.gaussian.sigma2 > 0.0)) bad("target.sigma2", "must be > 0");
    if (!(t.gaussian.weight >= 0.0 && t.gaussian.weight <= 1.0)) bad("target.weight", "must lie in [0, 1]");
  } else {
    if (t.path.empty()) bad("target.path", "required for a csv target");
    if (!(t.clip_lo >= 0.0 && t.clip_lo < t.clip_hi && t.clip_hi <= 1.0))
      bad("target.clip_quantiles", "must satisfy 0 <= lo < hi <= 1");
  }

  try {
    c.spsa.validate();
  } catch (const ConfigError& e) {
    problems.insert(problems.end(), e.problems().begin(), e.problems().end());
  }

  if (c.mitigate_bench.seeds < 1) bad("mitigate_bench.seeds", "must be >= 1");
  for (double e : c.mitigate_bench.etas)
    if (!(e >= 0.0 && e <= 1.0)) bad("mitigate_bench.etas", "entries must lie in [0, 1]");

  const auto& pb = c.permanent_bench;
  if (pb.matrix_path.empty() && (pb.size < 1 || pb.size > 8)) bad("permanent_bench.size", "must lie in [1, 8]");
  if (!(pb.epsilon > 0.0 && pb.epsilon < 1.0)) bad("permanent_bench.epsilon", "must lie in (0, 1)");
  if (!(pb.delta > 0.0 && pb.delta < 1.0)) bad("permanent_bench.delta", "must lie in (0, 1)");
  if (pb.budgets.empty()) bad("permanent_bench.budgets", "must not be empty");
  if (std::any_of(pb.budgets.begin(), pb.budgets.end(), [](std::uint64_t b) { return b == 0; }))
    bad("permanent_bench.budgets", "entries must be >= 1");
  if (pb.repetitions < 1) bad("permanent_bench.repetitions", "must be >= 1");
}

}  // namespace

RunConfig parse_config(const Json& doc) {
  SchemaReader r;
  RunConfig c;
  bool occupations_given = false;
  if (r.object(doc, "", {"mode", "circuit", "noise", "sampling", "estimator", "train", "mitigation", "target",
                         "metric", "spsa", "seed", "output", "mitigate_bench", "permanent_bench"})) {
    if (const Json* v = r.find(doc, "mode")) {
      if (!v->is_null()) {
        RunMode mode{};
        r.enum_field(doc, "", "mode", mode, run_mode_from_string);
        c.mode = mode;
      }
    }
    if (const Json* circ = r.find(doc, "circuit");
        circ && r.object(*circ, "circuit",
                         {"m", "n", "k", "input_occupations", "single_phase_mode", "tied_blocks", "phases"})) {
      r.field(*circ, "circuit", "m", c.circuit.m);
      r.field(*circ, "circuit", "n", c.circuit.n);
      r.field(*circ, "circuit", "k", c.circuit.k);
      if (const Json* occ = r.find(*circ, "input_occupations"); occ && !occ->is_null()) {
        occupations_given = true;
        r.read(*occ, "circuit.input_occupations", c.circuit.input_occupations);
      }
      r.field(*circ, "circuit", "single_phase_mode", c.circuit.single_phase_mode);
      r.field(*circ, "circuit", "tied_blocks", c.circuit.tied_blocks);
      r.field(*circ, "circuit", "phases", c.circuit.phases);
    }
    if (const Json* noise = r.find(doc, "noise"); noise && r.object(*noise, "noise", {"eta"}))
      r.field(*noise, "noise", "eta", c.eta);
    if (const Json* s = r.find(doc, "sampling"); s && r.object(*s, "sampling", {"shots_per_evaluation", "threads"})) {
      r.field(*s, "sampling", "shots_per_evaluation", c.shots_per_evaluation);
      r.field(*s, "sampling", "threads", c.threads);
    }
    r.enum_field(doc, "", "estimator", c.estimator, estimator_method_from_string);
    if (const Json* t = r.find(doc, "train"); t && r.object(*t, "train", {"methods"})) {
      if (const Json* methods = r.find(*t, "methods")) {
        if (!methods->is_array()) {
          r.problem("train.methods", "expected an array");
        } else {
          c.train_methods.clear();
          for (std::size_t i = 0; i < methods->size(); ++i) {
            const std::string path = "train.methods[" + std::to_string(i) + "]";
            if (!(*methods)[i].is_string()) {
              r.problem(path, "expected a string");
              continue;
            }
            try {
              c.train_methods.push_back(estimator_method_from_string((*methods)[i].get<std::string>()));
            } catch (const InputError& e) {
              r.problem(path, e.what());
            }
          }
        }
      }
    }
    if (const Json* m = r.find(doc, "mitigation"); m && r.object(*m, "mitigation", {"max_iters", "tol"})) {
      r.field(*m, "mitigation", "max_iters", c.mitigation.max_iters);
      r.field(*m, "mitigation", "tol", c.mitigation.tol);
    }
    if (const Json* t = r.find(doc, "target");
        t && r.object(*t, "target",
                      {"kind", "bins", "mu1", "mu2", "sigma1", "sigma2", "weight", "x_min", "x_max", "path",
                       "clip_quantiles"})) {
      r.enum_field(*t, "target", "kind", c.target.kind, [](const std::string& s) {
        if (s == "gaussian_mixture") return TargetKind::gaussian_mixture;
        if (s == "csv") return TargetKind::csv;
        throw InputError("unknown target kind '" + s + "'");
      });
      r.field(*t, "target", "bins", c.target.bins);
      auto& g = c.target.gaussian;
      r.field(*t, "target", "mu1", g.mu1);
      r.field(*t, "target", "mu2", g.mu2);
      r.field(*t, "target", "sigma1", g.sigma1);
      r.field(*t, "target", "sigma2", g.sigma2);
      r.field(*t, "target", "weight", g.weight);
      r.field(*t, "target", "x_min", g.x_min);
      r.field(*t, "target", "x_max", g.x_max);
      r.field(*t, "target", "path", c.target.path);
      if (const Json* q = r.find(*t, "clip_quantiles")) {
        std::vector<double> quantiles;
        r.read(*q, "target.clip_quantiles", quantiles);
        if (quantiles.size() == 2) {
          c.target.clip_lo = quantiles[0];
          c.target.clip_hi = quantiles[1];
        } else if (q->is_array()) {
          r.problem("target.clip_quantiles", "expected [lo, hi]");
        }
      }
    }
    if (const Json* m = r.find(doc, "metric"); m && !(m->is_string() && m->get<std::string>() == "auto")) {
      if (!m->is_null()) {
        Metric metric{};
        r.enum_field(doc, "", "metric", metric, metric_from_string);
        c.metric = metric;
      }
    }
    if (const Json* s = r.find(doc, "spsa");
        s && r.object(*s, "spsa",
                      {"a", "c", "alpha", "gamma", "big_a", "max_iters", "record_every", "calibration_steps",
                       "target_step"})) {
      r.field(*s, "spsa", "a", c.spsa.a);
      r.field(*s, "spsa", "c", c.spsa.c);
      r.field(*s, "spsa", "alpha", c.spsa.alpha);
      r.field(*s, "spsa", "gamma", c.spsa.gamma);
      r.field(*s, "spsa", "big_a", c.spsa.big_a);
      r.field(*s, "spsa", "max_iters", c.spsa.max_iters);
      r.field(*s, "spsa", "record_every", c.spsa.record_every);
      r.field(*s, "spsa", "calibration_steps", c.spsa.calibration_steps);
      r.field(*s, "spsa", "target_step", c.spsa.target_step);
    }
    r.field(doc, "", "seed", c.seed);
    if (const Json* o = r.find(doc, "output"); o && r.object(*o, "output", {"dir"}))
      r.field(*o, "output", "dir", c.output_dir);
    if (const Json* b = r.find(doc, "mitigate_bench"); b && r.object(*b, "mitigate_bench", {"seeds", "etas"})) {
      r.field(*b, "mitigate_bench", "seeds", c.mitigate_bench.seeds);
      r.field(*b, "mitigate_bench", "etas", c.mitigate_bench.etas);
    }
    if (const Json* p = r.find(doc, "permanent_bench");
        p && r.object(*p, "permanent_bench",
                      {"matrix", "size", "matrix_seed", "epsilon", "delta", "budgets", "repetitions", "csv"})) {
      if (const Json* m = r.find(*p, "matrix"); m && !m->is_null()) r.read(*m, "permanent_bench.matrix", c.permanent_bench.matrix_path);
      r.field(*p, "permanent_bench", "size", c.permanent_bench.size);
      r.field(*p, "permanent_bench", "matrix_seed", c.permanent_bench.matrix_seed);
      r.field(*p, "permanent_bench", "epsilon", c.permanent_bench.epsilon);
      r.field(*p, "permanent_bench", "delta", c.permanent_bench.delta);
      r.field(*p, "permanent_bench", "budgets", c.permanent_bench.budgets);
      r.field(*p, "permanent_bench", "repetitions", c.permanent_bench.repetitions);
      r.field(*p, "permanent_bench", "csv", c.permanent_bench.csv);
    }
  }

  if (!occupations_given && c.circuit.m >= 1 && c.circuit.n >= 0) {
    try {
      c.circuit.input_occupations = default_input_state(c.circuit.m, c.circuit.n).occupations;
    } catch (const InputError& e) {
      r.problem("circuit.input_occupations", e.what());
    }
  }
  if (occupations_given || r.problems.empty()) check_invariants(c, r.problems);
  if (!r.problems.empty()) throw ConfigError(r.problems);
  return c;
}

RunConfig parse_config(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError({std::string("$: invalid JSON: ") + e.what()});
  }
  return parse_config(doc);
}

void validate_config(const RunConfig& config) {
  std::vector<std::string> problems;
  check_invariants(config, problems);
  if (!problems.empty()) throw ConfigError(problems);
}

Json config_to_json(const RunConfig& c) {
  Json methods = Json::array();
  for (auto m : c.train_methods) methods.push_back(to_string(m));
  const auto& g = c.target.gaussian;
  Json target = {{"kind", c.target.kind == TargetKind::csv ? "csv" : "gaussian_mixture"},
                 {"bins", c.target.bins},
                 {"mu1", g.mu1},
                 {"mu2", g.mu2},
                 {"sigma1", g.sigma1},
                 {"sigma2", g.sigma2},
                 {"weight", g.weight},
                 {"x_min", g.x_min},
                 {"x_max", g.x_max},
                 {"path", c.target.path},
                 {"clip_quantiles", {c.target.clip_lo, c.target.clip_hi}}};
  const auto& pb = c.permanent_bench;
  return {
      {"mode", c.mode ? Json(to_string(*c.mode)) : Json(nullptr)},
      {"circuit",
       {{"m", c.circuit.m},
        {"n", c.circuit.n},
        {"k", c.circuit.k},
        {"input_occupations", c.circuit.input_occupations},
        {"single_phase_mode", c.circuit.single_phase_mode},
        {"tied_blocks", c.circuit.tied_blocks},
        {"phases", c.circuit.phases ? Json(*c.circuit.phases) : Json(nullptr)}}},
      {"noise", {{"eta", c.eta}}},
      {"sampling", {{"shots_per_evaluation", c.shots_per_evaluation}, {"threads", c.threads}}},
      {"estimator", to_string(c.estimator)},
      {"train", {{"methods", methods}}},
      {"mitigation", {{"max_iters", c.mitigation.max_iters}, {"tol", c.mitigation.tol}}},
      {"target", target},
      {"metric", c.metric ? Json(to_string(*c.metric)) : Json("auto")},
      {"spsa",
       {{"a", c.spsa.a ? Json(*c.spsa.a) : Json(nullptr)},
        {"c", c.spsa.c},
        {"alpha", c.spsa.alpha},
        {"gamma", c.spsa.gamma},
        {"big_a", c.spsa.big_a ? Json(*c.spsa.big_a) : Json(nullptr)},
        {"max_iters", c.spsa.max_iters},
        {"record_every", c.spsa.record_every},
        {"calibration_steps", c.spsa.calibration_steps},
        {"target_step", c.spsa.target_step}}},
      {"seed", c.seed},
      {"output", {{"dir", c.output_dir}}},
      {"mitigate_bench", {{"seeds", c.mitigate_bench.seeds}, {"etas", c.mitigate_bench.etas}}},
      {"permanent_bench",
       {{"matrix", pb.matrix_path.empty() ? Json(nullptr) : Json(pb.matrix_path)},
        {"size", pb.size},
        {"matrix_seed", pb.matrix_seed ? Json(*pb.matrix_seed) : Json(nullptr)},
        {"epsilon", pb.epsilon},
        {"delta", pb.delta},
        {"budgets", pb.budgets},
        {"repetitions", pb.repetitions},
        {"csv", pb.csv}}},
  };
}

}  // namespace qcbm
