#include "qcbm/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace qcbm {

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto result = std::from_chars(first, last, value);
  if (result.ec != std::errc() || result.ptr != last) throw InputError("not a number: '" + text + "'");
  return value;
}

namespace {

Json read_header(std::istream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
    throw InputError(std::string(what) + ": missing '# {json}' header line");
  try {
    return Json::parse(line.substr(2));
  } catch (const Json::exception& e) {
    throw InputError(std::string(what) + ": bad JSON header: " + e.what());
  }
}

void expect_columns(std::istream& in, const std::string& expected, const char* what) {
  std::string line;
  if (!std::getline(in, line) || line != expected)
    throw InputError(std::string(what) + ": expected column row '" + expected + "'");
}

std::pair<std::string, std::string> split_row(const std::string& line, const char* what) {
  const auto comma = line.find(',');
  if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
    throw InputError(std::string(what) + ": malformed row '" + line + "'");
  return {line.substr(0, comma), line.substr(comma + 1)};
}

}  // namespace

void write_counts_csv(std::ostream& out, const LossyCounts& counts) {
  Json header = {{"modes", counts.modes},
                 {"photons", counts.photons},
                 {"shots", counts.total_shots},
                 {"eta", counts.eta},
                 {"seed", counts.seed ? Json(*counts.seed) : Json(nullptr)},
                 {"photon_numbers", counts.photon_numbers}};
  out << "# " << header.dump() << "\n";
  out << "pattern,count\n";
  for (const auto& [pattern, n] : counts.counts) out << pattern.to_string() << ',' << n << '\n';
}

LossyCounts read_counts_csv(std::istream& in) {
  const Json header = read_header(in, "counts");
  LossyCounts counts;
  counts.modes = header.at("modes").get<int>();
  counts.photons = header.at("photons").get<int>();
  counts.total_shots = header.at("shots").get<std::uint64_t>();
  counts.eta = header.at("eta").get<double>();
  if (!header.at("seed").is_null()) counts.seed = header.at("seed").get<std::uint64_t>();
  if (header.contains("photon_numbers")) counts.photon_numbers = header["photon_numbers"].get<std::vector<std::uint64_t>>();
  expect_columns(in, "pattern,count", "counts");
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto [pattern, n] = split_row(line, "counts");
    const ClickPattern p = ClickPattern::from_string(pattern);
    if (p.modes != counts.modes) throw InputError("counts: pattern length does not match header");
    counts.counts[p] += std::stoull(n);
  }
  return counts;
}

void write_estimator_csv(std::ostream& out, const EstimatorOutput& est) {
  const int modes = est.table.size() ? est.table.pattern(0).modes : 0;
  const int photons = est.table.size() ? est.table.pattern(0).click_count() : 0;
  Json header = {{"method", to_string(est.method)},
                 {"modes", modes},
                 {"photons", photons},
                 {"shots_used", est.shots_used},
                 {"converged", est.converged},
                 {"iterations", est.iterations}};
  out << "# " << header.dump() << "\n";
  out << "pattern,probability\n";
  for (std::size_t i = 0; i < est.table.size(); ++i)
    out << est.table.pattern(i).to_string() << ',' << format_double(est.table.prob(i)) << '\n';
}

EstimatorOutput read_estimator_csv(std::istream& in) {
  const Json header = read_header(in, "estimator");
  EstimatorOutput est;
  est.method = estimator_method_from_string(header.at("method").get<std::string>());
  est.shots_used = header.at("shots_used").get<std::uint64_t>();
  est.converged = header.at("converged").get<bool>();
  est.iterations = header.at("iterations").get<int>();
  expect_columns(in, "pattern,probability", "estimator");
  std::vector<ClickPattern> space;
  std::vector<double> probs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto [pattern, p] = split_row(line, "estimator");
    space.push_back(ClickPattern::from_string(pattern));
    probs.push_back(parse_double(p));
  }
  est.table = ClickDistribution(std::move(space), Eigen::Map<RealVector>(probs.data(), static_cast<Eigen::Index>(probs.size())));
  return est;
}

Json mesh_params_to_json(const MeshParams& params) {
  std::vector<double> phases(params.phases().data(), params.phases().data() + params.phases().size());
  return {{"m", params.modes()},
          {"k", params.blocks()},
          {"single_phase_mode", params.single_phase_mode()},
          {"tied_blocks", params.tied_blocks()},
          {"phases", phases}};
}

MeshParams mesh_params_from_json(const Json& j) {
  const auto phases = j.at("phases").get<std::vector<double>>();
  return MeshParams(j.at("m").get<int>(), j.at("k").get<int>(),
                    Eigen::Map<const RealVector>(phases.data(), static_cast<Eigen::Index>(phases.size())),
                    j.value("single_phase_mode", false), j.value("tied_blocks", false));
}

Json record_to_json(const TrainingRecord& record) {
  std::vector<double> phases(record.phases.data(), record.phases.data() + record.phases.size());
  Json j = {{"iteration", record.iteration},
            {"loss", record.loss},
            {"exact_loss", record.exact_loss ? Json(*record.exact_loss) : Json(nullptr)},
            {"method", record.method},
            {"shots_spent", record.shots_spent},
            {"phases", phases}};
  return j;
}

TrainingRecord record_from_json(const Json& j) {
  TrainingRecord record;
  record.iteration = j.at("iteration").get<int>();
  record.loss = j.at("loss").get<double>();
  if (!j.at("exact_loss").is_null()) record.exact_loss = j.at("exact_loss").get<double>();
  record.method = j.at("method").get<std::string>();
  record.shots_spent = j.at("shots_spent").get<std::uint64_t>();
  const auto phases = j.at("phases").get<std::vector<double>>();
  record.phases = Eigen::Map<const RealVector>(phases.data(), static_cast<Eigen::Index>(phases.size()));
  return record;
}

void write_history_jsonl(std::ostream& out, const TrainingHistory& history) {
  for (const auto& record : history.records) out << record_to_json(record).dump() << '\n';
}

std::vector<TrainingRecord> read_history_jsonl(std::istream& in) {
  std::vector<TrainingRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(record_from_json(Json::parse(line)));
  }
  return records;
}

void write_curve_csv(std::ostream& out, const TrainingHistory& history) {
  out << "iteration,loss\n";
  for (const auto& record : history.records) out << record.iteration << ',' << format_double(record.loss) << '\n';
}

Json target_to_json(const TargetDistribution& target) {
  std::vector<double> probs(target.bin_probs.data(), target.bin_probs.data() + target.bin_probs.size());
  Json j = {{"x_min", target.x_min}, {"x_max", target.x_max}, {"bin_probs", probs}};
  if (const auto* g = std::get_if<GaussianMixtureParams>(&target.provenance)) {
    j["provenance"] = {{"kind", "gaussian_mixture"}, {"mu1", g->mu1},     {"mu2", g->mu2},
                       {"sigma1", g->sigma1},        {"sigma2", g->sigma2}, {"weight", g->weight},
                       {"x_min", g->x_min},          {"x_max", g->x_max},   {"bins", g->bins}};
  } else if (const auto* c = std::get_if<CsvDatasetSource>(&target.provenance)) {
    j["provenance"] = {{"kind", "csv"}, {"path", c->path}, {"clip_quantiles", {c->clip_lo, c->clip_hi}}, {"bins", c->bins}};
  }
  return j;
}

void write_text_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
  if (!out) throw InputError("write failed for '" + path + "'");
}

}  // namespace qcbm
