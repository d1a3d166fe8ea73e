#include "alasso/io.hpp"

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "alasso/errors.hpp"

namespace alasso::io {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty())
    throw IoError(std::string(what) + ": expected a non-empty nested array");
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  if (cols == 0)
    throw IoError(std::string(what) + ": rows must be non-empty arrays");
  Matrix m(static_cast<Eigen::Index>(j.size()),
           static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& row = j[i];
    if (!row.is_array() || row.size() != cols)
      throw IoError(std::string(what) + ": ragged rows");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!row[c].is_number())
        throw IoError(std::string(what) + ": non-numeric entry");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
          row[c].get<double>();
    }
  }
  return m;
}

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vector vector_from_json(const json& j, const char* what) {
  if (!j.is_array())
    throw IoError(std::string(what) + ": expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number())
      throw IoError(std::string(what) + ": non-numeric entry");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

void require_schema(const json& j, const char* tag) {
  if (!j.is_object() || !j.contains("schema") || j["schema"] != tag)
    throw IoError(std::string("expected schema tag \"") + tag + '"');
}

const json& require_field(const json& j, const char* key, const char* what) {
  if (!j.contains(key))
    throw IoError(std::string(what) + ": missing field \"" + key + '"');
  return j.at(key);
}

json kkt_to_json(const KktResiduals& r) {
  return {{"subgradient", r.subgradient},
          {"stationarity", r.stationarity},
          {"feasibility", r.feasibility},
          {"max", r.max()}};
}

json tolerances_to_json(const Tolerances& t) {
  return {{"abs", t.abs},
          {"contraction_rel", t.contraction_rel},
          {"monotonicity_abs", t.monotonicity_abs},
          {"domination_rel", t.domination_rel},
          {"identity_rel", t.identity_rel},
          {"probe_rel", t.probe_rel},
          {"skew_rel", t.skew_rel},
          {"ergodic_rel", t.ergodic_rel},
          {"summability_rel", t.summability_rel},
          {"scaling_rel", t.scaling_rel}};
}

}  // namespace

json frame_to_json(const TightFrame& frame) {
  json j;
  j["schema"] = kFrameSchema;
  j["rows"] = frame.rows();
  j["cols"] = frame.cols();
  j["entries"] = matrix_to_json(frame.entries);
  j["frame_lower"] = frame.frame_lower;
  j["frame_upper"] = frame.frame_upper;
  j["row_norm"] = frame.row_norm ? json(*frame.row_norm) : json(nullptr);
  j["construction"] = to_string(frame.construction);
  j["bases"] = frame.bases;
  j["seed"] = frame.seed;
  return j;
}

TightFrame frame_from_json(const json& j) {
  require_schema(j, kFrameSchema);
  const Matrix entries = matrix_from_json(require_field(j, "entries", "frame"),
                                          "frame.entries");
  TightFrame frame = external_frame(entries);
  // external_frame() has vetted the entries; restore the stored metadata
  // verbatim so that save/load round-trips bitwise (the recomputed bounds
  // can differ from exact constructor values in the last ulp, which would
  // change the fingerprint).  Certification never trusts these fields: it
  // re-derives tightness from the entries.
  if (j.contains("frame_lower") && !j["frame_lower"].is_null())
    frame.frame_lower = j["frame_lower"].get<double>();
  if (j.contains("frame_upper") && !j["frame_upper"].is_null())
    frame.frame_upper = j["frame_upper"].get<double>();
  if (j.contains("row_norm"))
    frame.row_norm = j["row_norm"].is_null()
                         ? std::nullopt
                         : std::optional<double>(j["row_norm"].get<double>());
  if (j.contains("construction") && !j["construction"].is_null())
    frame.construction =
        frame_construction_from_string(j["construction"].get<std::string>());
  if (j.contains("bases") && !j["bases"].is_null())
    frame.bases = j["bases"].get<int>();
  if (j.contains("seed") && !j["seed"].is_null())
    frame.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("rows") && j["rows"].get<int>() != frame.rows())
    throw IoError("frame: declared rows disagree with entries");
  if (j.contains("cols") && j["cols"].get<int>() != frame.cols())
    throw IoError("frame: declared cols disagree with entries");
  return frame;
}

json instance_to_json(const ProblemInstance& instance) {
  json j;
  j["schema"] = kInstanceSchema;
  j["measurement"] = matrix_to_json(instance.M);
  j["observations"] = vector_to_json(instance.y);
  j["frame"] = frame_to_json(instance.D);
  j["alpha"] = instance.alpha;
  j["ground_truth"] = instance.ground_truth
                          ? vector_to_json(*instance.ground_truth)
                          : json(nullptr);
  if (instance.planted_cosupport) {
    json arr = json::array();
    for (int idx : *instance.planted_cosupport) arr.push_back(idx);
    j["planted_cosupport"] = std::move(arr);
  } else {
    j["planted_cosupport"] = nullptr;
  }
  return j;
}

ProblemInstance instance_from_json(const json& j) {
  require_schema(j, kInstanceSchema);
  ProblemInstance instance;
  instance.M = matrix_from_json(require_field(j, "measurement", "instance"),
                                "instance.measurement");
  instance.y = vector_from_json(require_field(j, "observations", "instance"),
                                "instance.observations");
  instance.D = frame_from_json(require_field(j, "frame", "instance"));
  instance.alpha = require_field(j, "alpha", "instance").get<double>();
  if (j.contains("ground_truth") && !j["ground_truth"].is_null())
    instance.ground_truth =
        vector_from_json(j["ground_truth"], "instance.ground_truth");
  if (j.contains("planted_cosupport") && !j["planted_cosupport"].is_null()) {
    std::vector<int> idx;
    for (const json& e : j["planted_cosupport"]) idx.push_back(e.get<int>());
    instance.planted_cosupport = std::move(idx);
  }
  validate_instance(instance);
  return instance;
}

json solver_config_to_json(const SolverConfig& config) {
  json j;
  j["beta"] = config.beta;
  j["max_iters"] = config.max_iters;
  j["primal_tol"] = config.primal_tol;
  j["dual_tol"] = config.dual_tol;
  j["record_every"] = config.record_every;
  j["x0"] = config.x0 ? vector_to_json(*config.x0) : json(nullptr);
  j["lambda0"] = config.lambda0 ? vector_to_json(*config.lambda0)
                                : json(nullptr);
  return j;
}

SolverConfig solver_config_from_json(const json& j) {
  if (!j.is_object()) throw IoError("solver config: expected an object");
  SolverConfig config;
  if (j.contains("beta")) config.beta = j["beta"].get<double>();
  if (j.contains("max_iters")) config.max_iters = j["max_iters"].get<int>();
  if (j.contains("primal_tol")) config.primal_tol = j["primal_tol"].get<double>();
  if (j.contains("dual_tol")) config.dual_tol = j["dual_tol"].get<double>();
  if (j.contains("record_every"))
    config.record_every = j["record_every"].get<int>();
  if (j.contains("x0") && !j["x0"].is_null())
    config.x0 = vector_from_json(j["x0"], "solver.x0");
  if (j.contains("lambda0") && !j["lambda0"].is_null())
    config.lambda0 = vector_from_json(j["lambda0"], "solver.lambda0");
  return config;
}

json report_to_json(const CertificationReport& report) {
  json j;
  j["schema"] = kReportSchema;
  j["instance_ref"] = report.instance_ref;
  j["beta"] = report.beta;
  j["iters"] = report.iters;
  j["frame_tight"] = report.frame_tight;
  j["h_reduced"] = report.h_reduced;
  j["reference_available"] = report.reference_available;
  j["reference_note"] = report.reference_note;
  j["overall_pass"] = report.overall_pass;
  j["worst_margin"] = report.worst_margin;
  j["notes"] = report.notes;
  j["final_kkt"] = kkt_to_json(report.final_kkt);
  j["tolerances"] = tolerances_to_json(report.tol);

  json checks = json::array();
  for (const CheckSummary& c : report.checks)
    checks.push_back({{"name", c.name},
                      {"ran", c.ran},
                      {"pass", c.pass},
                      {"worst", c.worst},
                      {"note", c.note}});
  j["checks"] = std::move(checks);

  if (report.reference_available) {
    j["contraction"] = {{"strict_pass", report.contraction.strict_pass},
                        {"monotone_pass", report.contraction.monotone_pass},
                        {"worst_margin", report.contraction.worst_margin},
                        {"worst_monotone", report.contraction.worst_monotone},
                        {"scale", report.contraction.scale}};
    j["summability"] = {
        {"sum", report.summability.sum},
        {"bound", report.summability.bound},
        {"initial_step_sq", report.summability.initial_step_sq},
        {"first_window_max", report.summability.first_window_max},
        {"last_window_max", report.summability.last_window_max},
        {"pass", report.summability.pass},
        {"decay_pass", report.summability.decay_pass}};
  }
  j["domination"] = {{"inequality_pass", report.domination.inequality_pass},
                     {"identity_pass", report.domination.identity_pass},
                     {"worst_slack", report.domination.worst_slack},
                     {"worst_cross", report.domination.worst_cross},
                     {"worst_identity", report.domination.worst_identity}};
  j["identity_worst_scaled"] = report.identity_worst_scaled;
  j["identity_pass"] = report.identity_pass;
  j["probe_inequality"] = {
      {"min_slack", report.probe_inequality.min_slack},
      {"min_scaled_slack", report.probe_inequality.min_scaled_slack},
      {"evaluations", report.probe_inequality.evaluations},
      {"pass", report.probe_inequality.pass}};
  j["skew_worst_scaled"] = report.skew_worst_scaled;
  j["skew_pass"] = report.skew_pass;

  json ergodic_records = json::array();
  for (const ErgodicRecord& rec : report.ergodic.records)
    ergodic_records.push_back({{"t", rec.t},
                               {"gap", rec.gap},
                               {"bound", rec.bound},
                               {"ratio", rec.ratio}});
  j["ergodic"] = {{"records", std::move(ergodic_records)},
                  {"pass", report.ergodic.pass},
                  {"scaling_pass", report.ergodic.scaling_pass},
                  {"worst_excess", report.ergodic.worst_excess}};
  return j;
}

std::string fingerprint(const ProblemInstance& instance) {
  const std::string canonical = instance_to_json(instance).dump();
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : canonical) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << hash;
  return os.str();
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << content;
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

json read_json(const std::filesystem::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw IoError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

void write_trace_csv(const std::filesystem::path& path, const SolverTrace& trace,
                     const std::vector<double>& h_dist) {
  if (!h_dist.empty() && h_dist.size() != trace.primal_residuals.size())
    throw InvalidInputError("trace csv: h_dist length mismatch");
  std::ostringstream os;
  os << "k,primal_residual,dual_residual,objective,h_dist_to_ref\n";
  for (std::size_t k = 0; k < trace.primal_residuals.size(); ++k) {
    os << k << ',' << fmt(trace.primal_residuals[k]) << ','
       << fmt(trace.dual_residuals[k]) << ','
       << fmt(trace.objective_values[k]) << ',';
    if (!h_dist.empty()) os << fmt(h_dist[k]);
    os << '\n';
  }
  write_text(path, os.str());
}

void write_margins_csv(const std::filesystem::path& path,
                       const CertificationReport& report) {
  std::ostringstream os;
  os << "k,contraction_margin,domination_slack,domination_cross,h_dist\n";
  for (std::size_t i = 0; i < report.domination.records.size(); ++i) {
    const DominationRecord& dom = report.domination.records[i];
    os << dom.k << ',';
    if (report.reference_available && i < report.contraction.records.size())
      os << fmt(report.contraction.records[i].margin);
    os << ',' << fmt(dom.slack) << ',' << fmt(dom.cross) << ',';
    if (static_cast<std::size_t>(dom.k) < report.h_dist.size())
      os << fmt(report.h_dist[static_cast<std::size_t>(dom.k)]);
    os << '\n';
  }
  write_text(path, os.str());
}

void write_iterates_csv(const std::filesystem::path& path,
                        const SolverTrace& trace) {
  if (trace.iterates.empty())
    throw InvalidInputError("iterates csv: empty trace");
  const Eigen::Index n = trace.iterates.front().z.size();
  const Eigen::Index d = trace.iterates.front().x.size();
  std::ostringstream os;
  os << "k";
  for (Eigen::Index i = 0; i < n; ++i) os << ",z" << i;
  for (Eigen::Index i = 0; i < d; ++i) os << ",x" << i;
  for (Eigen::Index i = 0; i < n; ++i) os << ",lambda" << i;
  os << '\n';
  for (const AdmmIterate& it : trace.iterates) {
    os << it.k;
    for (Eigen::Index i = 0; i < n; ++i) os << ',' << fmt(it.z[i]);
    for (Eigen::Index i = 0; i < d; ++i) os << ',' << fmt(it.x[i]);
    for (Eigen::Index i = 0; i < n; ++i) os << ',' << fmt(it.lambda[i]);
    os << '\n';
  }
  write_text(path, os.str());
}

std::vector<AdmmIterate> read_iterates_csv(const std::filesystem::path& path,
                                           int n, int d) {
  if (n < 1 || d < 1)
    throw InvalidInputError("iterates csv: dimensions must be >= 1");
  const std::string content = read_text(path);
  std::istringstream in(content);
  std::string line;
  if (!std::getline(in, line)) throw IoError("iterates csv: empty file");

  const std::size_t expected = 1 + 2 * static_cast<std::size_t>(n) +
                               static_cast<std::size_t>(d);
  std::vector<AdmmIterate> iterates;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream row(line);
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != expected)
      throw IoError("iterates csv: row has " + std::to_string(fields.size()) +
                    " fields, expected " + std::to_string(expected));
    AdmmIterate it;
    try {
      std::size_t f = 0;
      it.k = std::stoi(fields[f++]);
      it.z.resize(n);
      for (int i = 0; i < n; ++i) it.z[i] = std::stod(fields[f++]);
      it.x.resize(d);
      for (int i = 0; i < d; ++i) it.x[i] = std::stod(fields[f++]);
      it.lambda.resize(n);
      for (int i = 0; i < n; ++i) it.lambda[i] = std::stod(fields[f++]);
    } catch (const std::exception&) {
      throw IoError("iterates csv: malformed numeric field");
    }
    iterates.push_back(std::move(it));
  }
  if (iterates.empty()) throw IoError("iterates csv: no data rows");
  return iterates;
}

}  // namespace alasso::io
