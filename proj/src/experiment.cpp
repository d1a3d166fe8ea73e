#include "alasso/experiment.hpp"

#include <chrono>
#include <iomanip>
#include <sstream>

#include "alasso/errors.hpp"

namespace alasso {

namespace {

using io::json;

void set_if(const json& j, const char* key, double& out) {
  if (j.contains(key) && !j[key].is_null()) out = j[key].get<double>();
}

void set_if(const json& j, const char* key, int& out) {
  if (j.contains(key) && !j[key].is_null()) out = j[key].get<int>();
}

void set_if(const json& j, const char* key, bool& out) {
  if (j.contains(key) && !j[key].is_null()) out = j[key].get<bool>();
}

void set_if(const json& j, const char* key, std::uint64_t& out) {
  if (j.contains(key) && !j[key].is_null()) out = j[key].get<std::uint64_t>();
}

json tolerances_json(const Tolerances& t) {
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

Tolerances tolerances_from_json(const json& j, Tolerances base) {
  set_if(j, "abs", base.abs);
  set_if(j, "contraction_rel", base.contraction_rel);
  set_if(j, "monotonicity_abs", base.monotonicity_abs);
  set_if(j, "domination_rel", base.domination_rel);
  set_if(j, "identity_rel", base.identity_rel);
  set_if(j, "probe_rel", base.probe_rel);
  set_if(j, "skew_rel", base.skew_rel);
  set_if(j, "ergodic_rel", base.ergodic_rel);
  set_if(j, "summability_rel", base.summability_rel);
  set_if(j, "scaling_rel", base.scaling_rel);
  return base;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

ExperimentConfig experiment_config_from_json(const json& j) {
  if (!j.is_object() || !j.contains("schema") ||
      j["schema"] != io::kExperimentSchema)
    throw IoError(std::string("experiment config: expected schema tag \"") +
                  io::kExperimentSchema + '"');

  ExperimentConfig config;
  set_if(j, "master_seed", config.master_seed);
  if (j.contains("instance")) {
    const json& inst = j["instance"];
    set_if(inst, "d", config.instance.d);
    set_if(inst, "m", config.instance.m);
    set_if(inst, "k", config.instance.k);
    set_if(inst, "ell", config.instance.ell);
    if (inst.contains("alpha") && !inst["alpha"].is_null())
      config.instance.alpha = inst["alpha"].get<double>();
    set_if(inst, "noise_sigma", config.instance.noise_sigma);
  }
  if (j.contains("solver"))
    config.solver = io::solver_config_from_json(j["solver"]);
  if (j.contains("certify")) {
    const json& cert = j["certify"];
    if (cert.contains("t_list")) {
      config.t_list.clear();
      for (const json& t : cert["t_list"]) config.t_list.push_back(t.get<int>());
    }
    set_if(cert, "probe_count", config.probe_count);
    set_if(cert, "probe_seed", config.probe_seed);
    if (cert.contains("tolerances"))
      config.tol = tolerances_from_json(cert["tolerances"], config.tol);
  }
  if (j.contains("reference")) {
    const json& ref = j["reference"];
    set_if(ref, "primal_tol", config.reference.primal_tol);
    set_if(ref, "dual_tol", config.reference.dual_tol);
    set_if(ref, "max_iters", config.reference.max_iters);
    set_if(ref, "kkt_gate", config.reference.kkt_gate);
  }
  if (j.contains("output_dir") && !j["output_dir"].is_null())
    config.output_dir = j["output_dir"].get<std::string>();
  set_if(j, "emit_full_iterates", config.emit_full_iterates);
  return config;
}

json experiment_config_to_json(const ExperimentConfig& config) {
  json j;
  j["schema"] = io::kExperimentSchema;
  j["master_seed"] = config.master_seed;
  j["instance"] = {{"d", config.instance.d},
                   {"m", config.instance.m},
                   {"k", config.instance.k},
                   {"ell", config.instance.ell},
                   {"alpha", config.instance.alpha
                                 ? json(*config.instance.alpha)
                                 : json(nullptr)},
                   {"noise_sigma", config.instance.noise_sigma}};
  j["solver"] = io::solver_config_to_json(config.solver);
  j["certify"] = {{"t_list", config.t_list},
                  {"probe_count", config.probe_count},
                  {"probe_seed", config.probe_seed},
                  {"tolerances", tolerances_json(config.tol)}};
  j["reference"] = {{"primal_tol", config.reference.primal_tol},
                    {"dual_tol", config.reference.dual_tol},
                    {"max_iters", config.reference.max_iters},
                    {"kkt_gate", config.reference.kkt_gate}};
  j["output_dir"] = config.output_dir;
  j["emit_full_iterates"] = config.emit_full_iterates;
  return j;
}

json summary_to_json(const RunSummary& summary) {
  json j;
  j["schema"] = io::kSummarySchema;
  j["output_dir"] = summary.output_dir;
  j["fingerprint"] = summary.fingerprint;
  j["converged"] = summary.converged;
  j["iters_run"] = summary.iters_run;
  j["final_primal"] = summary.final_primal;
  j["final_dual"] = summary.final_dual;
  j["reference_certified"] = summary.reference_certified;
  j["reference_kkt"] = summary.reference_kkt;
  j["overall_pass"] = summary.overall_pass;
  j["worst_margin"] = summary.worst_margin;
  j["duration_ms"] = summary.duration_ms;
  j["error"] = summary.error;
  return j;
}

RunSummary run_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  if (config.output_dir.empty())
    throw InvalidInputError("experiment config needs a non-empty output_dir");
  const std::filesystem::path dir(config.output_dir);
  std::filesystem::create_directories(dir);

  const ProblemInstance instance =
      generate_instance(config.instance, config.master_seed);

  SolverConfig solver_config = config.solver;
  solver_config.record_every = 1;  // the certifier replays every step
  const SolverTrace trace = solve(instance, solver_config);

  const Reference reference =
      reference_solution(instance, solver_config.beta, config.reference);

  CertifyConfig certify_config;
  certify_config.t_list = config.t_list;
  certify_config.probe_count = config.probe_count;
  certify_config.probe_seed = config.probe_seed;
  certify_config.tol = config.tol;
  if (reference.certified) {
    certify_config.reference = to_point(reference.point);
    certify_config.reference_note =
        "high-accuracy run, optimality residual " + fmt(reference.kkt.max());
  } else {
    certify_config.reference_note =
        "reference run not certified (optimality residual " +
        fmt(reference.kkt.max()) + ", converged = " +
        (reference.converged ? "true" : "false") + ")";
  }
  const CertificationReport report = certify_all(trace, instance, certify_config);

  RunSummary summary;
  summary.output_dir = dir.string();
  summary.fingerprint = trace.instance_ref;
  summary.converged = trace.converged;
  summary.iters_run = trace.iters_run;
  summary.final_primal = trace.primal_residuals.back();
  summary.final_dual = trace.dual_residuals.back();
  summary.reference_certified = reference.certified;
  summary.reference_kkt = reference.kkt.max();
  summary.overall_pass = report.overall_pass;
  summary.worst_margin = report.worst_margin;

  io::write_json(dir / "instance.json", io::instance_to_json(instance));
  io::write_trace_csv(dir / "trace.csv", trace, report.h_dist);
  json trace_json;
  trace_json["schema"] = io::kTraceSchema;
  trace_json["instance_ref"] = trace.instance_ref;
  trace_json["solver"] = io::solver_config_to_json(solver_config);
  trace_json["converged"] = trace.converged;
  trace_json["iters_run"] = trace.iters_run;
  trace_json["max_x_solve_rel_residual"] = trace.max_x_solve_rel_residual;
  {
    const AdmmIterate& last = trace.iterates.back();
    json final_state;
    final_state["k"] = last.k;
    final_state["z"] = std::vector<double>(last.z.data(),
                                           last.z.data() + last.z.size());
    final_state["x"] = std::vector<double>(last.x.data(),
                                           last.x.data() + last.x.size());
    final_state["lambda"] = std::vector<double>(
        last.lambda.data(), last.lambda.data() + last.lambda.size());
    trace_json["final_iterate"] = std::move(final_state);
  }
  trace_json["certify"] = {{"t_list", config.t_list},
                           {"probe_count", config.probe_count},
                           {"probe_seed", config.probe_seed},
                           {"tolerances", tolerances_json(config.tol)}};
  trace_json["reference_options"] = {
      {"primal_tol", config.reference.primal_tol},
      {"dual_tol", config.reference.dual_tol},
      {"max_iters", config.reference.max_iters},
      {"kkt_gate", config.reference.kkt_gate}};
  io::write_json(dir / "trace.json", trace_json);
  io::write_json(dir / "report.json", io::report_to_json(report));
  io::write_margins_csv(dir / "margins.csv", report);
  if (config.emit_full_iterates)
    io::write_iterates_csv(dir / "iterates.csv", trace);

  summary.duration_ms = elapsed_ms(start);
  io::write_json(dir / "summary.json", summary_to_json(summary));
  return summary;
}

RunSummary certify_directory(const std::filesystem::path& dir) {
  const auto start = std::chrono::steady_clock::now();
  const ProblemInstance instance =
      io::instance_from_json(io::read_json(dir / "instance.json"));
  const json trace_json = io::read_json(dir / "trace.json");
  if (!trace_json.contains("schema") || trace_json["schema"] != io::kTraceSchema)
    throw IoError("trace.json: expected schema tag \"" +
                  std::string(io::kTraceSchema) + '"');
  if (!std::filesystem::exists(dir / "iterates.csv"))
    throw InsufficientTraceError(
        "certify_directory needs iterates.csv (run with emit_full_iterates)");

  SolverTrace trace;
  trace.instance_ref = io::fingerprint(instance);
  trace.config = io::solver_config_from_json(trace_json.at("solver"));
  trace.converged = trace_json.value("converged", false);
  trace.iterates = io::read_iterates_csv(
      dir / "iterates.csv", instance.analysis_dim(), instance.signal_dim());
  trace.iters_run = static_cast<int>(trace.iterates.size()) - 1;
  trace.config.record_every = 1;
  for (std::size_t k = 0; k < trace.iterates.size(); ++k)
    if (trace.iterates[k].k != static_cast<int>(k))
      throw InsufficientTraceError(
          "iterates.csv is not a stride-1 record of every step");

  const Matrix& D = instance.D.entries;
  const XUpdateCache cache(instance, trace.config.beta);
  for (std::size_t k = 0; k < trace.iterates.size(); ++k) {
    const AdmmIterate& it = trace.iterates[k];
    trace.primal_residuals.push_back((D * it.x - it.z).norm());
    trace.dual_residuals.push_back(
        k == 0 ? 0.0
               : trace.config.beta *
                     (D.transpose() * (it.z - trace.iterates[k - 1].z)).norm());
    trace.objective_values.push_back(theta(it.z, it.x, instance));
    if (k >= 1) {
      const AdmmIterate& prev = trace.iterates[k - 1];
      const Vector rhs =
          instance.alpha * (instance.M.transpose() * instance.y) +
          D.transpose() * (prev.lambda + trace.config.beta * it.z);
      const double rel = (cache.lhs() * it.x - rhs).norm() / (1.0 + rhs.norm());
      trace.max_x_solve_rel_residual =
          std::max(trace.max_x_solve_rel_residual, rel);
    }
  }

  ReferenceOptions ref_options;
  if (trace_json.contains("reference_options")) {
    const json& ref = trace_json["reference_options"];
    set_if(ref, "primal_tol", ref_options.primal_tol);
    set_if(ref, "dual_tol", ref_options.dual_tol);
    set_if(ref, "max_iters", ref_options.max_iters);
    set_if(ref, "kkt_gate", ref_options.kkt_gate);
  }
  const Reference reference =
      reference_solution(instance, trace.config.beta, ref_options);

  CertifyConfig certify_config;
  if (trace_json.contains("certify")) {
    const json& cert = trace_json["certify"];
    if (cert.contains("t_list")) {
      certify_config.t_list.clear();
      for (const json& t : cert["t_list"])
        certify_config.t_list.push_back(t.get<int>());
    }
    set_if(cert, "probe_count", certify_config.probe_count);
    set_if(cert, "probe_seed", certify_config.probe_seed);
    if (cert.contains("tolerances"))
      certify_config.tol =
          tolerances_from_json(cert["tolerances"], certify_config.tol);
  }
  if (reference.certified) {
    certify_config.reference = to_point(reference.point);
    certify_config.reference_note =
        "high-accuracy run, optimality residual " + fmt(reference.kkt.max());
  } else {
    certify_config.reference_note =
        "reference run not certified (optimality residual " +
        fmt(reference.kkt.max()) + ")";
  }
  const CertificationReport report = certify_all(trace, instance, certify_config);

  RunSummary summary;
  summary.output_dir = dir.string();
  summary.fingerprint = trace.instance_ref;
  summary.converged = trace.converged;
  summary.iters_run = trace.iters_run;
  summary.final_primal = trace.primal_residuals.back();
  summary.final_dual = trace.dual_residuals.back();
  summary.reference_certified = reference.certified;
  summary.reference_kkt = reference.kkt.max();
  summary.overall_pass = report.overall_pass;
  summary.worst_margin = report.worst_margin;
  summary.duration_ms = elapsed_ms(start);

  io::write_json(dir / "report.json", io::report_to_json(report));
  io::write_margins_csv(dir / "margins.csv", report);
  io::write_json(dir / "summary.json", summary_to_json(summary));
  return summary;
}

namespace {

void set_dotted(json& j, const std::string& dotted, const json& value) {
  json* node = &j;
  std::size_t begin = 0;
  while (true) {
    const std::size_t dot = dotted.find('.', begin);
    const std::string key = dotted.substr(
        begin, dot == std::string::npos ? std::string::npos : dot - begin);
    if (key.empty())
      throw InvalidInputError("sweep grid: empty path segment in \"" + dotted +
                              '"');
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    begin = dot + 1;
  }
}

std::string run_dir_name(std::size_t index) {
  std::ostringstream os;
  os << "run_" << std::setw(4) << std::setfill('0') << index;
  return os.str();
}

}  // namespace

std::vector<RunSummary> run_sweep(const json& grid_spec,
                                  const std::string& output_dir_override) {
  if (!grid_spec.is_object() || !grid_spec.contains("schema") ||
      grid_spec["schema"] != io::kSweepSchema)
    throw IoError(std::string("sweep grid: expected schema tag \"") +
                  io::kSweepSchema + '"');

  std::string sweep_dir = output_dir_override;
  if (sweep_dir.empty() && grid_spec.contains("output_dir") &&
      !grid_spec["output_dir"].is_null())
    sweep_dir = grid_spec["output_dir"].get<std::string>();
  if (sweep_dir.empty())
    throw InvalidInputError("sweep needs an output_dir (in the grid or --out)");

  std::vector<json> config_jsons;
  if (grid_spec.contains("configs")) {
    for (const json& c : grid_spec["configs"]) {
      json copy = c;
      if (!copy.contains("schema")) copy["schema"] = io::kExperimentSchema;
      config_jsons.push_back(std::move(copy));
    }
  } else if (grid_spec.contains("base") && grid_spec.contains("grid")) {
    json base = grid_spec["base"];
    if (!base.contains("schema")) base["schema"] = io::kExperimentSchema;
    const json& grid = grid_spec["grid"];
    if (!grid.is_object())
      throw InvalidInputError("sweep grid: \"grid\" must be an object");

    std::vector<std::string> keys;
    std::vector<const json*> values;
    for (auto it = grid.begin(); it != grid.end(); ++it) {
      if (!it.value().is_array() || it.value().empty())
        throw InvalidInputError("sweep grid: \"" + it.key() +
                                "\" must be a non-empty array");
      keys.push_back(it.key());
      values.push_back(&it.value());
    }
    if (keys.empty()) throw InvalidInputError("sweep grid: empty grid");

    const auto advance = [&values](std::vector<std::size_t>& odometer) {
      for (std::size_t i = odometer.size(); i-- > 0;) {
        if (++odometer[i] < values[i]->size()) return true;
        odometer[i] = 0;
      }
      return false;
    };
    std::vector<std::size_t> odometer(keys.size(), 0);
    do {
      json combo = base;
      for (std::size_t i = 0; i < keys.size(); ++i)
        set_dotted(combo, keys[i], (*values[i])[odometer[i]]);
      config_jsons.push_back(std::move(combo));
    } while (advance(odometer));
  } else {
    throw InvalidInputError(
        "sweep grid needs either \"configs\" or \"base\" + \"grid\"");
  }
  if (config_jsons.empty()) throw InvalidInputError("sweep grid: no runs");

  std::filesystem::create_directories(sweep_dir);
  std::vector<RunSummary> rows;
  std::ostringstream csv;
  csv << "run,master_seed,d,m,bases,ell,alpha,noise_sigma,beta,max_iters,"
         "fingerprint,converged,iters_run,final_primal,final_dual,"
         "reference_certified,reference_kkt,overall_pass,worst_margin,"
         "duration_ms,error\n";

  for (std::size_t i = 0; i < config_jsons.size(); ++i) {
    const std::filesystem::path run_dir =
        std::filesystem::path(sweep_dir) / run_dir_name(i);
    RunSummary row;
    ExperimentConfig config;
    bool parsed = false;
    try {
      config = experiment_config_from_json(config_jsons[i]);
      config.output_dir = run_dir.string();
      parsed = true;
      row = run_experiment(config);
    } catch (const std::exception& e) {
      row.output_dir = run_dir.string();
      row.error = e.what();
    }

    csv << i << ',';
    if (parsed) {
      csv << config.master_seed << ',' << config.instance.d << ','
          << config.instance.m << ',' << config.instance.k << ','
          << config.instance.ell << ',';
      if (config.instance.alpha) csv << fmt(*config.instance.alpha);
      csv << ',' << fmt(config.instance.noise_sigma) << ','
          << fmt(config.solver.beta) << ',' << config.solver.max_iters;
    } else {
      csv << ",,,,,,,,";
    }
    std::string safe_error = row.error;
    for (char& c : safe_error)
      if (c == ',' || c == '\n' || c == '\r') c = ';';
    csv << ',' << row.fingerprint << ',' << (row.converged ? 1 : 0) << ','
        << row.iters_run << ',' << fmt(row.final_primal) << ','
        << fmt(row.final_dual) << ',' << (row.reference_certified ? 1 : 0)
        << ',' << fmt(row.reference_kkt) << ',' << (row.overall_pass ? 1 : 0)
        << ',' << fmt(row.worst_margin) << ',' << fmt(row.duration_ms) << ','
        << safe_error << '\n';
    rows.push_back(std::move(row));
  }

  io::write_text(std::filesystem::path(sweep_dir) / "summary.csv", csv.str());
  return rows;
}

}  // namespace alasso
