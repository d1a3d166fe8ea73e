#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "alasso/certify.hpp"
#include "alasso/io.hpp"
#include "alasso/problem.hpp"
#include "alasso/solver.hpp"

namespace alasso {

// One end-to-end unit of work: generate (or load) an instance, run the
// solver, certify the trace, and write artifacts.
struct ExperimentConfig {
  std::uint64_t master_seed = 0;
  InstanceSpec instance;
  SolverConfig solver;
  std::vector<int> t_list{10, 100};
  int probe_count = 20;
  std::uint64_t probe_seed = 2026;
  Tolerances tol;
  ReferenceOptions reference;
  std::string output_dir;
  bool emit_full_iterates = false;
};

ExperimentConfig experiment_config_from_json(const io::json& j);
io::json experiment_config_to_json(const ExperimentConfig& config);

struct RunSummary {
  std::string output_dir;
  std::string fingerprint;
  bool converged = false;
  int iters_run = 0;
  double final_primal = 0.0;
  double final_dual = 0.0;
  bool reference_certified = false;
  double reference_kkt = 0.0;
  bool overall_pass = false;
  double worst_margin = 0.0;
  double duration_ms = 0.0;
  std::string error;  // set only by sweep rows that failed
};

io::json summary_to_json(const RunSummary& summary);

// Writes instance.json, trace.csv, trace.json (config + final iterate),
// report.json, margins.csv, summary.json, and optionally iterates.csv into
// config.output_dir.
RunSummary run_experiment(const ExperimentConfig& config);

// Re-certifies a stored run directory (requires iterates.csv; rewrites
// report.json, margins.csv, and summary.json).
RunSummary certify_directory(const std::filesystem::path& dir);

// Grid spec: {"schema": "alasso.sweep/1", "output_dir": ...,
//             "base": <experiment config object>,
//             "grid": {"master_seed": [...], "solver.beta": [...], ...}}
// or an explicit {"configs": [<experiment config>, ...]} list.  Runs the
// cross product sequentially, one subdirectory per run, and writes an
// aggregate summary.csv.  A failing run is recorded in its row and does not
// abort the sweep.
std::vector<RunSummary> run_sweep(const io::json& grid_spec,
                                  const std::string& output_dir_override = "");

}  // namespace alasso
