#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>

#include "alasso/errors.hpp"
#include "alasso/experiment.hpp"
#include "alasso/frame.hpp"
#include "alasso/io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitStructural = 1;  // could not run
constexpr int kExitCertificates = 2;  // ran, but checks or runs failed

void print_summary(const alasso::RunSummary& summary) {
  std::printf("run %s\n", summary.output_dir.c_str());
  std::printf("  fingerprint          %s\n", summary.fingerprint.c_str());
  std::printf("  converged            %s after %d iterations\n",
              summary.converged ? "yes" : "no", summary.iters_run);
  std::printf("  final residuals      primal %.3e  dual %.3e\n",
              summary.final_primal, summary.final_dual);
  std::printf("  reference            %s (optimality residual %.3e)\n",
              summary.reference_certified ? "certified" : "NOT certified",
              summary.reference_kkt);
  std::printf("  certificates         %s (worst margin %.3e)\n",
              summary.overall_pass ? "PASS" : "FAIL", summary.worst_margin);
  std::printf("  duration             %.1f ms\n", summary.duration_ms);
}

int do_run(const std::string& config_path, const std::string& out_override) {
  alasso::ExperimentConfig config = alasso::experiment_config_from_json(
      alasso::io::read_json(config_path));
  if (!out_override.empty()) config.output_dir = out_override;
  const alasso::RunSummary summary = alasso::run_experiment(config);
  print_summary(summary);
  return summary.overall_pass ? kExitOk : kExitCertificates;
}

int do_sweep(const std::string& grid_path, const std::string& out_override) {
  const std::vector<alasso::RunSummary> rows =
      alasso::run_sweep(alasso::io::read_json(grid_path), out_override);
  int failed = 0;
  int errored = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const alasso::RunSummary& row = rows[i];
    if (!row.error.empty()) {
      ++errored;
      std::printf("run %04zu  ERROR  %s\n", i, row.error.c_str());
    } else {
      if (!row.overall_pass) ++failed;
      std::printf("run %04zu  %s  iters %d  worst margin %.3e\n", i,
                  row.overall_pass ? "pass" : "FAIL", row.iters_run,
                  row.worst_margin);
    }
  }
  std::printf("sweep: %zu runs, %d certificate failures, %d errors\n",
              rows.size(), failed, errored);
  return (failed == 0 && errored == 0) ? kExitOk : kExitCertificates;
}

int do_validate_frame(const std::string& in_path, double tol) {
  const alasso::io::json j = alasso::io::read_json(in_path);
  const alasso::io::json* entries = nullptr;
  if (j.is_array()) {
    entries = &j;
  } else if (j.is_object() && j.contains("entries")) {
    entries = &j.at("entries");
  } else {
    throw alasso::IoError(
        "expected a nested array of rows or an object with an \"entries\" "
        "field");
  }
  if (!entries->is_array() || entries->empty() ||
      !entries->front().is_array() || entries->front().empty())
    throw alasso::IoError("entries must be a non-empty nested array");
  const auto rows = static_cast<Eigen::Index>(entries->size());
  const auto cols = static_cast<Eigen::Index>(entries->front().size());
  alasso::Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const alasso::io::json& row = (*entries)[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw alasso::IoError("entries has ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }

  const alasso::FrameReport report = alasso::validate_frame(m, tol);
  std::printf("frame %lld x %lld\n", static_cast<long long>(rows),
              static_cast<long long>(cols));
  std::printf("  bounds               [%.12g, %.12g]\n", report.lower_bound,
              report.upper_bound);
  std::printf("  tight                %s\n", report.is_tight ? "yes" : "no");
  std::printf("  uniform row norms    %s (spread %.3e)\n",
              report.is_uniform_row_norm ? "yes" : "no",
              report.row_norm_spread);
  std::printf("  gram deviation       %.3e\n", report.max_gram_deviation);
  const bool is_frame = report.lower_bound > tol;
  std::printf("  verdict              %s\n",
              is_frame ? "valid frame" : "NOT a frame (rank deficient)");
  return is_frame ? kExitOk : kExitCertificates;
}

int do_certify(const std::string& trace_dir) {
  const alasso::RunSummary summary =
      alasso::certify_directory(std::filesystem::path(trace_dir));
  print_summary(summary);
  return summary.overall_pass ? kExitOk : kExitCertificates;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "alasso: cosparse analysis-regularized least squares via operator "
      "splitting, with numerical certification of the solver's convergence "
      "inequalities"};
  app.require_subcommand(1);

  std::string config_path;
  std::string grid_path;
  std::string frame_path;
  std::string trace_dir;
  std::string out_override;
  double frame_tol = 1e-9;

  CLI::App* run = app.add_subcommand(
      "run", "Generate an instance, solve it, certify the trace, and write "
             "instance.json / trace.csv / report.json / summary.json");
  run->add_option("--config", config_path, "experiment config JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--out", out_override,
                  "output directory (overrides the config's output_dir)");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "Run a grid or list of experiment configs and write an "
               "aggregate summary.csv");
  sweep->add_option("--grid", grid_path, "sweep grid JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  sweep->add_option("--out", out_override,
                    "sweep output directory (overrides the grid's output_dir)");

  CLI::App* validate = app.add_subcommand(
      "validate-frame", "Report frame bounds, tightness, and row-norm "
                        "uniformity of an analysis operator");
  validate->add_option("--in", frame_path,
                       "frame JSON (an object with \"entries\" or a nested "
                       "array of rows)")
      ->required()
      ->check(CLI::ExistingFile);
  validate->add_option("--tol", frame_tol,
                       "tightness/uniformity tolerance (default 1e-9)");

  CLI::App* certify = app.add_subcommand(
      "certify", "Re-certify a stored run directory from its iterates.csv, "
                 "rewriting report.json and summary.json");
  certify->add_option("--trace", trace_dir, "run directory to re-certify")
      ->required()
      ->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Fold CLI11's internal exit codes into the documented contract:
    // anything malformed on the command line is a structural error.
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitStructural;
  }

  try {
    if (run->parsed()) return do_run(config_path, out_override);
    if (sweep->parsed()) return do_sweep(grid_path, out_override);
    if (validate->parsed()) return do_validate_frame(frame_path, frame_tol);
    if (certify->parsed()) return do_certify(trace_dir);
  } catch (const alasso::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitStructural;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return kExitStructural;
  }
  return kExitStructural;
}
