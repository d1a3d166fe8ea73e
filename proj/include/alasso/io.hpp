#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>

#include "alasso/certify.hpp"
#include "alasso/problem.hpp"
#include "alasso/solver.hpp"

namespace alasso::io {

using nlohmann::json;

inline constexpr const char* kFrameSchema = "alasso.frame/1";
inline constexpr const char* kInstanceSchema = "alasso.instance/1";
inline constexpr const char* kTraceSchema = "alasso.trace/1";
inline constexpr const char* kReportSchema = "alasso.report/1";
inline constexpr const char* kSummarySchema = "alasso.summary/1";
inline constexpr const char* kExperimentSchema = "alasso.experiment/1";
inline constexpr const char* kSweepSchema = "alasso.sweep/1";

// Matrices serialize as row-major nested arrays; vectors as flat arrays;
// index sets are 0-based.
json frame_to_json(const TightFrame& frame);
TightFrame frame_from_json(const json& j);

json instance_to_json(const ProblemInstance& instance);
ProblemInstance instance_from_json(const json& j);

json solver_config_to_json(const SolverConfig& config);
SolverConfig solver_config_from_json(const json& j);

json report_to_json(const CertificationReport& report);

// FNV-1a 64-bit hash (hex) of the canonical serialized instance.
std::string fingerprint(const ProblemInstance& instance);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& content);
json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);

// trace.csv: k, primal_residual, dual_residual, objective, h_dist_to_ref
// (last column blank when no reference distance is known for that k).
void write_trace_csv(const std::filesystem::path& path, const SolverTrace& trace,
                     const std::vector<double>& h_dist);

// margins.csv: k, contraction_margin, domination_slack, domination_cross,
// h_dist (contraction/h_dist columns blank without a reference).
void write_margins_csv(const std::filesystem::path& path,
                       const CertificationReport& report);

// iterates.csv: full iterate dump (k, z..., x..., lambda...), printed with
// round-trip precision.
void write_iterates_csv(const std::filesystem::path& path,
                        const SolverTrace& trace);
std::vector<AdmmIterate> read_iterates_csv(const std::filesystem::path& path,
                                           int n, int d);

}  // namespace alasso::io
