#pragma once

#include <optional>
#include <string>
#include <vector>

#include "alasso/solver.hpp"
#include "alasso/vi.hpp"

namespace alasso {

// Weighted metric on v = (lambda, x):
//   ||v||_H^2 = (1/beta) ||lambda||^2 + beta x^T G x
// with G = I when the frame is certified tight (reduced form) and
// G = D^T D otherwise.
struct HMetric {
  double beta = 1.0;
  bool reduced = true;
  Matrix gram;  // D^T D, used when !reduced

  static HMetric for_instance(const ProblemInstance& instance, double beta,
                              double tight_tol = 1e-9);
  double norm_sq(const Vector& dlambda, const Vector& dx) const;
};

// Reduced-form convenience: (1/beta)||dlambda||^2 + beta ||dx||^2.
double h_norm_sq(const Vector& dlambda, const Vector& dx, double beta);

// Every inequality gate uses  margin >= -(abs + rel * (1 + scale))  with a
// check-specific relative factor and a scale built from the dominant terms.
struct Tolerances {
  double abs = 1e-10;
  double contraction_rel = 1e-7;   // scale: ||v^0 - v*||_H^2
  double monotonicity_abs = 1e-9;  // absolute slack on distance decrease
  double domination_rel = 1e-8;    // per-step residual-domination margins
  double identity_rel = 1e-8;      // telescoping-identity defect
  double probe_rel = 1e-7;         // probe-inequality slack
  double skew_rel = 1e-10;         // skew defect vs 1 + ||omega - omega_bar||^2
  double ergodic_rel = 1e-7;       // averaged-gap bound
  double summability_rel = 1e-6;   // summed squared steps vs initial distance
  double scaling_rel = 1e-12;      // exact 1/(t+1) scaling of the ergodic bound
};

// ---- Per-step distance contraction --------------------------------------

struct ContractionRecord {
  int k = 0;
  double lhs = 0.0;      // ||v^{k+1} - v*||_H^2
  double rhs = 0.0;      // ||v^k - v*||_H^2 - ||v^k - v^{k+1}||_H^2
  double margin = 0.0;   // rhs - lhs
  double step_sq = 0.0;  // ||v^k - v^{k+1}||_H^2
  double dist_sq = 0.0;  // ||v^k - v*||_H^2
};

struct ContractionResult {
  std::vector<ContractionRecord> records;  // k = 0 .. iters_run-1
  // Strict margins are gated from k = 1: the k = 0 step leaves the arbitrary
  // initial x^0, which the per-step bound's hypothesis excludes (its record
  // is kept for inspection).  Distance monotonicity holds and is gated at
  // every k.
  bool strict_pass = false;
  bool monotone_pass = false;
  double worst_margin = 0.0;    // over k >= 1
  double worst_monotone = 0.0;  // min over all k of dist_k - dist_{k+1}
  double scale = 0.0;           // ||v^0 - v*||_H^2
};

ContractionResult check_contraction(const SolverTrace& trace,
                                    const ProblemInstance& instance,
                                    const ViPoint& reference,
                                    const Tolerances& tol = {});

// ---- Summability of squared steps ---------------------------------------

struct SummabilityResult {
  double sum = 0.0;                // sum over k >= 1 of ||v^k - v^{k+1}||_H^2
  double bound = 0.0;              // ||v^0 - v*||_H^2
  double initial_step_sq = 0.0;    // ||v^0 - v^1||_H^2 (recorded, not summed)
  double first_window_max = 0.0;   // max step over the first quarter (k >= 1)
  double last_window_max = 0.0;    // max step over the last quarter
  bool pass = false;
  bool decay_pass = false;         // last_window_max < first_window_max
};

// The k = 0 step is excluded from the sum for the same initialization reason
// as the strict contraction gate; the stated bound then telescopes cleanly.
SummabilityResult check_summability(const SolverTrace& trace,
                                    const ProblemInstance& instance,
                                    const ViPoint& reference,
                                    const Tolerances& tol = {});

// ---- Per-step residual domination ---------------------------------------

struct DominationRecord {
  int k = 0;
  double slack = 0.0;  // beta||Dx^k - z^{k+1}||^2 - beta||D(x^k - x^{k+1})||^2
                       //   - (1/beta)||lambda^k - lambda^{k+1}||^2
  double cross = 0.0;  // (lambda^k - lambda^{k+1})^T D (x^k - x^{k+1})
  double expansion_defect = 0.0;  // |slack - 2 * cross|
  double scale = 0.0;             // sum of the constituent magnitudes
};

struct DominationResult {
  std::vector<DominationRecord> records;  // k = 0 .. iters_run-1
  bool inequality_pass = false;  // slack, cross >= -tol for k >= 1
  bool identity_pass = false;    // slack = 2 * cross at every k (pure algebra)
  double worst_slack = 0.0;      // over k >= 1
  double worst_cross = 0.0;      // over k >= 1
  double worst_identity = 0.0;   // max scaled expansion defect, all k
};

DominationResult check_residual_domination(const SolverTrace& trace,
                                           const ProblemInstance& instance,
                                           const Tolerances& tol = {});

// ---- Telescoping identity ------------------------------------------------

struct IdentityResult {
  double max_defect = 0.0;         // max_k |lhs_k - rhs_k| for this probe
  double max_scaled_defect = 0.0;  // defect / (abs + rel (1 + scale))
  bool pass = false;
};

// Checks, at every step k and for the probe's (z, lambda) blocks, that the
// bilinear cross terms of the probe inequality equal their telescoped
// closed form:
//   beta (z - z^{k+1})^T D(x^k - x^{k+1})
//     + (1/beta)(lambda - lambda^{k+1})^T (lambda^k - lambda^{k+1})
//   = (1/(2beta)) (||lambda^{k+1} - lambda||^2 - ||lambda^k - lambda||^2)
//     + (beta/2) (||Dx^{k+1} - z||^2 - ||Dx^k - z||^2)
//     + (beta/2) ||Dx^k - z^{k+1}||^2 .
IdentityResult check_telescoping_identity(const SolverTrace& trace,
                                          const ProblemInstance& instance,
                                          const ViPoint& probe,
                                          const Tolerances& tol = {});

// ---- Probe inequality (one-step variational bound) -----------------------

struct ProbeInequalityResult {
  double min_slack = 0.0;         // worst raw slack over sampled (k, probe)
  double min_scaled_slack = 0.0;  // slack / (abs + rel (1 + scale))
  int evaluations = 0;
  bool pass = false;
};

// For sampled steps k and seeded probes omega, checks
//   theta(u) - theta(u^{k+1}) + (omega - omega^{k+1})^T F(omega)
//     >= beta (z - z^{k+1})^T D(x^k - x^{k+1})
//        + (1/beta)(lambda - lambda^{k+1})^T (lambda^k - lambda^{k+1}) .
ProbeInequalityResult check_probe_inequality(const SolverTrace& trace,
                                             const ProblemInstance& instance,
                                             const std::vector<int>& ks,
                                             int probes_per_k,
                                             std::uint64_t probe_seed,
                                             const Tolerances& tol = {});

// ---- Ergodic averaged-gap bound -----------------------------------------

struct ErgodicRecord {
  int t = 0;
  double gap = 0.0;    // theta(u^t) - theta(u) + (omega^t - omega)^T F(omega)
  double bound = 0.0;  // (1/(2(t+1))) [ (1/beta)||lambda^0 - lambda||^2
                       //                + beta ||D x^0 - z||^2 ]
  double ratio = 0.0;  // gap * 2(t+1) / initial quantity (0 when both are 0)
};

struct ErgodicResult {
  std::vector<ErgodicRecord> records;
  bool pass = false;          // gap <= bound + tol at every t
  bool scaling_pass = false;  // bound * (t+1) constant across t to scaling_rel
  double worst_excess = 0.0;  // max over t of gap - bound
};

// Mean of iterates 1 .. t+1 (the k-th update outputs, k = 0..t).
ViPoint ergodic_average(const SolverTrace& trace, int t);

ErgodicResult check_ergodic_rate(const SolverTrace& trace,
                                 const ProblemInstance& instance,
                                 const ViPoint& probe,
                                 const std::vector<int>& t_list,
                                 const Tolerances& tol = {});

// ---- Full certification --------------------------------------------------

struct CheckSummary {
  std::string name;
  bool ran = false;      // false => skipped
  bool pass = false;
  double worst = 0.0;    // check-specific worst margin or defect
  std::string note;      // skip reason or context
};

struct CertifyConfig {
  std::vector<int> t_list{10, 100};
  int probe_count = 20;
  std::uint64_t probe_seed = 2026;
  Tolerances tol;
  // Externally certified saddle point; absent => distance-based checks are
  // skipped (with reference_note as the reason), never failed.
  std::optional<ViPoint> reference;
  std::string reference_note;
};

struct CertificationReport {
  std::string instance_ref;
  double beta = 1.0;
  int iters = 0;
  bool frame_tight = false;
  bool h_reduced = false;
  bool reference_available = false;
  std::string reference_note;

  ContractionResult contraction;    // meaningful when reference_available
  SummabilityResult summability;    // meaningful when reference_available
  DominationResult domination;
  double identity_worst_scaled = 0.0;
  bool identity_pass = false;
  ProbeInequalityResult probe_inequality;
  double skew_worst_scaled = 0.0;
  bool skew_pass = false;
  ErgodicResult ergodic;
  KktResiduals final_kkt;
  std::vector<double> h_dist;       // per k, ||v^k - v*||_H (empty without ref)

  Tolerances tol;
  std::vector<CheckSummary> checks;
  bool overall_pass = false;        // all non-skipped checks pass
  double worst_margin = 0.0;        // min signed margin across inequality checks
  std::string notes;
};

// Runs every certificate against a stride-1 trace: per-step domination and
// its expansion identity, the telescoping identity and probe inequality over
// seeded probes, skew spot checks, the ergodic bound, and - when a certified
// reference is supplied - distance contraction, monotonicity, and step
// summability.
CertificationReport certify_all(const SolverTrace& trace,
                                const ProblemInstance& instance,
                                const CertifyConfig& config);

// Steps {0, 1, 2, 4, 8, ...} capped at last, plus last itself.
std::vector<int> sampled_steps(int last);

}  // namespace alasso
