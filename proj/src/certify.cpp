#include "alasso/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "alasso/errors.hpp"
#include "alasso/rng.hpp"

namespace alasso {

namespace {

void require_stride_one(const SolverTrace& trace, const char* who) {
  if (!trace.stride_one())
    throw InsufficientTraceError(std::string(who) +
                                 ": requires a stride-1 trace with every "
                                 "iterate recorded");
}

double beta_of(const SolverTrace& trace) { return trace.config.beta; }

// Signed slack normalized by its gate: >= -1 means pass.
double scaled(double margin, double abs_tol, double rel_tol, double scale) {
  return margin / (abs_tol + rel_tol * (1.0 + scale));
}

}  // namespace

HMetric HMetric::for_instance(const ProblemInstance& instance, double beta,
                              double tight_tol) {
  if (!(beta > 0)) throw InvalidInputError("beta must be > 0");
  HMetric h;
  h.beta = beta;
  const FrameReport report = validate_frame(instance.D, tight_tol);
  h.reduced = report.max_gram_deviation <= tight_tol;
  if (!h.reduced)
    h.gram = instance.D.entries.transpose() * instance.D.entries;
  return h;
}

double HMetric::norm_sq(const Vector& dlambda, const Vector& dx) const {
  const double lambda_part = dlambda.squaredNorm() / beta;
  if (reduced) return lambda_part + beta * dx.squaredNorm();
  return lambda_part + beta * dx.dot(gram * dx);
}

double h_norm_sq(const Vector& dlambda, const Vector& dx, double beta) {
  if (!(beta > 0)) throw InvalidInputError("beta must be > 0");
  return dlambda.squaredNorm() / beta + beta * dx.squaredNorm();
}

ContractionResult check_contraction(const SolverTrace& trace,
                                    const ProblemInstance& instance,
                                    const ViPoint& reference,
                                    const Tolerances& tol) {
  require_stride_one(trace, "check_contraction");
  const double beta = beta_of(trace);
  const HMetric h = HMetric::for_instance(instance, beta);

  const int steps = trace.iters_run;
  std::vector<double> dist(steps + 1);
  for (int k = 0; k <= steps; ++k) {
    const AdmmIterate& it = trace.iterates[static_cast<std::size_t>(k)];
    dist[k] = h.norm_sq(it.lambda - reference.lambda, it.x - reference.x);
  }

  ContractionResult result;
  result.scale = dist[0];
  result.strict_pass = true;
  result.monotone_pass = true;
  result.worst_margin = std::numeric_limits<double>::infinity();
  result.worst_monotone = std::numeric_limits<double>::infinity();

  const double strict_gate =
      tol.abs + tol.contraction_rel * (1.0 + result.scale);
  for (int k = 0; k < steps; ++k) {
    const AdmmIterate& cur = trace.iterates[static_cast<std::size_t>(k)];
    const AdmmIterate& next = trace.iterates[static_cast<std::size_t>(k) + 1];
    ContractionRecord rec;
    rec.k = k;
    rec.step_sq = h.norm_sq(cur.lambda - next.lambda, cur.x - next.x);
    rec.dist_sq = dist[k];
    rec.lhs = dist[k + 1];
    rec.rhs = dist[k] - rec.step_sq;
    rec.margin = rec.rhs - rec.lhs;
    result.records.push_back(rec);

    const double monotone = dist[k] - dist[k + 1];
    result.worst_monotone = std::min(result.worst_monotone, monotone);
    if (monotone < -tol.monotonicity_abs) result.monotone_pass = false;
    if (k >= 1) {
      result.worst_margin = std::min(result.worst_margin, rec.margin);
      if (rec.margin < -strict_gate) result.strict_pass = false;
    }
  }
  if (!std::isfinite(result.worst_margin)) result.worst_margin = 0.0;
  if (!std::isfinite(result.worst_monotone)) result.worst_monotone = 0.0;
  return result;
}

SummabilityResult check_summability(const SolverTrace& trace,
                                    const ProblemInstance& instance,
                                    const ViPoint& reference,
                                    const Tolerances& tol) {
  require_stride_one(trace, "check_summability");
  const double beta = beta_of(trace);
  const HMetric h = HMetric::for_instance(instance, beta);

  const int steps = trace.iters_run;
  std::vector<double> step_sq(steps);
  for (int k = 0; k < steps; ++k) {
    const AdmmIterate& cur = trace.iterates[static_cast<std::size_t>(k)];
    const AdmmIterate& next = trace.iterates[static_cast<std::size_t>(k) + 1];
    step_sq[k] = h.norm_sq(cur.lambda - next.lambda, cur.x - next.x);
  }

  SummabilityResult result;
  const AdmmIterate& start = trace.iterates.front();
  result.bound =
      h.norm_sq(start.lambda - reference.lambda, start.x - reference.x);
  result.initial_step_sq = steps > 0 ? step_sq[0] : 0.0;
  for (int k = 1; k < steps; ++k) result.sum += step_sq[k];
  result.pass =
      result.sum <= result.bound +
                        (tol.abs + tol.summability_rel * (1.0 + result.bound));

  const int tail = steps - 1;  // steps with k >= 1
  if (tail > 0) {
    const int window = std::max(1, (tail + 3) / 4);
    for (int k = 1; k < 1 + window; ++k)
      result.first_window_max = std::max(result.first_window_max, step_sq[k]);
    for (int k = steps - window; k < steps; ++k)
      result.last_window_max = std::max(result.last_window_max, step_sq[k]);
  }
  result.decay_pass = result.last_window_max <= result.first_window_max ||
                      result.last_window_max <= tol.abs;
  return result;
}

DominationResult check_residual_domination(const SolverTrace& trace,
                                           const ProblemInstance& instance,
                                           const Tolerances& tol) {
  require_stride_one(trace, "check_residual_domination");
  const double beta = beta_of(trace);
  const Matrix& D = instance.D.entries;

  DominationResult result;
  result.inequality_pass = true;
  result.identity_pass = true;
  result.worst_slack = std::numeric_limits<double>::infinity();
  result.worst_cross = std::numeric_limits<double>::infinity();

  for (int k = 0; k < trace.iters_run; ++k) {
    const AdmmIterate& cur = trace.iterates[static_cast<std::size_t>(k)];
    const AdmmIterate& next = trace.iterates[static_cast<std::size_t>(k) + 1];
    const Vector dx_image = D * (cur.x - next.x);
    const Vector dlambda = cur.lambda - next.lambda;
    const double mixed = beta * (D * cur.x - next.z).squaredNorm();
    const double image_sq = beta * dx_image.squaredNorm();
    const double dual_sq = dlambda.squaredNorm() / beta;

    DominationRecord rec;
    rec.k = k;
    rec.slack = mixed - image_sq - dual_sq;
    rec.cross = dlambda.dot(dx_image);
    rec.expansion_defect = std::abs(rec.slack - 2.0 * rec.cross);
    rec.scale = mixed + image_sq + dual_sq + 2.0 * std::abs(rec.cross);
    result.records.push_back(rec);

    const double gate = tol.abs + tol.domination_rel * (1.0 + rec.scale);
    if (k >= 1) {
      result.worst_slack = std::min(result.worst_slack, rec.slack);
      result.worst_cross = std::min(result.worst_cross, rec.cross);
      if (rec.slack < -gate || rec.cross < -gate)
        result.inequality_pass = false;
    }
    const double identity_scaled =
        scaled(rec.expansion_defect, tol.abs, tol.identity_rel, rec.scale);
    result.worst_identity = std::max(result.worst_identity, identity_scaled);
    if (identity_scaled > 1.0) result.identity_pass = false;
  }
  if (!std::isfinite(result.worst_slack)) result.worst_slack = 0.0;
  if (!std::isfinite(result.worst_cross)) result.worst_cross = 0.0;
  return result;
}

IdentityResult check_telescoping_identity(const SolverTrace& trace,
                                          const ProblemInstance& instance,
                                          const ViPoint& probe,
                                          const Tolerances& tol) {
  require_stride_one(trace, "check_telescoping_identity");
  if (probe.z.size() != instance.analysis_dim() ||
      probe.x.size() != instance.signal_dim() ||
      probe.lambda.size() != instance.analysis_dim())
    throw InvalidInputError("check_telescoping_identity: probe has wrong sizes");
  const double beta = beta_of(trace);
  const Matrix& D = instance.D.entries;

  IdentityResult result;
  result.pass = true;
  for (int k = 0; k < trace.iters_run; ++k) {
    const AdmmIterate& cur = trace.iterates[static_cast<std::size_t>(k)];
    const AdmmIterate& next = trace.iterates[static_cast<std::size_t>(k) + 1];

    const double cross_primal =
        beta * (probe.z - next.z).dot(D * (cur.x - next.x));
    const double cross_dual =
        (probe.lambda - next.lambda).dot(cur.lambda - next.lambda) / beta;
    const double lhs = cross_primal + cross_dual;

    const double dual_tele = ((next.lambda - probe.lambda).squaredNorm() -
                              (cur.lambda - probe.lambda).squaredNorm()) /
                             (2.0 * beta);
    const double primal_tele = 0.5 * beta *
                               ((D * next.x - probe.z).squaredNorm() -
                                (D * cur.x - probe.z).squaredNorm());
    const double mixed = 0.5 * beta * (D * cur.x - next.z).squaredNorm();
    const double rhs = dual_tele + primal_tele + mixed;

    const double defect = std::abs(lhs - rhs);
    const double scale = std::abs(cross_primal) + std::abs(cross_dual) +
                         std::abs(dual_tele) + std::abs(primal_tele) + mixed;
    const double defect_scaled = scaled(defect, tol.abs, tol.identity_rel, scale);
    result.max_defect = std::max(result.max_defect, defect);
    result.max_scaled_defect = std::max(result.max_scaled_defect, defect_scaled);
    if (defect_scaled > 1.0) result.pass = false;
  }
  return result;
}

ProbeInequalityResult check_probe_inequality(const SolverTrace& trace,
                                             const ProblemInstance& instance,
                                             const std::vector<int>& ks,
                                             int probes_per_k,
                                             std::uint64_t probe_seed,
                                             const Tolerances& tol) {
  require_stride_one(trace, "check_probe_inequality");
  if (probes_per_k < 1)
    throw InvalidInputError("probes_per_k must be >= 1");
  const double beta = beta_of(trace);
  const Matrix& D = instance.D.entries;

  ProbeInequalityResult result;
  result.pass = true;
  result.min_slack = std::numeric_limits<double>::infinity();
  result.min_scaled_slack = std::numeric_limits<double>::infinity();

  for (int k : ks) {
    if (k < 0 || k >= trace.iters_run)
      throw InsufficientTraceError(
          "check_probe_inequality: sampled step outside the trace");
    const AdmmIterate& cur = trace.iterates[static_cast<std::size_t>(k)];
    const AdmmIterate& next = trace.iterates[static_cast<std::size_t>(k) + 1];
    const ViPoint next_point = to_point(next);
    const double theta_next = theta(next.z, next.x, instance);

    Rng rng(derive_seed(probe_seed, static_cast<std::uint64_t>(k)));
    for (int p = 0; p < probes_per_k; ++p) {
      const ViPoint omega = ball_probe(next_point, 1.0, rng);
      const double theta_probe = theta(omega.z, omega.x, instance);
      const ViPoint f = f_apply(omega, instance);
      const double bilinear = (omega.z - next.z).dot(f.z) +
                              (omega.x - next.x).dot(f.x) +
                              (omega.lambda - next.lambda).dot(f.lambda);
      const double lhs = theta_probe - theta_next + bilinear;

      const double cross_primal =
          beta * (omega.z - next.z).dot(D * (cur.x - next.x));
      const double cross_dual =
          (omega.lambda - next.lambda).dot(cur.lambda - next.lambda) / beta;
      const double rhs = cross_primal + cross_dual;

      const double slack = lhs - rhs;
      const double scale = std::abs(theta_probe) + std::abs(theta_next) +
                           std::abs(bilinear) + std::abs(cross_primal) +
                           std::abs(cross_dual);
      const double slack_scaled = scaled(slack, tol.abs, tol.probe_rel, scale);
      result.min_slack = std::min(result.min_slack, slack);
      result.min_scaled_slack = std::min(result.min_scaled_slack, slack_scaled);
      if (slack_scaled < -1.0) result.pass = false;
      ++result.evaluations;
    }
  }
  if (!std::isfinite(result.min_slack)) result.min_slack = 0.0;
  if (!std::isfinite(result.min_scaled_slack)) result.min_scaled_slack = 0.0;
  return result;
}

ViPoint ergodic_average(const SolverTrace& trace, int t) {
  require_stride_one(trace, "ergodic_average");
  if (t < 0) throw InvalidInputError("ergodic_average: t must be >= 0");
  if (t + 1 > trace.iters_run)
    throw InsufficientTraceError(
        "ergodic_average: trace too short for the requested t");

  ViPoint mean;
  mean.z = Vector::Zero(trace.iterates.front().z.size());
  mean.x = Vector::Zero(trace.iterates.front().x.size());
  mean.lambda = Vector::Zero(trace.iterates.front().lambda.size());
  for (int k = 1; k <= t + 1; ++k) {
    const AdmmIterate& it = trace.iterates[static_cast<std::size_t>(k)];
    mean.z += it.z;
    mean.x += it.x;
    mean.lambda += it.lambda;
  }
  const double inv = 1.0 / (t + 1);
  mean.z *= inv;
  mean.x *= inv;
  mean.lambda *= inv;
  return mean;
}

ErgodicResult check_ergodic_rate(const SolverTrace& trace,
                                 const ProblemInstance& instance,
                                 const ViPoint& probe,
                                 const std::vector<int>& t_list,
                                 const Tolerances& tol) {
  require_stride_one(trace, "check_ergodic_rate");
  if (t_list.empty())
    throw InvalidInputError("check_ergodic_rate: empty t list");
  const double beta = beta_of(trace);
  const AdmmIterate& start = trace.iterates.front();
  const double initial =
      (start.lambda - probe.lambda).squaredNorm() / beta +
      beta * (instance.D.entries * start.x - probe.z).squaredNorm();
  const double theta_probe = theta(probe.z, probe.x, instance);
  const ViPoint f = f_apply(probe, instance);

  ErgodicResult result;
  result.pass = true;
  for (int t : t_list) {
    const ViPoint avg = ergodic_average(trace, t);
    ErgodicRecord rec;
    rec.t = t;
    rec.gap = theta(avg.z, avg.x, instance) - theta_probe +
              (avg.z - probe.z).dot(f.z) + (avg.x - probe.x).dot(f.x) +
              (avg.lambda - probe.lambda).dot(f.lambda);
    rec.bound = initial / (2.0 * (t + 1));
    rec.ratio = initial > 0 ? rec.gap * 2.0 * (t + 1) / initial : 0.0;
    result.records.push_back(rec);

    const double excess = rec.gap - rec.bound;
    result.worst_excess = std::max(result.worst_excess, excess);
    const double scale = std::abs(rec.gap) + std::abs(rec.bound);
    if (excess > tol.abs + tol.ergodic_rel * (1.0 + scale)) result.pass = false;
  }

  result.scaling_pass = true;
  for (const ErgodicRecord& rec : result.records) {
    const double rescaled = rec.bound * 2.0 * (rec.t + 1);
    if (std::abs(rescaled - initial) > tol.scaling_rel * (1.0 + initial))
      result.scaling_pass = false;
  }
  return result;
}

std::vector<int> sampled_steps(int last) {
  std::vector<int> ks;
  if (last < 0) return ks;
  ks.push_back(0);
  for (int k = 1; k < last; k *= 2) ks.push_back(k);
  if (last > 0) ks.push_back(last);
  return ks;
}

CertificationReport certify_all(const SolverTrace& trace,
                                const ProblemInstance& instance,
                                const CertifyConfig& config) {
  require_stride_one(trace, "certify_all");
  const double beta = beta_of(trace);
  const Tolerances& tol = config.tol;

  CertificationReport report;
  report.instance_ref = trace.instance_ref;
  report.beta = beta;
  report.iters = trace.iters_run;
  report.tol = tol;
  report.reference_available = config.reference.has_value();
  report.reference_note = config.reference_note;

  const FrameReport frame_report = validate_frame(instance.D);
  report.frame_tight = frame_report.is_tight;
  const HMetric h = HMetric::for_instance(instance, beta);
  report.h_reduced = h.reduced;
  if (!h.reduced)
    report.notes +=
        "frame Gram deviates from the identity: using the full-form metric; ";

  const AdmmIterate& last = trace.iterates.back();
  report.final_kkt = kkt_residuals(to_point(last), instance);

  double worst = std::numeric_limits<double>::infinity();
  auto add_check = [&report](std::string name, bool ran, bool pass,
                             double value, std::string note) {
    report.checks.push_back(
        {std::move(name), ran, pass, value, std::move(note)});
  };

  if (config.reference) {
    const ViPoint& ref = *config.reference;
    report.contraction = check_contraction(trace, instance, ref, tol);
    report.summability = check_summability(trace, instance, ref, tol);
    for (const AdmmIterate& it : trace.iterates)
      report.h_dist.push_back(
          std::sqrt(h.norm_sq(it.lambda - ref.lambda, it.x - ref.x)));

    add_check("contraction_strict", true, report.contraction.strict_pass,
              report.contraction.worst_margin, "gated from step 1");
    add_check("monotonicity", true, report.contraction.monotone_pass,
              report.contraction.worst_monotone, "");
    add_check("summability", true, report.summability.pass,
              report.summability.bound - report.summability.sum,
              "summed from step 1");
    add_check("step_decay", true, report.summability.decay_pass,
              report.summability.first_window_max -
                  report.summability.last_window_max,
              "");
    worst = std::min(worst, report.contraction.worst_margin);
    worst = std::min(worst, report.contraction.worst_monotone);
    worst = std::min(worst, report.summability.bound - report.summability.sum);
  } else {
    const std::string note = config.reference_note.empty()
                                 ? "no certified reference"
                                 : config.reference_note;
    add_check("contraction_strict", false, false, 0.0, note);
    add_check("monotonicity", false, false, 0.0, note);
    add_check("summability", false, false, 0.0, note);
    add_check("step_decay", false, false, 0.0, note);
  }

  report.domination = check_residual_domination(trace, instance, tol);
  add_check("residual_domination", true, report.domination.inequality_pass,
            std::min(report.domination.worst_slack,
                     report.domination.worst_cross),
            "gated from step 1");
  add_check("expansion_identity", true, report.domination.identity_pass,
            report.domination.worst_identity, "scaled defect; gate at 1");
  worst = std::min(worst, std::min(report.domination.worst_slack,
                                   report.domination.worst_cross));

  {
    Rng rng(derive_seed(config.probe_seed, 101));
    const ViPoint center = to_point(last);
    report.identity_pass = true;
    for (int p = 0; p < config.probe_count; ++p) {
      const ViPoint probe = ball_probe(center, 1.0, rng);
      const IdentityResult one =
          check_telescoping_identity(trace, instance, probe, tol);
      report.identity_worst_scaled =
          std::max(report.identity_worst_scaled, one.max_scaled_defect);
      if (!one.pass) report.identity_pass = false;
    }
    if (config.reference) {
      const IdentityResult one =
          check_telescoping_identity(trace, instance, *config.reference, tol);
      report.identity_worst_scaled =
          std::max(report.identity_worst_scaled, one.max_scaled_defect);
      if (!one.pass) report.identity_pass = false;
    }
    add_check("telescoping_identity", true, report.identity_pass,
              report.identity_worst_scaled, "scaled defect; gate at 1");
  }

  report.probe_inequality = check_probe_inequality(
      trace, instance, sampled_steps(trace.iters_run - 1), config.probe_count,
      config.probe_seed, tol);
  add_check("probe_inequality", true, report.probe_inequality.pass,
            report.probe_inequality.min_slack, "sampled steps");
  worst = std::min(worst, report.probe_inequality.min_slack);

  {
    Rng rng(derive_seed(config.probe_seed, 202));
    const ViPoint center = to_point(last);
    report.skew_pass = true;
    for (int p = 0; p < config.probe_count; ++p) {
      const ViPoint a = ball_probe(center, 2.0, rng);
      const ViPoint b = ball_probe(center, 2.0, rng);
      const double defect = skew_defect(a, b, instance);
      const double delta_sq = (a.z - b.z).squaredNorm() +
                              (a.x - b.x).squaredNorm() +
                              (a.lambda - b.lambda).squaredNorm();
      const double defect_scaled =
          defect / (tol.abs + tol.skew_rel * (1.0 + delta_sq));
      report.skew_worst_scaled =
          std::max(report.skew_worst_scaled, defect_scaled);
      if (defect_scaled > 1.0) report.skew_pass = false;
    }
    add_check("skew_symmetry", true, report.skew_pass,
              report.skew_worst_scaled, "scaled defect; gate at 1");
  }

  {
    std::vector<int> feasible;
    for (int t : config.t_list)
      if (t >= 0 && t + 1 <= trace.iters_run) feasible.push_back(t);
    if (feasible.empty()) {
      add_check("ergodic_bound", false, false, 0.0,
                "trace shorter than every requested t");
      add_check("ergodic_scaling", false, false, 0.0,
                "trace shorter than every requested t");
    } else {
      ViPoint probe;
      if (config.reference) {
        probe = *config.reference;
      } else {
        Rng rng(derive_seed(config.probe_seed, 303));
        probe = ball_probe(to_point(last), 1.0, rng);
      }
      report.ergodic = check_ergodic_rate(trace, instance, probe, feasible, tol);
      add_check("ergodic_bound", true, report.ergodic.pass,
                -report.ergodic.worst_excess,
                config.reference ? "probe: certified reference"
                                 : "probe: seeded sample near final iterate");
      add_check("ergodic_scaling", true, report.ergodic.scaling_pass, 0.0, "");
      worst = std::min(worst, -report.ergodic.worst_excess);
    }
  }

  report.overall_pass = true;
  for (const CheckSummary& c : report.checks)
    if (c.ran && !c.pass) report.overall_pass = false;
  report.worst_margin = std::isfinite(worst) ? worst : 0.0;
  return report;
}

}  // namespace alasso
