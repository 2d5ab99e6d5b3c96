#include "spma/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace spma {

namespace {

constexpr double kBoundSlack = 1e-10;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

GapQuantities gap_quantities(const Policy& pi, const Matrix& q, double tie_tol) {
  const int S = static_cast<int>(q.rows());
  const int A = static_cast<int>(q.cols());
  GapQuantities out;
  out.near_optimal.resize(S);
  out.gap.resize(S);
  for (int s = 0; s < S; ++s) {
    const double top = q.row(s).maxCoeff();
    double runner_up = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < A; ++a) {
      if (q(s, a) >= top - tie_tol) {
        out.near_optimal[s].push_back(a);
      } else {
        runner_up = std::max(runner_up, q(s, a));
      }
    }
    if (static_cast<int>(out.near_optimal[s].size()) == A) continue;  // fully tied
    out.gap[s] = top - runner_up;
    double mass = 0.0;
    for (int a : out.near_optimal[s]) mass += pi.probs(s, a);
    const double c_s = mass * (*out.gap[s]);
    if (!out.c_t || c_s < *out.c_t) out.c_t = c_s;
    if (!out.min_gap || *out.gap[s] < *out.min_gap) out.min_gap = out.gap[s];
  }
  return out;
}

std::string BoundReport::render() const {
  std::string s = name + ": ";
  if (!applicable) return s + "not applicable (" + note + ")";
  s += pass ? "pass" : "FAIL";
  if (!note.empty()) s += " (" + note + ")";
  int shown = 0;
  for (const auto& e : entries) {
    if (!e.ok && shown < 5) {
      s += "\n  t=" + std::to_string(e.t) + " measured=" + fmt(e.measured) +
           " bound=" + fmt(e.bound);
      ++shown;
    }
  }
  return s;
}

BoundReport check_theorem2(const std::vector<IterationRecord>& records, Method method,
                           double eta, double gamma) {
  BoundReport report;
  report.name = "per-iteration contraction";
  if (method != Method::spma) {
    report.applicable = false;
    report.note = std::string("bound not claimed for ") + method_name(method);
    return report;
  }
  if (!(eta <= 1.0 - gamma)) {
    report.applicable = false;
    report.note = "step size outside admissible range";
    return report;
  }
  if (records.empty()) {
    report.note = "empty run";
    return report;
  }
  double cumulative = 1.0;
  for (std::size_t t = 0; t + 1 < records.size(); ++t) {
    const double alpha = records[t].alpha_t;
    BoundCheckEntry step;
    step.t = static_cast<int>(t);
    step.measured = records[t + 1].subopt_inf;
    step.bound = alpha * records[t].subopt_inf + kBoundSlack;
    step.ok = step.measured <= step.bound;
    report.pass = report.pass && step.ok;
    report.entries.push_back(step);

    cumulative *= alpha;
    BoundCheckEntry cum;
    cum.t = static_cast<int>(t);
    cum.measured = records[t + 1].subopt_inf;
    cum.bound = cumulative * records[0].subopt_inf + kBoundSlack;
    cum.ok = cum.measured <= cum.bound;
    report.pass = report.pass && cum.ok;
    report.entries.push_back(cum);
  }
  return report;
}

BoundReport check_bandit_linear(const std::vector<IterationRecord>& records, int num_arms,
                                double min_gap, double eta) {
  BoundReport report;
  report.name = "bandit linear rate";
  if (!(eta <= 1.0)) {
    report.applicable = false;
    report.note = "requires eta <= 1";
    return report;
  }
  const double base = 1.0 - 1.0 / num_arms;
  for (const auto& rec : records) {
    BoundCheckEntry e;
    e.t = rec.t;
    e.measured = rec.subopt_rho;
    e.bound = base * std::exp(-eta * min_gap * rec.t / num_arms) + 1e-12;
    e.ok = e.measured <= e.bound;
    report.pass = report.pass && e.ok;
    report.entries.push_back(e);
  }
  return report;
}

BoundReport check_bandit_superlinear(const std::vector<IterationRecord>& records,
                                     const std::vector<double>& best_arm_prob, int num_arms) {
  BoundReport report;
  report.name = "bandit super-linear closed form";
  const double base = 1.0 - 1.0 / num_arms;
  for (std::size_t t = 0; t < records.size(); ++t) {
    const double closed = std::pow(base, std::exp2(static_cast<double>(t)));
    // Below machine epsilon the stored probability and the closed form both
    // round to 1 and the comparison carries no information.
    if (closed >= std::numeric_limits<double>::epsilon() &&
        t < best_arm_prob.size()) {
      BoundCheckEntry probe;
      probe.t = static_cast<int>(t);
      probe.measured = best_arm_prob[t];
      probe.bound = 1.0 - closed;
      probe.ok = std::abs(probe.measured - probe.bound) <= 1e-10;
      report.pass = report.pass && probe.ok;
      report.entries.push_back(probe);
    }
    BoundCheckEntry sub;
    sub.t = static_cast<int>(t);
    sub.measured = records[t].subopt_rho;
    sub.bound = closed + 1e-12;
    sub.ok = sub.measured <= sub.bound;
    report.pass = report.pass && sub.ok;
    report.entries.push_back(sub);
  }
  return report;
}

BoundReport neighbourhood_proxy(const std::vector<IterationRecord>& records,
                                const std::vector<double>& ideal_kl, double gamma,
                                double rho_min) {
  BoundReport report;
  report.name = "neighbourhood band";
  report.applicable = false;  // descriptive only, never asserted
  if (rho_min <= 0.0) {
    report.note = "initial distribution has a zero entry; exploration assumption violated";
    return report;
  }
  if (records.empty() || ideal_kl.empty()) {
    report.note = "no surrogate values recorded";
    return report;
  }
  double handle = 0.0;
  for (double v : ideal_kl) handle = std::max(handle, std::max(v, 0.0));
  const double beta = std::sqrt(2.0) / ((1.0 - gamma) * (1.0 - gamma) * rho_min) *
                      std::sqrt(handle);
  // Accumulation term sum_t prod_{i>t} alpha_i from the recorded factors.
  double accum = 0.0;
  for (std::size_t t = 0; t + 1 < records.size(); ++t) {
    double prod = 1.0;
    for (std::size_t i = t + 1; i + 1 < records.size(); ++i) prod *= records[i].alpha_t;
    accum += prod;
  }
  double contraction = 1.0;
  for (std::size_t t = 0; t + 1 < records.size(); ++t) contraction *= records[t].alpha_t;
  const double band = contraction * records.front().subopt_rho + beta * accum;
  const double tail = records.back().subopt_rho;
  report.note = "beta=" + fmt(beta) + " band=" + fmt(band) + " tail=" + fmt(tail) +
                (tail <= band ? " (within band)" : " (outside band)");
  return report;
}

}  // namespace spma
