#pragma once

#include <map>
#include <string>
#include <vector>

#include "spma/config.hpp"
#include "spma/diagnostics.hpp"
#include "spma/types.hpp"

namespace spma {

struct CellSpec {
  int index = 0;
  Method method = Method::spma;
  double eta_raw = 0.0;
  double eta_effective = 0.0;
  int inner_m = 0;  // 0 for tabular cells
  std::uint64_t seed = 0;
};

struct CellResult {
  CellSpec spec;
  std::vector<IterationRecord> records;
  std::string error;  // nonempty when the cell failed; other cells continue
  double auc = 0.0;

  bool failed() const { return !error.empty(); }
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<CellResult> cells;
};

// Trapezoidal area under the J(pi_t) curve.
double curve_auc(const std::vector<IterationRecord>& records);

// Executes every (method x eta x m x seed) cell.  Cells are independent and
// may run on `threads` workers (0 = hardware concurrency); results come back
// in deterministic cell order regardless of scheduling.  seed_offset shifts
// every run seed.
ExperimentResult run_experiment(const ExperimentConfig& cfg, int threads = 1,
                                std::uint64_t seed_offset = 0);

// Mean AUC over seeds keyed by (method, eta index, m); used for best-eta
// selection.
struct AucSummary {
  Method method;
  double eta_raw = 0.0;
  int inner_m = 0;
  double mean_auc = 0.0;
  double std_error = 0.0;
  int cells = 0;
};

std::vector<AucSummary> summarize_auc(const ExperimentResult& result);

// Best raw eta per (method, m) by mean AUC.
std::map<std::pair<std::string, int>, AucSummary> best_eta(const ExperimentResult& result);

}  // namespace spma
