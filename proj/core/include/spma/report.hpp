#pragma once

#include <string>
#include <vector>

#include "spma/experiment.hpp"

namespace spma {

std::string record_csv_header();
std::string record_to_csv(const IterationRecord& rec);
IterationRecord record_from_csv(const std::string& line);

// Writes one CSV per cell plus a manifest, a markdown summary, and (unless
// disabled) an SVG chart of J(pi_t) at the best eta per method.
void write_results(const ExperimentResult& result, const std::string& out_dir,
                   bool with_svg);

// Reloads cells written by write_results.
ExperimentResult read_results(const std::string& dir);

std::string render_markdown(const ExperimentResult& result);
std::string render_svg(const ExperimentResult& result);

}  // namespace spma
