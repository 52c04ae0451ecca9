#pragma once

// Text, CSV and markdown renderings. TFLOPS and op/B get three significant
// digits, buffers KB with one decimal.

#include <iosfwd>
#include <string>
#include <vector>

#include "atb/dse.hpp"
#include "atb/ilp_model.hpp"
#include "atb/perf_model.hpp"
#include "atb/sched_sim.hpp"

namespace atb {

/// Three significant digits, never in exponent form ("26.6", "410", "0.620").
std::string format_sig3(double value);
std::string format_kb(std::int64_t bytes);
std::string format_tile(const TileConfig& tile);  // T_MC x T_K x T_N

void write_perf_text(std::ostream& os, const PerfEstimate& e);
void write_perf_csv_header(std::ostream& os);
void write_perf_csv_row(std::ostream& os, const PerfEstimate& e);

/// Markdown table in the layout of the whole-array comparison table.
void write_comparison_markdown(std::ostream& os, const std::vector<PerfEstimate>& rows);

void write_ranked_text(std::ostream& os, const RankedResult& r, std::size_t top);
void write_ranked_csv(std::ostream& os, const RankedResult& r);

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
void write_sweep_markdown(std::ostream& os, const std::vector<SweepRow>& rows);

void write_bounds_text(std::ostream& os, const LatencyBounds& b);

}  // namespace atb
