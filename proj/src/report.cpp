#include "atb/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace atb {

std::string format_sig3(double value) {
    if (value == 0.0 || !std::isfinite(value)) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", value);
        return buf;
    }
    const int digits = static_cast<int>(std::floor(std::log10(std::fabs(value)))) + 1;
    const int decimals = std::max(0, 3 - digits);
    // Round to three significant digits first so 999.6 prints as 1000.
    const double scale = std::pow(10.0, 3 - digits);
    const double rounded = std::round(value * scale) / scale;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, rounded);
    return buf;
}

std::string format_kb(std::int64_t bytes) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", static_cast<double>(bytes) / static_cast<double>(kKiB));
    return buf;
}

std::string format_tile(const TileConfig& tile) {
    return std::to_string(tile.t_mc) + "x" + std::to_string(tile.t_k) + "x" +
           std::to_string(tile.t_n);
}

void write_perf_text(std::ostream& os, const PerfEstimate& e) {
    os << "problem          " << to_string(e.problem) << '\n'
       << "tile             " << to_string(e.tile) << " (T_MA,T_MC,T_K,T_N), rho "
       << e.tile.rho() << '\n'
       << "buffer           " << e.buffer_bytes << " B (" << format_kb(e.buffer_bytes)
       << " KB), symmetric " << e.buffer_bytes_symmetric << " B ("
       << format_kb(e.buffer_bytes_symmetric) << " KB)\n"
       << "feasible         " << (e.feasible ? "yes" : "no") << '\n'
       << "ai_array         " << format_sig3(to_double(e.ai_array)) << " op/B\n"
       << "memory_bound     " << format_sig3(to_tflops(e.memory_bound)) << " TFLOPS\n"
       << "eff_micro        " << format_sig3(to_double(e.eff_micro)) << '\n'
       << "eff_core         " << format_sig3(to_double(e.eff_core)) << '\n'
       << "compute_bound    " << format_sig3(to_tflops(e.compute_bound)) << " TFLOPS\n"
       << "perf_array       " << format_sig3(to_tflops(e.perf_array)) << " TFLOPS\n"
       << "bound_kind       " << to_string(e.bound_kind) << '\n';
}

void write_perf_csv_header(std::ostream& os) {
    os << "m,k,n,t_ma,t_mc,t_k,t_n,rho,buffer_bytes,buffer_bytes_rho1,feasible,ai_array,"
          "memory_bound_tflops,eff_micro,eff_core,compute_bound_tflops,perf_array_tflops,"
          "bound_kind\n";
}

void write_perf_csv_row(std::ostream& os, const PerfEstimate& e) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f,%.6f,%.6f", to_double(e.ai_array),
                  to_tflops(e.memory_bound), to_double(e.eff_micro), to_double(e.eff_core),
                  to_tflops(e.compute_bound), to_tflops(e.perf_array));
    os << e.problem.m << ',' << e.problem.k << ',' << e.problem.n << ',' << e.tile.t_ma << ','
       << e.tile.t_mc << ',' << e.tile.t_k << ',' << e.tile.t_n << ',' << e.tile.rho() << ','
       << e.buffer_bytes << ',' << e.buffer_bytes_symmetric << ',' << (e.feasible ? 1 : 0) << ','
       << buf << ','
       << to_string(e.bound_kind) << '\n';
}

void write_comparison_markdown(std::ostream& os, const std::vector<PerfEstimate>& rows) {
    os << "| Problem size (MxKxN) | L1 tile (T_MC x T_K x T_N) | rho | Used buffer (KB) "
          "| Buffer if rho=1 (KB) | Compute-bound (TFLOPS) | AI_array (op/B) "
          "| Memory-bound (TFLOPS) | Predicted bound (TFLOPS) |\n"
       << "|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& e : rows) {
        const bool mem = e.bound_kind == BoundKind::memory;
        os << "| " << to_string(e.problem) << " | " << format_tile(e.tile) << " | "
           << e.tile.rho() << " | " << format_kb(e.buffer_bytes) << " | "
           << format_kb(e.buffer_bytes_symmetric) << " | "
           << (mem ? "" : "**") << format_sig3(to_tflops(e.compute_bound)) << (mem ? "" : "**")
           << " | " << format_sig3(to_double(e.ai_array)) << " | " << (mem ? "**" : "")
           << format_sig3(to_tflops(e.memory_bound)) << (mem ? "**" : "") << " | "
           << (e.feasible ? format_sig3(to_tflops(e.perf_array)) : std::string("infeasible"))
           << " |\n";
    }
}

void write_ranked_text(std::ostream& os, const RankedResult& r, std::size_t top) {
    os << "rank  tile(T_MA,T_MC,T_K,T_N)  rho  buffer_KB  ai_array  eff_core  bound_TFLOPS  kind\n";
    const std::size_t n = std::min(top, r.ranked.size());
    for (std::size_t i = 0; i < n; ++i) {
        const auto& e = r.ranked[i];
        char line[256];
        std::snprintf(line, sizeof line, "%-5zu %-24s %-4lld %-10s %-9s %-9s %-13s %s\n", i + 1,
                      to_string(e.tile).c_str(), static_cast<long long>(e.tile.rho()),
                      format_kb(e.perf.buffer_bytes).c_str(),
                      format_sig3(to_double(e.perf.ai_array)).c_str(),
                      format_sig3(to_double(e.perf.eff_core)).c_str(),
                      format_sig3(to_tflops(e.perf.perf_array)).c_str(),
                      std::string(to_string(e.perf.bound_kind)).c_str());
        os << line;
    }
    os << "evaluated " << r.ranked.size() << " configurations\n";
    if (r.best_overall) {
        const auto& b = r.ranked[*r.best_overall];
        os << "best_overall   " << to_string(b.tile) << " rho " << b.tile.rho() << ", "
           << format_sig3(to_tflops(b.perf.perf_array)) << " TFLOPS\n";
    }
    if (r.best_symmetric) {
        const auto& b = r.ranked[*r.best_symmetric];
        os << "best_symmetric " << to_string(b.tile) << ", "
           << format_sig3(to_tflops(b.perf.perf_array)) << " TFLOPS\n";
    } else {
        os << "best_symmetric none\n";
    }
    if (const auto g = r.atb_gain()) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", *g);
        os << "atb_gain       " << buf << '\n';
    }
}

void write_ranked_csv(std::ostream& os, const RankedResult& r) {
    write_perf_csv_header(os);
    for (const auto& e : r.ranked) write_perf_csv_row(os, e.perf);
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "t_k,rho,t_ma,t_mc,t_n,eff_micro,eff_core,buffer_bytes,feasible\n";
    for (const auto& r : rows) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6f,%.6f", to_double(r.eff_micro), to_double(r.eff_core));
        os << r.t_k << ',' << r.rho << ',' << r.tile.t_ma << ',' << r.tile.t_mc << ','
           << r.tile.t_n << ',' << buf << ',' << r.buffer_bytes << ',' << (r.feasible ? 1 : 0)
           << '\n';
    }
}

void write_sweep_markdown(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "| T_K | rho | Eff_micro | Eff_core | Buffer (KB) | Fits L1 |\n"
       << "|---|---|---|---|---|---|\n";
    for (const auto& r : rows) {
        os << "| " << r.t_k << " | " << r.rho << " | " << format_sig3(to_double(r.eff_micro))
           << " | " << format_sig3(to_double(r.eff_core)) << " | " << format_kb(r.buffer_bytes)
           << " | " << (r.feasible ? "yes" : "no") << " |\n";
    }
}

void write_bounds_text(std::ostream& os, const LatencyBounds& b) {
    os << "t_prolog              " << b.t_prolog << '\n'
       << "ii_single             " << b.ii_single << '\n'
       << "ii_parallel           " << to_string(b.ii_parallel) << '\n'
       << "t_steady              " << b.t_steady << '\n'
       << "t_epilog              " << b.t_epilog << '\n'
       << "l_total_sequential    " << b.l_total_sequential << '\n'
       << "l_total_overlapped    " << b.l_total_overlapped << '\n'
       << "eff_micro (model)     " << format_sig3(to_double(b.eff_micro)) << '\n';
}

}  // namespace atb
