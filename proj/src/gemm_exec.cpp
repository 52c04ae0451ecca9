#include "atb/gemm_exec.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "atb/bfp16.hpp"

namespace atb {

Matrix::Matrix(std::int64_t r, std::int64_t c) : rows(r), cols(c) {
    if (r < 0 || c < 0) throw std::invalid_argument("matrix dims must be non-negative");
    data.assign(static_cast<std::size_t>(r * c), 0.0);
}

Matrix naive_gemm(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) {
        throw std::invalid_argument("naive_gemm: shape mismatch " + std::to_string(a.rows) + "x" +
                                    std::to_string(a.cols) + " * " + std::to_string(b.rows) +
                                    "x" + std::to_string(b.cols));
    }
    Matrix c(a.rows, b.cols);
    for (std::int64_t i = 0; i < a.rows; ++i) {
        for (std::int64_t k = 0; k < a.cols; ++k) {
            const double x = a.at(i, k);
            for (std::int64_t j = 0; j < b.cols; ++j) c.at(i, j) += x * b.at(k, j);
        }
    }
    return c;
}

ArchSpec single_core_arch(std::int64_t capacity) {
    ArchSpec arch;
    arch.n_rows = 1;
    arch.n_cols = 1;
    arch.n_cores = 1;
    arch.l1_capacity = capacity;
    return arch;
}

namespace {

// Dense buffer of one staged block, tagged with the stream id it holds.
struct Staged {
    std::int64_t id = -1;
    std::vector<double> values;
};

class PayloadExecutor : public L1Listener {
public:
    PayloadExecutor(const Matrix& a, const Matrix& b, const TileConfig& tile, bool quantize,
                    Matrix& out)
        : a_(a), b_(b), t_(tile), quantize_(quantize), out_(out) {}

    void load_a(const ASlice& s) override {
        Staged st{s.id, {}};
        st.values.resize(static_cast<std::size_t>(t_.t_ma * t_.t_k));
        for (std::int64_t i = 0; i < t_.t_ma; ++i) {
            for (std::int64_t k = 0; k < t_.t_k; ++k) {
                st.values[static_cast<std::size_t>(i * t_.t_k + k)] = a_.at(s.row0 + i, s.col0 + k);
            }
        }
        if (quantize_) quantize_rows(st.values, t_.t_k);
        a_buf_[s.id] = std::move(st);
    }

    void load_b(const BTile& t) override {
        Staged st{t.id, {}};
        st.values.resize(static_cast<std::size_t>(t_.t_k * t_.t_n));
        for (std::int64_t k = 0; k < t_.t_k; ++k) {
            for (std::int64_t j = 0; j < t_.t_n; ++j) {
                st.values[static_cast<std::size_t>(k * t_.t_n + j)] = b_.at(t.row0 + k, t.col0 + j);
            }
        }
        if (quantize_) quantize_rows(st.values, t_.t_n);
        b_buf_[t.id] = std::move(st);
    }

    void alloc_c(const CTile&) override {
        c_buf_.assign(static_cast<std::size_t>(t_.t_mc * t_.t_n), 0.0);
    }

    void compute(const ASlice& s, const BTile& t, const CTile&) override {
        const auto ai = a_buf_.find(s.id);
        const auto bi = b_buf_.find(t.id);
        if (ai == a_buf_.end()) {
            throw std::logic_error("A slice " + std::to_string(s.id) + " read after eviction");
        }
        if (bi == b_buf_.end()) {
            throw std::logic_error("B tile " + std::to_string(t.id) + " read after release");
        }
        const auto& av = ai->second.values;
        const auto& bv = bi->second.values;
        for (std::int64_t i = 0; i < t_.t_ma; ++i) {
            double* crow = &c_buf_[static_cast<std::size_t>((s.c_row0 + i) * t_.t_n)];
            for (std::int64_t k = 0; k < t_.t_k; ++k) {
                const double x = av[static_cast<std::size_t>(i * t_.t_k + k)];
                const double* brow = &bv[static_cast<std::size_t>(k * t_.t_n)];
                for (std::int64_t j = 0; j < t_.t_n; ++j) crow[j] += x * brow[j];
            }
        }
    }

    void evict_a(const ASlice& s) override { a_buf_.erase(s.id); }
    void release_b(const BTile& t) override { b_buf_.erase(t.id); }

    void write_c(const CTile& ct) override {
        for (std::int64_t i = 0; i < t_.t_mc; ++i) {
            for (std::int64_t j = 0; j < t_.t_n; ++j) {
                out_.at(ct.row0 + i, ct.col0 + j) = c_buf_[static_cast<std::size_t>(i * t_.t_n + j)];
            }
        }
        c_buf_.clear();
    }

private:
    static void quantize_rows(std::vector<double>& v, std::int64_t row_len) {
        std::array<double, kBfp16BlockSize> block{};
        for (std::size_t row = 0; row < v.size(); row += static_cast<std::size_t>(row_len)) {
            for (std::int64_t j0 = 0; j0 < row_len; j0 += kBfp16BlockSize) {
                const auto n = std::min<std::int64_t>(kBfp16BlockSize, row_len - j0);
                block.fill(0.0);
                for (std::int64_t j = 0; j < n; ++j) {
                    block[static_cast<std::size_t>(j)] = v[row + static_cast<std::size_t>(j0 + j)];
                }
                const auto decoded = bfp16_decode(bfp16_encode(block));
                for (std::int64_t j = 0; j < n; ++j) {
                    v[row + static_cast<std::size_t>(j0 + j)] = decoded[static_cast<std::size_t>(j)];
                }
            }
        }
    }

    const Matrix& a_;
    const Matrix& b_;
    const TileConfig& t_;
    bool quantize_;
    Matrix& out_;
    std::map<std::int64_t, Staged> a_buf_;
    std::map<std::int64_t, Staged> b_buf_;
    std::vector<double> c_buf_;
};

}  // namespace

TiledGemmResult tiled_gemm(const Matrix& a, const Matrix& b, const TileConfig& tile,
                           std::int64_t capacity, const PrecisionSpec& prec,
                           const TiledGemmOptions& options) {
    if (a.cols != b.rows) throw std::invalid_argument("tiled_gemm: shape mismatch");
    const ProblemSpec problem{a.rows, a.cols, b.cols};
    const ArchSpec arch = single_core_arch(capacity);
    TiledGemmResult result;
    result.c = Matrix(a.rows, b.cols);
    PayloadExecutor exec(a, b, tile, options.quantize, result.c);
    MovementOptions mo;
    mo.check_capacity = true;
    result.trace = simulate_movement(problem, tile, prec, arch, mo, &exec);
    return result;
}

double max_relative_error(const Matrix& x, const Matrix& y) {
    if (x.rows != y.rows || x.cols != y.cols) {
        return std::numeric_limits<double>::infinity();
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < x.data.size(); ++i) {
        const double denom = std::max(1.0, std::fabs(y.data[i]));
        worst = std::max(worst, std::fabs(x.data[i] - y.data[i]) / denom);
    }
    return worst;
}

Matrix read_matrix_csv(std::istream& is) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
                if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::exception();
            } catch (const std::exception&) {
                throw std::invalid_argument("matrix csv: bad number '" + cell + "' on row " +
                                            std::to_string(rows.size() + 1));
            }
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw std::invalid_argument("matrix csv: ragged row " + std::to_string(rows.size() + 1));
        }
        rows.push_back(std::move(row));
    }
    Matrix m(static_cast<std::int64_t>(rows.size()),
             rows.empty() ? 0 : static_cast<std::int64_t>(rows.front().size()));
    for (std::int64_t i = 0; i < m.rows; ++i) {
        for (std::int64_t j = 0; j < m.cols; ++j) m.at(i, j) = rows[i][j];
    }
    return m;
}

void write_matrix_csv(std::ostream& os, const Matrix& m) {
    const auto old = os.precision(17);
    for (std::int64_t i = 0; i < m.rows; ++i) {
        for (std::int64_t j = 0; j < m.cols; ++j) {
            if (j) os << ',';
            os << m.at(i, j);
        }
        os << '\n';
    }
    os.precision(old);
}

}  // namespace atb
