#pragma once

// Reference and buffer-bounded tiled GEMM. The tiled version replays the
// movement simulator's schedule with real payloads held in L1 buffers.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "atb/arch_model.hpp"
#include "atb/movement_sim.hpp"

namespace atb {

struct Matrix {
    std::int64_t rows = 0;
    std::int64_t cols = 0;
    std::vector<double> data;  // row-major

    Matrix() = default;
    Matrix(std::int64_t r, std::int64_t c);

    double& at(std::int64_t i, std::int64_t j) { return data[static_cast<std::size_t>(i * cols + j)]; }
    double at(std::int64_t i, std::int64_t j) const {
        return data[static_cast<std::size_t>(i * cols + j)];
    }
};

Matrix naive_gemm(const Matrix& a, const Matrix& b);

struct TiledGemmOptions {
    /// Round A and B through the BFP16 codec (blocks of 8 along each row)
    /// as they enter L1.
    bool quantize = false;
};

struct TiledGemmResult {
    Matrix c;
    MovementTrace trace;
};

/// Single-core execution: the trace equals simulate_movement on a 1x1 array
/// whose L1 capacity is `capacity`. Throws BufferOverflow naming the operand
/// and step when the tile does not fit.
TiledGemmResult tiled_gemm(const Matrix& a, const Matrix& b, const TileConfig& tile,
                           std::int64_t capacity, const PrecisionSpec& prec,
                           const TiledGemmOptions& options = {});

/// The architecture tiled_gemm runs on.
ArchSpec single_core_arch(std::int64_t capacity);

/// Largest |x - y| / max(1, |y|) over all elements.
double max_relative_error(const Matrix& x, const Matrix& y);

Matrix read_matrix_csv(std::istream& is);
void write_matrix_csv(std::ostream& os, const Matrix& m);

}  // namespace atb
