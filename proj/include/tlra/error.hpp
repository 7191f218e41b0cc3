#pragma once

#include <stdexcept>

namespace tlra {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shape or index violation on entry to an operation.
struct DimensionError : Error {
    using Error::Error;
};

// Input lacks the numerical rank / non-degeneracy an operation requires
// (rank-deficient Gram-Schmidt input, degenerate row sample, zero start).
struct DegenerateInputError : Error {
    using Error::Error;
};

// A sampled pivot block is singular or numerically so.
struct SingularPivotError : Error {
    using Error::Error;
};

// Target subspace intersects the anchor complement: outside the chart.
struct OutOfChartError : Error {
    using Error::Error;
};

// (I - DF) is not invertible at the current iterate.
struct SingularJacobianError : Error {
    using Error::Error;
};

// Newton residual grows instead of contracting.
struct DivergenceError : Error {
    using Error::Error;
};

// Eigenvalue gap too small to define the top eigenspace map.
struct DegenerateSpectrumError : Error {
    using Error::Error;
};

// I/O failure or malformed container file.
struct IoError : Error {
    using Error::Error;
};

}  // namespace tlra
