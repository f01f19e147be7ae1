#pragma once

#include <cstdint>
#include <vector>

#include "topicdrift/matrix.hpp"

namespace topicdrift {

struct NmfResult {
    DenseMatrix w;  // n x k, >= 0
    DenseMatrix h;  // k x m, >= 0
    std::vector<double> objective_trace;  // 0.5 * ||X - WH||_F^2 after each iteration
};

/// 0.5 * ||X - WH||_F^2.
double nmf_objective(const DenseMatrix& x, const DenseMatrix& w, const DenseMatrix& h);

/// Multiplicative-update NMF for the Frobenius objective. Factors stay
/// non-negative and the objective trace is non-increasing (within rounding).
/// Initialization is i.i.d. uniform on [1e-6, 1), seeded; runs are
/// reproducible for a fixed seed. Throws DataError for a negative entry in x
/// or k outside [1, min(n, m)).
NmfResult nmf(const DenseMatrix& x, int k, int iters, std::uint64_t seed);

struct HnmfResult {
    std::vector<DenseMatrix> w_layers;  // W_1 .. W_l
    DenseMatrix h_last;                 // H_l
    double reconstruction_rmse = 0.0;   // rmse(X, W_1 ... W_l H_l)
};

/// Layer-wise hierarchical NMF: factorize X ~ W_1 H_1, then H_1 ~ W_2 H_2,
/// and so on down layer_dims. Earlier layers are frozen once factorized.
/// layer_dims must be strictly decreasing with layer_dims[0] < min(n, m).
HnmfResult hnmf(const DenseMatrix& x, const std::vector<int>& layer_dims, int iters_per_layer,
                std::uint64_t seed);

}  // namespace topicdrift
