#include "topicdrift/nmf.hpp"

#include <algorithm>
#include <sstream>

#include "topicdrift/errors.hpp"
#include "topicdrift/rng.hpp"

namespace topicdrift {

namespace {

constexpr double kInitFloor = 1e-6;   // keeps multiplicative updates off the zero lock
constexpr double kDenomFloor = 1e-12;

DenseMatrix random_uniform(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    DenseMatrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = rng.uniform(kInitFloor, 1.0);
        }
    }
    return m;
}

}  // namespace

double nmf_objective(const DenseMatrix& x, const DenseMatrix& w, const DenseMatrix& h) {
    return 0.5 * (x - w * h).squaredNorm();
}

NmfResult nmf(const DenseMatrix& x, int k, int iters, std::uint64_t seed) {
    const Eigen::Index n = x.rows();
    const Eigen::Index m = x.cols();
    if ((x.array() < 0.0).any()) {
        throw DataError("nmf: input matrix has a negative entry");
    }
    if (k < 1 || k > std::min(n, m)) {
        std::ostringstream msg;
        msg << "nmf: k = " << k << " must satisfy 1 <= k <= min(n, m) = " << std::min(n, m);
        throw DataError(msg.str());
    }

    Rng rng(seed);
    NmfResult result;
    result.w = random_uniform(n, k, rng);
    result.h = random_uniform(k, m, rng);
    result.objective_trace.reserve(static_cast<std::size_t>(std::max(iters, 0)));

    DenseMatrix& w = result.w;
    DenseMatrix& h = result.h;
    for (int it = 0; it < iters; ++it) {
        // Lee-Seung multiplicative updates for the Frobenius objective.
        h.array() *= (w.transpose() * x).array() /
                     ((w.transpose() * w) * h).array().max(kDenomFloor);
        w.array() *= (x * h.transpose()).array() /
                     (w * (h * h.transpose())).array().max(kDenomFloor);
        result.objective_trace.push_back(nmf_objective(x, w, h));
    }
    return result;
}

HnmfResult hnmf(const DenseMatrix& x, const std::vector<int>& layer_dims, int iters_per_layer,
                std::uint64_t seed) {
    if (layer_dims.empty()) {
        throw DataError("hnmf: layer_dims is empty");
    }
    for (std::size_t i = 1; i < layer_dims.size(); ++i) {
        if (layer_dims[i] >= layer_dims[i - 1]) {
            throw DataError("hnmf: layer_dims must be strictly decreasing");
        }
    }

    HnmfResult result;
    DenseMatrix current = x;
    for (std::size_t layer = 0; layer < layer_dims.size(); ++layer) {
        // Layer 0 reuses the caller's seed so hnmf([k]) reproduces nmf(k).
        const std::uint64_t layer_seed = layer == 0 ? seed : Rng::derive(seed, layer);
        NmfResult factor = nmf(current, layer_dims[layer], iters_per_layer, layer_seed);
        result.w_layers.push_back(std::move(factor.w));
        current = std::move(factor.h);
    }
    result.h_last = std::move(current);

    DenseMatrix reconstruction = result.h_last;
    for (auto it = result.w_layers.rbegin(); it != result.w_layers.rend(); ++it) {
        reconstruction = *it * reconstruction;
    }
    result.reconstruction_rmse = rmse(x, reconstruction);
    return result;
}

}  // namespace topicdrift
