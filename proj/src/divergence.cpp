#include "topicdrift/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "topicdrift/errors.hpp"

namespace topicdrift {

namespace {

constexpr double kSumTolerance = 1e-9;

void check_distribution(std::span<const double> p) {
    if (p.size() < 2) {
        throw DataError("entropy: distribution needs at least 2 outcomes");
    }
    double sum = 0.0;
    for (double v : p) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw DataError("entropy: probabilities must be finite and >= 0");
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
        std::ostringstream msg;
        msg << "entropy: probabilities sum to " << sum << ", not 1";
        throw DataError(msg.str());
    }
}

double entropy_nats(std::span<const double> p) {
    double h = 0.0;
    for (double v : p) {
        if (v > 0.0) h -= v * std::log(v);
    }
    return h;
}

}  // namespace

double entropy_kary(std::span<const double> p) {
    check_distribution(p);
    const double h = entropy_nats(p) / std::log(static_cast<double>(p.size()));
    return std::clamp(h, 0.0, 1.0);
}

double gjs(const std::vector<std::vector<double>>& dists, std::span<const double> weights) {
    if (dists.size() < 2) {
        throw DataError("gjs: needs at least 2 distributions");
    }
    if (weights.size() != dists.size()) {
        throw DataError("gjs: weight count does not match distribution count");
    }
    const std::size_t k = dists.front().size();
    double weight_sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw DataError("gjs: weights must be finite and >= 0");
        }
        weight_sum += w;
    }
    if (std::abs(weight_sum - 1.0) > kSumTolerance) {
        throw DataError("gjs: weights must sum to 1");
    }

    std::vector<double> mixture(k, 0.0);
    double mean_entropy = 0.0;
    for (std::size_t i = 0; i < dists.size(); ++i) {
        if (dists[i].size() != k) {
            throw DataError("gjs: distributions have mismatched lengths");
        }
        check_distribution(dists[i]);
        for (std::size_t j = 0; j < k; ++j) mixture[j] += weights[i] * dists[i][j];
        mean_entropy += weights[i] * entropy_nats(dists[i]);
    }
    const double log_k = std::log(static_cast<double>(k));
    const double d = (entropy_nats(mixture) - mean_entropy) / log_k;
    // Concavity makes this non-negative; clamp away rounding slop.
    return std::clamp(d, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Regularized incomplete gamma, series + continued fraction (Numerical
// Recipes style), then a bisection inverse for the chi-square quantile.
// ---------------------------------------------------------------------------

namespace {

constexpr int kMaxIterations = 500;
constexpr double kEps = 3e-16;
constexpr double kFpMin = 1e-300;

double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < kMaxIterations; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_continued_fraction(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kFpMin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIterations; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = b + an / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0)) {
        throw DataError("regularized_gamma_p: requires a > 0 and x >= 0");
    }
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_continued_fraction(a, x);
}

double chi_square_quantile(double df, double prob) {
    if (!(df > 0.0)) throw DataError("chi_square_quantile: df must be > 0");
    if (!(prob >= 0.0) || !(prob < 1.0)) {
        throw DataError("chi_square_quantile: prob must be in [0, 1)");
    }
    if (prob == 0.0) return 0.0;

    auto cdf = [df](double x) { return regularized_gamma_p(df / 2.0, x / 2.0); };

    double lo = 0.0;
    double hi = df + 10.0 * std::sqrt(2.0 * df) + 10.0;
    while (cdf(hi) < prob) hi *= 2.0;
    while (hi - lo > 1e-8) {
        const double mid = 0.5 * (lo + hi);
        if (cdf(mid) < prob) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double significance_threshold(const ThresholdParams& params) {
    if (params.topics < 2 || params.time_slices < 2) {
        throw DataError("significance_threshold: needs k >= 2 topics and t >= 2 slices");
    }
    if (!(params.alpha > 0.0) || !(params.alpha < 1.0)) {
        throw DataError("significance_threshold: alpha must be in (0, 1)");
    }
    const double quantile =
        chi_square_quantile(params.degrees_of_freedom(), 1.0 - params.alpha);
    return quantile / (2.0 * params.cells() * std::log(static_cast<double>(params.topics)));
}

}  // namespace topicdrift
