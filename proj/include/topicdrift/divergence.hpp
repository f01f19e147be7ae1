#pragma once

#include <optional>
#include <span>
#include <vector>

namespace topicdrift {

/// k-ary Shannon entropy, k = p.size(): -sum p_i * log_k(p_i), with
/// 0*log(0) = 0. Result is in [0, 1]. Throws DataError unless p has >= 2
/// entries, all >= 0, summing to 1 within 1e-9.
double entropy_kary(std::span<const double> p);

/// Generalized Jensen-Shannon divergence with k-ary entropy:
/// H(sum pi_i P_i) - sum pi_i H(P_i). Non-negative and <= 1. Weights must be
/// >= 0 and sum to 1 within 1e-9; all distributions must share one length.
double gjs(const std::vector<std::vector<double>>& dists, std::span<const double> weights);

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double regularized_gamma_p(double a, double x);

/// Chi-square CDF inverse: smallest x with CDF_df(x) = prob, found by
/// bracketed bisection on the regularized incomplete gamma to 1e-8 absolute.
double chi_square_quantile(double df, double prob);

struct ThresholdParams {
    int topics = 0;         // k
    int time_slices = 0;    // t, number of compared slices
    double alpha = 0.05;    // significance level in (0, 1)
    std::optional<double> cell_count;  // N; defaults to k * t

    int degrees_of_freedom() const { return (topics - 1) * (time_slices - 1); }
    double cells() const { return cell_count ? *cell_count : static_cast<double>(topics) * time_slices; }
};

/// Significance cutoff for the divergence score:
/// chi2_quantile(df, 1 - alpha) / (2 * N * ln k), df = (k-1)(t-1), N = k*t.
double significance_threshold(const ThresholdParams& params);

}  // namespace topicdrift
