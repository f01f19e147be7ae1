#include "topicdrift/diffusion.hpp"

#include <algorithm>
#include <cmath>

#include "topicdrift/divergence.hpp"
#include "topicdrift/errors.hpp"
#include "topicdrift/hungarian.hpp"

namespace topicdrift {

std::vector<double> TermTopicDistribution::term_distribution(std::size_t term) const {
    if (term >= static_cast<std::size_t>(probs.cols())) {
        throw DataError("term index " + std::to_string(term) + " out of range");
    }
    const auto col = probs.col(static_cast<Eigen::Index>(term));
    return std::vector<double>(col.begin(), col.end());
}

TermTopicDistribution normalize_termwise(const TopicTermMatrix& u) {
    if (u.values.size() == 0) throw DataError("normalize_termwise: empty matrix");
    if (u.values.minCoeff() < 0.0) {
        throw DataError("normalize_termwise: topic-term matrix has a negative entry");
    }
    const Eigen::Index k = u.values.rows();
    TermTopicDistribution out;
    out.window_label = u.window_label;
    out.probs.resize(k, u.values.cols());
    for (Eigen::Index i = 0; i < u.values.cols(); ++i) {
        const double sum = u.values.col(i).sum();
        if (sum < 1e-12) {
            out.probs.col(i).setConstant(1.0 / static_cast<double>(k));
            out.degenerate_terms.push_back(static_cast<std::uint32_t>(i));
        } else {
            out.probs.col(i) = u.values.col(i) / sum;
        }
    }
    return out;
}

std::string_view to_string(TermClass c) {
    switch (c) {
        case TermClass::narrow: return "narrow";
        case TermClass::broad: return "broad";
        case TermClass::divergent: return "divergent";
        case TermClass::convergent: return "convergent";
        case TermClass::unclassified: return "unclassified";
    }
    return "unclassified";
}

double default_tau_mass(int topics) {
    return std::max(0.15, 2.0 / static_cast<double>(topics));
}

DiffusionSeries diffusion_series(const std::vector<TermTopicDistribution>& windows,
                                 std::size_t term, const DiffusionOptions& options) {
    if (windows.size() < 2) {
        throw DataError("diffusion_series: needs at least 2 windows");
    }
    const Eigen::Index k = windows.front().probs.rows();
    const Eigen::Index m = windows.front().probs.cols();
    for (const auto& w : windows) {
        if (w.probs.rows() != k || w.probs.cols() != m) {
            throw DataError("diffusion_series: windows have mismatched shapes");
        }
    }
    if (term >= static_cast<std::size_t>(m)) {
        throw DataError("diffusion_series: unknown term index " + std::to_string(term));
    }

    std::vector<double> pair_weights = options.weights.value_or(std::vector<double>{0.5, 0.5});
    if (pair_weights.size() != 2) {
        throw DataError("diffusion_series: pairwise comparison takes exactly 2 weights");
    }

    const double tau = options.tau_mass.value_or(default_tau_mass(static_cast<int>(k)));

    DiffusionSeries series;
    series.term = term;
    series.threshold = significance_threshold(
        ThresholdParams{static_cast<int>(k), 2, options.alpha, std::nullopt});

    for (std::size_t w = 0; w < windows.size(); ++w) {
        const auto dist = windows[w].term_distribution(term);
        series.support_per_window.push_back(static_cast<int>(
            std::count_if(dist.begin(), dist.end(), [tau](double p) { return p >= tau; })));
        if (w + 1 < windows.size()) {
            const double score = gjs({dist, windows[w + 1].term_distribution(term)}, pair_weights);
            series.scores.push_back(score);
            series.significant.push_back(score > series.threshold);
        }
    }
    if (windows.size() >= 3) {
        series.classification = classify_term(series);
    }
    return series;
}

namespace {

double least_squares_slope(const std::vector<double>& y) {
    const std::size_t n = y.size();
    const double mean_x = static_cast<double>(n - 1) / 2.0;
    double mean_y = 0.0;
    for (double v : y) mean_y += v;
    mean_y /= static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = static_cast<double>(i) - mean_x;
        num += dx * (y[i] - mean_y);
        den += dx * dx;
    }
    return num / den;
}

}  // namespace

TermClass classify_term(const DiffusionSeries& series) {
    const auto& support = series.support_per_window;
    if (support.size() < 3) {
        throw DataError("classify_term: needs at least 3 windows of history");
    }
    const std::size_t n = support.size();
    const int s0 = support[n - 3], s1 = support[n - 2], s2 = support[n - 1];

    if (s0 < s1 && s1 < s2) return TermClass::divergent;
    if (s0 > s1 && s1 > s2 && s2 == 1) return TermClass::convergent;
    if (s2 >= 2 && !series.scores.empty() && least_squares_slope(series.scores) > 0.0) {
        return TermClass::broad;
    }
    const bool always_single =
        std::all_of(support.begin(), support.end(), [](int s) { return s == 1; });
    const bool any_significant =
        std::any_of(series.significant.begin(), series.significant.end(), [](bool b) { return b; });
    if (always_single && !any_significant) return TermClass::narrow;
    return TermClass::unclassified;
}

double history_gjs(const std::vector<TermTopicDistribution>& windows, std::size_t term,
                   const std::vector<double>& weights) {
    if (windows.size() < 2) {
        throw DataError("history_gjs: needs at least 2 windows");
    }
    std::vector<std::vector<double>> dists;
    dists.reserve(windows.size());
    for (const auto& w : windows) dists.push_back(w.term_distribution(term));
    if (weights.empty()) {
        const std::vector<double> uniform(dists.size(), 1.0 / static_cast<double>(dists.size()));
        return gjs(dists, uniform);
    }
    return gjs(dists, weights);
}

TopicAlignment align_topics(const TopicTermMatrix& prev, const TopicTermMatrix& curr) {
    if (prev.topics() != curr.topics() || prev.terms() != curr.terms()) {
        throw DataError("align_topics: topic-term matrices have mismatched shapes");
    }
    const Eigen::Index k = prev.topics();
    DenseMatrix cost(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = 0; b < k; ++b) {
            const double na = prev.values.row(a).norm();
            const double nb = curr.values.row(b).norm();
            double cosine = 0.0;
            if (na > 0.0 && nb > 0.0) {
                cosine = prev.values.row(a).dot(curr.values.row(b)) / (na * nb);
            } else if (na == 0.0 && nb == 0.0) {
                cosine = 1.0;  // two all-zero topics are a perfect match
            }
            cost(a, b) = 1.0 - cosine;
        }
    }
    TopicAlignment alignment;
    alignment.permutation = min_cost_assignment(cost, &alignment.total_cost);
    return alignment;
}

}  // namespace topicdrift
