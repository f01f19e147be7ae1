#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "topicdrift/matrix.hpp"

namespace topicdrift {

struct TopicTermMatrix {
    DenseMatrix values;  // k x m, >= 0
    std::string window_label;

    Eigen::Index topics() const { return values.rows(); }
    Eigen::Index terms() const { return values.cols(); }
};

// Column-stochastic view of a topic-term matrix: column i is P(topic | term i).
struct TermTopicDistribution {
    DenseMatrix probs;  // k x m, columns sum to 1
    std::vector<std::uint32_t> degenerate_terms;  // columns that fell back to uniform
    std::string window_label;

    std::vector<double> term_distribution(std::size_t term) const;
};

/// Divides each column by its sum. Columns with sum < 1e-12 become the
/// uniform vector 1/k and are listed in degenerate_terms.
TermTopicDistribution normalize_termwise(const TopicTermMatrix& u);

enum class TermClass { narrow, broad, divergent, convergent, unclassified };
std::string_view to_string(TermClass c);

struct DiffusionSeries {
    std::size_t term = 0;
    std::vector<double> scores;  // one per consecutive window pair
    double threshold = 0.0;
    std::vector<bool> significant;        // scores[i] > threshold
    std::vector<int> support_per_window;  // topics holding >= tau_mass probability
    TermClass classification = TermClass::unclassified;
};

struct DiffusionOptions {
    double alpha = 0.05;
    std::optional<double> tau_mass;               // default max(0.15, 2/k)
    std::optional<std::vector<double>> weights;   // pair weights, default uniform
};

/// Probability floor for counting a term as occurring in a topic; strictly
/// above the uniform level 1/k so degenerate terms never gain support.
double default_tau_mass(int topics);

/// Pairwise-consecutive divergence trajectory for one term, with the
/// chi-square threshold at t = 2 and the taxonomy classification (when at
/// least 3 windows of history exist).
DiffusionSeries diffusion_series(const std::vector<TermTopicDistribution>& windows,
                                 std::size_t term, const DiffusionOptions& options = {});

/// Taxonomy rules, applied in order: divergent (support strictly rising over
/// the last 3 windows), convergent (support strictly falling to 1), broad
/// (final support >= 2 with a positive least-squares score slope), narrow
/// (support 1 everywhere, nothing significant), else unclassified. Needs
/// >= 3 windows of history.
TermClass classify_term(const DiffusionSeries& series);

/// Whole-history t-way divergence for one term (all windows at once).
double history_gjs(const std::vector<TermTopicDistribution>& windows, std::size_t term,
                   const std::vector<double>& weights = {});

struct TopicAlignment {
    std::vector<int> permutation;  // topic i of prev matches permutation[i] of curr
    double total_cost = 0.0;
};

/// Hungarian matching between two topic-term matrices with cost
/// 1 - cosine(row_a of prev, row_b of curr).
TopicAlignment align_topics(const TopicTermMatrix& prev, const TopicTermMatrix& curr);

}  // namespace topicdrift
