#include "topicdrift/weighting.hpp"

#include <cmath>

#include "topicdrift/errors.hpp"

namespace topicdrift {

WeightedMatrix tfidf(const SparseDocTermMatrix& counts) {
    if (counts.n_rows() == 0) {
        throw DataError("tfidf: matrix has no documents");
    }
    std::vector<std::size_t> df(counts.cols, 0);
    for (const auto& row : counts.rows) {
        for (const auto& e : row) ++df[e.col];
    }
    const double n = static_cast<double>(counts.n_rows());
    std::vector<double> idf(counts.cols, 0.0);
    for (std::size_t i = 0; i < counts.cols; ++i) {
        if (df[i] > 0) idf[i] = std::log(n / static_cast<double>(df[i]));
    }

    WeightedMatrix out;
    out.cols = counts.cols;
    out.row_labels = counts.row_labels;
    out.rows.reserve(counts.n_rows());
    for (const auto& row : counts.rows) {
        std::vector<SparseEntry> weighted;
        weighted.reserve(row.size());
        for (const auto& e : row) {
            const double w = e.value * idf[e.col];
            if (w > 0.0) weighted.push_back({e.col, w});
        }
        out.rows.push_back(std::move(weighted));
    }
    return out;
}

std::vector<LabeledMatrix> window_stack(const std::vector<LabeledMatrix>& slice_counts,
                                        std::size_t window) {
    if (window < 1) {
        throw ConfigError("window_stack: window must be >= 1");
    }
    if (window > slice_counts.size()) {
        throw ConfigError("window_stack: window exceeds the number of slices");
    }
    std::vector<LabeledMatrix> out;
    for (std::size_t t = window - 1; t < slice_counts.size(); ++t) {
        SparseDocTermMatrix stacked;
        stacked.cols = slice_counts[t].matrix.cols;
        for (std::size_t s = t + 1 - window; s <= t; ++s) {
            stacked.append_rows(slice_counts[s].matrix);
        }
        out.push_back({slice_counts[t].label, tfidf(stacked)});
    }
    return out;
}

}  // namespace topicdrift
