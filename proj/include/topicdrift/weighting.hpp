#pragma once

#include <string>
#include <vector>

#include "topicdrift/matrix.hpp"

namespace topicdrift {

/// tf-idf with weight(d, i) = tf(d, i) * ln(n / df(i)), where n is the
/// document count of the matrix and df(i) the number of documents containing
/// term i. Terms occurring in every document get idf 0 and their column is
/// dropped from storage.
WeightedMatrix tfidf(const SparseDocTermMatrix& counts);

struct LabeledMatrix {
    std::string label;
    SparseMatrix matrix;
};

/// Sliding-window stacks over per-slice count matrices: window w_t vertically
/// stacks the documents of slices {t-window+1 .. t} and tf-idf is computed on
/// the stacked counts. Windows are labeled by their terminal slice. Throws
/// ConfigError when window is 0 or exceeds the slice count.
std::vector<LabeledMatrix> window_stack(const std::vector<LabeledMatrix>& slice_counts,
                                        std::size_t window);

}  // namespace topicdrift
