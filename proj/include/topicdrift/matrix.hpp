#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace topicdrift {

using DenseMatrix = Eigen::MatrixXd;

/// sqrt of the sum of squared entries.
double frobenius_norm(const DenseMatrix& m);

/// sqrt of the mean squared elementwise difference. Throws DataError on
/// shape mismatch.
double rmse(const DenseMatrix& x, const DenseMatrix& xp);

struct SparseEntry {
    std::uint32_t col = 0;
    double value = 0.0;
};

// Row-compressed document-term matrix. Used both for raw counts and for the
// tf-idf weighted form. Stored values are > 0; absent cells mean 0. Rows with
// no entries are legal (documents that matched nothing).
struct SparseMatrix {
    std::size_t cols = 0;
    std::vector<std::vector<SparseEntry>> rows;  // entries sorted by col
    std::vector<std::string> row_labels;         // document ids, parallel to rows

    std::size_t n_rows() const { return rows.size(); }
    std::size_t nnz() const;

    double at(std::size_t row, std::uint32_t col) const;

    DenseMatrix to_dense() const;

    /// Densifies the given subset of rows, in the given order.
    DenseMatrix dense_rows(std::span<const std::size_t> which) const;

    /// Appends all rows (and labels) of other. Column counts must match.
    void append_rows(const SparseMatrix& other);

    void validate() const;  // finite, > 0, sorted, in-range; throws DataError
};

using SparseDocTermMatrix = SparseMatrix;
using WeightedMatrix = SparseMatrix;

}  // namespace topicdrift
