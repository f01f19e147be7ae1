#include "topicdrift/matrix.hpp"

#include <cmath>
#include <sstream>

#include "topicdrift/errors.hpp"

namespace topicdrift {

double frobenius_norm(const DenseMatrix& m) {
    return m.norm();
}

double rmse(const DenseMatrix& x, const DenseMatrix& xp) {
    if (x.rows() != xp.rows() || x.cols() != xp.cols()) {
        std::ostringstream msg;
        msg << "rmse: shape mismatch (" << x.rows() << "x" << x.cols() << " vs "
            << xp.rows() << "x" << xp.cols() << ")";
        throw DataError(msg.str());
    }
    const double n = static_cast<double>(x.rows()) * static_cast<double>(x.cols());
    return std::sqrt((x - xp).squaredNorm() / n);
}

std::size_t SparseMatrix::nnz() const {
    std::size_t total = 0;
    for (const auto& row : rows) total += row.size();
    return total;
}

double SparseMatrix::at(std::size_t row, std::uint32_t col) const {
    for (const auto& e : rows.at(row)) {
        if (e.col == col) return e.value;
        if (e.col > col) break;
    }
    return 0.0;
}

DenseMatrix SparseMatrix::to_dense() const {
    DenseMatrix out = DenseMatrix::Zero(static_cast<Eigen::Index>(rows.size()),
                                        static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (const auto& e : rows[r]) {
            out(static_cast<Eigen::Index>(r), e.col) = e.value;
        }
    }
    return out;
}

DenseMatrix SparseMatrix::dense_rows(std::span<const std::size_t> which) const {
    DenseMatrix out = DenseMatrix::Zero(static_cast<Eigen::Index>(which.size()),
                                        static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < which.size(); ++i) {
        for (const auto& e : rows.at(which[i])) {
            out(static_cast<Eigen::Index>(i), e.col) = e.value;
        }
    }
    return out;
}

void SparseMatrix::append_rows(const SparseMatrix& other) {
    if (other.cols != cols) {
        throw DataError("append_rows: column counts differ");
    }
    rows.insert(rows.end(), other.rows.begin(), other.rows.end());
    row_labels.insert(row_labels.end(), other.row_labels.begin(), other.row_labels.end());
}

void SparseMatrix::validate() const {
    if (row_labels.size() != rows.size()) {
        throw DataError("sparse matrix: row label count does not match row count");
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::int64_t prev = -1;
        for (const auto& e : rows[r]) {
            if (e.col >= cols) throw DataError("sparse matrix: column index out of range");
            if (static_cast<std::int64_t>(e.col) <= prev) {
                throw DataError("sparse matrix: duplicate or unsorted column in row");
            }
            if (!(e.value > 0.0) || !std::isfinite(e.value)) {
                throw DataError("sparse matrix: stored values must be finite and > 0");
            }
            prev = e.col;
        }
    }
}

}  // namespace topicdrift
