#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "topicdrift/diffusion.hpp"
#include "topicdrift/matrix.hpp"

namespace topicdrift {

/// Shortest representation that round-trips a double exactly.
std::string format_double(double v);

/// Writes content to a temp file in the target directory, then renames.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

// Sparse triplet CSV: a "row,col,value" header line then one entry per line.
// A sidecar <path>.meta.json carries {n_rows, n_cols, row_labels}.
void write_sparse_csv(const SparseMatrix& matrix, const std::filesystem::path& csv_path);
SparseMatrix read_sparse_csv(const std::filesystem::path& csv_path);

/// One term per line, in vocabulary (column) order.
void write_term_list(const std::vector<std::string>& terms, const std::filesystem::path& path);
std::vector<std::string> read_term_list(const std::filesystem::path& path);

/// Alias CSV rows: surface,canonical. Lines starting with '#' are skipped.
std::vector<std::pair<std::string, std::string>> read_alias_csv(const std::filesystem::path& path);

// Topic-term matrices: dense CSV with a header row of terms for m <= 10^4;
// above that a binary variant (magic "TTMX") is used instead. The chosen
// extension is .u.csv / .u.bin.
std::filesystem::path write_topic_term(const TopicTermMatrix& u,
                                       const std::vector<std::string>& terms,
                                       const std::filesystem::path& dir);
TopicTermMatrix read_topic_term(const std::filesystem::path& path, std::string window_label);

}  // namespace topicdrift
