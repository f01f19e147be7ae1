#include "topicdrift/io.hpp"

#include <bit>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "topicdrift/errors.hpp"

namespace topicdrift {

std::string format_double(double v) {
    char buf[40];
    // %.17g always round-trips; prefer the shortest form that still does.
    for (int precision : {15, 16, 17}) {
        std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
        double parsed = 0.0;
        std::sscanf(buf, "%lf", &parsed);
        if (parsed == v) break;
    }
    return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write file: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw DataError("short write: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_sparse_csv(const SparseMatrix& matrix, const std::filesystem::path& csv_path) {
    std::string body = "row,col,value\n";
    for (std::size_t r = 0; r < matrix.rows.size(); ++r) {
        for (const auto& e : matrix.rows[r]) {
            body += std::to_string(r);
            body += ',';
            body += std::to_string(e.col);
            body += ',';
            body += format_double(e.value);
            body += '\n';
        }
    }
    write_file_atomic(csv_path, body);

    const nlohmann::json meta = {{"n_rows", matrix.rows.size()},
                                 {"n_cols", matrix.cols},
                                 {"row_labels", matrix.row_labels}};
    write_file_atomic(csv_path.string() + ".meta.json", meta.dump(2) + "\n");
}

SparseMatrix read_sparse_csv(const std::filesystem::path& csv_path) {
    const nlohmann::json meta =
        nlohmann::json::parse(read_file(csv_path.string() + ".meta.json"), nullptr, false);
    if (meta.is_discarded() || !meta.is_object()) {
        throw DataError("bad sidecar header for " + csv_path.string());
    }
    SparseMatrix matrix;
    try {
        matrix.cols = meta.at("n_cols").get<std::size_t>();
        matrix.row_labels = meta.at("row_labels").get<std::vector<std::string>>();
        matrix.rows.resize(meta.at("n_rows").get<std::size_t>());
    } catch (const nlohmann::json::exception& e) {
        throw DataError("bad sidecar header for " + csv_path.string() + ": " + e.what());
    }
    if (matrix.row_labels.size() != matrix.rows.size()) {
        throw DataError("sidecar row_labels do not match n_rows: " + csv_path.string());
    }

    std::istringstream in(read_file(csv_path));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 || line.empty()) continue;  // header
        std::size_t row = 0;
        std::uint32_t col = 0;
        double value = 0.0;
        if (std::sscanf(line.c_str(), "%zu,%" SCNu32 ",%lf", &row, &col, &value) != 3) {
            throw DataError("bad triplet at " + csv_path.string() + ":" + std::to_string(line_no));
        }
        if (row >= matrix.rows.size() || col >= matrix.cols) {
            throw DataError("triplet out of range at " + csv_path.string() + ":" +
                            std::to_string(line_no));
        }
        matrix.rows[row].push_back({col, value});
    }
    matrix.validate();
    return matrix;
}

void write_term_list(const std::vector<std::string>& terms, const std::filesystem::path& path) {
    std::string body;
    for (const auto& t : terms) {
        body += t;
        body += '\n';
    }
    write_file_atomic(path, body);
}

std::vector<std::string> read_term_list(const std::filesystem::path& path) {
    std::istringstream in(read_file(path));
    std::vector<std::string> terms;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) terms.push_back(line);
    }
    return terms;
}

std::vector<std::pair<std::string, std::string>> read_alias_csv(const std::filesystem::path& path) {
    std::istringstream in(read_file(path));
    std::vector<std::pair<std::string, std::string>> rules;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos || comma == 0 || comma + 1 >= line.size()) {
            throw DataError("bad alias row at " + path.string() + ":" + std::to_string(line_no) +
                            " (expected surface,canonical)");
        }
        rules.emplace_back(line.substr(0, comma), line.substr(comma + 1));
    }
    return rules;
}

// ---------------------------------------------------------------------------
// Topic-term matrix files
// ---------------------------------------------------------------------------

namespace {

constexpr std::size_t kCsvTermLimit = 10000;
constexpr char kUMagic[4] = {'T', 'T', 'M', 'X'};

template <typename T>
void append_le(std::string& buf, T value) {
    char raw[sizeof(T)];
    std::memcpy(raw, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(raw, raw + sizeof(T));
    }
    buf.append(raw, sizeof(T));
}

template <typename T>
T read_le(const std::string& buf, std::size_t& pos) {
    if (pos + sizeof(T) > buf.size()) throw DataError("topic-term matrix: truncated file");
    char raw[sizeof(T)];
    std::memcpy(raw, buf.data() + pos, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(raw, raw + sizeof(T));
    }
    pos += sizeof(T);
    T value;
    std::memcpy(&value, raw, sizeof(T));
    return value;
}

}  // namespace

std::filesystem::path write_topic_term(const TopicTermMatrix& u,
                                       const std::vector<std::string>& terms,
                                       const std::filesystem::path& dir) {
    if (static_cast<Eigen::Index>(terms.size()) != u.terms()) {
        throw DataError("write_topic_term: term list does not match matrix width");
    }
    if (terms.size() <= kCsvTermLimit) {
        std::string body;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            if (i) body += ',';
            body += terms[i];
        }
        body += '\n';
        for (Eigen::Index r = 0; r < u.topics(); ++r) {
            for (Eigen::Index c = 0; c < u.terms(); ++c) {
                if (c) body += ',';
                body += format_double(u.values(r, c));
            }
            body += '\n';
        }
        const auto path = dir / (u.window_label + ".u.csv");
        write_file_atomic(path, body);
        return path;
    }

    std::string body(kUMagic, 4);
    append_le(body, std::uint32_t{1});
    append_le(body, static_cast<std::uint32_t>(u.topics()));
    append_le(body, static_cast<std::uint32_t>(u.terms()));
    for (Eigen::Index r = 0; r < u.topics(); ++r) {
        for (Eigen::Index c = 0; c < u.terms(); ++c) append_le(body, u.values(r, c));
    }
    const auto path = dir / (u.window_label + ".u.bin");
    write_file_atomic(path, body);
    return path;
}

TopicTermMatrix read_topic_term(const std::filesystem::path& path, std::string window_label) {
    TopicTermMatrix u;
    u.window_label = std::move(window_label);
    const std::string body = read_file(path);

    if (path.extension() == ".bin") {
        std::size_t pos = 0;
        if (body.size() < 4 || std::memcmp(body.data(), kUMagic, 4) != 0) {
            throw DataError("topic-term matrix: bad magic in " + path.string());
        }
        pos = 4;
        if (read_le<std::uint32_t>(body, pos) != 1) {
            throw DataError("topic-term matrix: unsupported version in " + path.string());
        }
        const auto k = read_le<std::uint32_t>(body, pos);
        const auto m = read_le<std::uint32_t>(body, pos);
        u.values.resize(k, m);
        for (std::uint32_t r = 0; r < k; ++r) {
            for (std::uint32_t c = 0; c < m; ++c) u.values(r, c) = read_le<double>(body, pos);
        }
        return u;
    }

    std::istringstream in(body);
    std::string line;
    if (!std::getline(in, line)) throw DataError("topic-term matrix: empty file " + path.string());
    const std::size_t m = 1 + static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        row.reserve(m);
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != m) {
            throw DataError("topic-term matrix: ragged row in " + path.string());
        }
        rows.push_back(std::move(row));
    }
    u.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(m));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < m; ++c) {
            u.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    return u;
}

}  // namespace topicdrift
