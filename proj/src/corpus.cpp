#include "topicdrift/corpus.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "topicdrift/errors.hpp"

namespace topicdrift {

namespace {

bool is_leap(int year) {
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int days_in_month(int year, int month) {
    static constexpr int kDays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month == 2 && is_leap(year)) return 29;
    return kDays[month - 1];
}

}  // namespace

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

std::optional<Date> Date::parse(std::string_view text) {
    // YYYY-MM-DD prefix; anything after position 10 must start a time suffix.
    if (text.size() < 10) return std::nullopt;
    if (text.size() > 10 && text[10] != 'T' && text[10] != ' ') return std::nullopt;
    for (std::size_t i = 0; i < 10; ++i) {
        const char c = text[i];
        if (i == 4 || i == 7) {
            if (c != '-') return std::nullopt;
        } else if (c < '0' || c > '9') {
            return std::nullopt;
        }
    }
    auto num = [&](std::size_t pos, std::size_t len) {
        int v = 0;
        for (std::size_t i = pos; i < pos + len; ++i) v = v * 10 + (text[i] - '0');
        return v;
    };
    Date d{num(0, 4), num(5, 2), num(8, 2)};
    if (d.year < 1 || d.month < 1 || d.month > 12) return std::nullopt;
    if (d.day < 1 || d.day > days_in_month(d.year, d.month)) return std::nullopt;
    return d;
}

Corpus load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open corpus file: " + path.string());
    }
    return load_corpus(in);
}

Corpus load_corpus(std::istream& in) {
    Corpus corpus;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;

        auto reject = [&](std::string reason, std::string id = {}) {
            corpus.rejects.push_back({line_no, std::move(id), std::move(reason)});
        };

        nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
        if (record.is_discarded() || !record.is_object()) {
            reject("invalid JSON object");
            continue;
        }
        if (!record.contains("id") || !record["id"].is_string()) {
            reject(record.contains("id") ? "id is not a string" : "missing id");
            continue;
        }
        std::string id = record["id"].get<std::string>();
        if (!record.contains("timestamp")) {
            reject("missing timestamp", id);
            continue;
        }
        if (!record["timestamp"].is_string()) {
            reject("timestamp is not a string", id);
            continue;
        }
        auto date = Date::parse(record["timestamp"].get<std::string>());
        if (!date) {
            reject("unparseable timestamp", id);
            continue;
        }
        if (!record.contains("text") || !record["text"].is_string()) {
            reject(record.contains("text") ? "text is not a string" : "missing text", id);
            continue;
        }
        if (!seen_ids.insert(id).second) {
            reject("duplicate id", id);
            continue;
        }
        corpus.documents.push_back({std::move(id), *date, record["text"].get<std::string>()});
    }
    return corpus;
}

SliceAssignment assign_slices(const Corpus& corpus, const std::vector<TimeSlice>& slice_defs) {
    for (std::size_t i = 0; i < slice_defs.size(); ++i) {
        const auto& s = slice_defs[i];
        if (!(s.start < s.end)) {
            throw ConfigError("slice '" + s.label + "': start must precede end");
        }
        if (i > 0 && !(slice_defs[i - 1].end < s.start)) {
            throw ConfigError("slices '" + slice_defs[i - 1].label + "' and '" + s.label +
                              "' overlap or are out of order");
        }
    }

    SliceAssignment out;
    out.slices = slice_defs;
    for (auto& s : out.slices) s.doc_indices.clear();

    for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
        const Date& date = corpus.documents[d].date;
        bool placed = false;
        for (auto& s : out.slices) {
            if (s.contains(date)) {
                s.doc_indices.push_back(d);
                placed = true;
                break;
            }
        }
        if (!placed) {
            out.out_of_range.push_back(
                {0, corpus.documents[d].id, "dated " + date.to_string() + ", outside all slices"});
        }
    }
    return out;
}

}  // namespace topicdrift
