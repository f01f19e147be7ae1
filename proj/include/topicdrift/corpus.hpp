#pragma once

#include <compare>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace topicdrift {

/// Calendar date, UTC day precision.
struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    auto operator<=>(const Date&) const = default;

    std::string to_string() const;  // YYYY-MM-DD

    /// Accepts YYYY-MM-DD, optionally followed by a time suffix (ISO 8601),
    /// which is ignored. Returns nullopt for anything unparseable or not a
    /// real calendar day.
    static std::optional<Date> parse(std::string_view text);
};

struct Document {
    std::string id;
    Date date;
    std::string text;
};

struct RejectedRecord {
    std::size_t line = 0;    // 1-based line in the source file; 0 if n/a
    std::string id;          // document id when known
    std::string reason;
};

struct Corpus {
    std::vector<Document> documents;
    std::vector<RejectedRecord> rejects;
};

/// Reads a JSONL corpus: one object per line with fields id, timestamp, text.
/// Malformed records are skipped and reported in Corpus::rejects, never
/// silently dropped. Throws DataError if the file cannot be read.
Corpus load_corpus(const std::filesystem::path& path);
Corpus load_corpus(std::istream& in);

struct TimeSlice {
    std::string label;
    Date start;  // inclusive
    Date end;    // inclusive
    std::vector<std::size_t> doc_indices;  // into Corpus::documents, in corpus order

    bool contains(const Date& d) const { return start <= d && d <= end; }
};

struct SliceAssignment {
    std::vector<TimeSlice> slices;
    std::vector<RejectedRecord> out_of_range;  // documents dated outside every slice
};

/// Validates that the slice ranges are ordered and non-overlapping, then bins
/// every document into its slice. Documents outside all slices land in
/// out_of_range.
SliceAssignment assign_slices(const Corpus& corpus, const std::vector<TimeSlice>& slice_defs);

}  // namespace topicdrift
