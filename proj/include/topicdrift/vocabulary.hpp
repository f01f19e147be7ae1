#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "topicdrift/corpus.hpp"
#include "topicdrift/matrix.hpp"

namespace topicdrift {

/// Splits on whitespace and punctuation, lowercases ASCII. Bytes >= 0x80 are
/// kept as token characters so UTF-8 sequences stay intact.
std::vector<std::string> tokenize(std::string_view text);

// Curated dictionary of (possibly multi-word) terms plus alias surface forms.
// Term order is fixed at construction (lexicographic) and defines the column
// index of every matrix in a run.
class Vocabulary {
public:
    /// Lowercases, normalizes whitespace, and deduplicates the keywords, then
    /// folds in alias rules (surface -> canonical). No stemming, no stopword
    /// removal. Throws DataError when a rule targets an unknown term, when a
    /// surface collides with a canonical term, or when a keyword has no
    /// tokens.
    static Vocabulary build(const std::vector<std::string>& keywords,
                            const std::vector<std::pair<std::string, std::string>>& alias_rules = {});

    std::size_t size() const { return terms_.size(); }
    const std::vector<std::string>& terms() const { return terms_; }
    const std::string& term(std::size_t i) const { return terms_.at(i); }

    /// Index of a canonical term or alias surface (normalized first).
    std::optional<std::size_t> index_of(std::string_view surface) const;

    std::size_t max_phrase_tokens() const { return max_phrase_tokens_; }

    /// Number of non-overlapping occurrences of each term in the token
    /// stream, matched greedily longest-phrase-first, left to right.
    std::vector<std::uint32_t> count_tokens(const std::vector<std::string>& tokens) const;

private:
    std::vector<std::string> terms_;
    std::unordered_map<std::string, std::size_t> phrase_index_;  // phrase -> term index
    std::size_t max_phrase_tokens_ = 0;
};

/// Builds the n x m count matrix for the given documents. Cell (d, i) counts
/// non-overlapping occurrences of term i or its aliases in document d. A
/// matched multi-word phrase does not also increment its constituent terms.
/// Documents with no matches keep their (empty) row.
SparseDocTermMatrix count_matrix(const std::vector<Document>& docs, const Vocabulary& vocab);

}  // namespace topicdrift
