#include "topicdrift/vocabulary.hpp"

#include <algorithm>
#include <cctype>

#include "topicdrift/errors.hpp"

namespace topicdrift {

namespace {

bool is_token_char(unsigned char c) {
    return std::isalnum(c) || c >= 0x80;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += ' ';
        out += tokens[i];
    }
    return out;
}

std::string join_range(const std::vector<std::string>& tokens, std::size_t pos, std::size_t len) {
    std::string out;
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (i > pos) out += ' ';
        out += tokens[i];
    }
    return out;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        if (is_token_char(c)) {
            current += static_cast<char>(std::tolower(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

Vocabulary Vocabulary::build(const std::vector<std::string>& keywords,
                             const std::vector<std::pair<std::string, std::string>>& alias_rules) {
    if (keywords.empty()) {
        throw DataError("vocabulary: keyword list is empty");
    }

    Vocabulary vocab;
    std::vector<std::string> normalized;
    normalized.reserve(keywords.size());
    for (const auto& raw : keywords) {
        auto tokens = tokenize(raw);
        if (tokens.empty()) {
            throw DataError("vocabulary: keyword '" + raw + "' has no tokens");
        }
        normalized.push_back(join_tokens(tokens));
    }
    std::sort(normalized.begin(), normalized.end());
    normalized.erase(std::unique(normalized.begin(), normalized.end()), normalized.end());
    vocab.terms_ = std::move(normalized);

    for (std::size_t i = 0; i < vocab.terms_.size(); ++i) {
        vocab.phrase_index_.emplace(vocab.terms_[i], i);
        const std::size_t n_tokens =
            1 + static_cast<std::size_t>(std::count(vocab.terms_[i].begin(), vocab.terms_[i].end(), ' '));
        vocab.max_phrase_tokens_ = std::max(vocab.max_phrase_tokens_, n_tokens);
    }

    for (const auto& [surface_raw, canonical_raw] : alias_rules) {
        auto surface_tokens = tokenize(surface_raw);
        if (surface_tokens.empty()) {
            throw DataError("vocabulary: alias surface '" + surface_raw + "' has no tokens");
        }
        const std::string surface = join_tokens(surface_tokens);
        const std::string canonical = join_tokens(tokenize(canonical_raw));

        auto target = vocab.phrase_index_.find(canonical);
        if (target == vocab.phrase_index_.end() || vocab.terms_[target->second] != canonical) {
            throw DataError("vocabulary: alias '" + surface_raw + "' -> '" + canonical_raw +
                            "': canonical term not in dictionary");
        }
        auto [it, inserted] = vocab.phrase_index_.emplace(surface, target->second);
        if (!inserted && it->second != target->second) {
            throw DataError("vocabulary: alias surface '" + surface_raw +
                            "' conflicts with an existing term or alias");
        }
        vocab.max_phrase_tokens_ = std::max(vocab.max_phrase_tokens_, surface_tokens.size());
    }
    return vocab;
}

std::optional<std::size_t> Vocabulary::index_of(std::string_view surface) const {
    auto it = phrase_index_.find(join_tokens(tokenize(surface)));
    if (it == phrase_index_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::uint32_t> Vocabulary::count_tokens(const std::vector<std::string>& tokens) const {
    std::vector<std::uint32_t> counts(terms_.size(), 0);
    std::size_t pos = 0;
    while (pos < tokens.size()) {
        const std::size_t longest = std::min(max_phrase_tokens_, tokens.size() - pos);
        std::size_t advance = 1;
        for (std::size_t len = longest; len >= 1; --len) {
            auto it = phrase_index_.find(join_range(tokens, pos, len));
            if (it != phrase_index_.end()) {
                ++counts[it->second];
                advance = len;
                break;
            }
        }
        pos += advance;
    }
    return counts;
}

SparseDocTermMatrix count_matrix(const std::vector<Document>& docs, const Vocabulary& vocab) {
    SparseDocTermMatrix matrix;
    matrix.cols = vocab.size();
    matrix.rows.reserve(docs.size());
    matrix.row_labels.reserve(docs.size());
    for (const auto& doc : docs) {
        const auto counts = vocab.count_tokens(tokenize(doc.text));
        std::vector<SparseEntry> row;
        for (std::uint32_t i = 0; i < counts.size(); ++i) {
            if (counts[i] > 0) row.push_back({i, static_cast<double>(counts[i])});
        }
        matrix.rows.push_back(std::move(row));
        matrix.row_labels.push_back(doc.id);
    }
    return matrix;
}

}  // namespace topicdrift
