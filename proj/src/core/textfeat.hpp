#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ratl {

struct FeatureConfig {
    int ngram_min = 1;
    int ngram_max = 3;
    bool lowercase = true;
    bool stopword_removal = false;
};

// term -> column index; indices are the lexicographic ranks of the terms, so
// the mapping is a pure function of the training texts.
class Vocabulary {
public:
    Vocabulary() = default;
    explicit Vocabulary(std::vector<std::string> sorted_terms);

    std::optional<std::uint32_t> index_of(std::string_view term) const;
    std::size_t size() const { return terms_.size(); }
    const std::vector<std::string>& terms() const { return terms_; }

    bool operator==(const Vocabulary& other) const { return terms_ == other.terms_; }

private:
    std::vector<std::string> terms_;
    std::unordered_map<std::string_view, std::uint32_t> index_; // views into terms_
};

// (index, count) pairs with strictly increasing indices and counts > 0.
// Counts are real-valued so synthetic (interpolated) samples fit the type.
struct SparseCountVector {
    std::vector<std::pair<std::uint32_t, double>> entries;

    double total() const;
    std::uint32_t max_index() const; // 0 when empty
    bool operator==(const SparseCountVector&) const = default;
};

double dot(const SparseCountVector& x, const std::vector<double>& dense);
double squared_distance(const SparseCountVector& a, const SparseCountVector& b);

// Splits text into words (maximal runs of Unicode letters/digits; everything
// else separates), lowercases if configured, drops stopwords if configured,
// then emits all n-grams with n in [ngram_min, ngram_max], words joined by a
// single space. Grams are grouped by length, shortest first.
std::vector<std::string> tokenize(std::string_view text, const FeatureConfig& config);

// Distinct tokens of the training texts, indexed lexicographically.
// Throws DataError when no text produces a token.
Vocabulary build_vocabulary(const std::vector<std::string>& training_texts,
                            const FeatureConfig& config);

// Token counts over the vocabulary; out-of-vocabulary tokens are dropped.
SparseCountVector vectorize(std::string_view text, const Vocabulary& vocab,
                            const FeatureConfig& config);
SparseCountVector vectorize_tokens(const std::vector<std::string>& tokens, const Vocabulary& vocab);

} // namespace ratl
