#include "core/textfeat.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "core/errors.hpp"

namespace ratl {
namespace {

// Classic English function-word list; applied only when
// FeatureConfig::stopword_removal is on (off by default).
const std::set<std::string, std::less<>>& stopwords() {
    static const std::set<std::string, std::less<>> words = {
        "a",    "an",   "and",  "are",  "as",    "at",   "be",   "but",   "by",   "for",
        "from", "had",  "has",  "have", "he",    "her",  "his",  "how",   "i",    "if",
        "in",   "is",   "it",   "its",  "me",    "no",   "not",  "of",    "on",   "or",
        "she",  "so",   "that", "the",  "their", "them", "then", "there", "they", "this",
        "to",   "was",  "we",   "were", "what",  "when", "which", "who",  "will", "with",
        "you"};
    return words;
}

struct CodepointRange {
    char32_t lo, hi;
};

// Coarse letter/digit blocks. Covers Latin (incl. extensions), Greek,
// Cyrillic, Armenian, Hebrew, Arabic, Devanagari, CJK, Kana and Hangul;
// punctuation, symbol and emoji blocks fall outside and act as separators.
constexpr CodepointRange kWordRanges[] = {
    {0x00AA, 0x00AA}, {0x00B5, 0x00B5}, {0x00BA, 0x00BA}, {0x00C0, 0x00D6},
    {0x00D8, 0x00F6}, {0x00F8, 0x02AF}, {0x0370, 0x0373}, {0x0376, 0x0377},
    {0x037B, 0x037D}, {0x0386, 0x0386}, {0x0388, 0x03FF}, {0x0400, 0x0481},
    {0x048A, 0x052F}, {0x0531, 0x0556}, {0x0561, 0x0587}, {0x05D0, 0x05EA},
    {0x05F0, 0x05F2}, {0x0620, 0x064A}, {0x0660, 0x0669}, {0x066E, 0x06D3},
    {0x06F0, 0x06F9}, {0x0904, 0x0939}, {0x0958, 0x0961}, {0x0966, 0x096F},
    {0x0E01, 0x0E30}, {0x1E00, 0x1FBC}, {0x1FC2, 0x1FCC}, {0x1FD0, 0x1FDB},
    {0x1FE0, 0x1FEC}, {0x1FF2, 0x1FFC}, {0x3041, 0x3096}, {0x30A1, 0x30FA},
    {0x4E00, 0x9FFF}, {0xAC00, 0xD7A3}, {0xF900, 0xFAFF},
};

bool is_word_codepoint(char32_t cp) {
    if (cp < 0x80) {
        return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
    }
    for (const auto& r : kWordRanges) {
        if (cp >= r.lo && cp <= r.hi) return true;
    }
    return false;
}

// Decodes one UTF-8 codepoint starting at i; advances i past it. Malformed
// bytes decode as U+FFFD (a separator) one byte at a time.
char32_t decode_utf8(std::string_view s, std::size_t& i) {
    const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
    unsigned char b0 = byte(i);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int extra;
    char32_t cp;
    if ((b0 & 0xE0) == 0xC0) {
        extra = 1;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        extra = 2;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        extra = 3;
        cp = b0 & 0x07;
    } else {
        ++i;
        return 0xFFFD;
    }
    if (i + static_cast<std::size_t>(extra) >= s.size()) {
        ++i;
        return 0xFFFD;
    }
    for (int k = 1; k <= extra; ++k) {
        if ((byte(i + k) & 0xC0) != 0x80) {
            ++i;
            return 0xFFFD;
        }
        cp = (cp << 6) | (byte(i + k) & 0x3F);
    }
    i += 1 + extra;
    return cp;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// ASCII-only lowercasing; non-ASCII letters are kept as-is.
char32_t lower(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 32;
    return cp;
}

std::vector<std::string> split_words(std::string_view text, const FeatureConfig& config) {
    std::vector<std::string> words;
    std::string current;
    std::size_t i = 0;
    while (i < text.size()) {
        char32_t cp = decode_utf8(text, i);
        if (is_word_codepoint(cp)) {
            append_utf8(current, config.lowercase ? lower(cp) : cp);
        } else if (!current.empty()) {
            words.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) words.push_back(std::move(current));

    if (config.stopword_removal) {
        std::erase_if(words, [](const std::string& w) { return stopwords().count(w) > 0; });
    }
    return words;
}

} // namespace

Vocabulary::Vocabulary(std::vector<std::string> sorted_terms) : terms_(std::move(sorted_terms)) {
    index_.reserve(terms_.size());
    for (std::uint32_t i = 0; i < terms_.size(); ++i) {
        index_.emplace(terms_[i], i);
    }
}

std::optional<std::uint32_t> Vocabulary::index_of(std::string_view term) const {
    auto it = index_.find(term);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

double SparseCountVector::total() const {
    double t = 0;
    for (const auto& [idx, count] : entries) t += count;
    return t;
}

std::uint32_t SparseCountVector::max_index() const {
    return entries.empty() ? 0 : entries.back().first;
}

double dot(const SparseCountVector& x, const std::vector<double>& dense) {
    double s = 0;
    for (const auto& [idx, count] : x.entries) s += count * dense[idx];
    return s;
}

double squared_distance(const SparseCountVector& a, const SparseCountVector& b) {
    double s = 0;
    std::size_t i = 0, j = 0;
    while (i < a.entries.size() && j < b.entries.size()) {
        if (a.entries[i].first == b.entries[j].first) {
            double d = a.entries[i].second - b.entries[j].second;
            s += d * d;
            ++i;
            ++j;
        } else if (a.entries[i].first < b.entries[j].first) {
            s += a.entries[i].second * a.entries[i].second;
            ++i;
        } else {
            s += b.entries[j].second * b.entries[j].second;
            ++j;
        }
    }
    for (; i < a.entries.size(); ++i) s += a.entries[i].second * a.entries[i].second;
    for (; j < b.entries.size(); ++j) s += b.entries[j].second * b.entries[j].second;
    return s;
}

std::vector<std::string> tokenize(std::string_view text, const FeatureConfig& config) {
    const std::vector<std::string> words = split_words(text, config);
    std::vector<std::string> tokens;
    const int w = static_cast<int>(words.size());
    for (int n = config.ngram_min; n <= config.ngram_max && n <= w; ++n) {
        for (int start = 0; start + n <= w; ++start) {
            std::string gram = words[start];
            for (int k = 1; k < n; ++k) {
                gram += ' ';
                gram += words[start + k];
            }
            tokens.push_back(std::move(gram));
        }
    }
    return tokens;
}

Vocabulary build_vocabulary(const std::vector<std::string>& training_texts,
                            const FeatureConfig& config) {
    std::set<std::string> distinct;
    for (const auto& text : training_texts) {
        for (auto& token : tokenize(text, config)) {
            distinct.insert(std::move(token));
        }
    }
    if (distinct.empty()) throw DataError("empty vocabulary");
    return Vocabulary(std::vector<std::string>(distinct.begin(), distinct.end()));
}

SparseCountVector vectorize(std::string_view text, const Vocabulary& vocab,
                            const FeatureConfig& config) {
    return vectorize_tokens(tokenize(text, config), vocab);
}

SparseCountVector vectorize_tokens(const std::vector<std::string>& tokens, const Vocabulary& vocab) {
    std::map<std::uint32_t, double> counts;
    for (const auto& token : tokens) {
        if (auto idx = vocab.index_of(token)) counts[*idx] += 1.0;
    }
    SparseCountVector v;
    v.entries.assign(counts.begin(), counts.end());
    return v;
}

} // namespace ratl
