#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ratl {

// The five rationale element types, in their canonical order.
enum class Label : std::uint8_t {
    issue = 0,
    alternative = 1,
    pro = 2,
    con = 3,
    decision = 4,
};

inline constexpr int kLabelCount = 5;

constexpr std::array<Label, kLabelCount> all_labels() {
    return {Label::issue, Label::alternative, Label::pro, Label::con, Label::decision};
}

// Wire names are lowercase and exact: issue|alternative|pro|con|decision.
const std::string& label_name(Label l);
std::optional<Label> label_from_string(std::string_view s);

// Subset of the five labels; empty means "no rationale".
class LabelSet {
public:
    LabelSet() = default;
    LabelSet(std::initializer_list<Label> labels) {
        for (Label l : labels) add(l);
    }
    static LabelSet from_bits(std::uint8_t bits) {
        LabelSet s;
        s.bits_ = static_cast<std::uint8_t>(bits & 0x1f);
        return s;
    }

    void add(Label l) { bits_ |= static_cast<std::uint8_t>(1u << static_cast<int>(l)); }
    bool contains(Label l) const { return (bits_ >> static_cast<int>(l)) & 1u; }
    bool empty() const { return bits_ == 0; }
    int size() const;
    std::uint8_t bits() const { return bits_; }

    LabelSet operator|(LabelSet other) const { return from_bits(bits_ | other.bits_); }
    LabelSet& operator|=(LabelSet other) {
        bits_ |= other.bits_;
        return *this;
    }
    bool operator==(const LabelSet&) const = default;

    std::vector<Label> labels() const;
    std::vector<std::string> names() const;

private:
    std::uint8_t bits_ = 0;
};

} // namespace ratl
