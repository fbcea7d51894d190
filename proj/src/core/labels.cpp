#include "core/labels.hpp"

#include <bit>

namespace ratl {

const std::string& label_name(Label l) {
    static const std::array<std::string, kLabelCount> names = {
        "issue", "alternative", "pro", "con", "decision"};
    return names[static_cast<int>(l)];
}

std::optional<Label> label_from_string(std::string_view s) {
    for (Label l : all_labels()) {
        if (s == label_name(l)) return l;
    }
    return std::nullopt;
}

int LabelSet::size() const {
    return std::popcount(bits_);
}

std::vector<Label> LabelSet::labels() const {
    std::vector<Label> out;
    for (Label l : all_labels()) {
        if (contains(l)) out.push_back(l);
    }
    return out;
}

std::vector<std::string> LabelSet::names() const {
    std::vector<std::string> out;
    for (Label l : labels()) out.push_back(label_name(l));
    return out;
}

} // namespace ratl
