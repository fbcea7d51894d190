#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/corpus.hpp"

namespace ratl {

struct ElementRef {
    std::string message_id;
    Label element;
    bool operator==(const ElementRef&) const = default;
};

enum class LinkRelation {
    addresses, // alternative -> issue
    resolves,  // decision -> issue
    supports,  // pro -> alternative or decision
    objects,   // con -> alternative or decision
};

struct RationaleLink {
    ElementRef source;
    ElementRef target;
    LinkRelation relation;
};

const std::string& relation_name(LinkRelation r);
std::optional<LinkRelation> relation_from_string(std::string_view s);

enum class BinGranularity { day, week };

struct TimeBin {
    std::int64_t index = 0; // days or weeks since the first message in scope
    std::int64_t total = 0;
    std::int64_t rationale = 0;
};

struct TeamFrequency {
    std::string team;
    std::int64_t total = 0;
    std::int64_t rationale = 0;
    std::array<std::int64_t, kLabelCount> element_counts{};
    std::vector<TimeBin> bins; // contiguous from 0, empty bins included
    std::optional<double> corr_time;   // bin index vs rationale count
    std::optional<double> corr_volume; // bin total vs rationale count
};

struct FrequencyReport {
    BinGranularity granularity = BinGranularity::week;
    std::int64_t total = 0;
    std::int64_t rationale = 0;
    std::array<std::int64_t, kLabelCount> element_counts{};
    std::vector<TeamFrequency> teams;
    std::vector<TimeBin> bins; // whole corpus, binned from the global start
    std::optional<double> corr_time;
    std::optional<double> corr_volume;

    double share() const; // rationale / total
    nlohmann::json to_json() const;
};

// Counts rationale messages and element occurrences overall, per team and per
// time bin; element shares are relative to the rationale messages and may sum
// above 100% because messages are multilabel.
FrequencyReport frequency_report(const Corpus& corpus, BinGranularity granularity);

// Reads links JSONL and type-checks each link against the annotated corpus:
// endpoints must carry the claimed label and the relation signature must hold.
std::vector<RationaleLink> load_links(const std::string& path, const Corpus& corpus);
std::vector<RationaleLink> parse_links_jsonl(std::istream& in, const Corpus& corpus);

struct CompletenessReport {
    std::int64_t issues_total = 0;
    std::int64_t issues_with_alternative = 0; // has an addresses in-edge
    std::int64_t issues_with_decision = 0;    // has a resolves in-edge
    std::int64_t issues_bare = 0;             // neither
    std::int64_t decisions_total = 0;
    std::int64_t decisions_with_pro = 0; // supported directly or via an
                                         // alternative on a resolved issue

    std::optional<double> pct_issues_with_alternative() const;
    std::optional<double> pct_issues_with_decision() const;
    std::optional<double> pct_issues_bare() const;
    std::optional<double> pct_decisions_with_pro() const;

    nlohmann::json to_json() const;
};

CompletenessReport completeness_report(const Corpus& corpus,
                                       const std::vector<RationaleLink>& links);

} // namespace ratl
