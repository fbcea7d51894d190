#include "core/analytics.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <unordered_map>

#include "core/errors.hpp"
#include "core/evalsuite.hpp"

namespace ratl {
namespace {

using nlohmann::json;

constexpr std::int64_t kDaySeconds = 86400;
constexpr std::int64_t kWeekSeconds = 7 * kDaySeconds;

json opt_to_json(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

json bins_to_json(const std::vector<TimeBin>& bins) {
    json out = json::array();
    for (const auto& b : bins) {
        out.push_back({{"index", b.index}, {"total", b.total}, {"rationale", b.rationale}});
    }
    return out;
}

json elements_to_json(const std::array<std::int64_t, kLabelCount>& counts,
                      std::int64_t rationale) {
    json out;
    for (Label l : all_labels()) {
        const std::int64_t n = counts[static_cast<int>(l)];
        json entry{{"count", n}};
        entry["share"] = rationale > 0
                             ? json(static_cast<double>(n) / static_cast<double>(rationale))
                             : json(nullptr);
        out[label_name(l)] = std::move(entry);
    }
    return out;
}

// Bin counters over [first_ts, last message]; empty bins are materialized so
// the correlation sees the full time axis.
std::vector<TimeBin> make_bins(const std::vector<const AnnotatedMessage*>& messages,
                               std::int64_t start_ts, BinGranularity granularity) {
    const std::int64_t width =
        granularity == BinGranularity::day ? kDaySeconds : kWeekSeconds;
    std::int64_t max_bin = 0;
    for (const auto* m : messages) {
        max_bin = std::max(max_bin, (m->message.timestamp - start_ts) / width);
    }
    std::vector<TimeBin> bins(static_cast<std::size_t>(max_bin) + 1);
    for (std::size_t i = 0; i < bins.size(); ++i) bins[i].index = static_cast<std::int64_t>(i);
    for (const auto* m : messages) {
        auto& bin = bins[static_cast<std::size_t>((m->message.timestamp - start_ts) / width)];
        ++bin.total;
        if (!m->labels.empty()) ++bin.rationale;
    }
    return bins;
}

void bin_correlations(const std::vector<TimeBin>& bins, std::optional<double>& corr_time,
                      std::optional<double>& corr_volume) {
    if (bins.size() < 2) {
        corr_time = std::nullopt;
        corr_volume = std::nullopt;
        return;
    }
    std::vector<double> idx, total, rationale;
    idx.reserve(bins.size());
    for (const auto& b : bins) {
        idx.push_back(static_cast<double>(b.index));
        total.push_back(static_cast<double>(b.total));
        rationale.push_back(static_cast<double>(b.rationale));
    }
    corr_time = spearman(idx, rationale);
    corr_volume = spearman(total, rationale);
}

std::optional<double> pct(std::int64_t num, std::int64_t denom) {
    if (denom == 0) return std::nullopt;
    return 100.0 * static_cast<double>(num) / static_cast<double>(denom);
}

} // namespace

const std::string& relation_name(LinkRelation r) {
    static const std::array<std::string, 4> names = {"addresses", "resolves", "supports",
                                                     "objects"};
    return names[static_cast<int>(r)];
}

std::optional<LinkRelation> relation_from_string(std::string_view s) {
    for (LinkRelation r : {LinkRelation::addresses, LinkRelation::resolves,
                           LinkRelation::supports, LinkRelation::objects}) {
        if (s == relation_name(r)) return r;
    }
    return std::nullopt;
}

double FrequencyReport::share() const {
    return total > 0 ? static_cast<double>(rationale) / static_cast<double>(total) : 0.0;
}

FrequencyReport frequency_report(const Corpus& corpus, BinGranularity granularity) {
    if (!corpus.annotated()) {
        throw std::invalid_argument("frequency_report: corpus is not annotated");
    }
    if (corpus.size() == 0) throw DataError("frequency_report: empty corpus");

    FrequencyReport report;
    report.granularity = granularity;

    std::map<std::string, std::vector<const AnnotatedMessage*>> by_team;
    std::vector<const AnnotatedMessage*> all;
    std::int64_t global_start = corpus.messages().front().message.timestamp;
    for (const auto& m : corpus.messages()) {
        ++report.total;
        global_start = std::min(global_start, m.message.timestamp);
        all.push_back(&m);
        by_team[m.message.team].push_back(&m);
        if (!m.labels.empty()) {
            ++report.rationale;
            for (Label l : m.labels.labels()) ++report.element_counts[static_cast<int>(l)];
        }
    }

    report.bins = make_bins(all, global_start, granularity);
    bin_correlations(report.bins, report.corr_time, report.corr_volume);

    for (const auto& [team, messages] : by_team) {
        TeamFrequency tf;
        tf.team = team;
        std::int64_t team_start = messages.front()->message.timestamp;
        for (const auto* m : messages) {
            team_start = std::min(team_start, m->message.timestamp);
            ++tf.total;
            if (!m->labels.empty()) {
                ++tf.rationale;
                for (Label l : m->labels.labels()) ++tf.element_counts[static_cast<int>(l)];
            }
        }
        tf.bins = make_bins(messages, team_start, granularity);
        bin_correlations(tf.bins, tf.corr_time, tf.corr_volume);
        report.teams.push_back(std::move(tf));
    }
    return report;
}

json FrequencyReport::to_json() const {
    json teams_json = json::array();
    for (const auto& tf : teams) {
        teams_json.push_back({
            {"team", tf.team},
            {"total_messages", tf.total},
            {"rationale_messages", tf.rationale},
            {"share", tf.total > 0
                          ? json(static_cast<double>(tf.rationale) / static_cast<double>(tf.total))
                          : json(nullptr)},
            {"elements", elements_to_json(tf.element_counts, tf.rationale)},
            {"bins", bins_to_json(tf.bins)},
            {"corr_time_rationale", opt_to_json(tf.corr_time)},
            {"corr_volume_rationale", opt_to_json(tf.corr_volume)},
        });
    }
    return json{
        {"report", "frequency"},
        {"granularity", granularity == BinGranularity::day ? "day" : "week"},
        {"total_messages", total},
        {"rationale_messages", rationale},
        {"share", share()},
        {"elements", elements_to_json(element_counts, rationale)},
        {"teams", std::move(teams_json)},
        {"bins", bins_to_json(bins)},
        {"corr_time_rationale", opt_to_json(corr_time)},
        {"corr_volume_rationale", opt_to_json(corr_volume)},
    };
}

std::vector<RationaleLink> parse_links_jsonl(std::istream& in, const Corpus& corpus) {
    if (!corpus.annotated()) throw std::invalid_argument("load_links: corpus is not annotated");
    std::unordered_map<std::string, const AnnotatedMessage*> by_id;
    for (const auto& m : corpus.messages()) by_id.emplace(m.message.id, &m);

    auto parse_ref = [&](const json& j, std::size_t lineno, const char* side) -> ElementRef {
        if (!j.is_object() || !j.contains("message_id") || !j.contains("element")) {
            throw DataError("line " + std::to_string(lineno) + ": " + side +
                            " must have message_id and element");
        }
        ElementRef ref;
        ref.message_id = j.at("message_id").get<std::string>();
        const std::string element = j.at("element").get<std::string>();
        auto label = label_from_string(element);
        if (!label) {
            throw DataError("line " + std::to_string(lineno) + ": unknown element \"" + element +
                            "\"");
        }
        ref.element = *label;
        auto it = by_id.find(ref.message_id);
        if (it == by_id.end()) {
            throw DataError("line " + std::to_string(lineno) + ": unknown message id \"" +
                            ref.message_id + "\"");
        }
        if (!it->second->labels.contains(ref.element)) {
            throw DataError("line " + std::to_string(lineno) + ": message \"" + ref.message_id +
                            "\" is not annotated with " + element);
        }
        return ref;
    };

    std::vector<RationaleLink> links;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.is_object()) {
            throw DataError("line " + std::to_string(lineno) + ": invalid JSON object");
        }
        if (!rec.contains("relation") || !rec["relation"].is_string()) {
            throw DataError("line " + std::to_string(lineno) + ": missing field relation");
        }
        auto relation = relation_from_string(rec["relation"].get<std::string>());
        if (!relation) {
            throw DataError("line " + std::to_string(lineno) + ": unknown relation \"" +
                            rec["relation"].get<std::string>() + "\"");
        }
        RationaleLink link;
        link.relation = *relation;
        link.source = parse_ref(rec.value("source", json()), lineno, "source");
        link.target = parse_ref(rec.value("target", json()), lineno, "target");

        // Signature check: addresses alternative->issue, resolves
        // decision->issue, supports pro->{alternative,decision}, objects
        // con->{alternative,decision}.
        auto signature_error = [&]() {
            throw DataError("line " + std::to_string(lineno) + ": relation " +
                            relation_name(link.relation) + " cannot connect " +
                            label_name(link.source.element) + " -> " +
                            label_name(link.target.element));
        };
        switch (link.relation) {
        case LinkRelation::addresses:
            if (link.source.element != Label::alternative || link.target.element != Label::issue)
                signature_error();
            break;
        case LinkRelation::resolves:
            if (link.source.element != Label::decision || link.target.element != Label::issue)
                signature_error();
            break;
        case LinkRelation::supports:
            if (link.source.element != Label::pro ||
                (link.target.element != Label::alternative &&
                 link.target.element != Label::decision))
                signature_error();
            break;
        case LinkRelation::objects:
            if (link.source.element != Label::con ||
                (link.target.element != Label::alternative &&
                 link.target.element != Label::decision))
                signature_error();
            break;
        }
        links.push_back(std::move(link));
    }
    return links;
}

std::vector<RationaleLink> load_links(const std::string& path, const Corpus& corpus) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    return parse_links_jsonl(in, corpus);
}

std::optional<double> CompletenessReport::pct_issues_with_alternative() const {
    return pct(issues_with_alternative, issues_total);
}
std::optional<double> CompletenessReport::pct_issues_with_decision() const {
    return pct(issues_with_decision, issues_total);
}
std::optional<double> CompletenessReport::pct_issues_bare() const {
    return pct(issues_bare, issues_total);
}
std::optional<double> CompletenessReport::pct_decisions_with_pro() const {
    return pct(decisions_with_pro, decisions_total);
}

CompletenessReport completeness_report(const Corpus& corpus,
                                       const std::vector<RationaleLink>& links) {
    if (!corpus.annotated()) {
        throw std::invalid_argument("completeness_report: corpus is not annotated");
    }

    // Element instances are (message, label) pairs.
    std::set<std::string> issues, decisions;
    for (const auto& m : corpus.messages()) {
        if (m.labels.contains(Label::issue)) issues.insert(m.message.id);
        if (m.labels.contains(Label::decision)) decisions.insert(m.message.id);
    }

    std::set<std::string> issues_addressed, issues_resolved;
    std::set<std::string> supported_decisions;  // direct supports edges
    std::set<std::string> supported_alternatives;
    std::multimap<std::string, std::string> issue_alternatives; // issue -> alternative msg
    std::multimap<std::string, std::string> issue_decisions;    // issue -> decision msg
    for (const auto& link : links) {
        switch (link.relation) {
        case LinkRelation::addresses:
            issues_addressed.insert(link.target.message_id);
            issue_alternatives.emplace(link.target.message_id, link.source.message_id);
            break;
        case LinkRelation::resolves:
            issues_resolved.insert(link.target.message_id);
            issue_decisions.emplace(link.target.message_id, link.source.message_id);
            break;
        case LinkRelation::supports:
            if (link.target.element == Label::decision) {
                supported_decisions.insert(link.target.message_id);
            } else {
                supported_alternatives.insert(link.target.message_id);
            }
            break;
        case LinkRelation::objects:
            break; // objections do not feed the completeness questions
        }
    }

    // A decision also counts as supported when a supported alternative
    // addresses an issue this decision resolves ("the decided alternative").
    for (const auto& [issue_id, decision_id] : issue_decisions) {
        if (supported_decisions.count(decision_id)) continue;
        auto [lo, hi] = issue_alternatives.equal_range(issue_id);
        for (auto it = lo; it != hi; ++it) {
            if (supported_alternatives.count(it->second)) {
                supported_decisions.insert(decision_id);
                break;
            }
        }
    }

    CompletenessReport report;
    report.issues_total = static_cast<std::int64_t>(issues.size());
    report.decisions_total = static_cast<std::int64_t>(decisions.size());
    for (const auto& id : issues) {
        const bool addressed = issues_addressed.count(id) > 0;
        const bool resolved = issues_resolved.count(id) > 0;
        if (addressed) ++report.issues_with_alternative;
        if (resolved) ++report.issues_with_decision;
        if (!addressed && !resolved) ++report.issues_bare;
    }
    for (const auto& id : decisions) {
        if (supported_decisions.count(id)) ++report.decisions_with_pro;
    }
    return report;
}

json CompletenessReport::to_json() const {
    auto block = [](std::int64_t count, std::optional<double> p) {
        json b{{"count", count}};
        b["pct"] = p ? json(*p) : json(nullptr);
        return b;
    };
    return json{
        {"report", "completeness"},
        {"issues",
         {{"total", issues_total},
          {"with_alternative", block(issues_with_alternative, pct_issues_with_alternative())},
          {"with_decision", block(issues_with_decision, pct_issues_with_decision())},
          {"bare", block(issues_bare, pct_issues_bare())}}},
        {"decisions",
         {{"total", decisions_total},
          {"with_pro", block(decisions_with_pro, pct_decisions_with_pro())}}},
    };
}

} // namespace ratl
