#include "core/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/iso8601.hpp"

namespace ratl {
namespace {

using nlohmann::json;

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

std::string trimmed(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return s.substr(b, e - b);
}

[[noreturn]] void fail_line(std::size_t line, const std::string& what) {
    throw DataError("line " + std::to_string(line) + ": " + what);
}

struct RawMessage {
    ChatMessage msg;
    std::size_t line;
};

ChatMessage make_message(std::size_t line, const std::string& id, const std::string& team,
                         const std::string& author, const std::string& timestamp,
                         const std::string& text, const std::string& origin) {
    ChatMessage m;
    m.id = id;
    m.team = team;
    m.author = author;
    if (trimmed(text).empty()) fail_line(line, "field text is empty");
    m.text = text;
    auto ts = parse_iso8601(timestamp);
    if (!ts) fail_line(line, "invalid timestamp \"" + timestamp + "\"");
    m.timestamp = *ts;
    if (origin == "human") {
        m.origin = Origin::human;
    } else if (origin == "bot") {
        m.origin = Origin::bot;
    } else {
        fail_line(line, "invalid origin \"" + origin + "\" (expected human or bot)");
    }
    return m;
}

std::vector<RawMessage> read_jsonl_messages(std::istream& in) {
    static const char* kFields[] = {"id", "team", "author", "timestamp", "text", "origin"};
    std::vector<RawMessage> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trimmed(line).empty()) continue;
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.is_object()) fail_line(lineno, "invalid JSON object");
        for (const char* f : kFields) {
            if (!rec.contains(f)) fail_line(lineno, std::string("missing field ") + f);
            if (!rec[f].is_string()) fail_line(lineno, std::string("field ") + f + " must be a string");
        }
        out.push_back({make_message(lineno, rec["id"], rec["team"], rec["author"],
                                    rec["timestamp"], rec["text"], rec["origin"]),
                       lineno});
    }
    return out;
}

std::vector<RawMessage> read_csv_messages(std::istream& in) {
    CsvReader reader(in);
    auto header = reader.next();
    if (!header) throw DataError("empty CSV file");
    std::unordered_map<std::string, std::size_t> columns;
    for (std::size_t i = 0; i < header->fields.size(); ++i) {
        columns[trimmed(header->fields[i])] = i;
    }
    static const char* kFields[] = {"id", "team", "author", "timestamp", "text", "origin"};
    for (const char* f : kFields) {
        if (!columns.count(f)) throw DataError(std::string("CSV header: missing field ") + f);
    }

    std::vector<RawMessage> out;
    while (auto rec = reader.next()) {
        if (rec->fields.size() == 1 && trimmed(rec->fields[0]).empty()) continue;
        auto get = [&](const char* name) -> const std::string& {
            std::size_t col = columns.at(name);
            if (col >= rec->fields.size()) fail_line(rec->line, std::string("missing field ") + name);
            return rec->fields[col];
        };
        out.push_back({make_message(rec->line, get("id"), get("team"), get("author"),
                                    get("timestamp"), get("text"), get("origin")),
                       rec->line});
    }
    return out;
}

} // namespace

Corpus Corpus::build(std::vector<AnnotatedMessage> messages, bool annotated) {
    std::stable_sort(messages.begin(), messages.end(),
                     [](const AnnotatedMessage& a, const AnnotatedMessage& b) {
                         if (a.message.team != b.message.team) return a.message.team < b.message.team;
                         return a.message.timestamp < b.message.timestamp;
                     });
    std::unordered_map<std::string, std::size_t> seen;
    for (const auto& m : messages) {
        if (!seen.emplace(m.message.id, 0).second) {
            throw DataError("duplicate id \"" + m.message.id + "\"");
        }
        if (m.message.origin == Origin::bot && !m.labels.empty()) {
            throw DataError("bot message \"" + m.message.id + "\" carries labels");
        }
    }
    Corpus c;
    c.messages_ = std::move(messages);
    c.annotated_ = annotated;
    return c;
}

std::vector<std::string> Corpus::teams() const {
    std::vector<std::string> out;
    for (const auto& m : messages_) {
        if (out.empty() || out.back() != m.message.team) out.push_back(m.message.team);
    }
    // messages are sorted by team, so adjacent de-dup is enough
    return out;
}

std::size_t Corpus::count_origin(Origin o) const {
    std::size_t n = 0;
    for (const auto& m : messages_) {
        if (m.message.origin == o) ++n;
    }
    return n;
}

std::size_t Corpus::count_rationale() const {
    std::size_t n = 0;
    for (const auto& m : messages_) {
        if (!m.labels.empty()) ++n;
    }
    return n;
}

Corpus load_messages(const std::string& path, CorpusFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);

    std::vector<RawMessage> raw =
        format == CorpusFormat::jsonl ? read_jsonl_messages(in) : read_csv_messages(in);

    std::unordered_map<std::string, std::size_t> first_line;
    for (const auto& r : raw) {
        auto [it, inserted] = first_line.emplace(r.msg.id, r.line);
        if (!inserted) {
            throw DataError("duplicate id \"" + r.msg.id + "\" (lines " +
                            std::to_string(it->second) + " and " + std::to_string(r.line) + ")");
        }
    }

    std::vector<AnnotatedMessage> messages;
    messages.reserve(raw.size());
    for (auto& r : raw) messages.push_back({std::move(r.msg), LabelSet{}});
    return Corpus::build(std::move(messages), /*annotated=*/false);
}

Corpus filter_bots(const Corpus& corpus) {
    std::vector<AnnotatedMessage> kept;
    kept.reserve(corpus.size());
    for (const auto& m : corpus.messages()) {
        if (m.message.origin == Origin::human) kept.push_back(m);
    }
    return Corpus::build(std::move(kept), corpus.annotated());
}

std::vector<std::pair<std::string, LabelSet>> load_annotations(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);

    std::vector<std::pair<std::string, LabelSet>> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trimmed(line).empty()) continue;
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.is_object()) fail_line(lineno, "invalid JSON object");
        if (!rec.contains("message_id") || !rec["message_id"].is_string()) {
            fail_line(lineno, "missing field message_id");
        }
        if (!rec.contains("labels") || !rec["labels"].is_array()) {
            fail_line(lineno, "missing field labels");
        }
        LabelSet labels;
        for (const auto& item : rec["labels"]) {
            if (!item.is_string()) fail_line(lineno, "labels must be strings");
            auto l = label_from_string(item.get<std::string>());
            if (!l) fail_line(lineno, "unknown label \"" + item.get<std::string>() + "\"");
            labels.add(*l);
        }
        out.emplace_back(rec["message_id"].get<std::string>(), labels);
    }
    return out;
}

Corpus join_annotations(const Corpus& corpus,
                        const std::vector<std::pair<std::string, LabelSet>>& annotations) {
    std::unordered_map<std::string, std::size_t> by_id;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        by_id.emplace(corpus.messages()[i].message.id, i);
    }

    std::vector<AnnotatedMessage> messages = corpus.messages();
    for (const auto& [id, labels] : annotations) {
        auto it = by_id.find(id);
        if (it == by_id.end()) {
            throw DataError("annotation references unknown message id \"" + id + "\"");
        }
        AnnotatedMessage& m = messages[it->second];
        if (m.message.origin == Origin::bot) {
            throw DataError("annotation on bot message \"" + id + "\"");
        }
        m.labels |= labels;
    }
    return Corpus::build(std::move(messages), /*annotated=*/true);
}

std::map<std::string, Corpus> split_by_team(const Corpus& corpus) {
    std::map<std::string, std::vector<AnnotatedMessage>> buckets;
    for (const auto& m : corpus.messages()) {
        buckets[m.message.team].push_back(m);
    }
    std::map<std::string, Corpus> out;
    for (auto& [team, messages] : buckets) {
        out.emplace(team, Corpus::build(std::move(messages), corpus.annotated()));
    }
    return out;
}

void write_messages_jsonl(const Corpus& corpus, std::ostream& out) {
    for (const auto& m : corpus.messages()) {
        json rec{
            {"id", m.message.id},
            {"team", m.message.team},
            {"author", m.message.author},
            {"timestamp", format_iso8601(m.message.timestamp)},
            {"text", m.message.text},
            {"origin", m.message.origin == Origin::human ? "human" : "bot"},
        };
        if (corpus.annotated()) rec["labels"] = m.labels.names();
        out << rec.dump() << '\n';
    }
}

void write_messages_jsonl(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    write_messages_jsonl(corpus, out);
}

} // namespace ratl
