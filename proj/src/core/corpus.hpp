#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "core/labels.hpp"

namespace ratl {

enum class Origin { human, bot };

struct ChatMessage {
    std::string id;
    std::string team;
    std::string author;
    std::int64_t timestamp = 0; // Unix seconds, UTC
    std::string text;
    Origin origin = Origin::human;
};

struct AnnotatedMessage {
    ChatMessage message;
    LabelSet labels; // empty = no rationale
};

enum class CorpusFormat { jsonl, csv };

// Immutable once built; messages are ordered by (team, timestamp) with file
// order as the tie-break, so timestamps are non-decreasing within each team.
class Corpus {
public:
    Corpus() = default;

    // Sorts, checks id uniqueness and the bot-labels-empty invariant.
    static Corpus build(std::vector<AnnotatedMessage> messages, bool annotated);

    const std::vector<AnnotatedMessage>& messages() const { return messages_; }
    std::size_t size() const { return messages_.size(); }
    bool annotated() const { return annotated_; }

    std::vector<std::string> teams() const; // sorted, unique
    std::size_t count_origin(Origin o) const;
    std::size_t count_rationale() const; // messages with non-empty labels

private:
    std::vector<AnnotatedMessage> messages_;
    bool annotated_ = false;
};

// Loads and validates a message file. Errors name the offending line and
// field; duplicate ids name both lines.
Corpus load_messages(const std::string& path, CorpusFormat format);

// Keeps exactly the human-origin messages.
Corpus filter_bots(const Corpus& corpus);

// Annotation records as (message_id, labels); one id may appear on several
// lines, joined by union.
std::vector<std::pair<std::string, LabelSet>> load_annotations(const std::string& path);

// Attaches label sets to messages. Unreferenced messages get an empty set;
// unknown ids and annotations on bot messages are errors.
Corpus join_annotations(const Corpus& corpus,
                        const std::vector<std::pair<std::string, LabelSet>>& annotations);

// Partition by team; every message lands in exactly one sub-corpus.
std::map<std::string, Corpus> split_by_team(const Corpus& corpus);

// Canonical JSONL; emits a "labels" array when the corpus is annotated.
void write_messages_jsonl(const Corpus& corpus, std::ostream& out);
void write_messages_jsonl(const Corpus& corpus, const std::string& path);

} // namespace ratl
