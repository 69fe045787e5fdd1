#pragma once

#include "core.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rlens::ingest {

/// One trial in derived form: did the AI get it right, and did the human
/// follow the AI. One record is one cell of the four-way reliance table.
struct TrialRecord {
    std::string condition_id;
    std::string trial_id;
    bool ai_correct = false;
    bool adhered = false;
    std::optional<std::string> participant;

    friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

/// One trial in raw form: the three binary labels as logged by an experiment
/// platform. Derivation: ai_correct = (ai_decision == ground_truth),
/// adhered = (human_decision == ai_decision).
struct RawDecisionRecord {
    std::string condition_id;
    std::string trial_id;
    std::string ai_decision;
    std::string human_decision;
    std::string ground_truth;
    std::optional<std::string> participant;
};

/// Per-condition counts of the four reliance cases.
struct ConditionAggregate {
    std::string condition_id;
    std::uint64_t n_a_correct = 0;
    std::uint64_t n_a_wrong = 0;
    std::uint64_t n_o_correct = 0;
    std::uint64_t n_o_wrong = 0;
    std::uint64_t n = 0;
};

enum class Format { Csv, Json };
enum class Schema { Derived, Raw };

/// Sniffs CSV vs JSON from the first non-whitespace byte ('[' or '{' means JSON).
Format detect_format(std::string_view source);

/// Sniffs Derived vs Raw from the CSV header names or the first JSON object's keys.
Schema detect_schema(std::string_view source, Format format);

TrialRecord derive(const RawDecisionRecord& raw);

/// Parses a full dataset held in memory. Row order is preserved.
/// Throws ParseError (malformed input, with line or record index),
/// DuplicateTrial (repeated (condition, trial) key), LabelError (raw labels
/// outside a two-value alphabet, or empty labels).
std::vector<TrialRecord> parse_dataset(std::string_view source, Format format, Schema schema);

/// Groups records by condition_id (lexicographic order) and counts the four
/// reliance cases. Throws EmptyDataset on an empty record list.
std::vector<ConditionAggregate> aggregate(const std::vector<TrialRecord>& records);

/// Reduces an aggregate to a profile via profile_from_counts. Throws
/// OutOfScopeAiAccuracy when the derived AI accuracy is not strictly above
/// 1/2 (checked exactly on the integer counts).
RelianceProfile to_profile(const ConditionAggregate& agg);

/// Serializes records in the derived CSV schema (header
/// `condition,trial,ai_correct,adhered[,participant]`, booleans as 0/1, LF
/// line endings). The participant column appears iff any record carries one.
std::string write_csv(const std::vector<TrialRecord>& records);

/// Serializes records as a JSON array of derived-schema objects.
std::string write_json(const std::vector<TrialRecord>& records);

} // namespace rlens::ingest
