#include "ingest.hpp"

#include "errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <utility>

namespace rlens::ingest {

namespace {

constexpr std::string_view kDerivedColumns[] = {"condition", "trial", "ai_correct", "adhered"};
constexpr std::string_view kRawColumns[] = {"condition", "trial", "ai_decision", "human_decision",
                                            "ground_truth"};
constexpr std::string_view kParticipantColumn = "participant";

std::string_view rstrip(std::string_view s) {
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

[[noreturn]] void parse_fail(const std::string& where, const std::string& what) {
    throw Error(Errc::ParseError, where + ": " + what);
}

bool parse_flag(std::string_view field, const std::string& where, std::string_view name) {
    if (field == "0") {
        return false;
    }
    if (field == "1") {
        return true;
    }
    parse_fail(where, std::string(name) + " must be 0 or 1, got '" + std::string(field) + "'");
}

/// Tracks the dataset-wide two-value label alphabet for raw inputs.
class LabelAlphabet {
public:
    void admit(std::string_view label, const std::string& where, std::string_view column) {
        if (label.empty()) {
            throw Error(Errc::LabelError,
                        where + ": empty " + std::string(column) +
                            " label; abstained or missing decisions are rejected, not imputed");
        }
        if (labels_.contains(std::string(label))) {
            return;
        }
        if (labels_.size() == 2) {
            throw Error(Errc::LabelError, where + ": label '" + std::string(label) +
                                              "' falls outside the dataset's two-value alphabet {" +
                                              *labels_.begin() + ", " + *std::next(labels_.begin()) +
                                              "}");
        }
        labels_.insert(std::string(label));
    }

private:
    std::set<std::string> labels_;
};

class DuplicateGuard {
public:
    void admit(const TrialRecord& r, const std::string& where) {
        if (!seen_.insert({r.condition_id, r.trial_id}).second) {
            throw Error(Errc::DuplicateTrial, where + ": duplicate trial '" + r.trial_id +
                                                  "' in condition '" + r.condition_id + "'");
        }
    }

private:
    std::set<std::pair<std::string, std::string>> seen_;
};

struct ColumnMap {
    std::vector<std::string_view> names;
    std::map<std::string_view, std::size_t> index;

    std::string_view at(const std::vector<std::string_view>& fields, std::string_view name) const {
        return fields[index.at(name)];
    }
    bool has(std::string_view name) const { return index.contains(name); }
};

ColumnMap read_header(std::string_view line, Schema schema) {
    ColumnMap cols;
    cols.names = split_fields(rstrip(line));
    std::set<std::string_view> allowed;
    std::set<std::string_view> required;
    const auto expected = schema == Schema::Derived
                              ? std::vector<std::string_view>(std::begin(kDerivedColumns),
                                                              std::end(kDerivedColumns))
                              : std::vector<std::string_view>(std::begin(kRawColumns),
                                                              std::end(kRawColumns));
    for (auto name : expected) {
        allowed.insert(name);
        required.insert(name);
    }
    allowed.insert(kParticipantColumn);
    for (std::size_t i = 0; i < cols.names.size(); ++i) {
        const auto name = cols.names[i];
        if (!allowed.contains(name)) {
            parse_fail("line 1", "unknown column '" + std::string(name) + "'");
        }
        if (!cols.index.emplace(name, i).second) {
            parse_fail("line 1", "duplicate column '" + std::string(name) + "'");
        }
    }
    for (auto name : required) {
        if (!cols.has(name)) {
            parse_fail("line 1", "missing required column '" + std::string(name) + "'");
        }
    }
    return cols;
}

std::vector<std::string_view> dataset_lines(std::string_view source) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= source.size()) {
        const std::size_t pos = source.find('\n', start);
        if (pos == std::string_view::npos) {
            lines.push_back(source.substr(start));
            break;
        }
        lines.push_back(source.substr(start, pos - start));
        start = pos + 1;
    }
    while (!lines.empty() && rstrip(lines.back()).empty()) {
        lines.pop_back();
    }
    return lines;
}

std::vector<TrialRecord> parse_csv(std::string_view source, Schema schema) {
    const auto lines = dataset_lines(source);
    if (lines.empty()) {
        parse_fail("line 1", "missing header row");
    }
    const ColumnMap cols = read_header(lines[0], schema);
    std::vector<TrialRecord> records;
    records.reserve(lines.size() - 1);
    LabelAlphabet alphabet;
    DuplicateGuard duplicates;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string where = "line " + std::to_string(i + 1);
        const std::string_view line = rstrip(lines[i]);
        if (line.empty()) {
            parse_fail(where, "empty line");
        }
        const auto fields = split_fields(line);
        if (fields.size() != cols.names.size()) {
            parse_fail(where, "expected " + std::to_string(cols.names.size()) + " fields, got " +
                                  std::to_string(fields.size()));
        }
        TrialRecord r;
        r.condition_id = std::string(cols.at(fields, "condition"));
        r.trial_id = std::string(cols.at(fields, "trial"));
        if (r.condition_id.empty() || r.trial_id.empty()) {
            parse_fail(where, "condition and trial ids must be non-empty");
        }
        if (schema == Schema::Derived) {
            r.ai_correct = parse_flag(cols.at(fields, "ai_correct"), where, "ai_correct");
            r.adhered = parse_flag(cols.at(fields, "adhered"), where, "adhered");
        } else {
            RawDecisionRecord raw;
            raw.ai_decision = std::string(cols.at(fields, "ai_decision"));
            raw.human_decision = std::string(cols.at(fields, "human_decision"));
            raw.ground_truth = std::string(cols.at(fields, "ground_truth"));
            alphabet.admit(raw.ai_decision, where, "ai_decision");
            alphabet.admit(raw.human_decision, where, "human_decision");
            alphabet.admit(raw.ground_truth, where, "ground_truth");
            r.ai_correct = raw.ai_decision == raw.ground_truth;
            r.adhered = raw.human_decision == raw.ai_decision;
        }
        if (cols.has(kParticipantColumn)) {
            const auto p = cols.at(fields, kParticipantColumn);
            if (!p.empty()) {
                r.participant = std::string(p);
            }
        }
        duplicates.admit(r, where);
        records.push_back(std::move(r));
    }
    return records;
}

std::string json_string_field(const nlohmann::json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        parse_fail(where, std::string("missing field '") + key + "'");
    }
    if (!it->is_string()) {
        parse_fail(where, std::string("field '") + key + "' must be a string");
    }
    return it->get<std::string>();
}

bool json_flag_field(const nlohmann::json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        parse_fail(where, std::string("missing field '") + key + "'");
    }
    if (it->is_boolean()) {
        return it->get<bool>();
    }
    if (it->is_number_integer()) {
        const auto v = it->get<std::int64_t>();
        if (v == 0 || v == 1) {
            return v == 1;
        }
    }
    parse_fail(where, std::string("field '") + key + "' must be a boolean or 0/1");
}

std::string json_label_field(const nlohmann::json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        parse_fail(where, std::string("missing field '") + key + "'");
    }
    if (it->is_string()) {
        return it->get<std::string>();
    }
    if (it->is_number_integer()) {
        return std::to_string(it->get<std::int64_t>());
    }
    parse_fail(where, std::string("field '") + key + "' must be a string or integer label");
}

std::vector<TrialRecord> parse_json(std::string_view source, Schema schema) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(source);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::ParseError, std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_array()) {
        throw Error(Errc::ParseError, "top-level JSON value must be an array of records");
    }
    std::set<std::string> allowed = {"condition", "trial", "participant"};
    if (schema == Schema::Derived) {
        allowed.insert({"ai_correct", "adhered"});
    } else {
        allowed.insert({"ai_decision", "human_decision", "ground_truth"});
    }
    std::vector<TrialRecord> records;
    records.reserve(doc.size());
    LabelAlphabet alphabet;
    DuplicateGuard duplicates;
    std::size_t record_no = 0;
    for (const auto& obj : doc) {
        const std::string where = "record " + std::to_string(++record_no);
        if (!obj.is_object()) {
            parse_fail(where, "expected a JSON object");
        }
        for (const auto& item : obj.items()) {
            if (!allowed.contains(item.key())) {
                parse_fail(where, "unknown field '" + item.key() + "'");
            }
        }
        TrialRecord r;
        r.condition_id = json_string_field(obj, "condition", where);
        r.trial_id = json_string_field(obj, "trial", where);
        if (r.condition_id.empty() || r.trial_id.empty()) {
            parse_fail(where, "condition and trial ids must be non-empty");
        }
        if (schema == Schema::Derived) {
            r.ai_correct = json_flag_field(obj, "ai_correct", where);
            r.adhered = json_flag_field(obj, "adhered", where);
        } else {
            RawDecisionRecord raw;
            raw.ai_decision = json_label_field(obj, "ai_decision", where);
            raw.human_decision = json_label_field(obj, "human_decision", where);
            raw.ground_truth = json_label_field(obj, "ground_truth", where);
            alphabet.admit(raw.ai_decision, where, "ai_decision");
            alphabet.admit(raw.human_decision, where, "human_decision");
            alphabet.admit(raw.ground_truth, where, "ground_truth");
            r.ai_correct = raw.ai_decision == raw.ground_truth;
            r.adhered = raw.human_decision == raw.ai_decision;
        }
        if (const auto it = obj.find("participant"); it != obj.end()) {
            if (!it->is_string()) {
                parse_fail(where, "field 'participant' must be a string");
            }
            if (const auto p = it->get<std::string>(); !p.empty()) {
                r.participant = p;
            }
        }
        duplicates.admit(r, where);
        records.push_back(std::move(r));
    }
    return records;
}

void require_csv_safe(const std::string& value, std::string_view what) {
    if (value.find_first_of(",\r\n") != std::string::npos) {
        throw Error(Errc::DomainError, std::string(what) + " '" + value +
                                           "' contains a separator character the CSV dialect "
                                           "cannot carry; use the JSON format");
    }
}

} // namespace

Format detect_format(std::string_view source) {
    for (const char c : source) {
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            continue;
        }
        return (c == '[' || c == '{') ? Format::Json : Format::Csv;
    }
    return Format::Csv;
}

Schema detect_schema(std::string_view source, Format format) {
    if (format == Format::Csv) {
        const auto lines = dataset_lines(source);
        if (!lines.empty()) {
            for (const auto name : split_fields(rstrip(lines[0]))) {
                if (name == "ai_decision") {
                    return Schema::Raw;
                }
            }
        }
        return Schema::Derived;
    }
    return source.find("\"ai_decision\"") != std::string_view::npos ? Schema::Raw
                                                                    : Schema::Derived;
}

TrialRecord derive(const RawDecisionRecord& raw) {
    TrialRecord r;
    r.condition_id = raw.condition_id;
    r.trial_id = raw.trial_id;
    r.ai_correct = raw.ai_decision == raw.ground_truth;
    r.adhered = raw.human_decision == raw.ai_decision;
    r.participant = raw.participant;
    return r;
}

std::vector<TrialRecord> parse_dataset(std::string_view source, Format format, Schema schema) {
    return format == Format::Csv ? parse_csv(source, schema) : parse_json(source, schema);
}

std::vector<ConditionAggregate> aggregate(const std::vector<TrialRecord>& records) {
    if (records.empty()) {
        throw Error(Errc::EmptyDataset, "dataset contains no trial records");
    }
    std::map<std::string, ConditionAggregate> by_id;
    for (const auto& r : records) {
        auto& agg = by_id[r.condition_id];
        agg.condition_id = r.condition_id;
        if (r.ai_correct) {
            ++(r.adhered ? agg.n_a_correct : agg.n_o_wrong);
        } else {
            ++(r.adhered ? agg.n_a_wrong : agg.n_o_correct);
        }
        ++agg.n;
    }
    std::vector<ConditionAggregate> out;
    out.reserve(by_id.size());
    for (auto& [id, agg] : by_id) {
        out.push_back(std::move(agg));
    }
    return out;
}

RelianceProfile to_profile(const ConditionAggregate& agg) {
    if (agg.n == 0) {
        throw Error(Errc::EmptyCondition,
                    "condition '" + agg.condition_id + "' has no trials");
    }
    const std::uint64_t correct_ai = agg.n_a_correct + agg.n_o_wrong;
    if (2 * correct_ai <= agg.n) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.9g",
                      static_cast<double>(correct_ai) / static_cast<double>(agg.n));
        throw Error(Errc::OutOfScopeAiAccuracy,
                    "condition '" + agg.condition_id + "' derives AI accuracy " + buf +
                        ", out of scope: the framework assumes an AI strictly better than chance");
    }
    return profile_from_counts(agg.n_a_correct, agg.n_a_wrong, agg.n_o_correct, agg.n_o_wrong);
}

std::string write_csv(const std::vector<TrialRecord>& records) {
    const bool has_participant =
        std::any_of(records.begin(), records.end(),
                    [](const TrialRecord& r) { return r.participant.has_value(); });
    std::string out = "condition,trial,ai_correct,adhered";
    if (has_participant) {
        out += ",participant";
    }
    out += '\n';
    for (const auto& r : records) {
        require_csv_safe(r.condition_id, "condition id");
        require_csv_safe(r.trial_id, "trial id");
        out += r.condition_id;
        out += ',';
        out += r.trial_id;
        out += ',';
        out += r.ai_correct ? '1' : '0';
        out += ',';
        out += r.adhered ? '1' : '0';
        if (has_participant) {
            out += ',';
            if (r.participant) {
                require_csv_safe(*r.participant, "participant id");
                out += *r.participant;
            }
        }
        out += '\n';
    }
    return out;
}

std::string write_json(const std::vector<TrialRecord>& records) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : records) {
        nlohmann::ordered_json obj;
        obj["condition"] = r.condition_id;
        obj["trial"] = r.trial_id;
        obj["ai_correct"] = r.ai_correct;
        obj["adhered"] = r.adhered;
        if (r.participant) {
            obj["participant"] = *r.participant;
        }
        arr.push_back(std::move(obj));
    }
    return arr.dump(2) + "\n";
}

} // namespace rlens::ingest
