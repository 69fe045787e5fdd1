#pragma once

#include "core.hpp"
#include "ingest.hpp"
#include "plot.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rlens::report {

enum class GroupBy { Auto, Participant, None };

struct AnalyzeOptions {
    double tolerance = kDefaultTolerance;
    std::uint64_t bootstrap_resamples = 0; ///< 0 disables bootstrap intervals.
    std::uint64_t bootstrap_seed = 0;
    GroupBy group_by = GroupBy::Auto;
};

struct BootstrapInterval {
    double lo = 0.0;
    double hi = 0.0;
};

/// 95% percentile intervals from resampling trials within one condition.
struct ConditionUncertainty {
    std::uint64_t resamples = 0;
    BootstrapInterval adherence;
    BootstrapInterval final_accuracy;
    std::optional<BootstrapInterval> quality;
    std::uint64_t quality_defined_resamples = 0;
};

/// Macro-averaged per-participant metrics for one condition. Participants
/// whose own AI accuracy leaves the framework's scope, or whose envelope
/// degenerates, are excluded from the quality average only.
struct ParticipantSummary {
    std::uint64_t participants = 0;
    double mean_adherence = 0.0;
    double mean_final_accuracy = 0.0;
    std::optional<double> mean_quality;
    std::uint64_t quality_defined_participants = 0;
};

struct ConditionReport {
    std::string condition_id;
    std::uint64_t n = 0;
    std::uint64_t n_a_correct = 0;
    std::uint64_t n_a_wrong = 0;
    std::uint64_t n_o_correct = 0;
    std::uint64_t n_o_wrong = 0;
    double adherence = 0.0;
    double ai_accuracy = 0.0;
    double final_accuracy = 0.0;
    std::optional<double> quality;
    RelianceClass classification;
    Envelope envelope;
    double expected_nondiscerning_accuracy = 0.0;
    std::optional<ConditionUncertainty> uncertainty;
    std::optional<ParticipantSummary> participant_summary;
};

struct TreatmentEffect {
    ConditionReport report;
    double delta_adherence = 0.0;
    double delta_final_accuracy = 0.0;
    std::optional<double> delta_quality;
    std::string tag;
};

struct CompareReport {
    ConditionReport baseline;
    std::vector<TreatmentEffect> treatments;
};

struct Analysis {
    std::vector<ConditionReport> reports;
    std::vector<std::string> warnings;
};

inline constexpr double kDefaultTagThreshold = 0.05;

/// Reduces one aggregate to its full per-condition report.
ConditionReport build_report(const ingest::ConditionAggregate& agg,
                             double tol = kDefaultTolerance);

/// Full analysis pipeline: aggregate, per-condition reports, optional
/// bootstrap intervals and per-participant summaries.
Analysis analyze(const std::vector<ingest::TrialRecord>& records, const AnalyzeOptions& options);

/// Effect tag for one treatment: "quality_driven" needs delta_quality above
/// the threshold with non-increasing adherence; "quantity_driven" needs
/// delta_adherence above the threshold with non-increasing quality; anything
/// else (including an undefined delta_quality) is "mixed".
std::string narrative_tag(double delta_adherence, std::optional<double> delta_quality,
                          double threshold = kDefaultTagThreshold);

/// Deltas of every treatment against the named baseline. Throws
/// UnknownCondition (missing baseline), DomainError (fewer than two
/// conditions), AiAccuracyMismatch (conditions disagree on AI accuracy).
CompareReport compare(const Analysis& analysis, const std::string& baseline_id,
                      double tag_threshold = kDefaultTagThreshold,
                      double tol = kDefaultTolerance);

/// One point per condition plus arrows from the baseline to each treatment.
/// Throws AiAccuracyMismatch when conditions disagree on AI accuracy and
/// UnknownCondition when the named baseline is absent.
plot::PlotSpec plot_spec_for(const Analysis& analysis,
                             const std::optional<std::string>& baseline_id,
                             const plot::Palette& palette, double width, double height,
                             double tol = kDefaultTolerance);

/// Machine-readable views: fixed key order, fractions rounded to 9 decimals,
/// undefined quality serialized as null.
nlohmann::ordered_json to_json(const ConditionReport& report);
nlohmann::ordered_json to_json(const Analysis& analysis);
nlohmann::ordered_json to_json(const CompareReport& report);

/// Human-readable table; the only place percentages appear.
std::string table(const std::vector<ConditionReport>& reports);

} // namespace rlens::report
