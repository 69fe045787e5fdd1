#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "errors.hpp"
#include "report.hpp"

#include <cmath>
#include <string>
#include <vector>

using namespace rlens;
using ingest::TrialRecord;

namespace {

bool near(double a, double b, double tol = 1e-12) { return std::fabs(a - b) <= tol; }

void append_condition(std::vector<TrialRecord>& records, const std::string& condition,
                      int a_correct, int a_wrong, int o_correct, int o_wrong) {
    int id = 0;
    const auto push = [&](bool ai, bool adhered, int count) {
        for (int i = 0; i < count; ++i) {
            records.push_back({condition, "t" + std::to_string(++id), ai, adhered, std::nullopt});
        }
    };
    push(true, true, a_correct);
    push(false, true, a_wrong);
    push(false, false, o_correct);
    push(true, false, o_wrong);
}

// The three-condition study used across the reporting tests: one AI at
// accuracy 0.7, a pooled baseline, a treatment that improves reliance quality
// at lower adherence, and a treatment that raises adherence at zero quality.
std::vector<TrialRecord> study_records() {
    std::vector<TrialRecord> records;
    append_condition(records, "control", 7, 3, 3, 7);
    append_condition(records, "blue", 6, 0, 6, 8);
    append_condition(records, "purple", 12, 6, 0, 2);
    return records;
}

report::Analysis study_analysis() {
    return report::analyze(study_records(), report::AnalyzeOptions{});
}

const report::ConditionReport& report_for(const report::Analysis& analysis,
                                          const std::string& id) {
    for (const auto& r : analysis.reports) {
        if (r.condition_id == id) {
            return r;
        }
    }
    REQUIRE_MESSAGE(false, "no report for condition ", id);
    return analysis.reports.front();
}

}  // namespace

TEST_CASE("build_report computes every metric from the counts") {
    ingest::ConditionAggregate agg;
    agg.condition_id = "ideal";
    agg.n_a_correct = 7;
    agg.n_o_correct = 3;
    agg.n = 10;
    const report::ConditionReport r = report::build_report(agg);
    CHECK(r.n == 10);
    CHECK(near(r.adherence, 0.7));
    CHECK(near(r.ai_accuracy, 0.7));
    CHECK(near(r.final_accuracy, 1.0));
    REQUIRE(r.quality.has_value());
    CHECK(near(*r.quality, 1.0));
    CHECK(r.classification.tag == RelianceTag::MatchedAdherence);
    CHECK(r.classification.complementarity_feasible);
    CHECK(near(r.envelope.lo, 0.4));
    CHECK(near(r.envelope.hi, 1.0));
    CHECK(near(r.expected_nondiscerning_accuracy, 0.58));
    CHECK_FALSE(r.uncertainty.has_value());
    CHECK_FALSE(r.participant_summary.has_value());
}

TEST_CASE("build_report propagates the accuracy scope check") {
    ingest::ConditionAggregate agg;
    agg.condition_id = "even";
    agg.n_a_correct = 5;
    agg.n_o_correct = 5;
    agg.n = 10;
    try {
        report::build_report(agg);
        FAIL("expected OutOfScopeAiAccuracy");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::OutOfScopeAiAccuracy);
    }
}

TEST_CASE("quality is reported as undefined on a degenerate envelope") {
    ingest::ConditionAggregate agg;
    agg.condition_id = "glued";
    agg.n_a_correct = 7;
    agg.n_a_wrong = 3;
    agg.n = 10;
    const report::ConditionReport r = report::build_report(agg);
    CHECK_FALSE(r.quality.has_value());
    CHECK(r.classification.tag == RelianceTag::OverReliance);
    CHECK(near(r.envelope.width, 0.0, 1e-9));
}

TEST_CASE("analyze reports the study conditions in lexicographic order") {
    const report::Analysis analysis = study_analysis();
    REQUIRE(analysis.reports.size() == 3);
    CHECK(analysis.reports[0].condition_id == "blue");
    CHECK(analysis.reports[1].condition_id == "control");
    CHECK(analysis.reports[2].condition_id == "purple");
    CHECK(analysis.warnings.empty());

    const auto& control = report_for(analysis, "control");
    CHECK(near(control.adherence, 0.5));
    CHECK(near(control.ai_accuracy, 0.7));
    CHECK(near(control.final_accuracy, 0.5));
    REQUIRE(control.quality.has_value());
    CHECK(near(*control.quality, 0.5));

    const auto& blue = report_for(analysis, "blue");
    CHECK(near(blue.adherence, 0.3));
    CHECK(near(blue.final_accuracy, 0.6));
    REQUIRE(blue.quality.has_value());
    CHECK(near(*blue.quality, 1.0));
    CHECK(blue.classification.tag == RelianceTag::UnderReliance);
    CHECK_FALSE(blue.classification.complementarity_feasible);

    const auto& purple = report_for(analysis, "purple");
    CHECK(near(purple.adherence, 0.9));
    CHECK(near(purple.final_accuracy, 0.6));
    REQUIRE(purple.quality.has_value());
    CHECK(near(*purple.quality, 0.0));
    CHECK(purple.classification.tag == RelianceTag::OverReliance);
    CHECK(purple.classification.complementarity_feasible);
}

TEST_CASE("every report field recomputes from its own counts") {
    std::vector<TrialRecord> records = study_records();
    append_condition(records, "extra", 9, 2, 1, 2);
    const report::Analysis analysis =
        report::analyze(records, report::AnalyzeOptions{});
    for (const auto& r : analysis.reports) {
        CHECK(r.n == r.n_a_correct + r.n_a_wrong + r.n_o_correct + r.n_o_wrong);
        const RelianceProfile p =
            profile_from_counts(r.n_a_correct, r.n_a_wrong, r.n_o_correct, r.n_o_wrong);
        CHECK(near(r.adherence, adherence(p)));
        CHECK(near(r.ai_accuracy, ai_accuracy(p)));
        CHECK(near(r.final_accuracy, final_accuracy(p)));
        const auto q = quality(p);
        CHECK(q.has_value() == r.quality.has_value());
        if (q && r.quality) {
            CHECK(near(*q, *r.quality));
        }
        const Envelope env = envelope(r.ai_accuracy, r.adherence);
        CHECK(near(r.envelope.lo, env.lo));
        CHECK(near(r.envelope.hi, env.hi));
        CHECK(near(r.envelope.width, env.width));
        CHECK(near(r.expected_nondiscerning_accuracy,
                   expected_accuracy_nondiscerning(r.ai_accuracy, r.adherence)));
        CHECK(r.classification.tag == classify(p).tag);
    }
}

TEST_CASE("narrative tags follow the threshold rules") {
    CHECK(report::narrative_tag(-0.2, 0.5) == "quality_driven");
    CHECK(report::narrative_tag(0.0, 0.06) == "quality_driven");
    CHECK(report::narrative_tag(0.4, -0.5) == "quantity_driven");
    CHECK(report::narrative_tag(0.06, 0.0) == "quantity_driven");
    CHECK(report::narrative_tag(0.04, -0.5) == "mixed");
    CHECK(report::narrative_tag(-0.1, 0.05) == "mixed");
    CHECK(report::narrative_tag(0.2, 0.2) == "mixed");
    CHECK(report::narrative_tag(0.2, std::nullopt) == "mixed");
    CHECK(report::narrative_tag(-0.2, std::nullopt) == "mixed");
    CHECK(report::narrative_tag(-0.1, 0.04, 0.03) == "quality_driven");
}

TEST_CASE("compare tags the study treatments against the baseline") {
    const report::CompareReport cmp = report::compare(study_analysis(), "control");
    CHECK(cmp.baseline.condition_id == "control");
    REQUIRE(cmp.treatments.size() == 2);

    const auto& blue = cmp.treatments[0];
    CHECK(blue.report.condition_id == "blue");
    CHECK(near(blue.delta_adherence, -0.2));
    CHECK(near(blue.delta_final_accuracy, 0.1));
    REQUIRE(blue.delta_quality.has_value());
    CHECK(near(*blue.delta_quality, 0.5));
    CHECK(blue.tag == "quality_driven");

    const auto& purple = cmp.treatments[1];
    CHECK(purple.report.condition_id == "purple");
    CHECK(near(purple.delta_adherence, 0.4));
    CHECK(near(purple.delta_final_accuracy, 0.1));
    REQUIRE(purple.delta_quality.has_value());
    CHECK(near(*purple.delta_quality, -0.5));
    CHECK(purple.tag == "quantity_driven");
}

TEST_CASE("compare deltas equal treatment minus baseline of the report fields") {
    const report::CompareReport cmp = report::compare(study_analysis(), "blue");
    for (const auto& t : cmp.treatments) {
        CHECK(near(t.delta_adherence, t.report.adherence - cmp.baseline.adherence));
        CHECK(near(t.delta_final_accuracy,
                   t.report.final_accuracy - cmp.baseline.final_accuracy));
        REQUIRE(t.delta_quality.has_value());
        CHECK(near(*t.delta_quality, *t.report.quality - *cmp.baseline.quality));
    }
}

TEST_CASE("compare rejects unusable baselines and mismatched accuracies") {
    try {
        report::compare(study_analysis(), "green");
        FAIL("expected UnknownCondition");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::UnknownCondition);
        CHECK(std::string(e.what()).find("blue, control, purple") != std::string::npos);
    }

    std::vector<TrialRecord> lone;
    append_condition(lone, "only", 7, 3, 3, 7);
    const report::Analysis single = report::analyze(lone, report::AnalyzeOptions{});
    try {
        report::compare(single, "only");
        FAIL("expected DomainError");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::DomainError);
    }

    std::vector<TrialRecord> skewed;
    append_condition(skewed, "c1", 7, 3, 3, 7);
    append_condition(skewed, "c2", 8, 1, 1, 0);
    const report::Analysis mismatched = report::analyze(skewed, report::AnalyzeOptions{});
    try {
        report::compare(mismatched, "c1");
        FAIL("expected AiAccuracyMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::AiAccuracyMismatch);
        CHECK(std::string(e.what()).find("0.7") != std::string::npos);
        CHECK(std::string(e.what()).find("0.8") != std::string::npos);
    }
}

TEST_CASE("grouping warnings and participant summaries") {
    std::vector<TrialRecord> records;
    append_condition(records, "c", 6, 2, 2, 6);
    report::AnalyzeOptions wants_participants;
    wants_participants.group_by = report::GroupBy::Participant;
    const report::Analysis no_column = report::analyze(records, wants_participants);
    REQUIRE(no_column.warnings.size() == 1);
    CHECK(no_column.warnings[0].find("no participant column") != std::string::npos);
    CHECK_FALSE(no_column.reports[0].participant_summary.has_value());

    // Two participants with different reliance, plus one unassigned trial.
    std::vector<TrialRecord> with_column;
    int id = 0;
    const auto push = [&](const char* participant, bool ai, bool adhered) {
        TrialRecord r{"c", "t" + std::to_string(++id), ai, adhered, std::nullopt};
        if (participant != nullptr) {
            r.participant = participant;
        }
        with_column.push_back(r);
    };
    // p1: counts (3,1,1,1) -> adherence 4/6... keep n=6: (3,1,1,1) is 6 trials.
    for (int i = 0; i < 3; ++i) push("p1", true, true);
    push("p1", false, true);
    push("p1", false, false);
    push("p1", true, false);
    // p2: counts (2,0,2,2).
    for (int i = 0; i < 2; ++i) push("p2", true, true);
    for (int i = 0; i < 2; ++i) push("p2", false, false);
    for (int i = 0; i < 2; ++i) push("p2", true, false);
    push(nullptr, true, true);

    const report::Analysis grouped = report::analyze(with_column, report::AnalyzeOptions{});
    REQUIRE(grouped.reports.size() == 1);
    REQUIRE(grouped.warnings.size() == 2);
    CHECK(grouped.warnings[0].find("participant column detected") != std::string::npos);
    CHECK(grouped.warnings[1].find("1 trial(s) lack a participant id") != std::string::npos);
    const auto& summary = grouped.reports[0].participant_summary;
    REQUIRE(summary.has_value());
    CHECK(summary->participants == 2);
    // p1: adherence 4/6, final 4/6; p2: adherence 2/6, final 4/6.
    CHECK(near(summary->mean_adherence, 0.5));
    CHECK(near(summary->mean_final_accuracy, 4.0 / 6.0));
    // p1: acc 4/6, envelope(2/3, 2/3) = [1/3, 1], quality (2/3 - 1/3) / (2/3).
    // p2: acc 4/6, envelope(2/3, 1/3) = [0, 2/3], quality (2/3) / (2/3).
    REQUIRE(summary->mean_quality.has_value());
    CHECK(summary->quality_defined_participants == 2);
    CHECK(near(*summary->mean_quality, 0.75, 1e-9));

    report::AnalyzeOptions pooled_only;
    pooled_only.group_by = report::GroupBy::None;
    const report::Analysis ungrouped = report::analyze(with_column, pooled_only);
    CHECK(ungrouped.warnings.empty());
    CHECK_FALSE(ungrouped.reports[0].participant_summary.has_value());
}

TEST_CASE("participants out of scope are excluded from the quality average only") {
    std::vector<TrialRecord> records;
    int id = 0;
    const auto push = [&](const char* participant, bool ai, bool adhered) {
        TrialRecord r{"c", "t" + std::to_string(++id), ai, adhered, std::nullopt};
        r.participant = participant;
        records.push_back(r);
    };
    // p1 sees a below-chance AI slice: counts (0,2,2,0).
    for (int i = 0; i < 2; ++i) push("p1", false, true);
    for (int i = 0; i < 2; ++i) push("p1", false, false);
    // p2: counts (2,0,1,1).
    for (int i = 0; i < 2; ++i) push("p2", true, true);
    push("p2", false, false);
    push("p2", true, false);
    // The pooled condition still needs an in-scope AI: add p3 heavy on correct.
    for (int i = 0; i < 6; ++i) push("p3", true, true);

    const report::Analysis analysis = report::analyze(records, report::AnalyzeOptions{});
    const auto& summary = analysis.reports[0].participant_summary;
    REQUIRE(summary.has_value());
    CHECK(summary->participants == 3);
    CHECK(summary->quality_defined_participants == 1);
    // Only p2 contributes: acc 3/4, adherence 1/2, envelope [1/4, 3/4], final 3/4.
    REQUIRE(summary->mean_quality.has_value());
    CHECK(near(*summary->mean_quality, 1.0, 1e-9));
}

TEST_CASE("bootstrap intervals are deterministic and cover the point estimate") {
    report::AnalyzeOptions options;
    options.bootstrap_resamples = 300;
    options.bootstrap_seed = 17;
    const report::Analysis first = report::analyze(study_records(), options);
    const report::Analysis second = report::analyze(study_records(), options);
    REQUIRE(first.reports.size() == 3);
    for (std::size_t i = 0; i < first.reports.size(); ++i) {
        const auto& a = first.reports[i].uncertainty;
        const auto& b = second.reports[i].uncertainty;
        REQUIRE(a.has_value());
        REQUIRE(b.has_value());
        CHECK(a->resamples == 300);
        CHECK(a->adherence.lo == b->adherence.lo);
        CHECK(a->adherence.hi == b->adherence.hi);
        CHECK(a->final_accuracy.lo == b->final_accuracy.lo);
        CHECK(a->final_accuracy.hi == b->final_accuracy.hi);
        CHECK(a->quality_defined_resamples == b->quality_defined_resamples);
        CHECK(a->adherence.lo <= a->adherence.hi);
        CHECK(a->adherence.lo >= 0.0);
        CHECK(a->adherence.hi <= 1.0);
        const auto& r = first.reports[i];
        CHECK(r.adherence >= a->adherence.lo - 1e-12);
        CHECK(r.adherence <= a->adherence.hi + 1e-12);
        CHECK(r.final_accuracy >= a->final_accuracy.lo - 1e-12);
        CHECK(r.final_accuracy <= a->final_accuracy.hi + 1e-12);
        CHECK(a->quality_defined_resamples <= a->resamples);
    }

    report::AnalyzeOptions reseeded = options;
    reseeded.bootstrap_seed = 18;
    const report::Analysis third = report::analyze(study_records(), reseeded);
    bool any_difference = false;
    for (std::size_t i = 0; i < first.reports.size(); ++i) {
        any_difference = any_difference || first.reports[i].uncertainty->adherence.lo !=
                                               third.reports[i].uncertainty->adherence.lo;
    }
    CHECK(any_difference);
}

TEST_CASE("condition reports serialize with fixed keys and 9-decimal rounding") {
    ingest::ConditionAggregate agg;
    agg.condition_id = "thirds";
    agg.n_a_correct = 2;
    agg.n_o_correct = 1;
    agg.n = 3;
    const auto j = report::to_json(report::build_report(agg));
    const std::string dumped = j.dump();
    const char* keys[] = {"\"condition\"", "\"n\"",        "\"counts\"",
                          "\"adherence\"", "\"ai_accuracy\"", "\"final_accuracy\"",
                          "\"quality\"",   "\"classification\"", "\"envelope\"",
                          "\"expected_nondiscerning_accuracy\""};
    std::size_t last = 0;
    for (const char* key : keys) {
        const auto at = dumped.find(key);
        CHECK_MESSAGE(at != std::string::npos, "missing key ", key);
        CHECK(at >= last);
        last = at;
    }
    CHECK(j["adherence"].get<double>() == 0.666666667);
    CHECK(j["ai_accuracy"].get<double>() == 0.666666667);
    CHECK(j["final_accuracy"].get<double>() == 1.0);
    CHECK(j["counts"]["adhere_correct"].get<std::uint64_t>() == 2);
    CHECK(j["counts"]["override_correct"].get<std::uint64_t>() == 1);
    CHECK(j["classification"]["tag"].get<std::string>() == "matched_adherence");
    CHECK(j["envelope"]["lo"].get<double>() == 0.333333333);
}

TEST_CASE("undefined quality serializes as null") {
    ingest::ConditionAggregate agg;
    agg.condition_id = "glued";
    agg.n_a_correct = 7;
    agg.n_a_wrong = 3;
    agg.n = 10;
    const auto j = report::to_json(report::build_report(agg));
    CHECK(j["quality"].is_null());
}

TEST_CASE("compare reports serialize treatments with deltas and tags") {
    const auto j = report::to_json(report::compare(study_analysis(), "control"));
    CHECK(j["baseline"]["condition"].get<std::string>() == "control");
    REQUIRE(j["treatments"].size() == 2);
    CHECK(j["treatments"][0]["report"]["condition"].get<std::string>() == "blue");
    CHECK(j["treatments"][0]["delta_adherence"].get<double>() == -0.2);
    CHECK(j["treatments"][0]["delta_final_accuracy"].get<double>() == 0.1);
    CHECK(j["treatments"][0]["delta_quality"].get<double>() == 0.5);
    CHECK(j["treatments"][0]["tag"].get<std::string>() == "quality_driven");
    CHECK(j["treatments"][1]["tag"].get<std::string>() == "quantity_driven");
}

TEST_CASE("the analysis json is an array in report order") {
    const auto j = report::to_json(study_analysis());
    REQUIRE(j.is_array());
    REQUIRE(j.size() == 3);
    CHECK(j[0]["condition"].get<std::string>() == "blue");
    CHECK(j[2]["condition"].get<std::string>() == "purple");
}

TEST_CASE("the table is the only percent view and marks undefined quality") {
    std::vector<TrialRecord> records = study_records();
    append_condition(records, "glued", 7, 3, 0, 0);
    const report::Analysis analysis = report::analyze(records, report::AnalyzeOptions{});
    const std::string t = report::table(analysis.reports);
    CHECK(t.find("condition") == 0);
    CHECK(t.find("adherence") != std::string::npos);
    CHECK(t.find("50.0%") != std::string::npos);
    CHECK(t.find("70.0%") != std::string::npos);
    CHECK(t.find("0.500") != std::string::npos);
    CHECK(t.find("undefined") != std::string::npos);
    CHECK(t.find("over_reliance") != std::string::npos);
    CHECK(t.find("[20.0%, 80.0%]") != std::string::npos);
    CHECK(t.back() == '\n');
}

TEST_CASE("plot specs carry one point per condition and baseline arrows") {
    const report::Analysis analysis = study_analysis();
    const plot::PlotSpec spec =
        report::plot_spec_for(analysis, std::string("control"), plot::Palette{}, 640.0, 480.0);
    CHECK(near(spec.acc, 0.7));
    REQUIRE(spec.points.size() == 3);
    CHECK(spec.points[0].label == "blue");
    CHECK(near(spec.points[0].adherence, 0.3));
    CHECK(near(spec.points[0].final_accuracy, 0.6));
    CHECK(spec.points[1].label == "control");
    CHECK(spec.points[2].label == "purple");
    REQUIRE(spec.arrows.size() == 2);
    CHECK(spec.arrows[0].from == 1);
    CHECK(spec.arrows[0].to == 0);
    CHECK(spec.arrows[1].from == 1);
    CHECK(spec.arrows[1].to == 2);

    const plot::PlotSpec no_baseline =
        report::plot_spec_for(analysis, std::nullopt, plot::Palette{}, 640.0, 480.0);
    CHECK(no_baseline.arrows.empty());
    CHECK(near(no_baseline.acc, 0.7));

    CHECK_NOTHROW(plot::render(spec));

    try {
        report::plot_spec_for(analysis, std::string("green"), plot::Palette{}, 640.0, 480.0);
        FAIL("expected UnknownCondition");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::UnknownCondition);
    }

    std::vector<TrialRecord> skewed;
    append_condition(skewed, "c1", 7, 3, 3, 7);
    append_condition(skewed, "c2", 8, 1, 1, 0);
    const report::Analysis mismatched = report::analyze(skewed, report::AnalyzeOptions{});
    CHECK_THROWS_AS(
        report::plot_spec_for(mismatched, std::string("c1"), plot::Palette{}, 640.0, 480.0),
        Error);
}
