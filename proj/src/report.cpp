#include "report.hpp"

#include "errors.hpp"
#include "rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>

namespace rlens::report {

namespace {

double clamp01(double v) {
    return std::clamp(v, 0.0, 1.0);
}

/// Rounds to 9 decimals for serialization; +0.0 normalizes negative zero.
double round9(double v) {
    return std::round(v * 1e9) / 1e9 + 0.0;
}

nlohmann::ordered_json json_fraction(const std::optional<double>& v) {
    if (!v) {
        return nullptr;
    }
    return round9(*v);
}

struct Counts {
    std::uint64_t a_correct = 0;
    std::uint64_t a_wrong = 0;
    std::uint64_t o_correct = 0;
    std::uint64_t o_wrong = 0;

    void add(const ingest::TrialRecord& r) {
        if (r.ai_correct) {
            ++(r.adhered ? a_correct : o_wrong);
        } else {
            ++(r.adhered ? a_wrong : o_correct);
        }
    }
    std::uint64_t total() const { return a_correct + a_wrong + o_correct + o_wrong; }
    bool ai_in_scope() const { return 2 * (a_correct + o_wrong) > total(); }
};

std::optional<double> counts_quality(const Counts& c, double tol) {
    if (!c.ai_in_scope()) {
        return std::nullopt;
    }
    return quality(profile_from_counts(c.a_correct, c.a_wrong, c.o_correct, c.o_wrong), tol);
}

BootstrapInterval percentile_95(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const auto at = [&values](double p) {
        const double pos = p * static_cast<double>(values.size() - 1);
        const auto i = static_cast<std::size_t>(pos);
        if (i + 1 >= values.size()) {
            return values.back();
        }
        const double frac = pos - static_cast<double>(i);
        return values[i] + frac * (values[i + 1] - values[i]);
    };
    return BootstrapInterval{at(0.025), at(0.975)};
}

ConditionUncertainty bootstrap_condition(const std::vector<const ingest::TrialRecord*>& records,
                                         const std::string& condition_id,
                                         const AnalyzeOptions& options) {
    const std::uint64_t resamples = options.bootstrap_resamples;
    const std::size_t n = records.size();
    Rng rng(options.bootstrap_seed ^ fnv1a64(condition_id));
    std::vector<double> adherences;
    std::vector<double> accuracies;
    std::vector<double> qualities;
    adherences.reserve(resamples);
    accuracies.reserve(resamples);
    for (std::uint64_t b = 0; b < resamples; ++b) {
        Counts counts;
        for (std::size_t i = 0; i < n; ++i) {
            counts.add(*records[bounded(rng, n)]);
        }
        const auto dn = static_cast<double>(n);
        adherences.push_back(static_cast<double>(counts.a_correct + counts.a_wrong) / dn);
        accuracies.push_back(static_cast<double>(counts.a_correct + counts.o_correct) / dn);
        if (const auto q = counts_quality(counts, options.tolerance)) {
            qualities.push_back(*q);
        }
    }
    ConditionUncertainty u;
    u.resamples = resamples;
    u.adherence = percentile_95(adherences);
    u.final_accuracy = percentile_95(accuracies);
    u.quality_defined_resamples = qualities.size();
    if (!qualities.empty()) {
        u.quality = percentile_95(std::move(qualities));
    }
    return u;
}

std::optional<ParticipantSummary>
summarize_participants(const std::vector<const ingest::TrialRecord*>& records,
                       const std::string& condition_id, double tol,
                       std::vector<std::string>& warnings) {
    std::map<std::string, Counts> by_participant;
    std::uint64_t unassigned = 0;
    for (const auto* r : records) {
        if (!r->participant) {
            ++unassigned;
            continue;
        }
        by_participant[*r->participant].add(*r);
    }
    if (unassigned > 0) {
        warnings.push_back("condition '" + condition_id + "': " + std::to_string(unassigned) +
                           " trial(s) lack a participant id and are excluded from the "
                           "per-participant summary");
    }
    if (by_participant.empty()) {
        return std::nullopt;
    }
    ParticipantSummary s;
    s.participants = by_participant.size();
    double sum_adherence = 0.0;
    double sum_accuracy = 0.0;
    double sum_quality = 0.0;
    for (const auto& [participant, counts] : by_participant) {
        const auto dn = static_cast<double>(counts.total());
        sum_adherence += static_cast<double>(counts.a_correct + counts.a_wrong) / dn;
        sum_accuracy += static_cast<double>(counts.a_correct + counts.o_correct) / dn;
        if (const auto q = counts_quality(counts, tol)) {
            sum_quality += *q;
            ++s.quality_defined_participants;
        }
    }
    const auto dp = static_cast<double>(s.participants);
    s.mean_adherence = sum_adherence / dp;
    s.mean_final_accuracy = sum_accuracy / dp;
    if (s.quality_defined_participants > 0) {
        s.mean_quality = sum_quality / static_cast<double>(s.quality_defined_participants);
    }
    return s;
}

std::string fmt_pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f%%", v * 100.0);
    return buf;
}

std::string fmt_q(const std::optional<double>& q) {
    if (!q) {
        return "undefined";
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", *q);
    return buf;
}

} // namespace

ConditionReport build_report(const ingest::ConditionAggregate& agg, double tol) {
    ConditionReport r;
    r.condition_id = agg.condition_id;
    r.n = agg.n;
    r.n_a_correct = agg.n_a_correct;
    r.n_a_wrong = agg.n_a_wrong;
    r.n_o_correct = agg.n_o_correct;
    r.n_o_wrong = agg.n_o_wrong;
    const RelianceProfile p = ingest::to_profile(agg);
    r.adherence = adherence(p);
    r.ai_accuracy = ai_accuracy(p);
    r.final_accuracy = final_accuracy(p);
    r.quality = quality(p, tol);
    r.classification = classify(p, tol);
    const double acc = clamp01(r.ai_accuracy);
    const double adh = clamp01(r.adherence);
    r.envelope = envelope(acc, adh);
    r.expected_nondiscerning_accuracy = expected_accuracy_nondiscerning(acc, adh);
    return r;
}

Analysis analyze(const std::vector<ingest::TrialRecord>& records, const AnalyzeOptions& options) {
    Analysis out;
    const auto aggregates = ingest::aggregate(records);
    std::map<std::string, std::vector<const ingest::TrialRecord*>> by_condition;
    bool any_participant = false;
    for (const auto& r : records) {
        by_condition[r.condition_id].push_back(&r);
        any_participant = any_participant || r.participant.has_value();
    }
    if (options.group_by == GroupBy::Participant && !any_participant) {
        out.warnings.emplace_back("participant grouping requested, but no participant column is "
                                  "present; reporting pooled metrics only");
    }
    if (options.group_by == GroupBy::Auto && any_participant) {
        out.warnings.emplace_back("participant column detected; condition metrics pool all "
                                  "trials, with per-participant macro averages attached");
    }
    for (const auto& agg : aggregates) {
        ConditionReport r = build_report(agg, options.tolerance);
        const auto& condition_records = by_condition.at(agg.condition_id);
        if (options.bootstrap_resamples > 0) {
            r.uncertainty = bootstrap_condition(condition_records, agg.condition_id, options);
        }
        if (options.group_by != GroupBy::None && any_participant) {
            r.participant_summary = summarize_participants(condition_records, agg.condition_id,
                                                           options.tolerance, out.warnings);
        }
        out.reports.push_back(std::move(r));
    }
    return out;
}

std::string narrative_tag(double delta_adherence, std::optional<double> delta_quality,
                          double threshold) {
    if (delta_quality && *delta_quality > threshold && delta_adherence <= 0.0) {
        return "quality_driven";
    }
    if (delta_adherence > threshold && delta_quality && *delta_quality <= 0.0) {
        return "quantity_driven";
    }
    return "mixed";
}

CompareReport compare(const Analysis& analysis, const std::string& baseline_id,
                      double tag_threshold, double tol) {
    const auto& reports = analysis.reports;
    if (reports.size() < 2) {
        throw Error(Errc::DomainError, "comparison needs at least two conditions, got " +
                                           std::to_string(reports.size()));
    }
    const auto baseline =
        std::find_if(reports.begin(), reports.end(),
                     [&](const ConditionReport& r) { return r.condition_id == baseline_id; });
    if (baseline == reports.end()) {
        std::string known;
        for (const auto& r : reports) {
            known += (known.empty() ? "" : ", ") + r.condition_id;
        }
        throw Error(Errc::UnknownCondition, "baseline condition '" + baseline_id +
                                                "' is not in the dataset (conditions: " + known +
                                                ")");
    }
    CompareReport out;
    out.baseline = *baseline;
    for (const auto& r : reports) {
        if (r.condition_id == baseline_id) {
            continue;
        }
        if (std::fabs(r.ai_accuracy - baseline->ai_accuracy) > tol) {
            char lhs[32];
            char rhs[32];
            std::snprintf(lhs, sizeof(lhs), "%.9g", baseline->ai_accuracy);
            std::snprintf(rhs, sizeof(rhs), "%.9g", r.ai_accuracy);
            throw Error(Errc::AiAccuracyMismatch,
                        "conditions '" + baseline->condition_id + "' and '" + r.condition_id +
                            "' derive different AI accuracies (" + lhs + " vs " + rhs +
                            "); the framework compares conditions under one AI");
        }
        TreatmentEffect effect;
        effect.report = r;
        effect.delta_adherence = r.adherence - baseline->adherence;
        effect.delta_final_accuracy = r.final_accuracy - baseline->final_accuracy;
        if (r.quality && baseline->quality) {
            effect.delta_quality = *r.quality - *baseline->quality;
        }
        effect.tag = narrative_tag(effect.delta_adherence, effect.delta_quality, tag_threshold);
        out.treatments.push_back(std::move(effect));
    }
    return out;
}

plot::PlotSpec plot_spec_for(const Analysis& analysis,
                             const std::optional<std::string>& baseline_id,
                             const plot::Palette& palette, double width, double height,
                             double tol) {
    const auto& reports = analysis.reports;
    if (reports.empty()) {
        throw Error(Errc::EmptyDataset, "nothing to plot: the analysis holds no conditions");
    }
    std::size_t baseline_index = 0;
    if (baseline_id) {
        const auto it =
            std::find_if(reports.begin(), reports.end(),
                         [&](const ConditionReport& r) { return r.condition_id == *baseline_id; });
        if (it == reports.end()) {
            throw Error(Errc::UnknownCondition,
                        "baseline condition '" + *baseline_id + "' is not in the dataset");
        }
        baseline_index = static_cast<std::size_t>(it - reports.begin());
    }
    for (const auto& r : reports) {
        if (std::fabs(r.ai_accuracy - reports[baseline_index].ai_accuracy) > tol) {
            throw Error(Errc::AiAccuracyMismatch,
                        "conditions '" + reports[baseline_index].condition_id + "' and '" +
                            r.condition_id + "' derive different AI accuracies; one framework "
                                             "plot covers a single AI accuracy");
        }
    }
    plot::PlotSpec spec;
    spec.acc = clamp01(reports[baseline_index].ai_accuracy);
    spec.width = width;
    spec.height = height;
    spec.palette = palette;
    for (const auto& r : reports) {
        spec.points.push_back(
            {r.condition_id, clamp01(r.adherence), clamp01(r.final_accuracy)});
    }
    if (baseline_id) {
        for (std::size_t i = 0; i < reports.size(); ++i) {
            if (i != baseline_index) {
                spec.arrows.push_back({baseline_index, i});
            }
        }
    }
    return spec;
}

nlohmann::ordered_json to_json(const ConditionReport& report) {
    nlohmann::ordered_json j;
    j["condition"] = report.condition_id;
    j["n"] = report.n;
    j["counts"] = {
        {"adhere_correct", report.n_a_correct},
        {"adhere_wrong", report.n_a_wrong},
        {"override_correct", report.n_o_correct},
        {"override_wrong", report.n_o_wrong},
    };
    j["adherence"] = round9(report.adherence);
    j["ai_accuracy"] = round9(report.ai_accuracy);
    j["final_accuracy"] = round9(report.final_accuracy);
    j["quality"] = json_fraction(report.quality);
    j["classification"] = {
        {"tag", reliance_tag_name(report.classification.tag)},
        {"complementarity_feasible", report.classification.complementarity_feasible},
    };
    j["envelope"] = {
        {"lo", round9(report.envelope.lo)},
        {"hi", round9(report.envelope.hi)},
        {"width", round9(report.envelope.width)},
    };
    j["expected_nondiscerning_accuracy"] = round9(report.expected_nondiscerning_accuracy);
    if (report.uncertainty) {
        const auto& u = *report.uncertainty;
        nlohmann::ordered_json b;
        b["resamples"] = u.resamples;
        b["adherence"] = {{"lo", round9(u.adherence.lo)}, {"hi", round9(u.adherence.hi)}};
        b["final_accuracy"] = {{"lo", round9(u.final_accuracy.lo)},
                               {"hi", round9(u.final_accuracy.hi)}};
        if (u.quality) {
            b["quality"] = {{"lo", round9(u.quality->lo)}, {"hi", round9(u.quality->hi)}};
        } else {
            b["quality"] = nullptr;
        }
        b["quality_defined_resamples"] = u.quality_defined_resamples;
        j["bootstrap"] = std::move(b);
    }
    if (report.participant_summary) {
        const auto& s = *report.participant_summary;
        nlohmann::ordered_json p;
        p["participants"] = s.participants;
        p["mean_adherence"] = round9(s.mean_adherence);
        p["mean_final_accuracy"] = round9(s.mean_final_accuracy);
        p["mean_quality"] = json_fraction(s.mean_quality);
        p["quality_defined_participants"] = s.quality_defined_participants;
        j["participant_summary"] = std::move(p);
    }
    return j;
}

nlohmann::ordered_json to_json(const Analysis& analysis) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : analysis.reports) {
        arr.push_back(to_json(r));
    }
    return arr;
}

nlohmann::ordered_json to_json(const CompareReport& report) {
    nlohmann::ordered_json j;
    j["baseline"] = to_json(report.baseline);
    nlohmann::ordered_json treatments = nlohmann::ordered_json::array();
    for (const auto& t : report.treatments) {
        nlohmann::ordered_json e;
        e["report"] = to_json(t.report);
        e["delta_adherence"] = round9(t.delta_adherence);
        e["delta_final_accuracy"] = round9(t.delta_final_accuracy);
        e["delta_quality"] = json_fraction(t.delta_quality);
        e["tag"] = t.tag;
        treatments.push_back(std::move(e));
    }
    j["treatments"] = std::move(treatments);
    return j;
}

std::string table(const std::vector<ConditionReport>& reports) {
    std::vector<std::array<std::string, 9>> rows;
    rows.push_back({"condition", "n", "adherence", "ai_acc", "final_acc", "quality", "class",
                    "feasible", "envelope"});
    for (const auto& r : reports) {
        rows.push_back({
            r.condition_id,
            std::to_string(r.n),
            fmt_pct(r.adherence),
            fmt_pct(r.ai_accuracy),
            fmt_pct(r.final_accuracy),
            fmt_q(r.quality),
            reliance_tag_name(r.classification.tag),
            r.classification.complementarity_feasible ? "yes" : "no",
            "[" + fmt_pct(r.envelope.lo) + ", " + fmt_pct(r.envelope.hi) + "]",
        });
    }
    std::array<std::size_t, 9> widths{};
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            widths[c] = std::max(widths[c], row[c].size());
        }
    }
    std::string out;
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            out += row[c];
            if (c + 1 < row.size()) {
                out.append(widths[c] - row[c].size() + 2, ' ');
            }
        }
        out += '\n';
    }
    return out;
}

} // namespace rlens::report
