#include "reliance_lens.h"

#include "core.hpp"
#include "errors.hpp"
#include "ingest.hpp"
#include "plot.hpp"
#include "report.hpp"
#include "rng.hpp"
#include "sim.hpp"

#include <cstring>
#include <limits>
#include <memory>
#include <string>
#include <vector>

struct rlens_oracle {
    rlens::sim::OracleResult result;
};

struct rlens_dataset {
    std::vector<rlens::ingest::TrialRecord> records;
    std::vector<rlens::ingest::ConditionAggregate> aggregates;
};

struct rlens_analysis {
    rlens::report::Analysis analysis;
    double tolerance = rlens::kDefaultTolerance;
    double tag_threshold = rlens::report::kDefaultTagThreshold;
};

namespace {

thread_local std::string g_last_error;

int errc_to_status(rlens::Errc code) {
    switch (code) {
    case rlens::Errc::DomainError: return RLENS_E_DOMAIN;
    case rlens::Errc::EmptyCondition: return RLENS_E_EMPTY_CONDITION;
    case rlens::Errc::ConfigError: return RLENS_E_CONFIG;
    case rlens::Errc::ParseError: return RLENS_E_PARSE;
    case rlens::Errc::DuplicateTrial: return RLENS_E_DUPLICATE_TRIAL;
    case rlens::Errc::LabelError: return RLENS_E_LABEL;
    case rlens::Errc::EmptyDataset: return RLENS_E_EMPTY_DATASET;
    case rlens::Errc::OutOfScopeAiAccuracy: return RLENS_E_ACCURACY_SCOPE;
    case rlens::Errc::AiAccuracyMismatch: return RLENS_E_ACCURACY_MISMATCH;
    case rlens::Errc::UnknownCondition: return RLENS_E_UNKNOWN_CONDITION;
    case rlens::Errc::PointOutsideEnvelope: return RLENS_E_POINT_OUTSIDE;
    }
    return RLENS_E_INTERNAL;
}

template <typename Fn>
int wrap(Fn&& fn) {
    g_last_error.clear();
    try {
        return fn();
    } catch (const rlens::Error& e) {
        g_last_error = e.what();
        return errc_to_status(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return RLENS_E_INTERNAL;
    } catch (...) {
        g_last_error = "unknown internal error";
        return RLENS_E_INTERNAL;
    }
}

int invalid_argument(const char* message) {
    g_last_error = message;
    return RLENS_E_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

double tol_or_default(double tol) {
    return tol > 0.0 ? tol : rlens::kDefaultTolerance;
}

rlens::RelianceProfile to_cpp(const rlens_profile& p) {
    return rlens::RelianceProfile{p.a_correct, p.a_wrong, p.o_correct, p.o_wrong};
}

rlens_profile to_c(const rlens::RelianceProfile& p) {
    return rlens_profile{p.a_correct, p.a_wrong, p.o_correct, p.o_wrong};
}

rlens_class to_c(const rlens::RelianceClass& c) {
    rlens_class out;
    switch (c.tag) {
    case rlens::RelianceTag::UnderReliance: out.tag = RLENS_TAG_UNDER_RELIANCE; break;
    case rlens::RelianceTag::OverReliance: out.tag = RLENS_TAG_OVER_RELIANCE; break;
    case rlens::RelianceTag::MatchedAdherence: out.tag = RLENS_TAG_MATCHED_ADHERENCE; break;
    }
    out.complementarity_feasible = c.complementarity_feasible ? 1 : 0;
    return out;
}

} // namespace

extern "C" {

const char* rlens_version(void) {
    return "0.1.0";
}

const char* rlens_rng_contract(void) {
    return rlens::kRngContract.data();
}

const char* rlens_errc_name(int code) {
    switch (code) {
    case RLENS_OK: return "Ok";
    case RLENS_E_INVALID_ARGUMENT: return "InvalidArgument";
    case RLENS_E_INTERNAL: return "InternalError";
    default: break;
    }
    if (code >= 1 && code <= 11) {
        return rlens::errc_name(static_cast<rlens::Errc>(code));
    }
    return "UnknownError";
}

const char* rlens_last_error(void) {
    return g_last_error.c_str();
}

void rlens_string_free(char* s) {
    delete[] s;
}

int rlens_profile_from_counts(uint64_t n_a_correct, uint64_t n_a_wrong, uint64_t n_o_correct,
                              uint64_t n_o_wrong, rlens_profile* out) {
    if (out == nullptr) {
        return invalid_argument("out profile is NULL");
    }
    return wrap([&] {
        *out = to_c(rlens::profile_from_counts(n_a_correct, n_a_wrong, n_o_correct, n_o_wrong));
        return RLENS_OK;
    });
}

int rlens_validate_profile(const rlens_profile* p, double tol) {
    if (p == nullptr) {
        return invalid_argument("profile is NULL");
    }
    return wrap([&] {
        rlens::validate_profile(to_cpp(*p), tol_or_default(tol));
        return RLENS_OK;
    });
}

double rlens_adherence(const rlens_profile* p) {
    return p ? rlens::adherence(to_cpp(*p)) : std::numeric_limits<double>::quiet_NaN();
}

double rlens_ai_accuracy(const rlens_profile* p) {
    return p ? rlens::ai_accuracy(to_cpp(*p)) : std::numeric_limits<double>::quiet_NaN();
}

double rlens_final_accuracy(const rlens_profile* p) {
    return p ? rlens::final_accuracy(to_cpp(*p)) : std::numeric_limits<double>::quiet_NaN();
}

int rlens_envelope_of(double acc, double adherence, rlens_envelope* out) {
    if (out == nullptr) {
        return invalid_argument("out envelope is NULL");
    }
    return wrap([&] {
        const rlens::Envelope env = rlens::envelope(acc, adherence);
        *out = rlens_envelope{env.adherence, env.lo, env.hi, env.width};
        return RLENS_OK;
    });
}

int rlens_envelope_width(double acc, double adherence, double* out) {
    if (out == nullptr) {
        return invalid_argument("out width is NULL");
    }
    return wrap([&] {
        *out = rlens::envelope_width(acc, adherence);
        return RLENS_OK;
    });
}

int rlens_invert_accuracy(double acc, double final_accuracy, double* lo, double* hi) {
    if (lo == nullptr || hi == nullptr) {
        return invalid_argument("out interval pointers are NULL");
    }
    return wrap([&] {
        const auto interval = rlens::invert_accuracy(acc, final_accuracy);
        *lo = interval->lo;
        *hi = interval->hi;
        return RLENS_OK;
    });
}

int rlens_expected_accuracy_nondiscerning(double acc, double adherence, double* out) {
    if (out == nullptr) {
        return invalid_argument("out accuracy is NULL");
    }
    return wrap([&] {
        *out = rlens::expected_accuracy_nondiscerning(acc, adherence);
        return RLENS_OK;
    });
}

int rlens_nondiscerning_profile(double acc, double adherence, rlens_profile* out) {
    if (out == nullptr) {
        return invalid_argument("out profile is NULL");
    }
    return wrap([&] {
        *out = to_c(rlens::nondiscerning_profile(acc, adherence));
        return RLENS_OK;
    });
}

int rlens_quality(const rlens_profile* p, double tol, double* out, int* defined) {
    if (p == nullptr || out == nullptr || defined == nullptr) {
        return invalid_argument("profile or out pointers are NULL");
    }
    return wrap([&] {
        const auto q = rlens::quality(to_cpp(*p), tol_or_default(tol));
        *defined = q.has_value() ? 1 : 0;
        if (q) {
            *out = *q;
        }
        return RLENS_OK;
    });
}

int rlens_classify(const rlens_profile* p, double tol, rlens_class* out) {
    if (p == nullptr || out == nullptr) {
        return invalid_argument("profile or out class is NULL");
    }
    return wrap([&] {
        *out = to_c(rlens::classify(to_cpp(*p), tol_or_default(tol)));
        return RLENS_OK;
    });
}

int rlens_extremal_profiles(double acc, double adherence, rlens_profile* best,
                            rlens_profile* worst) {
    if (best == nullptr || worst == nullptr) {
        return invalid_argument("out profiles are NULL");
    }
    return wrap([&] {
        const rlens::ExtremalProfiles extremes = rlens::extremal_profiles(acc, adherence);
        *best = to_c(extremes.best);
        *worst = to_c(extremes.worst);
        return RLENS_OK;
    });
}

int rlens_is_perfect_reliance(const rlens_profile* p, double tol, int* out) {
    if (p == nullptr || out == nullptr) {
        return invalid_argument("profile or out flag is NULL");
    }
    return wrap([&] {
        *out = rlens::is_perfect_reliance(to_cpp(*p), tol_or_default(tol)) ? 1 : 0;
        return RLENS_OK;
    });
}

int rlens_compare_profiles(const rlens_profile* baseline, const rlens_profile* treatment,
                           double tol, rlens_effect* out) {
    if (baseline == nullptr || treatment == nullptr || out == nullptr) {
        return invalid_argument("profile or out effect is NULL");
    }
    return wrap([&] {
        const rlens::InterventionEffect effect =
            rlens::compare_conditions(to_cpp(*baseline), to_cpp(*treatment), tol_or_default(tol));
        out->delta_adherence = effect.delta_adherence;
        out->delta_final_accuracy = effect.delta_final_accuracy;
        out->delta_quality_defined = effect.delta_quality.has_value() ? 1 : 0;
        out->delta_quality = effect.delta_quality.value_or(0.0);
        out->baseline_class = to_c(effect.baseline_class);
        out->treatment_class = to_c(effect.treatment_class);
        return RLENS_OK;
    });
}

int rlens_expected_profile(double acc, const rlens_behavior_model* model, rlens_profile* out) {
    if (model == nullptr || out == nullptr) {
        return invalid_argument("model or out profile is NULL");
    }
    return wrap([&] {
        const rlens::sim::BehaviorModel m{model->p_adhere_given_correct,
                                          model->p_adhere_given_wrong};
        *out = to_c(rlens::sim::expected_profile(acc, m));
        return RLENS_OK;
    });
}

int rlens_simulate_csv(double acc, const rlens_behavior_model* model, uint64_t n_trials,
                       uint64_t seed, int composition, const char* condition_id, char** out_csv) {
    if (model == nullptr || out_csv == nullptr) {
        return invalid_argument("model or out pointer is NULL");
    }
    if (condition_id == nullptr || condition_id[0] == '\0') {
        return invalid_argument("condition_id must be a non-empty string");
    }
    if (composition != RLENS_COMPOSITION_BERNOULLI && composition != RLENS_COMPOSITION_FIXED_COUNTS) {
        return invalid_argument("composition must be RLENS_COMPOSITION_BERNOULLI or "
                                "RLENS_COMPOSITION_FIXED_COUNTS");
    }
    return wrap([&] {
        rlens::sim::SimConfig config;
        config.acc = acc;
        config.model = {model->p_adhere_given_correct, model->p_adhere_given_wrong};
        config.n_trials = n_trials;
        config.seed = seed;
        config.ai_composition = composition == RLENS_COMPOSITION_BERNOULLI
                                    ? rlens::sim::AiComposition::Bernoulli
                                    : rlens::sim::AiComposition::FixedCounts;
        const auto records = rlens::sim::simulate(config, condition_id);
        *out_csv = dup_string(rlens::ingest::write_csv(records));
        return RLENS_OK;
    });
}

int rlens_oracle_run(int n, int acc_numerator, rlens_oracle** out) {
    if (out == nullptr) {
        return invalid_argument("out oracle is NULL");
    }
    return wrap([&] {
        auto oracle = std::make_unique<rlens_oracle>();
        oracle->result = rlens::sim::enumerate_attainable(n, acc_numerator);
        *out = oracle.release();
        return RLENS_OK;
    });
}

void rlens_oracle_free(rlens_oracle* oracle) {
    delete oracle;
}

int rlens_oracle_attainable(const rlens_oracle* oracle, int k, const int** counts, size_t* len) {
    if (oracle == nullptr || counts == nullptr || len == nullptr) {
        return invalid_argument("oracle or out pointers are NULL");
    }
    const auto it = oracle->result.per_adherence.find(k);
    if (it == oracle->result.per_adherence.end()) {
        return invalid_argument("adherence count is outside 0..n");
    }
    g_last_error.clear();
    *counts = it->second.data();
    *len = it->second.size();
    return RLENS_OK;
}

int rlens_dataset_parse(const char* bytes, size_t len, int format, int schema,
                        rlens_dataset** out) {
    if (out == nullptr || (bytes == nullptr && len != 0)) {
        return invalid_argument("bytes or out dataset is NULL");
    }
    if (format < RLENS_FORMAT_AUTO || format > RLENS_FORMAT_JSON) {
        return invalid_argument("format must be auto, CSV, or JSON");
    }
    if (schema < RLENS_SCHEMA_AUTO || schema > RLENS_SCHEMA_RAW) {
        return invalid_argument("schema must be auto, derived, or raw");
    }
    return wrap([&] {
        const std::string_view source(bytes == nullptr ? "" : bytes, len);
        const auto fmt = format == RLENS_FORMAT_AUTO
                             ? rlens::ingest::detect_format(source)
                             : (format == RLENS_FORMAT_CSV ? rlens::ingest::Format::Csv
                                                           : rlens::ingest::Format::Json);
        const auto sch = schema == RLENS_SCHEMA_AUTO
                             ? rlens::ingest::detect_schema(source, fmt)
                             : (schema == RLENS_SCHEMA_DERIVED ? rlens::ingest::Schema::Derived
                                                               : rlens::ingest::Schema::Raw);
        auto dataset = std::make_unique<rlens_dataset>();
        dataset->records = rlens::ingest::parse_dataset(source, fmt, sch);
        if (!dataset->records.empty()) {
            dataset->aggregates = rlens::ingest::aggregate(dataset->records);
        }
        *out = dataset.release();
        return RLENS_OK;
    });
}

void rlens_dataset_free(rlens_dataset* dataset) {
    delete dataset;
}

int rlens_dataset_trial_count(const rlens_dataset* dataset, uint64_t* out) {
    if (dataset == nullptr || out == nullptr) {
        return invalid_argument("dataset or out count is NULL");
    }
    g_last_error.clear();
    *out = dataset->records.size();
    return RLENS_OK;
}

int rlens_dataset_condition_count(const rlens_dataset* dataset, size_t* out) {
    if (dataset == nullptr || out == nullptr) {
        return invalid_argument("dataset or out count is NULL");
    }
    g_last_error.clear();
    *out = dataset->aggregates.size();
    return RLENS_OK;
}

int rlens_dataset_condition_id(const rlens_dataset* dataset, size_t index, const char** out) {
    if (dataset == nullptr || out == nullptr) {
        return invalid_argument("dataset or out id is NULL");
    }
    if (index >= dataset->aggregates.size()) {
        return invalid_argument("condition index is out of range");
    }
    g_last_error.clear();
    *out = dataset->aggregates[index].condition_id.c_str();
    return RLENS_OK;
}

int rlens_dataset_counts(const rlens_dataset* dataset, const char* condition_id,
                         uint64_t out_counts[4]) {
    if (dataset == nullptr || condition_id == nullptr || out_counts == nullptr) {
        return invalid_argument("dataset, condition_id, or out counts is NULL");
    }
    return wrap([&] {
        for (const auto& agg : dataset->aggregates) {
            if (agg.condition_id == condition_id) {
                out_counts[0] = agg.n_a_correct;
                out_counts[1] = agg.n_a_wrong;
                out_counts[2] = agg.n_o_correct;
                out_counts[3] = agg.n_o_wrong;
                return RLENS_OK;
            }
        }
        throw rlens::Error(rlens::Errc::UnknownCondition,
                           "condition '" + std::string(condition_id) + "' is not in the dataset");
    });
}

int rlens_dataset_write_csv(const rlens_dataset* dataset, char** out) {
    if (dataset == nullptr || out == nullptr) {
        return invalid_argument("dataset or out pointer is NULL");
    }
    return wrap([&] {
        *out = dup_string(rlens::ingest::write_csv(dataset->records));
        return RLENS_OK;
    });
}

int rlens_dataset_write_json(const rlens_dataset* dataset, char** out) {
    if (dataset == nullptr || out == nullptr) {
        return invalid_argument("dataset or out pointer is NULL");
    }
    return wrap([&] {
        *out = dup_string(rlens::ingest::write_json(dataset->records));
        return RLENS_OK;
    });
}

void rlens_analyze_options_init(rlens_analyze_options* options) {
    if (options == nullptr) {
        return;
    }
    options->tolerance = rlens::kDefaultTolerance;
    options->bootstrap_resamples = 0;
    options->bootstrap_seed = 0;
    options->group_by = RLENS_GROUP_BY_AUTO;
    options->tag_threshold = rlens::report::kDefaultTagThreshold;
}

int rlens_analyze(const rlens_dataset* dataset, const rlens_analyze_options* options,
                  rlens_analysis** out) {
    if (dataset == nullptr || out == nullptr) {
        return invalid_argument("dataset or out analysis is NULL");
    }
    rlens_analyze_options defaults;
    rlens_analyze_options_init(&defaults);
    const rlens_analyze_options& opts = options ? *options : defaults;
    if (opts.group_by < RLENS_GROUP_BY_AUTO || opts.group_by > RLENS_GROUP_BY_NONE) {
        return invalid_argument("group_by must be auto, participant, or none");
    }
    if (opts.tolerance < 0.0 || opts.tag_threshold < 0.0) {
        return invalid_argument("tolerance and tag_threshold must be non-negative");
    }
    return wrap([&] {
        rlens::report::AnalyzeOptions cpp_opts;
        cpp_opts.tolerance = tol_or_default(opts.tolerance);
        cpp_opts.bootstrap_resamples = opts.bootstrap_resamples;
        cpp_opts.bootstrap_seed = opts.bootstrap_seed;
        cpp_opts.group_by = opts.group_by == RLENS_GROUP_BY_AUTO
                                ? rlens::report::GroupBy::Auto
                                : (opts.group_by == RLENS_GROUP_BY_PARTICIPANT
                                       ? rlens::report::GroupBy::Participant
                                       : rlens::report::GroupBy::None);
        auto analysis = std::make_unique<rlens_analysis>();
        analysis->tolerance = cpp_opts.tolerance;
        analysis->tag_threshold = opts.tag_threshold > 0.0
                                      ? opts.tag_threshold
                                      : rlens::report::kDefaultTagThreshold;
        analysis->analysis = rlens::report::analyze(dataset->records, cpp_opts);
        *out = analysis.release();
        return RLENS_OK;
    });
}

void rlens_analysis_free(rlens_analysis* analysis) {
    delete analysis;
}

int rlens_analysis_reports_json(const rlens_analysis* analysis, char** out) {
    if (analysis == nullptr || out == nullptr) {
        return invalid_argument("analysis or out pointer is NULL");
    }
    return wrap([&] {
        *out = dup_string(rlens::report::to_json(analysis->analysis).dump(2) + "\n");
        return RLENS_OK;
    });
}

int rlens_analysis_table(const rlens_analysis* analysis, char** out) {
    if (analysis == nullptr || out == nullptr) {
        return invalid_argument("analysis or out pointer is NULL");
    }
    return wrap([&] {
        *out = dup_string(rlens::report::table(analysis->analysis.reports));
        return RLENS_OK;
    });
}

int rlens_analysis_warnings(const rlens_analysis* analysis, char** out) {
    if (analysis == nullptr || out == nullptr) {
        return invalid_argument("analysis or out pointer is NULL");
    }
    return wrap([&] {
        std::string joined;
        for (const auto& w : analysis->analysis.warnings) {
            joined += w;
            joined += '\n';
        }
        *out = dup_string(joined);
        return RLENS_OK;
    });
}

int rlens_analysis_compare_json(const rlens_analysis* analysis, const char* baseline_id,
                                char** out) {
    if (analysis == nullptr || baseline_id == nullptr || out == nullptr) {
        return invalid_argument("analysis, baseline_id, or out pointer is NULL");
    }
    return wrap([&] {
        const auto report = rlens::report::compare(analysis->analysis, baseline_id,
                                                   analysis->tag_threshold, analysis->tolerance);
        *out = dup_string(rlens::report::to_json(report).dump(2) + "\n");
        return RLENS_OK;
    });
}

int rlens_analysis_plot_svg(const rlens_analysis* analysis, const char* baseline_id,
                            const char* palette, double width, double height, char** out) {
    if (analysis == nullptr || out == nullptr) {
        return invalid_argument("analysis or out pointer is NULL");
    }
    return wrap([&] {
        const auto pal = palette == nullptr ? rlens::plot::Palette{}
                                            : rlens::plot::palette_from_string(palette);
        const std::optional<std::string> baseline =
            baseline_id == nullptr ? std::nullopt : std::optional<std::string>(baseline_id);
        const auto spec = rlens::report::plot_spec_for(analysis->analysis, baseline, pal, width,
                                                       height, analysis->tolerance);
        *out = dup_string(rlens::plot::render(spec));
        return RLENS_OK;
    });
}

int rlens_region_geometry(double acc, double below_xy[8], size_t* below_len, double above_xy[6],
                          size_t* above_len) {
    if (below_xy == nullptr || below_len == nullptr || above_xy == nullptr ||
        above_len == nullptr) {
        return invalid_argument("out geometry pointers are NULL");
    }
    return wrap([&] {
        const auto region = rlens::plot::region_geometry(acc);
        for (std::size_t i = 0; i < region.below.size(); ++i) {
            below_xy[2 * i] = region.below[i].x;
            below_xy[2 * i + 1] = region.below[i].y;
        }
        for (std::size_t i = 0; i < region.above.size(); ++i) {
            above_xy[2 * i] = region.above[i].x;
            above_xy[2 * i + 1] = region.above[i].y;
        }
        *below_len = region.below.size();
        *above_len = region.above.size();
        return RLENS_OK;
    });
}

int rlens_guide_lines(double acc, double nondiscern_xy[4], double matched_xy[4]) {
    if (nondiscern_xy == nullptr || matched_xy == nullptr) {
        return invalid_argument("out segment pointers are NULL");
    }
    return wrap([&] {
        const auto guides = rlens::plot::guide_lines(acc);
        nondiscern_xy[0] = guides.nondiscern.a.x;
        nondiscern_xy[1] = guides.nondiscern.a.y;
        nondiscern_xy[2] = guides.nondiscern.b.x;
        nondiscern_xy[3] = guides.nondiscern.b.y;
        matched_xy[0] = guides.matched.a.x;
        matched_xy[1] = guides.matched.a.y;
        matched_xy[2] = guides.matched.b.x;
        matched_xy[3] = guides.matched.b.y;
        return RLENS_OK;
    });
}

} // extern "C"
