#include "core.hpp"

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace rlens {

namespace {

std::string fmt_frac(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

double clamp01(double v) {
    return std::clamp(v, 0.0, 1.0);
}

} // namespace

const char* reliance_tag_name(RelianceTag tag) {
    switch (tag) {
    case RelianceTag::UnderReliance: return "under_reliance";
    case RelianceTag::OverReliance: return "over_reliance";
    case RelianceTag::MatchedAdherence: return "matched_adherence";
    }
    return "unknown";
}

void require_ai_accuracy(double acc) {
    if (!(acc > 0.5) || !(acc <= 1.0)) {
        throw Error(Errc::DomainError,
                    "AI accuracy " + fmt_frac(acc) +
                        " is out of scope: must be strictly above 0.5 (better than chance) and at most 1");
    }
}

void require_unit_interval(double value, const char* what) {
    if (!(value >= 0.0) || !(value <= 1.0)) {
        throw Error(Errc::DomainError,
                    std::string(what) + " " + fmt_frac(value) + " is outside [0, 1]");
    }
}

void validate_profile(const RelianceProfile& p, double tol) {
    const double fields[4] = {p.a_correct, p.a_wrong, p.o_correct, p.o_wrong};
    const char* names[4] = {"a_correct", "a_wrong", "o_correct", "o_wrong"};
    for (int i = 0; i < 4; ++i) {
        if (!(fields[i] >= -tol) || !(fields[i] <= 1.0 + tol)) {
            throw Error(Errc::DomainError, std::string("profile field ") + names[i] + " " +
                                               fmt_frac(fields[i]) + " is outside [0, 1]");
        }
    }
    const double sum = p.a_correct + p.a_wrong + p.o_correct + p.o_wrong;
    if (std::fabs(sum - 1.0) > tol) {
        throw Error(Errc::DomainError,
                    "profile fields sum to " + fmt_frac(sum) + ", expected 1");
    }
}

RelianceProfile profile_from_counts(std::uint64_t n_a_correct, std::uint64_t n_a_wrong,
                                    std::uint64_t n_o_correct, std::uint64_t n_o_wrong) {
    const std::uint64_t n = n_a_correct + n_a_wrong + n_o_correct + n_o_wrong;
    if (n == 0) {
        throw Error(Errc::EmptyCondition, "condition has no trials (all four counts are zero)");
    }
    const double dn = static_cast<double>(n);
    return RelianceProfile{
        static_cast<double>(n_a_correct) / dn,
        static_cast<double>(n_a_wrong) / dn,
        static_cast<double>(n_o_correct) / dn,
        static_cast<double>(n_o_wrong) / dn,
    };
}

Envelope envelope(double acc, double adherence) {
    require_ai_accuracy(acc);
    require_unit_interval(adherence, "adherence");
    Envelope env;
    env.adherence = adherence;
    if (adherence <= 1.0 - acc) {
        env.lo = 1.0 - acc - adherence;
        env.hi = 1.0 - acc + adherence;
    } else if (adherence <= acc) {
        env.lo = adherence + acc - 1.0;
        env.hi = 1.0 - acc + adherence;
    } else {
        env.lo = adherence + acc - 1.0;
        env.hi = 1.0 + acc - adherence;
    }
    env.width = env.hi - env.lo;
    return env;
}

double envelope_width(double acc, double adherence) {
    require_ai_accuracy(acc);
    require_unit_interval(adherence, "adherence");
    if (adherence <= 1.0 - acc) {
        return 2.0 * adherence;
    }
    if (adherence <= acc) {
        return 2.0 * (1.0 - acc);
    }
    return 2.0 * (1.0 - adherence);
}

std::optional<Interval> invert_accuracy(double acc, double final_accuracy) {
    require_ai_accuracy(acc);
    require_unit_interval(final_accuracy, "final accuracy");
    // The attainable region is symmetric in (adherence, final accuracy), so
    // the preimage of an accuracy level is the same interval formula. Every
    // level in [0,1] is attainable at some adherence, hence never empty.
    const Envelope env = envelope(acc, final_accuracy);
    return Interval{env.lo, env.hi};
}

double expected_accuracy_nondiscerning(double acc, double adherence) {
    require_ai_accuracy(acc);
    require_unit_interval(adherence, "adherence");
    return (1.0 - acc) + (2.0 * acc - 1.0) * adherence;
}

RelianceProfile nondiscerning_profile(double acc, double adherence) {
    require_ai_accuracy(acc);
    require_unit_interval(adherence, "adherence");
    return RelianceProfile{
        adherence * acc,
        adherence * (1.0 - acc),
        (1.0 - adherence) * (1.0 - acc),
        (1.0 - adherence) * acc,
    };
}

std::optional<double> quality(const RelianceProfile& p, double tol) {
    validate_profile(p, tol);
    const double acc = clamp01(ai_accuracy(p));
    require_ai_accuracy(acc);
    const double adh = clamp01(adherence(p));
    const Envelope env = envelope(acc, adh);
    if (env.width <= tol) {
        return std::nullopt;
    }
    return clamp01((final_accuracy(p) - env.lo) / env.width);
}

RelianceClass classify_adherence(double acc, double adherence, double tol) {
    require_ai_accuracy(acc);
    require_unit_interval(adherence, "adherence");
    RelianceClass cls;
    if (std::fabs(adherence - acc) <= tol) {
        cls.tag = RelianceTag::MatchedAdherence;
    } else if (adherence < acc) {
        cls.tag = RelianceTag::UnderReliance;
    } else {
        cls.tag = RelianceTag::OverReliance;
    }
    cls.complementarity_feasible = adherence - (2.0 * acc - 1.0) > tol;
    return cls;
}

RelianceClass classify(const RelianceProfile& p, double tol) {
    validate_profile(p, tol);
    const double acc = clamp01(ai_accuracy(p));
    return classify_adherence(acc, clamp01(adherence(p)), tol);
}

ExtremalProfiles extremal_profiles(double acc, double adherence) {
    require_ai_accuracy(acc);
    require_unit_interval(adherence, "adherence");
    ExtremalProfiles out;
    if (adherence <= acc) {
        out.best = RelianceProfile{adherence, 0.0, 1.0 - acc, acc - adherence};
    } else {
        out.best = RelianceProfile{acc, adherence - acc, 1.0 - adherence, 0.0};
    }
    if (adherence <= 1.0 - acc) {
        out.worst = RelianceProfile{0.0, adherence, 1.0 - acc - adherence, acc};
    } else {
        out.worst = RelianceProfile{adherence + acc - 1.0, 1.0 - acc, 0.0, 1.0 - adherence};
    }
    return out;
}

bool is_perfect_reliance(const RelianceProfile& p, double tol) {
    validate_profile(p, tol);
    return std::fabs(p.a_wrong) <= tol && std::fabs(p.o_wrong) <= tol;
}

InterventionEffect compare_conditions(const RelianceProfile& baseline,
                                      const RelianceProfile& treatment, double tol) {
    validate_profile(baseline, tol);
    validate_profile(treatment, tol);
    const double acc_b = ai_accuracy(baseline);
    const double acc_t = ai_accuracy(treatment);
    if (std::fabs(acc_b - acc_t) > tol) {
        throw Error(Errc::AiAccuracyMismatch,
                    "conditions derive different AI accuracies (" + fmt_frac(acc_b) + " vs " +
                        fmt_frac(acc_t) + "); the framework compares conditions under one AI");
    }
    InterventionEffect effect;
    effect.delta_adherence = adherence(treatment) - adherence(baseline);
    effect.delta_final_accuracy = final_accuracy(treatment) - final_accuracy(baseline);
    const auto q_b = quality(baseline, tol);
    const auto q_t = quality(treatment, tol);
    if (q_b && q_t) {
        effect.delta_quality = *q_t - *q_b;
    }
    effect.baseline_class = classify(baseline, tol);
    effect.treatment_class = classify(treatment, tol);
    return effect;
}

} // namespace rlens
