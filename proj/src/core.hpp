#pragma once

#include <cstdint>
#include <optional>

namespace rlens {

// Default tolerance for identity and equality checks on fractions. All
// quantities are unitless fractions in [0,1]; percent appears only in I/O.
inline constexpr double kDefaultTolerance = 1e-9;

// Four-way adherence/override decomposition of one experiment condition.
// Fields are fractions of the condition's trials and sum to 1:
//   a_correct  adhered to a correct AI recommendation   (final decision right)
//   a_wrong    adhered to a wrong AI recommendation     (final decision wrong)
//   o_correct  overrode a wrong AI recommendation       (final decision right)
//   o_wrong    overrode a correct AI recommendation     (final decision wrong)
struct RelianceProfile {
    double a_correct = 0.0;
    double a_wrong = 0.0;
    double o_correct = 0.0;
    double o_wrong = 0.0;
};

// Attainable final-accuracy interval at a fixed adherence level.
struct Envelope {
    double adherence = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    double width = 0.0;

    bool contains(double final_accuracy, double tol = kDefaultTolerance) const {
        return final_accuracy >= lo - tol && final_accuracy <= hi + tol;
    }
};

// Closed interval of fractions; used for the adherence levels compatible with
// a given final accuracy.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

enum class RelianceTag {
    UnderReliance,   // adherence below AI accuracy
    OverReliance,    // adherence above AI accuracy
    MatchedAdherence // adherence equals AI accuracy within tolerance
};

struct RelianceClass {
    RelianceTag tag = RelianceTag::MatchedAdherence;
    // True iff final accuracy above the AI accuracy is attainable at this
    // adherence level, i.e. adherence strictly exceeds 2*acc - 1. The
    // threshold itself counts as infeasible.
    bool complementarity_feasible = false;
};

// Pairwise movement between a baseline and a treatment condition under the
// same AI accuracy.
struct InterventionEffect {
    double delta_adherence = 0.0;
    double delta_final_accuracy = 0.0;
    std::optional<double> delta_quality; // empty if either quality is undefined
    RelianceClass baseline_class;
    RelianceClass treatment_class;
};

const char* reliance_tag_name(RelianceTag tag);

// Throws DomainError unless 0.5 < acc <= 1 (AI strictly better than chance).
void require_ai_accuracy(double acc);

// Throws DomainError unless 0 <= value <= 1.
void require_unit_interval(double value, const char* what);

// Throws DomainError unless all fields lie in [0,1] and sum to 1, each within
// tol.
void validate_profile(const RelianceProfile& p, double tol = kDefaultTolerance);

// Builds an exact profile from the four per-condition counts.
// Throws EmptyCondition when all counts are zero.
RelianceProfile profile_from_counts(std::uint64_t n_a_correct, std::uint64_t n_a_wrong,
                                    std::uint64_t n_o_correct, std::uint64_t n_o_wrong);

// Fraction of trials where the human followed the AI recommendation.
inline double adherence(const RelianceProfile& p) { return p.a_correct + p.a_wrong; }

// Fraction of AI recommendations that were correct.
inline double ai_accuracy(const RelianceProfile& p) { return p.a_correct + p.o_wrong; }

// Fraction of correct final decisions.
inline double final_accuracy(const RelianceProfile& p) { return p.a_correct + p.o_correct; }

// Range of final accuracy attainable at the given adherence level:
//   [1-acc-A, 1-acc+A]   if A <= 1-acc
//   [A+acc-1, 1-acc+A]   if 1-acc < A <= acc
//   [A+acc-1, 1+acc-A]   if A > acc
// Adjacent branches agree at the boundaries, so branch membership is
// observationally irrelevant there.
Envelope envelope(double acc, double adherence);

// Width of the attainable range: 2A, then 2(1-acc), then 2(1-A) over the same
// three branches.
double envelope_width(double acc, double adherence);

// Adherence levels at which final_accuracy is attainable. By the symmetry of
// the attainable region this is envelope(acc, final_accuracy) read as an
// adherence interval, and it is never empty for final_accuracy in [0,1]: every
// accuracy level is reachable at some adherence.
std::optional<Interval> invert_accuracy(double acc, double final_accuracy);

// Expected final accuracy when adherence is independent of AI correctness:
// (1-acc) + (2*acc-1)*A. Linear in A with positive slope; never above acc.
double expected_accuracy_nondiscerning(double acc, double adherence);

// The profile realizing that expectation:
// (A*acc, A*(1-acc), (1-A)*(1-acc), (1-A)*acc).
RelianceProfile nondiscerning_profile(double acc, double adherence);

// Position of the profile's final accuracy within its attainable range,
// normalized to [0,1]: (final - lo) / width. Empty when the range has zero
// width (adherence 0 or 1, or a perfectly accurate AI), where the metric is
// undefined.
std::optional<double> quality(const RelianceProfile& p, double tol = kDefaultTolerance);

// Under-/over-reliance tag from comparing adherence against AI accuracy, plus
// whether complementing the AI is attainable at this adherence level.
RelianceClass classify(const RelianceProfile& p, double tol = kDefaultTolerance);

RelianceClass classify_adherence(double acc, double adherence, double tol = kDefaultTolerance);

// Profiles attaining the top and bottom of the envelope at the given
// adherence level. Closed forms per branch:
//   A <= acc: best  = (A, 0, 1-acc, acc-A)
//   A >  acc: best  = (acc, A-acc, 1-A, 0)
//   A <= 1-acc: worst = (0, A, 1-acc-A, acc)
//   A >  1-acc: worst = (A+acc-1, 1-acc, 0, 1-A)
struct ExtremalProfiles {
    RelianceProfile best;
    RelianceProfile worst;
};
ExtremalProfiles extremal_profiles(double acc, double adherence);

// True iff the profile never adheres to wrong nor overrides correct
// recommendations (equivalently, final accuracy is 1).
bool is_perfect_reliance(const RelianceProfile& p, double tol = kDefaultTolerance);

// Deltas (treatment minus baseline) of adherence, final accuracy and quality,
// plus both classifications. Requires both profiles to describe the same AI:
// throws AiAccuracyMismatch when the derived AI accuracies differ beyond tol.
InterventionEffect compare_conditions(const RelianceProfile& baseline,
                                      const RelianceProfile& treatment,
                                      double tol = kDefaultTolerance);

} // namespace rlens
