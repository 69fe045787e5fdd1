#pragma once

#include "core.hpp"
#include "ingest.hpp"

#include <cstdint>
#include <map>
#include <string_view>
#include <vector>

namespace rlens::sim {

/// Parametric reliance behavior: probability of adhering given a correct AI
/// recommendation and given a wrong one. Equal fields mean the behavior does
/// not discern correct from wrong recommendations.
struct BehaviorModel {
    double p_adhere_given_correct = 0.0;
    double p_adhere_given_wrong = 0.0;

    bool nondiscerning(double tol = kDefaultTolerance) const;
};

enum class AiComposition {
    Bernoulli,   ///< AI correctness drawn independently per trial.
    FixedCounts, ///< Exactly n*acc correct recommendations, order shuffled.
};

struct SimConfig {
    double acc = 0.0;
    BehaviorModel model;
    std::uint64_t n_trials = 0;
    std::uint64_t seed = 0;
    AiComposition ai_composition = AiComposition::FixedCounts;
};

/// Exhaustive enumeration of reliance configurations for an n-trial task with
/// acc_numerator correct AI recommendations: for each adherence count k, the
/// exact set of attainable correct-decision counts.
struct OracleResult {
    int n = 0;
    int acc_numerator = 0;
    std::map<int, std::vector<int>> per_adherence;
};

inline constexpr int kOracleMaxN = 20;

/// Throws DomainError when a probability leaves [0,1].
void validate_model(const BehaviorModel& model);

/// Throws ConfigError (zero trials, probabilities outside [0,1], FixedCounts
/// with non-integer n*acc) or DomainError (out-of-scope acc).
void validate_config(const SimConfig& config);

/// Generates n_trials records under the configured behavior. Deterministic:
/// identical configs produce identical record sequences. Draw order is AI
/// correctness first (whole sequence), then adherence per trial.
std::vector<ingest::TrialRecord> simulate(const SimConfig& config,
                                          std::string_view condition_id = "sim");

/// Brute-force oracle over all reliance configurations. Throws DomainError
/// when acc_numerator/n is not strictly above 1/2, when acc_numerator > n,
/// or when n exceeds kOracleMaxN.
OracleResult enumerate_attainable(int n, int acc_numerator);

/// Expected reliance profile under a behavior model:
/// (acc*p_ac, (1-acc)*p_aw, (1-acc)*(1-p_aw), acc*(1-p_ac)).
/// With p_ac = p_aw = A this reproduces nondiscerning_profile(acc, A).
RelianceProfile expected_profile(double acc, const BehaviorModel& model);

} // namespace rlens::sim
