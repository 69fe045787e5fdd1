#include "sim.hpp"

#include "errors.hpp"
#include "rng.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace rlens::sim {

namespace {

constexpr double kCountEps = 1e-6;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::uint64_t fixed_correct_count(double acc, std::uint64_t n_trials) {
    const double exact = acc * static_cast<double>(n_trials);
    const auto rounded = static_cast<std::uint64_t>(std::llround(exact));
    if (std::fabs(exact - static_cast<double>(rounded)) > kCountEps) {
        throw Error(Errc::ConfigError, "fixed-counts composition needs an integer number of "
                                       "correct recommendations, but n*acc = " +
                                           fmt(exact));
    }
    return rounded;
}

} // namespace

bool BehaviorModel::nondiscerning(double tol) const {
    return std::fabs(p_adhere_given_correct - p_adhere_given_wrong) <= tol;
}

void validate_model(const BehaviorModel& model) {
    require_unit_interval(model.p_adhere_given_correct, "p_adhere_given_correct");
    require_unit_interval(model.p_adhere_given_wrong, "p_adhere_given_wrong");
}

void validate_config(const SimConfig& config) {
    require_ai_accuracy(config.acc);
    const double probs[2] = {config.model.p_adhere_given_correct,
                             config.model.p_adhere_given_wrong};
    const char* names[2] = {"p_adhere_given_correct", "p_adhere_given_wrong"};
    for (int i = 0; i < 2; ++i) {
        if (!(probs[i] >= 0.0) || !(probs[i] <= 1.0)) {
            throw Error(Errc::ConfigError,
                        std::string(names[i]) + " " + fmt(probs[i]) + " is outside [0, 1]");
        }
    }
    if (config.n_trials == 0) {
        throw Error(Errc::ConfigError, "n_trials must be at least 1");
    }
    if (config.ai_composition == AiComposition::FixedCounts) {
        fixed_correct_count(config.acc, config.n_trials);
    }
}

std::vector<ingest::TrialRecord> simulate(const SimConfig& config, std::string_view condition_id) {
    validate_config(config);
    Rng rng(config.seed);
    const std::uint64_t n = config.n_trials;

    std::vector<std::uint8_t> ai_correct(n, 0);
    if (config.ai_composition == AiComposition::Bernoulli) {
        for (std::uint64_t i = 0; i < n; ++i) {
            ai_correct[i] = bernoulli(rng, config.acc) ? 1 : 0;
        }
    } else {
        const std::uint64_t k = fixed_correct_count(config.acc, n);
        std::fill_n(ai_correct.begin(), k, std::uint8_t{1});
        shuffle(rng, ai_correct);
    }

    std::vector<ingest::TrialRecord> records;
    records.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        const double p = ai_correct[i] ? config.model.p_adhere_given_correct
                                       : config.model.p_adhere_given_wrong;
        ingest::TrialRecord r;
        r.condition_id = std::string(condition_id);
        r.trial_id = "t" + std::to_string(i + 1);
        r.ai_correct = ai_correct[i] != 0;
        r.adhered = bernoulli(rng, p);
        records.push_back(std::move(r));
    }
    return records;
}

OracleResult enumerate_attainable(int n, int acc_numerator) {
    if (n < 1 || n > kOracleMaxN) {
        throw Error(Errc::DomainError, "enumeration supports 1 <= n <= " +
                                           std::to_string(kOracleMaxN) + ", got n = " +
                                           std::to_string(n));
    }
    if (acc_numerator > n || 2 * acc_numerator <= n) {
        throw Error(Errc::DomainError,
                    "acc_numerator " + std::to_string(acc_numerator) + " of n = " +
                        std::to_string(n) +
                        " is out of scope: the AI must be strictly better than chance");
    }
    OracleResult result;
    result.n = n;
    result.acc_numerator = acc_numerator;
    const int wrong = n - acc_numerator;
    for (int k = 0; k <= n; ++k) {
        std::vector<int> attainable;
        const int a_c_min = std::max(0, k - wrong);
        const int a_c_max = std::min(k, acc_numerator);
        for (int a_c = a_c_min; a_c <= a_c_max; ++a_c) {
            const int a_w = k - a_c;
            const int o_c = wrong - a_w;
            attainable.push_back(a_c + o_c);
        }
        result.per_adherence.emplace(k, std::move(attainable));
    }
    return result;
}

RelianceProfile expected_profile(double acc, const BehaviorModel& model) {
    require_ai_accuracy(acc);
    validate_model(model);
    return RelianceProfile{
        acc * model.p_adhere_given_correct,
        (1.0 - acc) * model.p_adhere_given_wrong,
        (1.0 - acc) * (1.0 - model.p_adhere_given_wrong),
        acc * (1.0 - model.p_adhere_given_correct),
    };
}

} // namespace rlens::sim
