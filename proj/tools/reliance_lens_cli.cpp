#include "reliance_lens.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

namespace {

// Exit codes: 0 success, 1 data/domain errors, 2 usage errors.
constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

#define CHECK_RLENS(call)                                                                          \
    do {                                                                                           \
        if ((call) != RLENS_OK) {                                                                  \
            std::fprintf(stderr, "%s\n", rlens_last_error());                                      \
            return kExitData;                                                                      \
        }                                                                                          \
    } while (0)

struct CStr {
    char* ptr = nullptr;
    ~CStr() { rlens_string_free(ptr); }
    CStr() = default;
    CStr(const CStr&) = delete;
    CStr& operator=(const CStr&) = delete;
};

using DatasetHandle = std::unique_ptr<rlens_dataset, decltype(&rlens_dataset_free)>;
using AnalysisHandle = std::unique_ptr<rlens_analysis, decltype(&rlens_analysis_free)>;
using OracleHandle = std::unique_ptr<rlens_oracle, decltype(&rlens_oracle_free)>;

struct GlobalOpts {
    std::string format = "auto";
    std::string schema = "auto";
    std::string out;
    std::uint64_t seed = 0;
    double tolerance = 0.0; // 0 lets the library apply its default (1e-9)
};

bool read_input(const std::string& path, std::string& bytes) {
    if (path == "-") {
        std::ostringstream buffer;
        buffer << std::cin.rdbuf();
        bytes = buffer.str();
        return true;
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::fprintf(stderr, "cannot read '%s'\n", path.c_str());
        return false;
    }
    bytes.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    return !in.bad();
}

bool write_output(const std::string& out_path, const std::string& bytes) {
    if (out_path.empty() || out_path == "-") {
        std::fwrite(bytes.data(), 1, bytes.size(), stdout);
        return true;
    }
    std::ofstream out(out_path, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        std::fprintf(stderr, "cannot write '%s'\n", out_path.c_str());
        return false;
    }
    return true;
}

int format_code(const std::string& name) {
    if (name == "csv") {
        return RLENS_FORMAT_CSV;
    }
    if (name == "json") {
        return RLENS_FORMAT_JSON;
    }
    return RLENS_FORMAT_AUTO;
}

int schema_code(const std::string& name) {
    if (name == "derived") {
        return RLENS_SCHEMA_DERIVED;
    }
    if (name == "raw") {
        return RLENS_SCHEMA_RAW;
    }
    return RLENS_SCHEMA_AUTO;
}

int group_by_code(const std::string& name) {
    if (name == "participant") {
        return RLENS_GROUP_BY_PARTICIPANT;
    }
    if (name == "none") {
        return RLENS_GROUP_BY_NONE;
    }
    return RLENS_GROUP_BY_AUTO;
}

int load_dataset(const std::string& input, const GlobalOpts& global, DatasetHandle& dataset) {
    std::string bytes;
    if (!read_input(input, bytes)) {
        return kExitData;
    }
    rlens_dataset* raw = nullptr;
    CHECK_RLENS(rlens_dataset_parse(bytes.data(), bytes.size(), format_code(global.format),
                                    schema_code(global.schema), &raw));
    dataset.reset(raw);
    return 0;
}

int run_analysis(const DatasetHandle& dataset, const GlobalOpts& global,
                 const std::string& group_by, std::uint64_t bootstrap, double tag_threshold,
                 AnalysisHandle& analysis) {
    rlens_analyze_options options;
    rlens_analyze_options_init(&options);
    if (global.tolerance > 0.0) {
        options.tolerance = global.tolerance;
    }
    options.bootstrap_resamples = bootstrap;
    options.bootstrap_seed = global.seed;
    options.group_by = group_by_code(group_by);
    if (tag_threshold > 0.0) {
        options.tag_threshold = tag_threshold;
    }
    rlens_analysis* raw = nullptr;
    CHECK_RLENS(rlens_analyze(dataset.get(), &options, &raw));
    analysis.reset(raw);
    CStr warnings;
    CHECK_RLENS(rlens_analysis_warnings(analysis.get(), &warnings.ptr));
    if (warnings.ptr != nullptr && warnings.ptr[0] != '\0') {
        std::fprintf(stderr, "%s", warnings.ptr);
    }
    return 0;
}

int cmd_analyze(const std::string& input, const GlobalOpts& global, const std::string& group_by,
                std::uint64_t bootstrap, bool as_table) {
    DatasetHandle dataset(nullptr, rlens_dataset_free);
    if (const int rc = load_dataset(input, global, dataset)) {
        return rc;
    }
    AnalysisHandle analysis(nullptr, rlens_analysis_free);
    if (const int rc = run_analysis(dataset, global, group_by, bootstrap, 0.0, analysis)) {
        return rc;
    }
    CStr text;
    if (as_table) {
        CHECK_RLENS(rlens_analysis_table(analysis.get(), &text.ptr));
    } else {
        CHECK_RLENS(rlens_analysis_reports_json(analysis.get(), &text.ptr));
    }
    return write_output(global.out, text.ptr) ? 0 : kExitData;
}

int cmd_compare(const std::string& input, const GlobalOpts& global, const std::string& baseline,
                double tag_threshold) {
    DatasetHandle dataset(nullptr, rlens_dataset_free);
    if (const int rc = load_dataset(input, global, dataset)) {
        return rc;
    }
    AnalysisHandle analysis(nullptr, rlens_analysis_free);
    if (const int rc = run_analysis(dataset, global, "auto", 0, tag_threshold, analysis)) {
        return rc;
    }
    CStr text;
    CHECK_RLENS(rlens_analysis_compare_json(analysis.get(), baseline.c_str(), &text.ptr));
    return write_output(global.out, text.ptr) ? 0 : kExitData;
}

int cmd_simulate(const GlobalOpts& global, double acc, double p_correct, double p_wrong,
                 std::uint64_t n, const std::string& composition, const std::string& condition) {
    const rlens_behavior_model model{p_correct, p_wrong};
    const int comp = composition == "bernoulli" ? RLENS_COMPOSITION_BERNOULLI
                                                : RLENS_COMPOSITION_FIXED_COUNTS;
    CStr csv;
    CHECK_RLENS(rlens_simulate_csv(acc, &model, n, global.seed, comp, condition.c_str(),
                                   &csv.ptr));
    if (!write_output(global.out, csv.ptr)) {
        return kExitData;
    }
    rlens_profile expected;
    CHECK_RLENS(rlens_expected_profile(acc, &model, &expected));
    std::fprintf(stderr,
                 "expected profile: a_correct=%.9g a_wrong=%.9g o_correct=%.9g o_wrong=%.9g "
                 "(adherence %.9g, final accuracy %.9g)\n",
                 expected.a_correct, expected.a_wrong, expected.o_correct, expected.o_wrong,
                 rlens_adherence(&expected), rlens_final_accuracy(&expected));
    return 0;
}

std::string fmt_pct(double fraction) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g%%", fraction * 100.0);
    return buf;
}

double round9(double v) {
    return std::round(v * 1e9) / 1e9 + 0.0;
}

int cmd_oracle(const GlobalOpts& global, int n, int acc_numerator, bool as_json) {
    rlens_oracle* raw = nullptr;
    CHECK_RLENS(rlens_oracle_run(n, acc_numerator, &raw));
    OracleHandle oracle(raw, rlens_oracle_free);
    const double acc = static_cast<double>(acc_numerator) / n;

    const auto pad_to = [](std::string& text, const std::string& cell, std::size_t width) {
        text += cell;
        text.append(cell.size() < width ? width - cell.size() : 1, ' ');
    };
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    std::string table;
    table += "enumeration for n = " + std::to_string(n) + " trials, " +
             std::to_string(acc_numerator) + " correct recommendations (accuracy " +
             fmt_pct(acc) + ")\n\n";
    table += "  k  ";
    pad_to(table, "attainable accuracies", 30);
    pad_to(table, "analytic range", 20);
    table += "check\n";
    bool all_pass = true;
    for (int k = 0; k <= n; ++k) {
        const int* counts = nullptr;
        size_t len = 0;
        CHECK_RLENS(rlens_oracle_attainable(oracle.get(), k, &counts, &len));
        rlens_envelope env;
        CHECK_RLENS(rlens_envelope_of(acc, static_cast<double>(k) / n, &env));
        const double min_frac = static_cast<double>(counts[0]) / n;
        const double max_frac = static_cast<double>(counts[len - 1]) / n;
        const bool pass = std::fabs(min_frac - env.lo) <= 1e-12 &&
                          std::fabs(max_frac - env.hi) <= 1e-12;
        all_pass = all_pass && pass;

        std::string accuracies;
        nlohmann::ordered_json count_list = nlohmann::ordered_json::array();
        nlohmann::ordered_json accuracy_list = nlohmann::ordered_json::array();
        for (size_t i = 0; i < len; ++i) {
            if (!accuracies.empty()) {
                accuracies += ' ';
            }
            accuracies += fmt_pct(static_cast<double>(counts[i]) / n);
            count_list.push_back(counts[i]);
            accuracy_list.push_back(round9(static_cast<double>(counts[i]) / n));
        }
        char kbuf[16];
        std::snprintf(kbuf, sizeof(kbuf), "%3d  ", k);
        table += kbuf;
        pad_to(table, accuracies, 30);
        pad_to(table, "[" + fmt_pct(round9(env.lo)) + ", " + fmt_pct(round9(env.hi)) + "]", 20);
        table += pass ? "PASS" : "FAIL";
        table += '\n';

        nlohmann::ordered_json row;
        row["k"] = k;
        row["attainable_counts"] = std::move(count_list);
        row["attainable_accuracies"] = std::move(accuracy_list);
        row["envelope"] = {{"lo", round9(env.lo)}, {"hi", round9(env.hi)}};
        row["pass"] = pass;
        rows.push_back(std::move(row));
    }
    table += "\nverdict: ";
    table += all_pass ? "PASS" : "FAIL";
    table += " (" + std::to_string(n + 1) + " adherence counts checked against the analytic "
             "envelope)\n";

    std::string output;
    if (as_json) {
        nlohmann::ordered_json doc;
        doc["n"] = n;
        doc["acc_numerator"] = acc_numerator;
        doc["rows"] = std::move(rows);
        doc["pass"] = all_pass;
        output = doc.dump(2) + "\n";
    } else {
        output = table;
    }
    if (!write_output(global.out, output)) {
        return kExitData;
    }
    return all_pass ? 0 : kExitData;
}

int cmd_plot(const std::string& input, const GlobalOpts& global,
             const std::optional<std::string>& baseline, std::string palette, double width,
             double height) {
    DatasetHandle dataset(nullptr, rlens_dataset_free);
    if (const int rc = load_dataset(input, global, dataset)) {
        return rc;
    }
    AnalysisHandle analysis(nullptr, rlens_analysis_free);
    if (const int rc = run_analysis(dataset, global, "none", 0, 0.0, analysis)) {
        return rc;
    }
    if (palette.empty()) {
        if (const char* env = std::getenv("RELIANCE_LENS_PALETTE")) {
            palette = env;
        }
    }
    CStr svg;
    CHECK_RLENS(rlens_analysis_plot_svg(analysis.get(), baseline ? baseline->c_str() : nullptr,
                                        palette.empty() ? nullptr : palette.c_str(), width,
                                        height, &svg.ptr));
    return write_output(global.out, svg.ptr) ? 0 : kExitData;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"reliance-lens: reliance behavior analysis for AI-assisted binary decisions"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(rlens_version()));

    GlobalOpts global;
    app.add_option("--format", global.format, "Input format")
        ->check(CLI::IsMember({"auto", "csv", "json"}))
        ->capture_default_str();
    app.add_option("--schema", global.schema, "Input schema")
        ->check(CLI::IsMember({"auto", "derived", "raw"}))
        ->capture_default_str();
    app.add_option("--out", global.out, "Output path (default: stdout)");
    app.add_option("--seed", global.seed, "Random seed (simulation, bootstrap)")
        ->capture_default_str();
    app.add_option("--tolerance", global.tolerance,
                   "Equality tolerance for fractional comparisons (default 1e-9)");

    auto* analyze = app.add_subcommand("analyze", "Per-condition reliance reports");
    analyze->fallthrough();
    std::string analyze_input;
    std::string group_by = "auto";
    std::uint64_t bootstrap = 0;
    bool as_table = false;
    analyze->add_option("input", analyze_input, "Dataset path ('-' for stdin)")->required();
    analyze->add_option("--group-by", group_by, "Participant grouping")
        ->check(CLI::IsMember({"auto", "participant", "none"}))
        ->capture_default_str();
    analyze->add_option("--bootstrap", bootstrap,
                        "Bootstrap resamples for 95% intervals (0 disables)");
    analyze->add_flag("--table", as_table, "Human-readable table instead of JSON");

    auto* compare = app.add_subcommand("compare", "Baseline-vs-treatment intervention effects");
    compare->fallthrough();
    std::string compare_input;
    std::string baseline_id;
    double tag_threshold = 0.0;
    compare->add_option("input", compare_input, "Dataset path ('-' for stdin)")->required();
    compare->add_option("--baseline", baseline_id, "Baseline condition id")->required();
    compare->add_option("--tag-threshold", tag_threshold,
                        "Narrative-tag threshold on deltas (default 0.05)");

    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic dataset");
    simulate->fallthrough();
    double acc = 0.0;
    double p_correct = 0.0;
    double p_wrong = 0.0;
    std::uint64_t n_trials = 0;
    std::string composition = "fixed";
    std::string condition = "sim";
    simulate->add_option("--acc", acc, "AI accuracy in (0.5, 1]")->required();
    simulate->add_option("--p-adhere-correct", p_correct,
                         "P(adhere | AI correct)")->required();
    simulate->add_option("--p-adhere-wrong", p_wrong, "P(adhere | AI wrong)")->required();
    simulate->add_option("--n", n_trials, "Number of trials")->required();
    simulate->add_option("--composition", composition,
                         "AI correctness layout: exact counts or per-trial draws")
        ->check(CLI::IsMember({"fixed", "bernoulli"}))
        ->capture_default_str();
    simulate->add_option("--condition", condition, "Condition id for the records")
        ->capture_default_str();

    auto* oracle = app.add_subcommand("oracle",
                                      "Exhaustive enumeration vs the analytic envelope");
    oracle->fallthrough();
    int oracle_n = 0;
    int oracle_m = 0;
    bool oracle_json = false;
    oracle->add_option("--n", oracle_n, "Number of trials (at most 20)")->required();
    oracle->add_option("--acc-numerator", oracle_m, "Correct recommendations out of n")
        ->required();
    oracle->add_flag("--json", oracle_json, "Machine-readable output");

    auto* plot = app.add_subcommand("plot", "Render the framework as SVG");
    plot->fallthrough();
    std::string plot_input;
    std::string plot_baseline;
    std::string palette;
    double width = 640.0;
    double height = 480.0;
    plot->add_option("input", plot_input, "Dataset path ('-' for stdin)")->required();
    plot->add_option("--baseline", plot_baseline,
                     "Draw intervention arrows from this condition");
    plot->add_option("--palette", palette,
                     "Color overrides: below=C,above=C,line=C,marker=C "
                     "(RELIANCE_LENS_PALETTE env var is the fallback)");
    plot->add_option("--width", width, "Canvas width in pixels")->capture_default_str();
    plot->add_option("--height", height, "Canvas height in pixels")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    if (*analyze) {
        return cmd_analyze(analyze_input, global, group_by, bootstrap, as_table);
    }
    if (*compare) {
        return cmd_compare(compare_input, global, baseline_id, tag_threshold);
    }
    if (*simulate) {
        return cmd_simulate(global, acc, p_correct, p_wrong, n_trials, composition, condition);
    }
    if (*oracle) {
        return cmd_oracle(global, oracle_n, oracle_m, oracle_json);
    }
    if (*plot) {
        return cmd_plot(plot_input, global,
                        plot_baseline.empty() ? std::nullopt
                                              : std::optional<std::string>(plot_baseline),
                        palette, width, height);
    }
    return kExitUsage;
}
