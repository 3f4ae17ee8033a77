// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// required criterion fails. Runs offline against the committed fixtures; the
// final live smoke check only activates when provider credentials are set.

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rescore/corpus.hpp"
#include "rescore/eval.hpp"
#include "rescore/llm.hpp"
#include "rescore/orchestrator.hpp"
#include "rescore/prompts.hpp"
#include "rescore/sandbox.hpp"
#include "rescore/stats.hpp"
#include "rescore/util.hpp"
#include "support/helpers.hpp"
#include "support/smart_provider.hpp"
#include "support/wilcoxon_oracle.hpp"

using namespace rescore;
namespace fs = std::filesystem;
using testsupport::fixtures_dir;
using testsupport::TempDir;

namespace {

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail = "") {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << name;
    if (!detail.empty()) std::cout << " - " << detail;
    std::cout << "\n";
    if (!ok) ++failures;
}

void skip(const std::string& name, const std::string& why) {
    std::cout << "[SKIP] " << name << " - " << why << "\n";
}

#define REQUIRE_OR_RETURN(cond, msg)                \
    do {                                            \
        if (!(cond)) {                              \
            report(criterion, false, msg);          \
            return;                                 \
        }                                           \
    } while (0)

orchestrator::LoopConfig replay_config(int max_iter = 8) {
    orchestrator::LoopConfig config;
    config.max_iterations = max_iter;
    config.transcript_mode = llm::TranscriptMode::replay;
    return config;
}

orchestrator::RunRecord replay_fixture_run(const std::string& paper_id, const fs::path& run_dir,
                                           int max_iter = 8) {
    auto bundle = corpus::load_bundle(fixtures_dir() / "bundles" / paper_id);
    auto transcript = llm::Transcript::load(fixtures_dir() / "transcripts" / (paper_id + ".json"),
                                            llm::TranscriptMode::replay);
    llm::LlmGateway gateway{llm::GatewayConfig{}};
    auto lib = prompts::PromptLibrary::defaults();
    return orchestrator::run_reconstruction(bundle, replay_config(max_iter), gateway, transcript,
                                            lib, run_dir);
}

// 1. Replay determinism on the bundled case-study fixture.
void check_replay_determinism() {
    const std::string criterion = "replay_determinism";
    auto start = std::chrono::steady_clock::now();
    TempDir tmp("acc-replay");
    std::vector<std::string> serializations;
    for (int i = 0; i < 3; ++i) {
        auto record = replay_fixture_run("ccc-safety-filter", tmp / ("run" + std::to_string(i)));
        REQUIRE_OR_RETURN(record.termination.kind == orchestrator::Termination::Kind::converged,
                          "did not converge: " + record.termination.detail);
        REQUIRE_OR_RETURN(record.iterations.size() == 2,
                          "expected convergence at iteration 2, got " +
                              std::to_string(record.iterations.size()));
        serializations.push_back(orchestrator::serialize_run_record(record));
    }
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    REQUIRE_OR_RETURN(serializations[0] == serializations[1] &&
                          serializations[1] == serializations[2],
                      "serializations differ across invocations");
    REQUIRE_OR_RETURN(elapsed < 10.0,
                      "3 replays took " + util::format_fixed(elapsed, 2) + " s (limit 10)");
    report(criterion, true,
           "3 byte-identical replays, converged at iteration 2, " +
               util::format_fixed(elapsed, 2) + " s");
}

// 2. Loop bounds: exhaustion fixture plus randomized verdict sequences.
void check_loop_bounds() {
    const std::string criterion = "loop_bounds";
    TempDir tmp("acc-bounds");
    auto record = replay_fixture_run("osc-exhaust", tmp / "exhaust");
    REQUIRE_OR_RETURN(record.termination.kind == orchestrator::Termination::Kind::exhausted,
                      "fixture did not exhaust");
    REQUIRE_OR_RETURN(record.iterations.size() == 8, "fixture ran != 8 iterations");
    for (const auto& iteration : record.iterations)
        REQUIRE_OR_RETURN(iteration.script.iteration == iteration.index,
                          "coder invocations and iterations disagree");

    // Property: over randomized verdict sequences the coder is invoked at
    // most max_iterations times and indices stay contiguous.
    std::mt19937 rng(20260810);
    auto lib = prompts::PromptLibrary::defaults();
    for (int trial = 0; trial < 8; ++trial) {
        int max_iter = 1 + static_cast<int>(rng() % 8);
        std::vector<bool> verdicts;
        for (int i = 0; i < 16; ++i) verdicts.push_back(rng() % 4 == 0);
        TempDir scratch("acc-bounds-prop");
        auto bundle = testsupport::make_bundle(scratch / "bundle");
        testsupport::SmartProvider smart(verdicts);
        llm::LlmGateway gateway(llm::GatewayConfig{}, smart.provider());
        llm::Transcript transcript(llm::TranscriptMode::live);
        orchestrator::LoopConfig config;
        config.max_iterations = max_iter;
        auto rec = orchestrator::run_reconstruction(bundle, config, gateway, transcript, lib,
                                                    scratch / "run");
        REQUIRE_OR_RETURN(smart.coder_calls() <= max_iter, "coder call bound violated");
        REQUIRE_OR_RETURN(rec.iterations.size() <= static_cast<std::size_t>(max_iter),
                          "iteration bound violated");
        bool terminal_ok =
            rec.termination.kind == orchestrator::Termination::Kind::converged ||
            (rec.termination.kind == orchestrator::Termination::Kind::exhausted &&
             rec.iterations.size() == static_cast<std::size_t>(max_iter) &&
             smart.coder_calls() == max_iter);
        REQUIRE_OR_RETURN(terminal_ok, "unexpected termination state");
        for (std::size_t i = 0; i < rec.iterations.size(); ++i)
            REQUIRE_OR_RETURN(rec.iterations[i].index == static_cast<int>(i),
                              "iteration indices not contiguous");
    }
    report(criterion, true, "8 exhausted iterations; bound held over randomized sequences");
}

// 3. Context budgeting: the 90-image bundle is rejected up front.
void check_context_budgeting() {
    const std::string criterion = "context_budgeting";
    TempDir tmp("acc-budget");
    auto bundle = corpus::load_bundle(fixtures_dir() / "bundles" / "dense-overflow");
    auto lib = prompts::PromptLibrary::defaults();
    long estimate = orchestrator::estimate_bundle_tokens(bundle, lib);
    REQUIRE_OR_RETURN(estimate >= 135000,
                      "estimate " + std::to_string(estimate) + " below 135000");
    llm::Transcript transcript(llm::TranscriptMode::replay);
    int provider_calls = 0;
    llm::LlmGateway gateway(llm::GatewayConfig{}, [&](const llm::CompletionRequest&) {
        ++provider_calls;
        return std::string();
    });
    auto record = orchestrator::run_reconstruction(bundle, replay_config(), gateway, transcript,
                                                   lib, tmp / "run");
    REQUIRE_OR_RETURN(record.termination.kind == orchestrator::Termination::Kind::context_overflow,
                      "termination was " + orchestrator::to_string(record.termination.kind));
    REQUIRE_OR_RETURN(record.iterations.empty(), "iterations ran despite overflow");
    REQUIRE_OR_RETURN(transcript.consumed() == 0, "transcript entries were consumed");
    REQUIRE_OR_RETURN(provider_calls == 0, "provider was contacted");
    report(criterion, true,
           "estimate " + std::to_string(estimate) + " tokens rejected against budget 128000");
}

// 4. Wilcoxon exact path vs brute-force enumeration.
void check_wilcoxon_oracle() {
    const std::string criterion = "wilcoxon_oracle";
    auto start = std::chrono::steady_clock::now();
    std::mt19937 rng(424242);
    std::uniform_int_distribution<int> len_dist(1, 10);
    std::uniform_real_distribution<double> value_dist(-3.0, 3.0);

    int checked = 0;
    double max_err = 0.0;
    while (checked < 200) {
        int n = len_dist(rng);
        std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
        bool ties = rng() % 4 == 0;
        bool any = false;
        for (int i = 0; i < n; ++i) {
            x[static_cast<std::size_t>(i)] = ties ? std::round(value_dist(rng)) : value_dist(rng);
            y[static_cast<std::size_t>(i)] = ties ? std::round(value_dist(rng)) : value_dist(rng);
            any |= x[static_cast<std::size_t>(i)] != y[static_cast<std::size_t>(i)];
        }
        if (!any) continue;
        auto fast = stats::wilcoxon_signed_rank(x, y);
        auto oracle = testsupport::brute_force_wilcoxon(x, y);
        max_err = std::max(max_err, std::fabs(fast.p_value - oracle.p));
        REQUIRE_OR_RETURN(std::fabs(fast.p_value - oracle.p) <= 1e-12,
                          "p mismatch " + std::to_string(fast.p_value) + " vs " +
                              std::to_string(oracle.p));
        double total = fast.n_effective * (fast.n_effective + 1) / 2.0;
        REQUIRE_OR_RETURN(std::fabs(fast.w_plus + fast.w_minus - total) <= 1e-12,
                          "rank identity violated");
        ++checked;
    }
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    REQUIRE_OR_RETURN(elapsed < 30.0, "took " + util::format_fixed(elapsed, 2) + " s (limit 30)");
    std::ostringstream detail;
    detail << "200 samples, max |dp| " << max_err << ", " << util::format_fixed(elapsed, 2)
           << " s";
    report(criterion, true, detail.str());
}

// 5. Rating fixture reproduces the published rater statistics.
void check_statistics_fixtures() {
    const std::string criterion = "statistics_fixtures";
    auto table = eval::ingest_ratings(fixtures_dir() / "benchmark" / "ratings.csv");
    auto rescore = table.by_condition(eval::Condition::rescore);
    REQUIRE_OR_RETURN(rescore.size() == 194, "fixture must hold 194 rescore rows");
    std::vector<int> h1, h2;
    double h1_sum = 0.0, h2_sum = 0.0;
    for (const auto& row : rescore) {
        h1.push_back(row.frs_h1);
        h2.push_back(row.frs_h2);
        h1_sum += row.frs_h1;
        h2_sum += row.frs_h2;
    }
    auto agreement = stats::agreement(h1, h2);
    std::string got = util::format_fixed(h1_sum / 194.0, 2) + "/" +
                      util::format_fixed(h2_sum / 194.0, 2) + "/" +
                      util::format_fixed(100.0 * agreement.exact, 1) + "/" +
                      util::format_fixed(100.0 * agreement.within_one, 1);
    REQUIRE_OR_RETURN(got == "2.05/2.29/69.6/97.4", "got " + got);
    report(criterion, true, "rater means 2.05/2.29, agreement 69.6%/97.4%");
}

// 6. Aggregation fixture: the overall comparison row and crosstab.
void check_aggregation_fixture() {
    const std::string criterion = "aggregation_fixture";
    auto dir = fixtures_dir() / "benchmark";
    auto table = eval::ingest_ratings(dir / "ratings.csv");
    auto scores = eval::ingest_code_scores(dir / "code_scores.csv");
    auto catalog = corpus::load_catalog(dir);
    auto report_data = eval::aggregate(table, scores, catalog);
    auto csv = eval::report_csv(report_data);
    const std::string want = "All,194,1.73,2.23,59.7,2.17,2.75,65.5";
    REQUIRE_OR_RETURN(csv.find(want + "\n") != std::string::npos,
                      "All row missing from CSV:\n" + csv);

    std::vector<orchestrator::RunRecord> runs;
    auto lines = util::split(util::read_file(dir / "terminations.csv"), '\n');
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (util::trim(lines[i]).empty()) continue;
        auto cols = util::split(lines[i], ',');
        orchestrator::RunRecord run;
        run.paper_id = cols[0];
        run.termination.kind = orchestrator::termination_kind_from_string(cols[1]);
        runs.push_back(std::move(run));
    }
    auto crosstab = eval::convergence_crosstab(runs, table);
    REQUIRE_OR_RETURN(crosstab.converged() == 79 && crosstab.converged_ge3 == 59,
                      "converged cell " + std::to_string(crosstab.converged_ge3) + "/" +
                          std::to_string(crosstab.converged()));
    REQUIRE_OR_RETURN(crosstab.exhausted() == 115 && crosstab.exhausted_ge3 == 3,
                      "exhausted cell " + std::to_string(crosstab.exhausted_ge3) + "/" +
                          std::to_string(crosstab.exhausted()));
    report(criterion, true, want + "; crosstab 59/79 and 3/115");
}

// 7. Filter accounting over the replayed mini-corpus.
void check_filter_accounting() {
    const std::string criterion = "filter_accounting";
    auto dir = fixtures_dir() / "filter";
    auto catalog = corpus::load_catalog(dir);
    auto expected = nlohmann::json::parse(util::read_file(dir / "expected_labels.json"));
    auto transcript = llm::Transcript::load(dir / "transcript.json", llm::TranscriptMode::replay);
    llm::LlmGateway gateway{llm::GatewayConfig{}};
    auto lib = prompts::PromptLibrary::defaults();

    std::map<std::string, int> counts;
    for (const auto& record : catalog) {
        agents::Session session{gateway, transcript, lib, 0, std::nullopt};
        std::string text = util::read_file(dir / "texts" / (record.paper_id + ".txt"));
        auto verdict = agents::classify_recoverability(record, text, session);
        std::string label = agents::to_string(verdict.label);
        REQUIRE_OR_RETURN(label == expected.at(record.paper_id).at("label").get<std::string>(),
                          record.paper_id + " labeled " + label);
        ++counts[label];
    }
    REQUIRE_OR_RETURN(counts["Recoverable"] == 8 && counts["NotRecoverable"] == 7 &&
                          counts["Indecisive"] == 5,
                      "label counts off");

    // Percentage formatting as in the published summary table (the full
    // corpus split 271/120/109 of 500 is reference only).
    auto pct = [](int count, int total) {
        return util::format_fixed(100.0 * count / total, 1) + "%";
    };
    REQUIRE_OR_RETURN(pct(271, 500) == "54.2%" && pct(120, 500) == "24.0%" &&
                          pct(109, 500) == "21.8%",
                      "summary percentage formatting drifted");
    report(criterion, true, "20/20 labels match ground truth; summary format 54.2%/24.0%/21.8%");
}

// 8. Sandbox safety: artifacts, crashes, timeouts, isolation.
void check_sandbox_safety() {
    const std::string criterion = "sandbox_safety";
    TempDir tmp("acc-sandbox");
    sandbox::ExecutionLimits limits;
    limits.wall_timeout = 30.0;

    auto plotted = sandbox::execute_script(testsupport::kTinyPlotScript, tmp / "plot", limits);
    REQUIRE_OR_RETURN(plotted.exit_status.code == 0 && plotted.plot_path.has_value(),
                      "plot script failed");

    auto crashed = sandbox::execute_script("raise ValueError('diverged integrator')\n",
                                           tmp / "crash", limits);
    REQUIRE_OR_RETURN(crashed.exit_status.code != 0 &&
                          crashed.stderr_tail.find("diverged integrator") != std::string::npos,
                      "crash text not captured");

    sandbox::ExecutionLimits short_limits = limits;
    short_limits.wall_timeout = 1.0;
    auto begin = std::chrono::steady_clock::now();
    auto timed = sandbox::execute_script("import time\ntime.sleep(60)\n", tmp / "hang",
                                         short_limits);
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
    REQUIRE_OR_RETURN(timed.exit_status.kind == sandbox::ExitStatus::Kind::timeout,
                      "timeout not detected");
    REQUIRE_OR_RETURN(timed.wall_time >= 1.0 && elapsed <= 6.0, "timeout outside grace bound");

    fs::create_directories(tmp / "neighbor");
    util::write_file(tmp / "neighbor" / "canary.txt", "untouched");
    sandbox::execute_script("open('inside.txt', 'w').write('ok')\n", tmp / "iso", limits);
    REQUIRE_OR_RETURN(util::read_file(tmp / "neighbor" / "canary.txt") == "untouched",
                      "canary modified");
    REQUIRE_OR_RETURN(fs::exists(tmp / "iso" / "inside.txt"), "cwd write missing");
    report(criterion, true, "plot capture, crash capture, timeout, and isolation all held");
}

// 9. Prompt fidelity: verbatim instructions in the rendered templates.
void check_prompt_fidelity() {
    const std::string criterion = "prompt_fidelity";
    auto lib = prompts::PromptLibrary::defaults();
    const std::vector<std::pair<std::string, std::string>> goldens = {
        {"analyzer_equation_system", "red bounding boxes around equations"},
        {"analyzer_equation_system", "Transcribe every equation exactly"},
        {"analyzer_equation_system", "Define every variable and symbol"},
        {"analyzer_equation_user", "Return a JSON object with fields"},
        {"analyzer_plot_system", "Describe the plot in enough detail"},
        {"analyzer_plot_user", "Do not overinterpret"},
        {"coder_system", "Output a single self-contained Python file"},
        {"coder_generate_user", "do not hard-code values from it"},
        {"coder_generate_user", "Match the target plot layout (subplots, axes, grid, ticks)"},
        {"coder_repair_user", "Fix the code so the generated plot matches the target"},
        {"coder_repair_user", "Cross-reference equation context to verify formulas"},
        {"verifier_user", "Minor cosmetic differences are acceptable"},
        {"verifier_user", "end with: MATCH_CONFIRMED"},
        {"verifier_user", "Image 1 is the GENERATED plot"},
        {"filter_user", "code-recoverable if four criteria are met"},
        {"judge_frs_user", "1 (non-reconstructed)"},
        {"judge_frs_user", "4 (high-fidelity reconstruction)"},
    };
    for (const auto& [name, golden] : goldens)
        REQUIRE_OR_RETURN(lib.raw(name).find(golden) != std::string::npos,
                          name + " lacks: " + golden);
    report(criterion, true, std::to_string(goldens.size()) + " verbatim instructions present");
}

// 10. Optional live smoke run; needs provider credentials and spends money.
void check_live_smoke() {
    const std::string criterion = "live_smoke (optional)";
    const char* key = std::getenv("RESCORE_API_KEY");
    if (!key || std::string(key).empty()) {
        skip(criterion, "RESCORE_API_KEY not set; excluded from CI");
        return;
    }
    try {
        TempDir tmp("acc-live");
        auto bundle = corpus::load_bundle(fixtures_dir() / "bundles" / "ccc-safety-filter");
        orchestrator::LoopConfig config; // live, 8 iterations
        llm::Transcript transcript(llm::TranscriptMode::record);
        llm::LlmGateway gateway(llm::GatewayConfig::from_env());
        auto lib = prompts::PromptLibrary::defaults();
        auto record =
            orchestrator::run_reconstruction(bundle, config, gateway, transcript, lib, tmp / "run");
        bool terminal = record.termination.kind != orchestrator::Termination::Kind::fatal_error;
        report(criterion, terminal,
               "terminated " + orchestrator::to_string(record.termination.kind) + " after " +
                   std::to_string(record.iterations.size()) + " iterations");
    } catch (const std::exception& e) {
        report(criterion, false, e.what());
    }
}

} // namespace

int main() {
    std::cout << "acceptance suite (fixtures: " << fixtures_dir() << ")\n";
    using Check = std::function<void()>;
    const std::vector<Check> checks = {
        check_replay_determinism, check_loop_bounds,      check_context_budgeting,
        check_wilcoxon_oracle,    check_statistics_fixtures, check_aggregation_fixture,
        check_filter_accounting,  check_sandbox_safety,   check_prompt_fidelity,
        check_live_smoke,
    };
    for (const auto& check : checks) {
        try {
            check();
        } catch (const std::exception& e) {
            report("unhandled exception", false, e.what());
        }
    }
    if (failures > 0) {
        std::cout << failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all required criteria passed\n";
    return 0;
}
