#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "rescore/agents.hpp"
#include "rescore/corpus.hpp"
#include "rescore/errors.hpp"
#include "rescore/llm.hpp"
#include "rescore/prompts.hpp"
#include "rescore/sandbox.hpp"
#include "rescore/util.hpp"

namespace rescore::orchestrator {

namespace fs = std::filesystem;
using nlohmann::json;

struct LoopConfig {
    int max_iterations = 8; // generation plus repairs
    sandbox::ExecutionLimits limits;
    llm::TranscriptMode transcript_mode = llm::TranscriptMode::live;

    bool operator==(const LoopConfig&) const = default;
};

struct IterationRecord {
    int index = 0;
    agents::CandidateScript script;
    sandbox::ExecutionResult execution;
    // Absent exactly when execution produced no plot: verification is
    // skipped and execution feedback drives the repair instead.
    std::optional<agents::VerifierVerdict> verdict;

    bool operator==(const IterationRecord&) const = default;
};

struct Termination {
    enum class Kind { converged, exhausted, context_overflow, fatal_error };
    Kind kind = Kind::fatal_error;
    std::string detail;

    bool operator==(const Termination&) const = default;
};

inline std::string to_string(Termination::Kind kind) {
    switch (kind) {
        case Termination::Kind::converged: return "converged";
        case Termination::Kind::exhausted: return "exhausted";
        case Termination::Kind::context_overflow: return "context_overflow";
        case Termination::Kind::fatal_error: return "fatal_error";
    }
    return "fatal_error";
}

inline Termination::Kind termination_kind_from_string(const std::string& s) {
    if (s == "converged") return Termination::Kind::converged;
    if (s == "exhausted") return Termination::Kind::exhausted;
    if (s == "context_overflow") return Termination::Kind::context_overflow;
    if (s == "fatal_error") return Termination::Kind::fatal_error;
    throw Error("unknown termination kind: " + s);
}

struct RunRecord {
    std::string paper_id;
    LoopConfig config;
    agents::PaperContext context;
    std::vector<IterationRecord> iterations;
    Termination termination;
    long token_tally = 0;
    double wall_time = 0.0; // zeroed in replay mode for determinism

    bool operator==(const RunRecord&) const = default;
};

// ---- serialization ----

namespace detail {

inline json verdict_to_json(const agents::VerifierVerdict& v) {
    json j{{"match_confirmed", v.match_confirmed}, {"raw_response", v.raw_response}};
    if (v.diagnosis) {
        j["diagnosis"] = {{"differing_subplots", v.diagnosis->differing_subplots},
                          {"wrong_behavior", v.diagnosis->wrong_behavior},
                          {"root_cause", v.diagnosis->root_cause},
                          {"fixes", v.diagnosis->fixes}};
    } else {
        j["diagnosis"] = nullptr;
    }
    return j;
}

inline agents::VerifierVerdict verdict_from_json(const json& j) {
    agents::VerifierVerdict v;
    v.match_confirmed = j.at("match_confirmed").get<bool>();
    v.raw_response = j.at("raw_response").get<std::string>();
    if (!j.at("diagnosis").is_null()) {
        agents::VisualDiagnosis d;
        const json& dj = j["diagnosis"];
        d.differing_subplots = dj.at("differing_subplots").get<std::string>();
        d.wrong_behavior = dj.at("wrong_behavior").get<std::string>();
        d.root_cause = dj.at("root_cause").get<std::string>();
        d.fixes = dj.at("fixes").get<std::string>();
        v.diagnosis = d;
    }
    return v;
}

inline json config_to_json(const LoopConfig& c) {
    return json{{"max_iterations", c.max_iterations},
                {"transcript_mode", llm::to_string(c.transcript_mode)},
                {"limits",
                 {{"wall_timeout", c.limits.wall_timeout},
                  {"max_output_bytes", c.limits.max_output_bytes},
                  {"interpreter_command", c.limits.interpreter_command},
                  {"script_filename", c.limits.script_filename},
                  {"no_network", c.limits.no_network}}}};
}

inline LoopConfig config_from_json(const json& j) {
    LoopConfig c;
    c.max_iterations = j.at("max_iterations").get<int>();
    c.transcript_mode = llm::transcript_mode_from_string(j.at("transcript_mode").get<std::string>());
    const json& l = j.at("limits");
    c.limits.wall_timeout = l.at("wall_timeout").get<double>();
    c.limits.max_output_bytes = l.at("max_output_bytes").get<std::size_t>();
    c.limits.interpreter_command = l.at("interpreter_command").get<std::string>();
    c.limits.script_filename = l.at("script_filename").get<std::string>();
    c.limits.no_network = l.at("no_network").get<bool>();
    return c;
}

inline std::string exit_kind_to_string(sandbox::ExitStatus::Kind kind) {
    switch (kind) {
        case sandbox::ExitStatus::Kind::exited: return "exited";
        case sandbox::ExitStatus::Kind::timeout: return "timeout";
        case sandbox::ExitStatus::Kind::spawn_failure: return "spawn_failure";
    }
    return "exited";
}

inline sandbox::ExitStatus::Kind exit_kind_from_string(const std::string& s) {
    if (s == "exited") return sandbox::ExitStatus::Kind::exited;
    if (s == "timeout") return sandbox::ExitStatus::Kind::timeout;
    if (s == "spawn_failure") return sandbox::ExitStatus::Kind::spawn_failure;
    throw Error("unknown exit status kind: " + s);
}

} // namespace detail

/// Canonical JSON for run.json: artifact files are referenced relative to
/// the run directory so serializations are location-independent.
inline json run_record_to_json(const RunRecord& record) {
    json iterations = json::array();
    for (const auto& it : record.iterations) {
        std::string iter_dir = "iter_" + std::to_string(it.index);
        json ij{{"index", it.index},
                {"script_file", iter_dir + "/script.txt"},
                {"script_iteration", it.script.iteration},
                {"execution",
                 {{"exit_kind", detail::exit_kind_to_string(it.execution.exit_status.kind)},
                  {"exit_code", it.execution.exit_status.code},
                  {"stdout_file", iter_dir + "/stdout.txt"},
                  {"stderr_file", iter_dir + "/stderr.txt"},
                  {"plot", it.execution.plot_path ? json(iter_dir + "/output.png") : json(nullptr)},
                  {"wall_time", it.execution.wall_time}}},
                {"verdict_file", it.verdict ? json(iter_dir + "/verdict.json") : json(nullptr)}};
        iterations.push_back(std::move(ij));
    }
    return json{{"paper_id", record.paper_id},
                {"config", detail::config_to_json(record.config)},
                {"context_file", "context.json"},
                {"iterations", iterations},
                {"termination",
                 {{"kind", to_string(record.termination.kind)},
                  {"detail", record.termination.detail}}},
                {"token_tally", record.token_tally},
                {"wall_time", record.wall_time}};
}

inline std::string serialize_run_record(const RunRecord& record) {
    return run_record_to_json(record).dump(2) + "\n";
}

namespace detail {

inline void persist_into(const RunRecord& record, const fs::path& dir) {
    fs::create_directories(dir);
    util::write_file(dir / "context.json", agents::context_to_json(record.context).dump(2) + "\n");
    for (const auto& it : record.iterations) {
        fs::path iter_dir = dir / ("iter_" + std::to_string(it.index));
        fs::create_directories(iter_dir);
        util::write_file(iter_dir / "script.txt", it.script.source);
        util::write_file(iter_dir / "stdout.txt", it.execution.stdout_tail);
        util::write_file(iter_dir / "stderr.txt", it.execution.stderr_tail);
        if (it.verdict)
            util::write_file(iter_dir / "verdict.json",
                             verdict_to_json(*it.verdict).dump(2) + "\n");
        if (it.execution.plot_path) {
            fs::path dest = iter_dir / "output.png";
            if (fs::absolute(*it.execution.plot_path) != fs::absolute(dest)) {
                if (!fs::exists(*it.execution.plot_path))
                    throw IoFailure("plot artifact missing: " + it.execution.plot_path->string());
                fs::copy_file(*it.execution.plot_path, dest, fs::copy_options::overwrite_existing);
            }
        }
    }
    util::write_file(dir / "run.json", serialize_run_record(record));
}

} // namespace detail

/// Writes the run directory layout under root/<paper_id>. Refuses to clobber
/// an existing record unless `overwrite` is set.
inline fs::path persist_run(const RunRecord& record, const fs::path& root, bool overwrite = false) {
    fs::path dir = root / record.paper_id;
    if (!overwrite && fs::exists(dir / "run.json")) throw RunExists(dir.string());
    try {
        detail::persist_into(record, dir);
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw IoFailure(e.what());
    }
    return dir;
}

inline RunRecord load_run(const fs::path& dir) {
    json j;
    try {
        j = json::parse(util::read_file(dir / "run.json"));
    } catch (const json::parse_error& e) {
        throw IoFailure(std::string("unparseable run.json: ") + e.what());
    }
    RunRecord record;
    record.paper_id = j.at("paper_id").get<std::string>();
    record.config = detail::config_from_json(j.at("config"));
    record.context =
        agents::context_from_json(json::parse(util::read_file(dir / j.at("context_file").get<std::string>())));
    for (const auto& ij : j.at("iterations")) {
        IterationRecord it;
        it.index = ij.at("index").get<int>();
        it.script.source = util::read_file(dir / ij.at("script_file").get<std::string>());
        it.script.iteration = ij.at("script_iteration").get<int>();
        const json& ex = ij.at("execution");
        it.execution.exit_status.kind =
            detail::exit_kind_from_string(ex.at("exit_kind").get<std::string>());
        it.execution.exit_status.code = ex.at("exit_code").get<int>();
        it.execution.stdout_tail = util::read_file(dir / ex.at("stdout_file").get<std::string>());
        it.execution.stderr_tail = util::read_file(dir / ex.at("stderr_file").get<std::string>());
        if (!ex.at("plot").is_null())
            it.execution.plot_path = dir / ex.at("plot").get<std::string>();
        it.execution.wall_time = ex.at("wall_time").get<double>();
        if (!ij.at("verdict_file").is_null())
            it.verdict = detail::verdict_from_json(
                json::parse(util::read_file(dir / ij.at("verdict_file").get<std::string>())));
        record.iterations.push_back(std::move(it));
    }
    record.termination.kind =
        termination_kind_from_string(j.at("termination").at("kind").get<std::string>());
    record.termination.detail = j.at("termination").at("detail").get<std::string>();
    record.token_tally = j.at("token_tally").get<long>();
    record.wall_time = j.at("wall_time").get<double>();
    return record;
}

// ---- loop ----

/// Paper-level budget precheck over the assembled annotation inputs: every
/// marked page image and the target plot eventually enter the model context,
/// so a bundle whose inputs alone exceed the budget is rejected before any
/// provider or transcript activity.
inline long estimate_bundle_tokens(const corpus::AnnotationBundle& bundle,
                                   const prompts::PromptLibrary& lib) {
    long total = 0;
    for (const auto& page : bundle.equation_pages) {
        if (page.boxes.empty()) continue;
        total += llm::estimate_tokens(agents::build_equation_conversation(page, bundle, lib)).total();
    }
    total += llm::estimate_tokens(agents::build_plot_conversation(bundle, lib)).total();
    return total;
}

/// Drives the closed generate-execute-verify loop for one paper and persists
/// the full record into `run_dir`. Terminal errors fold into the
/// termination; the call always yields a RunRecord.
inline RunRecord run_reconstruction(const corpus::AnnotationBundle& bundle,
                                    const LoopConfig& config, const llm::LlmGateway& gateway,
                                    llm::Transcript& transcript,
                                    const prompts::PromptLibrary& lib, const fs::path& run_dir) {
    if (fs::exists(run_dir / "run.json")) throw RunExists(run_dir.string());
    if (config.max_iterations < 1) throw Error("max_iterations must be >= 1");

    auto start = std::chrono::steady_clock::now();
    RunRecord record;
    record.paper_id = bundle.paper_id;
    record.config = config;
    agents::Session session{gateway, transcript, lib, 0, std::nullopt};

    try {
        long pre = estimate_bundle_tokens(bundle, lib);
        if (pre > gateway.config().context_budget)
            throw ContextOverflow(pre, gateway.config().context_budget);

        auto pages = bundle.equation_pages;
        std::sort(pages.begin(), pages.end(),
                  [](const corpus::EquationPage& a, const corpus::EquationPage& b) {
                      return a.page_num < b.page_num;
                  });
        std::vector<agents::EquationAnalysis> analyses;
        for (const auto& page : pages) {
            auto page_analyses = agents::analyze_equation_page(page, bundle, session);
            analyses.insert(analyses.end(), page_analyses.begin(), page_analyses.end());
        }
        auto plot = agents::analyze_plot(bundle, session);
        record.context = agents::build_paper_context(std::move(analyses), std::move(plot));

        agents::CandidateScript script = agents::generate_code(bundle, record.context, session);

        for (int k = 0; k < config.max_iterations; ++k) {
            fs::path iter_dir = run_dir / ("iter_" + std::to_string(k));
            auto execution = sandbox::execute_script(script.source, iter_dir, config.limits);

            IterationRecord iteration{k, script, execution, std::nullopt};
            agents::VerifierVerdict feedback;
            if (execution.plot_path) {
                feedback = agents::verify_plots(*execution.plot_path, bundle.target_plot, session);
                iteration.verdict = feedback;
            } else {
                // Crashed or plot-less scripts skip the verifier; the
                // execution trace becomes the repair diagnosis.
                feedback.match_confirmed = false;
                feedback.raw_response =
                    "The script did not produce output.png. Exit: " +
                    detail::exit_kind_to_string(execution.exit_status.kind) + " (code " +
                    std::to_string(execution.exit_status.code) + ").\nstderr tail:\n" +
                    execution.stderr_tail;
                agents::VisualDiagnosis diag;
                diag.root_cause = feedback.raw_response;
                feedback.diagnosis = diag;
            }

            // Zeroed in replay mode so records replay byte-identically.
            if (config.transcript_mode == llm::TranscriptMode::replay)
                iteration.execution.wall_time = 0.0;
            record.iterations.push_back(iteration);

            if (iteration.verdict && iteration.verdict->match_confirmed) {
                record.termination = {Termination::Kind::converged, ""};
                break;
            }
            if (k + 1 == config.max_iterations) {
                record.termination = {Termination::Kind::exhausted, ""};
                break;
            }
            script = agents::repair_code(bundle, record.context, script, feedback, session);
        }
    } catch (const ContextOverflow& e) {
        record.termination = {Termination::Kind::context_overflow, e.what()};
    } catch (const std::exception& e) {
        record.termination = {Termination::Kind::fatal_error, e.what()};
    }

    record.token_tally = session.token_tally;
    record.wall_time =
        config.transcript_mode == llm::TranscriptMode::replay
            ? 0.0
            : std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    detail::persist_into(record, run_dir);
    transcript.save(run_dir / "transcript.json");
    return record;
}

/// Baseline condition: one code generation, verification recorded but never
/// fed back.
inline RunRecord single_pass(const corpus::AnnotationBundle& bundle, LoopConfig config,
                             const llm::LlmGateway& gateway, llm::Transcript& transcript,
                             const prompts::PromptLibrary& lib, const fs::path& run_dir) {
    config.max_iterations = 1;
    return run_reconstruction(bundle, config, gateway, transcript, lib, run_dir);
}

// ---- batch ----

struct BatchOptions {
    fs::path runs_root;
    fs::path transcripts_dir; // per-paper cassettes: <paper_id>.json
    int jobs = 0;             // 0 selects min(4, papers)
    LoopConfig config;
};

struct BatchSummary {
    int converged = 0;
    int exhausted = 0;
    int context_overflow = 0;
    int fatal_error = 0;
    int resumed = 0;

    void count(Termination::Kind kind) {
        switch (kind) {
            case Termination::Kind::converged: ++converged; break;
            case Termination::Kind::exhausted: ++exhausted; break;
            case Termination::Kind::context_overflow: ++context_overflow; break;
            case Termination::Kind::fatal_error: ++fatal_error; break;
        }
    }

    std::string to_string() const {
        return "Converged: " + std::to_string(converged) +
               ", Exhausted: " + std::to_string(exhausted) +
               ", ContextOverflow: " + std::to_string(context_overflow) +
               ", FatalError: " + std::to_string(fatal_error) +
               " (resumed " + std::to_string(resumed) + ")";
    }
};

/// Independent runs over a catalog, optionally concurrent. Per-paper
/// failures are isolated; a crashed batch resumes by skipping papers whose
/// run directory already holds a terminal record.
inline std::vector<RunRecord> run_batch(const std::vector<corpus::PaperRecord>& catalog,
                                        const fs::path& bundles_root, const BatchOptions& options,
                                        const llm::LlmGateway& gateway,
                                        const prompts::PromptLibrary& lib,
                                        BatchSummary* summary_out = nullptr) {
    const std::size_t n = catalog.size();
    std::vector<RunRecord> results(n);
    BatchSummary summary;
    std::mutex summary_mutex;
    std::atomic<std::size_t> cursor{0};

    auto worker = [&]() {
        while (true) {
            std::size_t i = cursor.fetch_add(1);
            if (i >= n) return;
            const std::string& pid = catalog[i].paper_id;
            fs::path run_dir = options.runs_root / pid;
            bool resumed = false;
            RunRecord record;
            try {
                if (fs::exists(run_dir / "run.json")) {
                    record = load_run(run_dir);
                    resumed = true;
                } else {
                    auto bundle = corpus::load_bundle(bundles_root / pid);
                    auto report = corpus::validate_bundle(bundle);
                    if (!report.accepted())
                        throw Error("bundle rejected: " +
                                    std::to_string(report.error_count()) + " validation errors");
                    llm::Transcript transcript(options.config.transcript_mode);
                    if (options.config.transcript_mode == llm::TranscriptMode::replay)
                        transcript = llm::Transcript::load(
                            options.transcripts_dir / (pid + ".json"), llm::TranscriptMode::replay);
                    record = run_reconstruction(bundle, options.config, gateway, transcript, lib,
                                                run_dir);
                }
            } catch (const std::exception& e) {
                record = RunRecord{};
                record.paper_id = pid;
                record.config = options.config;
                record.termination = {Termination::Kind::fatal_error, e.what()};
                try {
                    if (!fs::exists(run_dir / "run.json")) detail::persist_into(record, run_dir);
                } catch (...) {
                    // keep the in-memory record even if persistence failed
                }
            }
            {
                std::lock_guard<std::mutex> lock(summary_mutex);
                summary.count(record.termination.kind);
                if (resumed) ++summary.resumed;
            }
            results[i] = std::move(record);
        }
    };

    int jobs = options.jobs > 0 ? options.jobs : static_cast<int>(std::min<std::size_t>(4, n));
    if (jobs <= 1 || n <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (int t = 0; t < jobs; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }

    if (summary_out) *summary_out = summary;
    return results;
}

} // namespace rescore::orchestrator
