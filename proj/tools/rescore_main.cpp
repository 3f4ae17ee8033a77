// Command-line surface of the reconstruction harness.

#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rescore/agents.hpp"
#include "rescore/corpus.hpp"
#include "rescore/eval.hpp"
#include "rescore/llm.hpp"
#include "rescore/orchestrator.hpp"
#include "rescore/prompts.hpp"
#include "rescore/stats.hpp"
#include "rescore/util.hpp"

namespace fs = std::filesystem;
using namespace rescore;

namespace {

struct CommonOpts {
    std::string prompts_dir;
    std::string model;

    prompts::PromptLibrary load_prompts() const {
        return prompts_dir.empty() ? prompts::PromptLibrary::defaults()
                                   : prompts::PromptLibrary::load_dir(prompts_dir);
    }

    llm::GatewayConfig gateway_config() const {
        auto config = llm::GatewayConfig::from_env();
        if (!model.empty()) config.model = model;
        return config;
    }
};

llm::Transcript open_transcript(const std::string& path, llm::TranscriptMode mode) {
    if (mode == llm::TranscriptMode::replay) {
        if (path.empty()) throw Error("replay mode needs a transcript path");
        return llm::Transcript::load(path, mode);
    }
    return llm::Transcript(mode);
}

std::vector<orchestrator::RunRecord> load_runs(const fs::path& runs_root) {
    std::vector<orchestrator::RunRecord> runs;
    if (!fs::exists(runs_root)) return runs;
    for (const auto& entry : fs::directory_iterator(runs_root)) {
        if (entry.is_directory() && fs::exists(entry.path() / "run.json"))
            runs.push_back(orchestrator::load_run(entry.path()));
    }
    std::sort(runs.begin(), runs.end(),
              [](const auto& a, const auto& b) { return a.paper_id < b.paper_id; });
    return runs;
}

// The crosstab requires a rating for every run it sees; runs outside the
// ratings file are simply not part of that table.
std::vector<orchestrator::RunRecord> rated_runs(std::vector<orchestrator::RunRecord> runs,
                                                const eval::RatingTable& table) {
    std::set<std::string> rated;
    for (const auto& row : table.rows)
        if (row.condition == eval::Condition::rescore) rated.insert(row.paper_id);
    std::erase_if(runs, [&](const auto& run) { return !rated.count(run.paper_id); });
    return runs;
}

int cmd_filter(const std::string& catalog_dir, const std::string& transcript_path,
               const std::string& mode_name, const std::string& out_path,
               const CommonOpts& common) {
    auto mode = llm::transcript_mode_from_string(mode_name);
    auto catalog = corpus::load_catalog(catalog_dir);
    auto lib = common.load_prompts();
    auto config = common.gateway_config();
    llm::LlmGateway gateway(config);
    auto transcript = open_transcript(transcript_path, mode);

    nlohmann::json out = nlohmann::json::object();
    std::map<std::string, int> counts{{"Recoverable", 0}, {"NotRecoverable", 0}, {"Indecisive", 0}};
    for (const auto& record : catalog) {
        fs::path text_path = fs::path(catalog_dir) / "texts" / (record.paper_id + ".txt");
        std::string text = util::read_file(text_path);
        agents::Session session{gateway, transcript, lib, 0, std::nullopt};
        auto verdict = agents::classify_recoverability(record, text, session);
        std::string label = agents::to_string(verdict.label);
        ++counts[label];
        nlohmann::json e{{"label", label}, {"justification", verdict.justification}};
        if (verdict.reason_code) e["reason_code"] = agents::to_string(*verdict.reason_code);
        out[record.paper_id] = e;
    }

    if (mode == llm::TranscriptMode::record && !transcript_path.empty())
        transcript.save(transcript_path);
    if (!out_path.empty()) util::write_file(out_path, out.dump(2) + "\n");

    const double total = static_cast<double>(catalog.size());
    std::cout << "Label             Count   % of Total\n";
    for (const char* label : {"Recoverable", "NotRecoverable", "Indecisive"})
        std::printf("%-17s %5d   %s%%\n", label, counts[label],
                    util::format_fixed(100.0 * counts[label] / total, 1).c_str());
    std::printf("%-17s %5zu   100%%\n", "Total", catalog.size());
    return 0;
}

int cmd_analyze(const std::string& bundle_dir, const std::string& transcript_path,
                const std::string& mode_name, const std::string& out_path,
                const CommonOpts& common) {
    auto mode = llm::transcript_mode_from_string(mode_name);
    auto bundle = corpus::load_bundle(bundle_dir);
    auto report = corpus::validate_bundle(bundle);
    for (const auto& issue : report.issues)
        std::cerr << (issue.severity == corpus::Severity::error ? "error: " : "warning: ")
                  << issue.field_path << ": " << issue.message << "\n";
    if (!report.accepted()) throw Error("bundle rejected by validation");

    auto lib = common.load_prompts();
    llm::LlmGateway gateway(common.gateway_config());
    auto transcript = open_transcript(transcript_path, mode);
    agents::Session session{gateway, transcript, lib, 0, std::nullopt};

    auto pages = bundle.equation_pages;
    std::sort(pages.begin(), pages.end(),
              [](const auto& a, const auto& b) { return a.page_num < b.page_num; });
    std::vector<agents::EquationAnalysis> analyses;
    for (const auto& page : pages) {
        auto page_analyses = agents::analyze_equation_page(page, bundle, session);
        analyses.insert(analyses.end(), page_analyses.begin(), page_analyses.end());
    }
    auto plot = agents::analyze_plot(bundle, session);
    auto context = agents::build_paper_context(std::move(analyses), std::move(plot));

    if (mode == llm::TranscriptMode::record && !transcript_path.empty())
        transcript.save(transcript_path);
    std::string payload = agents::context_to_json(context).dump(2) + "\n";
    if (out_path.empty())
        std::cout << payload;
    else
        util::write_file(out_path, payload);
    std::cerr << "analyzer token tally: " << session.token_tally << "\n";
    return 0;
}

int cmd_run(const std::string& bundle_dir, bool single_pass_flag, int max_iter,
            const std::string& replay_path, const std::string& record_path,
            const std::string& runs_root, bool overwrite, const CommonOpts& common) {
    auto bundle = corpus::load_bundle(bundle_dir);
    auto report = corpus::validate_bundle(bundle);
    if (!report.accepted()) {
        for (const auto& issue : report.issues)
            std::cerr << issue.field_path << ": " << issue.message << "\n";
        throw Error("bundle rejected by validation");
    }

    orchestrator::LoopConfig config;
    config.max_iterations = max_iter;
    config.limits = sandbox::limits_from_env();
    config.transcript_mode = !replay_path.empty() ? llm::TranscriptMode::replay
                             : !record_path.empty() ? llm::TranscriptMode::record
                                                    : llm::TranscriptMode::live;

    auto lib = common.load_prompts();
    llm::LlmGateway gateway(common.gateway_config());
    auto transcript = open_transcript(replay_path, config.transcript_mode);

    fs::path run_dir = fs::path(runs_root) / bundle.paper_id;
    if (overwrite) fs::remove_all(run_dir);
    auto record = single_pass_flag
                      ? orchestrator::single_pass(bundle, config, gateway, transcript, lib, run_dir)
                      : orchestrator::run_reconstruction(bundle, config, gateway, transcript, lib,
                                                         run_dir);
    if (config.transcript_mode == llm::TranscriptMode::record && !record_path.empty())
        transcript.save(record_path);

    std::cout << "paper: " << record.paper_id << "\n"
              << "termination: " << orchestrator::to_string(record.termination.kind)
              << (record.termination.detail.empty() ? "" : " (" + record.termination.detail + ")")
              << "\n"
              << "iterations: " << record.iterations.size() << "\n"
              << "token tally: " << record.token_tally << "\n"
              << "run dir: " << run_dir << "\n";
    return record.termination.kind == orchestrator::Termination::Kind::converged ? 0 : 2;
}

int cmd_batch(const std::string& catalog_path, const std::string& bundles_root,
              const std::string& runs_root, const std::string& transcripts_dir, int jobs,
              const std::string& mode_name, int max_iter, const CommonOpts& common) {
    auto catalog = corpus::load_catalog(catalog_path);
    orchestrator::BatchOptions options;
    options.runs_root = runs_root;
    options.transcripts_dir = transcripts_dir;
    options.jobs = jobs;
    options.config.max_iterations = max_iter;
    options.config.limits = sandbox::limits_from_env();
    options.config.transcript_mode = llm::transcript_mode_from_string(mode_name);

    auto lib = common.load_prompts();
    llm::LlmGateway gateway(common.gateway_config());
    orchestrator::BatchSummary summary;
    auto records = orchestrator::run_batch(catalog, bundles_root, options, gateway, lib, &summary);
    for (const auto& record : records)
        std::cout << record.paper_id << ": " << orchestrator::to_string(record.termination.kind)
                  << " (" << record.iterations.size() << " iterations)\n";
    std::cout << summary.to_string() << "\n";
    return 0;
}

int cmd_evaluate(const std::string& runs_root, const std::string& ratings_path,
                 const std::string& catalog_path, const std::string& code_scores_path) {
    auto runs = load_runs(runs_root);
    std::map<orchestrator::Termination::Kind, int> counts;
    for (const auto& run : runs) ++counts[run.termination.kind];
    std::cout << "runs: " << runs.size() << "\n";
    for (const auto& [kind, count] : counts)
        std::cout << "  " << orchestrator::to_string(kind) << ": " << count << "\n";
    if (ratings_path.empty()) return 0;

    auto table = eval::ingest_ratings(ratings_path);
    auto rescore_rows = table.by_condition(eval::Condition::rescore);
    auto single_rows = table.by_condition(eval::Condition::single_pass);
    std::cout << "ratings: " << table.rows.size() << " rows (" << rescore_rows.size()
              << " rescore, " << single_rows.size() << " single-pass)\n";

    if (!rescore_rows.empty()) {
        std::vector<int> h1, h2, llm;
        for (const auto& row : rescore_rows) {
            h1.push_back(row.frs_h1);
            h2.push_back(row.frs_h2);
            llm.push_back(row.frs_llm);
        }
        auto humans = stats::agreement(h1, h2);
        std::cout << "human inter-rater: exact "
                  << util::format_fixed(100.0 * humans.exact, 1) << "%, within-1 "
                  << util::format_fixed(100.0 * humans.within_one, 1) << "%\n";
        auto llm_h1 = stats::agreement(llm, h1);
        auto llm_h2 = stats::agreement(llm, h2);
        auto signed_fmt = [](double v) {
            return (v >= 0 ? "+" : "") + util::format_fixed(v, 2);
        };
        std::cout << "llm optimism bias: " << signed_fmt(llm_h1.mean_bias) << " vs rater 1, "
                  << signed_fmt(llm_h2.mean_bias) << " vs rater 2\n";
    }

    // Paired test across conditions on the human-mean FRS.
    std::map<std::string, const eval::RatingRow*> single_by_id;
    for (const auto& row : single_rows) single_by_id[row.paper_id] = &row;
    std::vector<double> x, y, xl, yl;
    for (const auto& row : rescore_rows) {
        auto it = single_by_id.find(row.paper_id);
        if (it == single_by_id.end()) continue;
        x.push_back(row.frs_human_mean());
        y.push_back(it->second->frs_human_mean());
        xl.push_back(row.frs_llm);
        yl.push_back(it->second->frs_llm);
    }
    if (!x.empty()) {
        try {
            auto w = stats::wilcoxon_signed_rank(x, y);
            std::cout << "wilcoxon FRS-H (rescore vs single-pass): W="
                      << util::format_fixed(w.w_statistic, 1) << ", n=" << w.n_effective
                      << ", p=" << (w.p_value < 0.001 ? std::string("<0.001")
                                                      : util::format_fixed(w.p_value, 4))
                      << ", r=" << util::format_fixed(w.effect_size_r, 2) << " ["
                      << stats::kEffectSizeNote << "]\n";
            auto wl = stats::wilcoxon_signed_rank(xl, yl);
            std::cout << "wilcoxon FRS-L: W=" << util::format_fixed(wl.w_statistic, 1)
                      << ", p=" << (wl.p_value < 0.001 ? std::string("<0.001")
                                                       : util::format_fixed(wl.p_value, 4))
                      << ", r=" << util::format_fixed(wl.effect_size_r, 2) << "\n";
        } catch (const NoNonzeroDifferences&) {
            std::cout << "wilcoxon: all paired differences are zero\n";
        }
    }

    if (!catalog_path.empty()) {
        auto catalog = corpus::load_catalog(catalog_path);
        eval::CodeScoreTable scores;
        if (!code_scores_path.empty()) scores = eval::ingest_code_scores(code_scores_path);
        auto report = eval::aggregate(table, scores, catalog);
        report.crosstab = eval::convergence_crosstab(rated_runs(runs, table), table);
        std::cout << "share FRS>=3: single-pass "
                  << util::format_fixed(100.0 * report.share_ge3_single_pass, 1) << "% -> rescore "
                  << util::format_fixed(100.0 * report.share_ge3_rescore, 1) << "%\n";
        std::cout << "crosstab: converged " << report.crosstab.converged_ge3 << "/"
                  << report.crosstab.converged() << " at FRS>=3; exhausted "
                  << report.crosstab.exhausted_ge3 << "/" << report.crosstab.exhausted() << "\n";
    }
    return 0;
}

int cmd_report(const std::string& runs_root, const std::string& format,
               const std::string& ratings_path, const std::string& catalog_path,
               const std::string& code_scores_path, const std::string& categories_path,
               const std::string& out_path) {
    if (ratings_path.empty() || catalog_path.empty())
        throw Error("report needs --human and --catalog");
    auto table = eval::ingest_ratings(ratings_path);
    auto catalog = corpus::load_catalog(catalog_path);
    eval::CodeScoreTable scores;
    if (!code_scores_path.empty()) scores = eval::ingest_code_scores(code_scores_path);
    auto categories = categories_path.empty() ? eval::default_category_table()
                                              : eval::load_category_table(categories_path);

    auto report = eval::aggregate(table, scores, catalog, categories);
    auto runs = load_runs(runs_root);
    if (!runs.empty())
        report.crosstab = eval::convergence_crosstab(rated_runs(runs, table), table);

    std::string payload = format == "json" ? eval::report_json(report).dump(2) + "\n"
                                           : eval::report_csv(report);
    if (out_path.empty())
        std::cout << payload;
    else
        util::write_file(out_path, payload);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Closed-loop reconstruction of control-systems simulations from annotated papers"};
    app.require_subcommand(1);

    CommonOpts common;
    app.add_option("--prompts", common.prompts_dir, "Directory of prompt template overrides");
    app.add_option("--model", common.model, "Model id override (default: RESCORE_MODEL env)");

    // filter
    std::string filter_catalog, filter_transcript, filter_mode = "live", filter_out;
    auto* filter = app.add_subcommand("filter", "Classify catalog papers for code recoverability");
    filter->add_option("catalog", filter_catalog, "Catalog directory (catalog.json + texts/)")
        ->required();
    filter->add_option("--transcript", filter_transcript, "Transcript path (record/replay)");
    filter->add_option("--mode", filter_mode, "live|record|replay")
        ->check(CLI::IsMember({"live", "record", "replay"}));
    filter->add_option("--out", filter_out, "Write verdicts as JSON");

    // analyze
    std::string analyze_bundle, analyze_transcript, analyze_mode = "live", analyze_out;
    auto* analyze = app.add_subcommand("analyze", "Run the Analyzer over one annotation bundle");
    analyze->add_option("bundle", analyze_bundle, "Bundle directory")->required();
    analyze->add_option("--transcript", analyze_transcript, "Transcript path (record/replay)");
    analyze->add_option("--mode", analyze_mode, "live|record|replay")
        ->check(CLI::IsMember({"live", "record", "replay"}));
    analyze->add_option("--out", analyze_out, "Write the paper context JSON here");

    // run
    std::string run_bundle, run_replay, run_record, run_out = "runs";
    bool run_single_pass = false, run_overwrite = false;
    int run_max_iter = 8;
    auto* run = app.add_subcommand("run", "Reconstruct one paper with the closed loop");
    run->add_option("bundle", run_bundle, "Bundle directory")->required();
    run->add_flag("--single-pass", run_single_pass, "Baseline: one generation, no feedback");
    run->add_option("--max-iter", run_max_iter, "Iteration cap (default 8)");
    run->add_option("--replay", run_replay, "Replay transcript path");
    run->add_option("--record", run_record, "Record transcript to this path");
    run->add_option("--out", run_out, "Runs root directory");
    run->add_flag("--overwrite", run_overwrite, "Replace an existing run directory");

    // batch
    std::string batch_catalog, batch_bundles, batch_out = "runs", batch_transcripts,
                batch_mode = "live";
    int batch_jobs = 0, batch_max_iter = 8;
    auto* batch = app.add_subcommand("batch", "Run every catalog paper");
    batch->add_option("catalog", batch_catalog, "Catalog file or directory")->required();
    batch->add_option("bundles_root", batch_bundles, "Directory of <paper_id>/ bundles")
        ->required();
    batch->add_option("--jobs", batch_jobs, "Concurrent papers (default min(4, n))");
    batch->add_option("--out", batch_out, "Runs root directory");
    batch->add_option("--transcripts", batch_transcripts, "Per-paper transcript dir");
    batch->add_option("--mode", batch_mode, "live|record|replay")
        ->check(CLI::IsMember({"live", "record", "replay"}));
    batch->add_option("--max-iter", batch_max_iter, "Iteration cap (default 8)");

    // evaluate
    std::string eval_runs, eval_ratings, eval_catalog, eval_scores;
    auto* evaluate = app.add_subcommand("evaluate", "Statistics over finished runs");
    evaluate->add_option("runs_root", eval_runs, "Directory of run records")->required();
    evaluate->add_option("--human", eval_ratings, "Ratings CSV");
    evaluate->add_option("--catalog", eval_catalog, "Catalog file or directory");
    evaluate->add_option("--code-scores", eval_scores, "Code scores CSV");

    // report
    std::string report_runs, report_format = "csv", report_ratings, report_catalog,
                report_scores, report_categories, report_out;
    auto* report = app.add_subcommand("report", "Emit the aggregate evaluation report");
    report->add_option("runs_root", report_runs, "Directory of run records")->required();
    report->add_option("--format", report_format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    report->add_option("--human", report_ratings, "Ratings CSV");
    report->add_option("--catalog", report_catalog, "Catalog file or directory");
    report->add_option("--code-scores", report_scores, "Code scores CSV");
    report->add_option("--categories", report_categories, "Category keyword table JSON");
    report->add_option("--out", report_out, "Write the report here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (filter->parsed())
            return cmd_filter(filter_catalog, filter_transcript, filter_mode, filter_out, common);
        if (analyze->parsed())
            return cmd_analyze(analyze_bundle, analyze_transcript, analyze_mode, analyze_out,
                               common);
        if (run->parsed())
            return cmd_run(run_bundle, run_single_pass, run_max_iter, run_replay, run_record,
                           run_out, run_overwrite, common);
        if (batch->parsed())
            return cmd_batch(batch_catalog, batch_bundles, batch_out, batch_transcripts,
                             batch_jobs, batch_mode, batch_max_iter, common);
        if (evaluate->parsed())
            return cmd_evaluate(eval_runs, eval_ratings, eval_catalog, eval_scores);
        if (report->parsed())
            return cmd_report(report_runs, report_format, report_ratings, report_catalog,
                              report_scores, report_categories, report_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
