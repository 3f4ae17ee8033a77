#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rescore/agents.hpp"
#include "rescore/corpus.hpp"
#include "rescore/errors.hpp"
#include "rescore/orchestrator.hpp"
#include "rescore/stats.hpp"
#include "rescore/util.hpp"

namespace rescore::eval {

namespace fs = std::filesystem;
using nlohmann::json;

enum class Condition { single_pass, rescore };

inline std::string to_string(Condition c) {
    return c == Condition::single_pass ? "single_pass" : "rescore";
}

inline Condition condition_from_string(std::string s) {
    s = util::to_lower(util::trim(s));
    if (s == "single_pass" || s == "singlepass" || s == "single-pass" || s == "one_pass")
        return Condition::single_pass;
    if (s == "rescore") return Condition::rescore;
    throw Error("unknown condition: " + s);
}

struct HumanRater {
    std::string id;
    bool operator==(const HumanRater&) const = default;
};
struct LlmJudge {
    std::string model_id;
    bool operator==(const LlmJudge&) const = default;
};

struct FrsScore {
    int value = 1; // ordinal in {1,2,3,4}
    std::variant<HumanRater, LlmJudge> rater;
};

struct CodeScores {
    double design_alignment = 0.0;  // percentage, mean over judge models
    double equation_coverage = 0.0; // percentage, mean over judge models
    std::vector<std::string> judge_model_ids;
};

struct RatingRow {
    std::string paper_id;
    Condition condition = Condition::rescore;
    int frs_h1 = 1;
    int frs_h2 = 1;
    int frs_llm = 1;

    double frs_human_mean() const { return (frs_h1 + frs_h2) / 2.0; }
};

struct RatingTable {
    std::vector<RatingRow> rows;

    std::vector<RatingRow> by_condition(Condition c) const {
        std::vector<RatingRow> out;
        for (const auto& r : rows)
            if (r.condition == c) out.push_back(r);
        return out;
    }
};

struct CodeScoreRow {
    std::string paper_id;
    Condition condition = Condition::rescore;
    double design_alignment = 0.0;
    double equation_coverage = 0.0;
};

using CodeScoreTable = std::vector<CodeScoreRow>;

// ---- file ingestion ----

/// Ratings file: header `paper_id,condition,frs_h1,frs_h2,frs_llm`.
inline RatingTable ingest_ratings(const fs::path& path) {
    RatingTable table;
    std::string content = util::read_file(path);
    auto lines = util::split(content, '\n');
    long line_no = 0;
    for (const auto& raw : lines) {
        ++line_no;
        std::string line = util::trim(raw);
        if (line.empty()) continue;
        if (line_no == 1 && line.rfind("paper_id", 0) == 0) continue; // header
        auto cols = util::split(line, ',');
        if (cols.size() != 5) throw MalformedRow(line_no);
        RatingRow row;
        row.paper_id = util::trim(cols[0]);
        if (row.paper_id.empty()) throw MalformedRow(line_no);
        try {
            row.condition = condition_from_string(cols[1]);
        } catch (const Error&) {
            throw MalformedRow(line_no);
        }
        int* fields[3] = {&row.frs_h1, &row.frs_h2, &row.frs_llm};
        for (int i = 0; i < 3; ++i) {
            std::string v = util::trim(cols[static_cast<std::size_t>(i) + 2]);
            char* end = nullptr;
            long parsed = std::strtol(v.c_str(), &end, 10);
            if (v.empty() || end != v.c_str() + v.size()) throw MalformedRow(line_no);
            if (parsed < 1 || parsed > 4) throw OutOfRange(v);
            *fields[i] = static_cast<int>(parsed);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

/// Code-score file: header `paper_id,condition,design_alignment,equation_coverage`.
inline CodeScoreTable ingest_code_scores(const fs::path& path) {
    CodeScoreTable table;
    std::string content = util::read_file(path);
    auto lines = util::split(content, '\n');
    long line_no = 0;
    for (const auto& raw : lines) {
        ++line_no;
        std::string line = util::trim(raw);
        if (line.empty()) continue;
        if (line_no == 1 && line.rfind("paper_id", 0) == 0) continue;
        auto cols = util::split(line, ',');
        if (cols.size() != 4) throw MalformedRow(line_no);
        CodeScoreRow row;
        row.paper_id = util::trim(cols[0]);
        if (row.paper_id.empty()) throw MalformedRow(line_no);
        try {
            row.condition = condition_from_string(cols[1]);
        } catch (const Error&) {
            throw MalformedRow(line_no);
        }
        double* fields[2] = {&row.design_alignment, &row.equation_coverage};
        for (int i = 0; i < 2; ++i) {
            std::string v = util::trim(cols[static_cast<std::size_t>(i) + 2]);
            char* end = nullptr;
            double parsed = std::strtod(v.c_str(), &end);
            if (v.empty() || end != v.c_str() + v.size()) throw MalformedRow(line_no);
            if (parsed < 0.0 || parsed > 100.0) throw OutOfRange(v);
            *fields[i] = parsed;
        }
        table.push_back(std::move(row));
    }
    return table;
}

// ---- LLM judges ----

/// FRS judge over a generated/target plot pair; the rubric is rendered
/// verbatim in the prompt and the parsed score must stay inside it.
inline FrsScore judge_frs(const fs::path& generated, const fs::path& target,
                          agents::Session& session) {
    if (!image::is_readable_image(generated)) throw UnreadableImage(generated.string());
    if (!image::is_readable_image(target)) throw UnreadableImage(target.string());
    auto conversation = llm::make_conversation(session.prompts.raw("judge_frs_system"),
                                               {llm::TextPart{session.prompts.raw("judge_frs_user")},
                                                llm::ImagePart{generated, llm::Detail::high},
                                                llm::ImagePart{target, llm::Detail::high}});
    int score = agents::detail::complete_structured(
        session, conversation, "score, rationale", [](const json& j) {
            if (!j.is_object() || !j.contains("score")) throw SchemaViolation("score");
            auto v = agents::coerce_count(j["score"]);
            if (!v || *v < 1 || *v > 4) throw SchemaViolation("score");
            return *v;
        });
    return FrsScore{score, LlmJudge{session.model_id()}};
}

/// Code-level judging across the configured judge models; design alignment
/// and equation coverage are arithmetic means over the judges.
inline CodeScores judge_code(const agents::CandidateScript& script,
                             const agents::PaperContext& context, const std::string& statement,
                             std::span<agents::Session* const> judges) {
    if (script.source.empty()) throw Error("judge_code: script must be nonempty");
    if (judges.empty()) throw Error("judge_code: at least one judge session required");
    CodeScores scores;
    double da_sum = 0.0;
    double cov_sum = 0.0;
    auto parse_percent = [](const json& v, const char* field) -> double {
        double parsed = 0.0;
        if (v.is_number()) {
            parsed = v.get<double>();
        } else if (v.is_string()) {
            std::string s = util::trim(v.get<std::string>());
            if (!s.empty() && s.back() == '%') s.pop_back();
            char* end = nullptr;
            parsed = std::strtod(s.c_str(), &end);
            if (s.empty() || end != s.c_str() + s.size()) throw SchemaViolation(field);
        } else {
            throw SchemaViolation(field);
        }
        if (parsed < 0.0 || parsed > 100.0) throw SchemaViolation(field);
        return parsed;
    };
    for (agents::Session* judge : judges) {
        auto conversation = llm::make_conversation(
            judge->prompts.raw("judge_code_system"),
            {llm::TextPart{judge->prompts.render(
                "judge_code_user", {{"problem_statement", statement},
                                    {"paper_context", agents::context_to_prompt_text(context)},
                                    {"current_code", script.source}})}});
        auto pair = agents::detail::complete_structured(
            *judge, conversation, "design_alignment, equation_coverage",
            [&](const json& j) {
                if (!j.is_object() || !j.contains("design_alignment"))
                    throw SchemaViolation("design_alignment");
                if (!j.contains("equation_coverage")) throw SchemaViolation("equation_coverage");
                return std::make_pair(parse_percent(j["design_alignment"], "design_alignment"),
                                      parse_percent(j["equation_coverage"], "equation_coverage"));
            });
        da_sum += pair.first;
        cov_sum += pair.second;
        scores.judge_model_ids.push_back(judge->model_id());
    }
    scores.design_alignment = da_sum / static_cast<double>(judges.size());
    scores.equation_coverage = cov_sum / static_cast<double>(judges.size());
    return scores;
}

// ---- category assignment ----

struct CategoryRule {
    std::string tag;
    std::vector<std::string> keywords;
};

using CategoryTable = std::vector<CategoryRule>;

/// Ordered keyword table; first matching category wins, fallback Other.
inline const CategoryTable& default_category_table() {
    static const CategoryTable table{
        {"CBF/Safety", {"barrier", "safety", "safe"}},
        {"Estimation/Identification", {"estimat", "identif", "observer", "filter", "kalman"}},
        {"MPC/Optimization", {"predictive", "mpc", "optimi"}},
        {"Multi-agent/Networked", {"multi-agent", "consensus", "network", "distributed"}},
        {"Learning-based", {"learning", "data-driven"}},
        {"PDE", {"pde", "distributed parameter", "backstepping"}},
    };
    return table;
}

/// Keyword table is editable configuration: JSON array of
/// {tag, keywords: [..]} in priority order.
inline CategoryTable load_category_table(const fs::path& path) {
    json j = json::parse(util::read_file(path));
    if (!j.is_array()) throw Error("category table must be a JSON array");
    CategoryTable table;
    for (const auto& e : j) {
        CategoryRule rule;
        rule.tag = e.at("tag").get<std::string>();
        for (const auto& k : e.at("keywords")) rule.keywords.push_back(k.get<std::string>());
        table.push_back(std::move(rule));
    }
    return table;
}

inline std::string assign_category(const std::string& title,
                                   const CategoryTable& table = default_category_table()) {
    if (util::trim(title).empty()) throw Error("assign_category: title must be nonempty");
    const std::string lower = util::to_lower(title);
    for (const auto& rule : table)
        for (const auto& keyword : rule.keywords)
            if (lower.find(util::to_lower(keyword)) != std::string::npos) return rule.tag;
    return "Other";
}

// ---- aggregation ----

struct ConvergenceCrosstab {
    long converged_ge3 = 0;
    long converged_lt3 = 0;
    long exhausted_ge3 = 0;
    long exhausted_lt3 = 0;

    long converged() const { return converged_ge3 + converged_lt3; }
    long exhausted() const { return exhausted_ge3 + exhausted_lt3; }

    bool operator==(const ConvergenceCrosstab&) const = default;
};

/// 2x2 counts over termination {Converged, Exhausted} x {FRS>=3, FRS<3}
/// using the human-mean FRS of the rescore condition. Runs with other
/// terminations are outside the crosstab.
inline ConvergenceCrosstab convergence_crosstab(
    const std::vector<orchestrator::RunRecord>& runs, const RatingTable& table) {
    std::map<std::string, double> mean_by_paper;
    for (const auto& row : table.rows)
        if (row.condition == Condition::rescore) mean_by_paper[row.paper_id] = row.frs_human_mean();

    ConvergenceCrosstab crosstab;
    for (const auto& run : runs) {
        if (run.termination.kind != orchestrator::Termination::Kind::converged &&
            run.termination.kind != orchestrator::Termination::Kind::exhausted)
            continue;
        auto it = mean_by_paper.find(run.paper_id);
        if (it == mean_by_paper.end()) throw MissingRating(run.paper_id);
        bool ge3 = it->second >= 3.0;
        if (run.termination.kind == orchestrator::Termination::Kind::converged)
            (ge3 ? crosstab.converged_ge3 : crosstab.converged_lt3)++;
        else
            (ge3 ? crosstab.exhausted_ge3 : crosstab.exhausted_lt3)++;
    }
    return crosstab;
}

struct ConditionMeans {
    double frs_h = 0.0;
    double frs_l = 0.0;
    double da = 0.0;
};

struct YearRow {
    int year = 0;
    long n = 0;
    ConditionMeans single_pass;
    ConditionMeans rescore;
};

struct EvalReport {
    std::vector<YearRow> per_year;
    YearRow overall;
    double share_ge3_single_pass = 0.0; // fraction of papers with human-mean FRS >= 3
    double share_ge3_rescore = 0.0;
    double coverage_single_pass = 0.0; // mean equation coverage %
    double coverage_rescore = 0.0;
    ConvergenceCrosstab crosstab;
    std::map<std::string, double> category_means; // rescore human-mean FRS by category
    std::map<std::string, long> category_counts;
    std::string notes;
};

namespace detail {

struct Accumulator {
    long n_papers = 0;
    double h_sum = 0.0;
    long h_n = 0;
    double l_sum = 0.0;
    long l_n = 0;
    double da_sum = 0.0;
    long da_n = 0;
};

} // namespace detail

/// Per-year and overall means for FRS-H, FRS-L and DA under both
/// conditions. Overall means are computed from the pooled sums, so they
/// equal the weighted means of the year rows exactly.
inline EvalReport aggregate(const RatingTable& table, const CodeScoreTable& code_scores,
                            const std::vector<corpus::PaperRecord>& catalog,
                            const CategoryTable& categories = default_category_table()) {
    std::map<std::string, const corpus::PaperRecord*> by_id;
    for (const auto& r : catalog) by_id[r.paper_id] = &r;

    auto year_of = [&](const std::string& paper_id) {
        auto it = by_id.find(paper_id);
        if (it == by_id.end()) throw UnknownPaper(paper_id);
        return it->second->year;
    };

    std::map<int, std::array<detail::Accumulator, 2>> years; // [condition]
    std::map<int, std::set<std::string>> papers_per_year;

    long ge3_sp = 0, n_sp = 0, ge3_rs = 0, n_rs = 0;
    for (const auto& row : table.rows) {
        int year = year_of(row.paper_id);
        auto& acc = years[year][row.condition == Condition::single_pass ? 0 : 1];
        acc.h_sum += row.frs_human_mean();
        ++acc.h_n;
        acc.l_sum += row.frs_llm;
        ++acc.l_n;
        papers_per_year[year].insert(row.paper_id);
        if (row.condition == Condition::single_pass) {
            ++n_sp;
            if (row.frs_human_mean() >= 3.0) ++ge3_sp;
        } else {
            ++n_rs;
            if (row.frs_human_mean() >= 3.0) ++ge3_rs;
        }
    }

    double cov_sum_sp = 0.0, cov_sum_rs = 0.0;
    long cov_n_sp = 0, cov_n_rs = 0;
    for (const auto& row : code_scores) {
        int year = year_of(row.paper_id);
        auto& acc = years[year][row.condition == Condition::single_pass ? 0 : 1];
        acc.da_sum += row.design_alignment;
        ++acc.da_n;
        if (row.condition == Condition::single_pass) {
            cov_sum_sp += row.equation_coverage;
            ++cov_n_sp;
        } else {
            cov_sum_rs += row.equation_coverage;
            ++cov_n_rs;
        }
    }

    EvalReport report;
    detail::Accumulator totals[2];
    long total_papers = 0;
    for (const auto& [year, accs] : years) {
        YearRow row;
        row.year = year;
        row.n = static_cast<long>(papers_per_year[year].size());
        total_papers += row.n;
        const detail::Accumulator& sp = accs[0];
        const detail::Accumulator& rs = accs[1];
        row.single_pass = {sp.h_n ? sp.h_sum / sp.h_n : 0.0, sp.l_n ? sp.l_sum / sp.l_n : 0.0,
                           sp.da_n ? sp.da_sum / sp.da_n : 0.0};
        row.rescore = {rs.h_n ? rs.h_sum / rs.h_n : 0.0, rs.l_n ? rs.l_sum / rs.l_n : 0.0,
                       rs.da_n ? rs.da_sum / rs.da_n : 0.0};
        report.per_year.push_back(row);
        for (int c = 0; c < 2; ++c) {
            totals[c].h_sum += accs[c].h_sum;
            totals[c].h_n += accs[c].h_n;
            totals[c].l_sum += accs[c].l_sum;
            totals[c].l_n += accs[c].l_n;
            totals[c].da_sum += accs[c].da_sum;
            totals[c].da_n += accs[c].da_n;
        }
    }
    report.overall.year = 0;
    report.overall.n = total_papers;
    report.overall.single_pass = {totals[0].h_n ? totals[0].h_sum / totals[0].h_n : 0.0,
                                  totals[0].l_n ? totals[0].l_sum / totals[0].l_n : 0.0,
                                  totals[0].da_n ? totals[0].da_sum / totals[0].da_n : 0.0};
    report.overall.rescore = {totals[1].h_n ? totals[1].h_sum / totals[1].h_n : 0.0,
                              totals[1].l_n ? totals[1].l_sum / totals[1].l_n : 0.0,
                              totals[1].da_n ? totals[1].da_sum / totals[1].da_n : 0.0};
    report.share_ge3_single_pass = n_sp ? static_cast<double>(ge3_sp) / n_sp : 0.0;
    report.share_ge3_rescore = n_rs ? static_cast<double>(ge3_rs) / n_rs : 0.0;
    report.coverage_single_pass = cov_n_sp ? cov_sum_sp / cov_n_sp : 0.0;
    report.coverage_rescore = cov_n_rs ? cov_sum_rs / cov_n_rs : 0.0;

    std::map<std::string, double> cat_sum;
    std::map<std::string, long> cat_n;
    for (const auto& row : table.rows) {
        if (row.condition != Condition::rescore) continue;
        const corpus::PaperRecord* rec = by_id.at(row.paper_id);
        std::string tag = rec->category ? *rec->category : assign_category(rec->title, categories);
        cat_sum[tag] += row.frs_human_mean();
        ++cat_n[tag];
    }
    for (const auto& [tag, total] : cat_sum) {
        report.category_means[tag] = total / static_cast<double>(cat_n[tag]);
        report.category_counts[tag] = cat_n[tag];
    }
    report.notes = stats::kEffectSizeNote;
    return report;
}

// ---- report emitters ----

/// Tabular CSV mirroring the per-year comparison layout: one row per year
/// plus an `All` row. FRS means are printed with 2 decimals, DA with 1.
inline std::string report_csv(const EvalReport& report) {
    std::string out =
        "year,n,single_pass_frs_h,single_pass_frs_l,single_pass_da,"
        "rescore_frs_h,rescore_frs_l,rescore_da\n";
    auto emit = [&](const std::string& label, const YearRow& row) {
        out += label + "," + std::to_string(row.n) + "," +
               util::format_fixed(row.single_pass.frs_h, 2) + "," +
               util::format_fixed(row.single_pass.frs_l, 2) + "," +
               util::format_fixed(row.single_pass.da, 1) + "," +
               util::format_fixed(row.rescore.frs_h, 2) + "," +
               util::format_fixed(row.rescore.frs_l, 2) + "," +
               util::format_fixed(row.rescore.da, 1) + "\n";
    };
    for (const auto& row : report.per_year) emit(std::to_string(row.year), row);
    emit("All", report.overall);
    return out;
}

inline json report_json(const EvalReport& report) {
    auto row_json = [](const YearRow& row) {
        return json{{"n", row.n},
                    {"single_pass",
                     {{"frs_h", row.single_pass.frs_h},
                      {"frs_l", row.single_pass.frs_l},
                      {"da", row.single_pass.da}}},
                    {"rescore",
                     {{"frs_h", row.rescore.frs_h},
                      {"frs_l", row.rescore.frs_l},
                      {"da", row.rescore.da}}}};
    };
    json per_year = json::object();
    for (const auto& row : report.per_year) per_year[std::to_string(row.year)] = row_json(row);
    return json{{"per_year", per_year},
                {"overall", row_json(report.overall)},
                {"share_frs_ge3",
                 {{"single_pass", report.share_ge3_single_pass},
                  {"rescore", report.share_ge3_rescore}}},
                {"equation_coverage",
                 {{"single_pass", report.coverage_single_pass},
                  {"rescore", report.coverage_rescore}}},
                {"convergence_crosstab",
                 {{"converged_ge3", report.crosstab.converged_ge3},
                  {"converged_lt3", report.crosstab.converged_lt3},
                  {"exhausted_ge3", report.crosstab.exhausted_ge3},
                  {"exhausted_lt3", report.crosstab.exhausted_lt3}}},
                {"category_means", report.category_means},
                {"category_counts", report.category_counts},
                {"notes", report.notes}};
}

} // namespace rescore::eval
