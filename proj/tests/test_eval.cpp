#include <catch2/catch_amalgamated.hpp>

#include "rescore/eval.hpp"
#include "support/helpers.hpp"

using namespace rescore;
using Catch::Matchers::ContainsSubstring;
using testsupport::ScriptedProvider;
using testsupport::TempDir;

namespace {

orchestrator::RunRecord minimal_run(const std::string& paper_id,
                                    orchestrator::Termination::Kind kind) {
    orchestrator::RunRecord record;
    record.paper_id = paper_id;
    record.termination = {kind, ""};
    return record;
}

} // namespace

TEST_CASE("ingest_ratings") {
    TempDir tmp("ratings");

    SECTION("mean of the two human raters") {
        util::write_file(tmp / "r.csv",
                         "paper_id,condition,frs_h1,frs_h2,frs_llm\n"
                         "p1,rescore,2,3,3\n"
                         "p1,single_pass,1,1,2\n");
        auto table = eval::ingest_ratings(tmp / "r.csv");
        REQUIRE(table.rows.size() == 2);
        CHECK(table.rows[0].frs_human_mean() == 2.5);
        CHECK(table.rows[0].condition == eval::Condition::rescore);
        CHECK(table.rows[1].condition == eval::Condition::single_pass);
    }

    SECTION("out-of-range score rejected") {
        util::write_file(tmp / "r.csv",
                         "paper_id,condition,frs_h1,frs_h2,frs_llm\np1,rescore,0,2,2\n");
        CHECK_THROWS_AS(eval::ingest_ratings(tmp / "r.csv"), OutOfRange);
        util::write_file(tmp / "r5.csv",
                         "paper_id,condition,frs_h1,frs_h2,frs_llm\np1,rescore,5,2,2\n");
        CHECK_THROWS_AS(eval::ingest_ratings(tmp / "r5.csv"), OutOfRange);
    }

    SECTION("malformed rows carry the line number") {
        util::write_file(tmp / "r.csv",
                         "paper_id,condition,frs_h1,frs_h2,frs_llm\n"
                         "p1,rescore,2,3,3\n"
                         "p2,rescore,2,3\n");
        try {
            eval::ingest_ratings(tmp / "r.csv");
            FAIL("expected MalformedRow");
        } catch (const MalformedRow& e) {
            CHECK(e.line() == 3);
        }
    }
}

TEST_CASE("judge_frs") {
    TempDir tmp("judge");
    testsupport::write_png(tmp / "gen.png", 64, 48, 1);
    testsupport::write_png(tmp / "tgt.png", 64, 48, 2);
    auto lib = prompts::PromptLibrary::defaults();
    llm::GatewayConfig config;
    config.model = "gpt-5.2";

    SECTION("parses an in-range score") {
        ScriptedProvider scripted({R"({"score": 4, "rationale": "overlays coincide"})"});
        llm::LlmGateway gateway(config, scripted.provider());
        llm::Transcript t(llm::TranscriptMode::live);
        agents::Session session{gateway, t, lib, 0, std::nullopt};
        auto score = eval::judge_frs(tmp / "gen.png", tmp / "tgt.png", session);
        CHECK(score.value == 4);
        CHECK(std::get<eval::LlmJudge>(score.rater).model_id == "gpt-5.2");
    }

    SECTION("score 5 violates the rubric even after the repair re-prompt") {
        ScriptedProvider scripted({R"({"score": 5})", R"({"score": 5})"});
        llm::LlmGateway gateway(config, scripted.provider());
        llm::Transcript t(llm::TranscriptMode::live);
        agents::Session session{gateway, t, lib, 0, std::nullopt};
        CHECK_THROWS_AS(eval::judge_frs(tmp / "gen.png", tmp / "tgt.png", session),
                        SchemaViolation);
    }

    SECTION("unreadable image") {
        ScriptedProvider scripted({});
        llm::LlmGateway gateway(config, scripted.provider());
        llm::Transcript t(llm::TranscriptMode::live);
        agents::Session session{gateway, t, lib, 0, std::nullopt};
        CHECK_THROWS_AS(eval::judge_frs(tmp / "nope.png", tmp / "tgt.png", session),
                        UnreadableImage);
    }
}

TEST_CASE("judge_code averages the judge models") {
    auto lib = prompts::PromptLibrary::defaults();
    agents::PaperContext ctx;
    agents::EquationAnalysis eq;
    eq.eq_num = "(1)";
    eq.eq_transcriptions = "x' = -x";
    ctx.equations.push_back(eq);

    llm::GatewayConfig config_a;
    config_a.model = "gpt-5.2";
    llm::GatewayConfig config_b;
    config_b.model = "gemini-3.1-flash-lite";

    ScriptedProvider judge_a({R"({"design_alignment": 60, "equation_coverage": 70})"});
    ScriptedProvider judge_b({R"({"design_alignment": 70, "equation_coverage": 80})"});
    llm::LlmGateway gw_a(config_a, judge_a.provider());
    llm::LlmGateway gw_b(config_b, judge_b.provider());
    llm::Transcript ta(llm::TranscriptMode::live), tb(llm::TranscriptMode::live);
    agents::Session sa{gw_a, ta, lib, 0, std::nullopt};
    agents::Session sb{gw_b, tb, lib, 0, std::nullopt};

    std::vector<agents::Session*> judges{&sa, &sb};
    auto scores = eval::judge_code(agents::CandidateScript{"print('sim')", 0}, ctx,
                                   "problem statement", judges);
    CHECK(scores.design_alignment == 65.0);
    CHECK(scores.equation_coverage == 75.0);
    REQUIRE(scores.judge_model_ids.size() == 2);
    CHECK(scores.judge_model_ids[0] == "gpt-5.2");
    CHECK(scores.judge_model_ids[1] == "gemini-3.1-flash-lite");
}

TEST_CASE("assign_category keyword table") {
    CHECK(eval::assign_category("Safety-Critical Control with Barrier Functions") == "CBF/Safety");
    CHECK(eval::assign_category("On the Identification of Piecewise Affine Systems") ==
          "Estimation/Identification");
    CHECK(eval::assign_category("Stochastic Model Predictive Control under Drift") ==
          "MPC/Optimization");
    CHECK(eval::assign_category("Consensus over Switching Networks") == "Multi-agent/Networked");
    CHECK(eval::assign_category("Data-Driven Stabilization of Unknown Plants") == "Learning-based");
    CHECK(eval::assign_category("Backstepping Boundary Control of a Heat Equation") == "PDE");
    CHECK(eval::assign_category("A Study of Widgets") == "Other");
    // Ordered table: safety keywords outrank the estimation family.
    CHECK(eval::assign_category("Safe Estimation under Attack") == "CBF/Safety");
    CHECK_THROWS_AS(eval::assign_category("  "), Error);
}

TEST_CASE("category table is editable configuration") {
    TempDir tmp("cats");
    util::write_file(tmp / "cats.json",
                     R"([{"tag": "Robotics", "keywords": ["manipulator", "gripper"]}])");
    auto table = eval::load_category_table(tmp / "cats.json");
    CHECK(eval::assign_category("Design of a Gripper Controller", table) == "Robotics");
    CHECK(eval::assign_category("Barrier Methods", table) == "Other");
}

TEST_CASE("shipped category config matches the built-in table") {
    auto shipped = eval::load_category_table(std::filesystem::path(RESCORE_ASSETS_DIR) /
                                             "categories.json");
    const auto& builtin = eval::default_category_table();
    REQUIRE(shipped.size() == builtin.size());
    for (std::size_t i = 0; i < builtin.size(); ++i) {
        CHECK(shipped[i].tag == builtin[i].tag);
        CHECK(shipped[i].keywords == builtin[i].keywords);
    }
}

TEST_CASE("aggregate over a small two-year fixture") {
    std::vector<corpus::PaperRecord> catalog{
        {"p1", "Barrier Methods for Platoons", 2021, "CDC", std::nullopt},
        {"p2", "Observer Design", 2021, "CDC", std::nullopt},
        {"p3", "Consensus Protocols", 2022, "CDC", std::nullopt},
    };
    eval::RatingTable table;
    // (h1, h2, llm) per condition
    table.rows = {
        {"p1", eval::Condition::single_pass, 1, 2, 2}, {"p1", eval::Condition::rescore, 3, 3, 4},
        {"p2", eval::Condition::single_pass, 2, 2, 3}, {"p2", eval::Condition::rescore, 2, 3, 3},
        {"p3", eval::Condition::single_pass, 1, 1, 1}, {"p3", eval::Condition::rescore, 4, 4, 4},
    };
    eval::CodeScoreTable scores{
        {"p1", eval::Condition::single_pass, 50.0, 60.0}, {"p1", eval::Condition::rescore, 70.0, 75.0},
        {"p2", eval::Condition::single_pass, 55.0, 65.0}, {"p2", eval::Condition::rescore, 65.0, 70.0},
        {"p3", eval::Condition::single_pass, 60.0, 70.0}, {"p3", eval::Condition::rescore, 80.0, 85.0},
    };

    auto report = eval::aggregate(table, scores, catalog);
    REQUIRE(report.per_year.size() == 2);
    const auto& y2021 = report.per_year[0];
    CHECK(y2021.year == 2021);
    CHECK(y2021.n == 2);
    CHECK_THAT(y2021.single_pass.frs_h, Catch::Matchers::WithinAbs(1.75, 1e-12)); // (1.5+2)/2
    CHECK_THAT(y2021.rescore.frs_h, Catch::Matchers::WithinAbs(2.75, 1e-12));     // (3+2.5)/2
    CHECK_THAT(y2021.rescore.da, Catch::Matchers::WithinAbs(67.5, 1e-12));

    // Overall equals the weighted mean of year rows, exactly.
    double weighted = 0.0;
    long n = 0;
    for (const auto& row : report.per_year) {
        weighted += row.rescore.frs_h * static_cast<double>(row.n);
        n += row.n;
    }
    CHECK_THAT(report.overall.rescore.frs_h, Catch::Matchers::WithinAbs(weighted / n, 1e-12));

    CHECK_THAT(report.share_ge3_rescore, Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-12));
    CHECK_THAT(report.share_ge3_single_pass, Catch::Matchers::WithinAbs(0.0, 1e-12));
    CHECK_THAT(report.coverage_rescore, Catch::Matchers::WithinAbs((75.0 + 70.0 + 85.0) / 3, 1e-12));

    CHECK(report.category_means.at("CBF/Safety") == 3.0);
    CHECK(report.category_means.at("Estimation/Identification") == 2.5);
    CHECK(report.category_counts.at("Multi-agent/Networked") == 1);

    SECTION("single-row table: overall equals that row") {
        eval::RatingTable one;
        one.rows = {{"p1", eval::Condition::rescore, 3, 4, 4}};
        auto r = eval::aggregate(one, {}, catalog);
        CHECK(r.overall.rescore.frs_h == 3.5);
        CHECK(r.per_year.size() == 1);
        CHECK(r.overall.rescore.frs_h == r.per_year[0].rescore.frs_h);
    }

    SECTION("unknown paper id") {
        eval::RatingTable bad;
        bad.rows = {{"ghost", eval::Condition::rescore, 3, 4, 4}};
        CHECK_THROWS_AS(eval::aggregate(bad, {}, catalog), UnknownPaper);
    }

    SECTION("csv emitter layout") {
        auto csv = eval::report_csv(report);
        CHECK_THAT(csv, ContainsSubstring("year,n,single_pass_frs_h,single_pass_frs_l,"
                                          "single_pass_da,rescore_frs_h,rescore_frs_l,rescore_da"));
        CHECK_THAT(csv, ContainsSubstring("\n2021,2,1.75,2.50,52.5,2.75,3.50,67.5\n"));
        CHECK_THAT(csv, ContainsSubstring("\nAll,3,"));
    }

    SECTION("json report carries every field") {
        auto j = eval::report_json(report);
        CHECK(j.contains("per_year"));
        CHECK(j.contains("overall"));
        CHECK(j.contains("share_frs_ge3"));
        CHECK(j.contains("convergence_crosstab"));
        CHECK(j.contains("category_means"));
        CHECK_THAT(j["notes"].get<std::string>(), ContainsSubstring("Z"));
    }
}

TEST_CASE("convergence_crosstab") {
    eval::RatingTable table;
    table.rows = {
        {"p1", eval::Condition::rescore, 3, 4, 4}, // mean 3.5 -> ge3
        {"p2", eval::Condition::rescore, 2, 2, 3}, // mean 2.0
        {"p3", eval::Condition::rescore, 4, 4, 4}, // mean 4.0
        {"p4", eval::Condition::rescore, 1, 2, 1}, // mean 1.5
    };

    SECTION("counts split by termination and threshold") {
        std::vector<orchestrator::RunRecord> runs{
            minimal_run("p1", orchestrator::Termination::Kind::converged),
            minimal_run("p2", orchestrator::Termination::Kind::converged),
            minimal_run("p3", orchestrator::Termination::Kind::exhausted),
            minimal_run("p4", orchestrator::Termination::Kind::exhausted),
        };
        auto ct = eval::convergence_crosstab(runs, table);
        CHECK(ct.converged_ge3 == 1);
        CHECK(ct.converged_lt3 == 1);
        CHECK(ct.exhausted_ge3 == 1);
        CHECK(ct.exhausted_lt3 == 1);
    }

    SECTION("all converged and rated 4: single nonzero cell") {
        std::vector<orchestrator::RunRecord> runs{
            minimal_run("p1", orchestrator::Termination::Kind::converged),
            minimal_run("p3", orchestrator::Termination::Kind::converged),
        };
        auto ct = eval::convergence_crosstab(runs, table);
        CHECK(ct.converged_ge3 == 2);
        CHECK(ct.converged_lt3 + ct.exhausted_ge3 + ct.exhausted_lt3 == 0);
    }

    SECTION("empty input: all-zero crosstab") {
        auto ct = eval::convergence_crosstab({}, table);
        CHECK(ct == eval::ConvergenceCrosstab{});
    }

    SECTION("missing rating") {
        std::vector<orchestrator::RunRecord> runs{
            minimal_run("unrated", orchestrator::Termination::Kind::converged)};
        CHECK_THROWS_AS(eval::convergence_crosstab(runs, table), MissingRating);
    }

    SECTION("non-terminal runs are outside the crosstab") {
        std::vector<orchestrator::RunRecord> runs{
            minimal_run("p1", orchestrator::Termination::Kind::context_overflow)};
        auto ct = eval::convergence_crosstab(runs, table);
        CHECK(ct == eval::ConvergenceCrosstab{});
    }
}
