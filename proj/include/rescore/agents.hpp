#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rescore/corpus.hpp"
#include "rescore/errors.hpp"
#include "rescore/llm.hpp"
#include "rescore/prompts.hpp"
#include "rescore/util.hpp"

namespace rescore::agents {

using nlohmann::json;

// ---- domain types ----

enum class RecoverabilityLabel { recoverable, not_recoverable, indecisive };

enum class ReasonCode {
    needs_nn_training,
    no_simulation_figure,
    external_simulator,
    external_parameters,
    theoretical_only,
    incomplete_parameters,
    other,
};

inline std::string to_string(RecoverabilityLabel label) {
    switch (label) {
        case RecoverabilityLabel::recoverable: return "Recoverable";
        case RecoverabilityLabel::not_recoverable: return "NotRecoverable";
        case RecoverabilityLabel::indecisive: return "Indecisive";
    }
    return "Indecisive";
}

inline std::string to_string(ReasonCode code) {
    switch (code) {
        case ReasonCode::needs_nn_training: return "NeedsNNTraining";
        case ReasonCode::no_simulation_figure: return "NoSimulationFigure";
        case ReasonCode::external_simulator: return "ExternalSimulator";
        case ReasonCode::external_parameters: return "ExternalParameters";
        case ReasonCode::theoretical_only: return "TheoreticalOnly";
        case ReasonCode::incomplete_parameters: return "IncompleteParameters";
        case ReasonCode::other: return "Other";
    }
    return "Other";
}

struct RecoverabilityVerdict {
    RecoverabilityLabel label = RecoverabilityLabel::indecisive;
    // Present only when the label is NotRecoverable.
    std::optional<ReasonCode> reason_code;
    std::string justification;
};

struct EquationAnalysis {
    std::string eq_num;
    std::string eq_transcriptions;
    std::map<std::string, std::string> var_definitions;
    std::string chain_of_thought;
    std::string math_relevance;

    bool operator==(const EquationAnalysis&) const = default;
};

struct PlotAnalysis {
    int subplot_count = 1;
    std::string subplot_details;
    std::string time_range;
    std::string plot_behavior;
    std::string features;
    std::string parsed_values;

    bool operator==(const PlotAnalysis&) const = default;
};

struct PaperContext {
    std::vector<EquationAnalysis> equations; // all pages, page order
    PlotAnalysis plot;

    bool operator==(const PaperContext&) const = default;
};

struct CandidateScript {
    std::string source;
    int iteration = 0; // 0 = initial generation, >=1 = repair

    bool operator==(const CandidateScript&) const = default;
};

struct VisualDiagnosis {
    std::string differing_subplots;
    std::string wrong_behavior;
    std::string root_cause;
    std::string fixes;

    bool operator==(const VisualDiagnosis&) const = default;
};

struct VerifierVerdict {
    bool match_confirmed = false;
    std::optional<VisualDiagnosis> diagnosis; // present iff not confirmed
    std::string raw_response;

    bool operator==(const VerifierVerdict&) const = default;
};

inline constexpr std::string_view kMatchToken = "MATCH_CONFIRMED";

// ---- session ----

/// Bundles what one run's agent calls need: the gateway, the run-owned
/// transcript, the prompt templates, and a running token tally.
struct Session {
    const llm::LlmGateway& gateway;
    llm::Transcript& transcript;
    const prompts::PromptLibrary& prompts;
    long token_tally = 0;
    std::optional<std::string> model_override;

    std::string complete(llm::Conversation conversation) {
        llm::CompletionRequest req = gateway.make_request(std::move(conversation));
        if (model_override) req.model_id = *model_override;
        auto outcome = gateway.complete_with_usage(req, transcript);
        token_tally += outcome.estimate.total();
        return outcome.text;
    }

    std::string model_id() const {
        return model_override ? *model_override : gateway.config().model;
    }
};

// ---- plain-text renderers ----

inline std::string render_parameters(const std::vector<corpus::Parameter>& params) {
    if (params.empty()) return "(none provided)";
    std::vector<std::string> parts;
    for (const auto& p : params) {
        std::string s = p.name + " = " + p.value;
        if (p.units && !p.units->empty()) s += " [" + *p.units + "]";
        parts.push_back(std::move(s));
    }
    return util::join(parts, "; ");
}

inline std::string render_initial_conditions(const std::string& init) {
    return init.empty() ? "(none provided)" : init;
}

inline std::string context_to_prompt_text(const PaperContext& ctx) {
    std::string out = "Equations (page order):\n";
    for (std::size_t i = 0; i < ctx.equations.size(); ++i) {
        const auto& eq = ctx.equations[i];
        out += "[" + std::to_string(i + 1) + "] eq " + eq.eq_num + ": " + eq.eq_transcriptions + "\n";
        if (!eq.var_definitions.empty()) {
            out += "    variables: ";
            std::vector<std::string> defs;
            for (const auto& [sym, def] : eq.var_definitions) defs.push_back(sym + ": " + def);
            out += util::join(defs, "; ") + "\n";
        }
        if (!eq.math_relevance.empty()) out += "    relevance: " + eq.math_relevance + "\n";
        if (!eq.chain_of_thought.empty()) out += "    reasoning: " + eq.chain_of_thought + "\n";
    }
    out += "Target plot: subplot_count: " + std::to_string(ctx.plot.subplot_count) +
           "; details: " + ctx.plot.subplot_details + "; time_range: " + ctx.plot.time_range +
           "; behavior: " + ctx.plot.plot_behavior + "; features: " + ctx.plot.features +
           "; parsed_values: " + ctx.plot.parsed_values;
    return out;
}

// ---- context (de)serialization ----

inline json equation_analysis_to_json(const EquationAnalysis& eq) {
    return json{{"eq_num", eq.eq_num},
                {"eq_transcriptions", eq.eq_transcriptions},
                {"var_definitions", eq.var_definitions},
                {"chain_of_thought", eq.chain_of_thought},
                {"math_relevance", eq.math_relevance}};
}

inline json context_to_json(const PaperContext& ctx) {
    json eqs = json::array();
    for (const auto& eq : ctx.equations) eqs.push_back(equation_analysis_to_json(eq));
    return json{{"equations", eqs},
                {"plot",
                 {{"subplot_count", ctx.plot.subplot_count},
                  {"subplot_details", ctx.plot.subplot_details},
                  {"time_range", ctx.plot.time_range},
                  {"plot_behavior", ctx.plot.plot_behavior},
                  {"features", ctx.plot.features},
                  {"parsed_values", ctx.plot.parsed_values}}}};
}

inline PaperContext context_from_json(const json& j) {
    PaperContext ctx;
    for (const auto& e : j.at("equations")) {
        EquationAnalysis eq;
        eq.eq_num = e.at("eq_num").get<std::string>();
        eq.eq_transcriptions = e.at("eq_transcriptions").get<std::string>();
        eq.var_definitions = e.at("var_definitions").get<std::map<std::string, std::string>>();
        eq.chain_of_thought = e.at("chain_of_thought").get<std::string>();
        eq.math_relevance = e.at("math_relevance").get<std::string>();
        ctx.equations.push_back(std::move(eq));
    }
    const json& p = j.at("plot");
    ctx.plot.subplot_count = p.at("subplot_count").get<int>();
    ctx.plot.subplot_details = p.at("subplot_details").get<std::string>();
    ctx.plot.time_range = p.at("time_range").get<std::string>();
    ctx.plot.plot_behavior = p.at("plot_behavior").get<std::string>();
    ctx.plot.features = p.at("features").get<std::string>();
    ctx.plot.parsed_values = p.at("parsed_values").get<std::string>();
    return ctx;
}

// ---- response parsing ----

/// First well-formed JSON value ({...} or [...]) embedded in free text.
inline std::optional<json> extract_first_json(std::string_view text) {
    for (std::size_t start = 0; start < text.size(); ++start) {
        char open = text[start];
        if (open != '{' && open != '[') continue;
        char close = open == '{' ? '}' : ']';
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (std::size_t i = start; i < text.size(); ++i) {
            char c = text[i];
            if (in_string) {
                if (escaped) escaped = false;
                else if (c == '\\') escaped = true;
                else if (c == '"') in_string = false;
                continue;
            }
            if (c == '"') in_string = true;
            else if (c == open) ++depth;
            else if (c == close) {
                --depth;
                if (depth == 0) {
                    json parsed = json::parse(text.substr(start, i - start + 1), nullptr, false);
                    if (!parsed.is_discarded()) return parsed;
                    break; // malformed candidate; resume scanning after `start`
                }
            }
        }
    }
    return std::nullopt;
}

namespace detail {

inline std::string json_to_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) {
        std::vector<std::string> parts;
        for (const auto& e : v) parts.push_back(json_to_text(e));
        return util::join(parts, "\n");
    }
    return v.dump();
}

inline std::map<std::string, std::string> json_to_definitions(const json& v) {
    std::map<std::string, std::string> defs;
    if (v.is_object()) {
        for (auto it = v.begin(); it != v.end(); ++it) defs[it.key()] = json_to_text(it.value());
    } else if (v.is_array()) {
        for (const auto& e : v) {
            if (e.is_object() && e.contains("symbol") && e.contains("definition"))
                defs[json_to_text(e["symbol"])] = json_to_text(e["definition"]);
            else
                defs["_raw"] += (defs.count("_raw") ? "\n" : "") + json_to_text(e);
        }
    } else {
        defs["_raw"] = json_to_text(v);
    }
    return defs;
}

} // namespace detail

/// Lenient numeral coercion: accepts JSON numbers, digit strings, and
/// spelled-out English counts ("four" -> 4).
inline std::optional<int> coerce_count(const json& v) {
    if (v.is_number_integer()) return v.get<int>();
    if (v.is_number_float()) {
        double d = v.get<double>();
        if (d == static_cast<int>(d)) return static_cast<int>(d);
        return std::nullopt;
    }
    if (!v.is_string()) return std::nullopt;
    std::string s = util::to_lower(util::trim(v.get<std::string>()));
    // digit run
    std::size_t i = 0;
    while (i < s.size() && !std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i < s.size()) {
        int value = 0;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
            value = value * 10 + (s[i++] - '0');
        return value;
    }
    static const std::map<std::string, int> words{
        {"one", 1}, {"two", 2}, {"three", 3}, {"four", 4},   {"five", 5},   {"six", 6},
        {"seven", 7}, {"eight", 8}, {"nine", 9}, {"ten", 10}, {"eleven", 11}, {"twelve", 12}};
    for (const auto& [word, value] : words) {
        auto pos = s.find(word);
        if (pos == std::string::npos) continue;
        bool left_ok = pos == 0 || !std::isalpha(static_cast<unsigned char>(s[pos - 1]));
        std::size_t end = pos + word.size();
        bool right_ok = end >= s.size() || !std::isalpha(static_cast<unsigned char>(s[end]));
        if (left_ok && right_ok) return value;
    }
    return std::nullopt;
}

inline EquationAnalysis parse_equation_analysis(const json& item) {
    for (const char* field :
         {"eq_num", "eq_transcriptions", "var_definitions", "chain_of_thought", "math_relevance"})
        if (!item.is_object() || !item.contains(field)) throw SchemaViolation(field);
    EquationAnalysis eq;
    eq.eq_num = detail::json_to_text(item["eq_num"]);
    eq.eq_transcriptions = detail::json_to_text(item["eq_transcriptions"]);
    eq.var_definitions = detail::json_to_definitions(item["var_definitions"]);
    eq.chain_of_thought = detail::json_to_text(item["chain_of_thought"]);
    eq.math_relevance = detail::json_to_text(item["math_relevance"]);
    return eq;
}

/// Accepts a single analysis object, a top-level array of them, or an
/// object wrapping an "equations" array.
inline std::vector<EquationAnalysis> parse_equation_analyses(const json& j) {
    std::vector<EquationAnalysis> out;
    if (j.is_array()) {
        for (const auto& item : j) out.push_back(parse_equation_analysis(item));
    } else if (j.is_object() && j.contains("equations") && j["equations"].is_array()) {
        for (const auto& item : j["equations"]) out.push_back(parse_equation_analysis(item));
    } else {
        out.push_back(parse_equation_analysis(j));
    }
    return out;
}

inline PlotAnalysis parse_plot_analysis(const json& j) {
    for (const char* field : {"subplot_count", "subplot_details", "time_range", "plot_behavior",
                              "features", "parsed_values"})
        if (!j.is_object() || !j.contains(field)) throw SchemaViolation(field);
    PlotAnalysis plot;
    auto count = coerce_count(j["subplot_count"]);
    if (!count || *count < 1) throw SchemaViolation("subplot_count");
    plot.subplot_count = *count;
    plot.subplot_details = detail::json_to_text(j["subplot_details"]);
    plot.time_range = detail::json_to_text(j["time_range"]);
    plot.plot_behavior = detail::json_to_text(j["plot_behavior"]);
    plot.features = detail::json_to_text(j["features"]);
    plot.parsed_values = detail::json_to_text(j["parsed_values"]);
    return plot;
}

/// Filter-label decision table. A definitive label needs exactly one of the
/// two phrasings present; anything ambiguous or evasive defers to
/// Indecisive rather than forcing a call.
inline RecoverabilityVerdict parse_recoverability(const std::string& response) {
    RecoverabilityVerdict verdict;
    verdict.justification = util::trim(response);

    std::string upper = util::to_upper(response);
    for (char& c : upper)
        if (c == '_' || c == '-') c = ' ';

    bool negative = upper.find("NOT RECOVERABLE") != std::string::npos ||
                    upper.find("NON RECOVERABLE") != std::string::npos;
    bool positive = false;
    std::size_t pos = 0;
    while ((pos = upper.find("RECOVERABLE", pos)) != std::string::npos) {
        // A bare positive is one not directly preceded by NOT / NON.
        std::size_t k = pos;
        while (k > 0 && upper[k - 1] == ' ') --k;
        bool negated = (k >= 3 && upper.compare(k - 3, 3, "NOT") == 0) ||
                       (k >= 3 && upper.compare(k - 3, 3, "NON") == 0);
        if (!negated) positive = true;
        pos += 11;
    }

    if (negative && !positive)
        verdict.label = RecoverabilityLabel::not_recoverable;
    else if (positive && !negative)
        verdict.label = RecoverabilityLabel::recoverable;
    else
        verdict.label = RecoverabilityLabel::indecisive;

    if (verdict.label == RecoverabilityLabel::not_recoverable) {
        // Ordered keyword table for the primary rejection reason.
        const std::string lower = util::to_lower(response);
        auto any = [&](std::initializer_list<const char*> keys) {
            for (const char* k : keys)
                if (lower.find(k) != std::string::npos) return true;
            return false;
        };
        if (any({"neural network", "nn training", "network training"}))
            verdict.reason_code = ReasonCode::needs_nn_training;
        else if (any({"no simulation figure", "no target figure", "no simulation plot",
                      "lacks a simulation figure", "no clear figure", "no figure"}))
            verdict.reason_code = ReasonCode::no_simulation_figure;
        else if (any({"external simulator", "third-party simulat", "proprietary simulat",
                      "external simulation"}))
            verdict.reason_code = ReasonCode::external_simulator;
        else if (any({"cited from other", "another reference", "parameters are cited",
                      "external reference"}))
            verdict.reason_code = ReasonCode::external_parameters;
        else if (any({"theoretical", "purely analytical", "no simulation section"}))
            verdict.reason_code = ReasonCode::theoretical_only;
        else if (any({"incomplete parameter", "missing parameter", "underspecified parameter",
                      "parameters are not complete"}))
            verdict.reason_code = ReasonCode::incomplete_parameters;
        else
            verdict.reason_code = ReasonCode::other;
    }
    return verdict;
}

/// Fenced code blocks are preferred; among several the longest wins, since
/// responses often include short illustrative snippets beside the full file.
/// Unfenced responses count only when they plausibly are a bare script.
inline std::optional<std::string> extract_script(const std::string& response) {
    std::vector<std::string> blocks;
    std::size_t pos = 0;
    while (true) {
        std::size_t open = response.find("```", pos);
        if (open == std::string::npos) break;
        std::size_t lang_end = response.find('\n', open + 3);
        if (lang_end == std::string::npos) break;
        std::size_t close = response.find("```", lang_end + 1);
        if (close == std::string::npos) break;
        blocks.push_back(response.substr(lang_end + 1, close - lang_end - 1));
        pos = close + 3;
    }
    if (!blocks.empty()) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < blocks.size(); ++i)
            if (blocks[i].size() > blocks[best].size()) best = i;
        return blocks[best];
    }
    // Bare-script fallback: code-like line openers, no fences.
    for (const auto& line : util::split(response, '\n')) {
        std::string t = util::trim(line);
        if (t.rfind("import ", 0) == 0 || t.rfind("from ", 0) == 0 || t.rfind("def ", 0) == 0)
            return response;
    }
    return std::nullopt;
}

/// The terminal token counts only as the final nonempty line (an optional
/// trailing period is tolerated); mid-text mentions occur inside diagnoses
/// quoting the instructions.
inline bool is_match_confirmed(const std::string& response) {
    auto lines = util::split(response, '\n');
    for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
        std::string line = util::trim(*it);
        if (line.empty()) continue;
        while (!line.empty() && (line.back() == '.' || line.back() == '!')) line.pop_back();
        return line == kMatchToken;
    }
    return false;
}

inline VerifierVerdict parse_verifier_response(const std::string& response) {
    VerifierVerdict verdict;
    verdict.raw_response = response;
    verdict.match_confirmed = is_match_confirmed(response);
    if (verdict.match_confirmed) return verdict;

    VisualDiagnosis diag;
    // Four-part structure: (1)..(4) or "1." / "1)" section markers.
    std::vector<std::string> sections(5);
    int current = 0;
    for (const auto& raw_line : util::split(response, '\n')) {
        std::string line = util::trim(raw_line);
        int marker = 0;
        if (line.size() >= 3 && line[0] == '(' && line[1] >= '1' && line[1] <= '4' && line[2] == ')')
            marker = line[1] - '0';
        else if (line.size() >= 2 && line[0] >= '1' && line[0] <= '4' &&
                 (line[1] == '.' || line[1] == ')'))
            marker = line[0] - '0';
        if (marker > 0) current = marker;
        if (current > 0) {
            if (!sections[current].empty()) sections[current] += "\n";
            sections[current] += line;
        }
    }
    if (!sections[1].empty() || !sections[2].empty() || !sections[3].empty() ||
        !sections[4].empty()) {
        diag.differing_subplots = sections[1];
        diag.wrong_behavior = sections[2];
        diag.root_cause = sections[3];
        diag.fixes = sections[4];
    } else {
        diag.root_cause = util::trim(response);
    }
    verdict.diagnosis = diag;
    return verdict;
}

namespace detail {

/// Structured completion with one automatic schema-repair re-prompt: clean
/// structured output is assumed but real models drift.
template <typename Parser>
auto complete_structured(Session& session, const llm::Conversation& conversation,
                         const std::string& expected_fields, Parser parse) {
    std::string response = session.complete(conversation);
    std::string failure = "json";
    try {
        auto j = extract_first_json(response);
        if (j) return parse(*j);
    } catch (const SchemaViolation& e) {
        failure = e.missing_field();
    }
    llm::Conversation repair;
    repair.messages.push_back(conversation.messages.front());
    repair.messages.push_back(
        {llm::Role::user,
         {llm::TextPart{session.prompts.render(
             "schema_repair_user",
             {{"previous_response", response}, {"expected_fields", expected_fields}})}}});
    std::string second = session.complete(repair);
    try {
        auto j = extract_first_json(second);
        if (j) return parse(*j);
    } catch (const SchemaViolation& e) {
        throw SchemaViolation(e.missing_field());
    }
    throw SchemaViolation(failure);
}

} // namespace detail

// ---- operations ----

inline RecoverabilityVerdict classify_recoverability(const corpus::PaperRecord& record,
                                                     const std::string& paper_text,
                                                     Session& session) {
    if (util::trim(paper_text).empty()) throw Error("paper_text must be nonempty");
    auto conversation = llm::make_conversation(
        session.prompts.raw("filter_system"),
        {llm::TextPart{session.prompts.render(
            "filter_user", {{"paper_title", record.title}, {"paper_text", paper_text}})}});
    return parse_recoverability(session.complete(conversation));
}

inline llm::Conversation build_equation_conversation(const corpus::EquationPage& page,
                                                     const corpus::AnnotationBundle& bundle,
                                                     const prompts::PromptLibrary& prompts) {
    return llm::make_conversation(
        prompts.raw("analyzer_equation_system"),
        {llm::TextPart{prompts.render(
             "analyzer_equation_user",
             {{"page_num", std::to_string(page.page_num)},
              {"problem_statement", bundle.problem_statement},
              {"params", render_parameters(bundle.parameters)},
              {"init_conditions", render_initial_conditions(bundle.initial_conditions)}})},
         llm::ImagePart{page.image, llm::Detail::high}});
}

inline std::vector<EquationAnalysis> analyze_equation_page(const corpus::EquationPage& page,
                                                           const corpus::AnnotationBundle& bundle,
                                                           Session& session) {
    if (page.boxes.empty()) return {}; // nothing marked: vacuous, no model call
    auto conversation = build_equation_conversation(page, bundle, session.prompts);
    return detail::complete_structured(
        session, conversation,
        "eq_num, eq_transcriptions, var_definitions, chain_of_thought, math_relevance",
        [](const json& j) { return parse_equation_analyses(j); });
}

inline llm::Conversation build_plot_conversation(const corpus::AnnotationBundle& bundle,
                                                 const prompts::PromptLibrary& prompts) {
    return llm::make_conversation(
        prompts.raw("analyzer_plot_system"),
        {llm::TextPart{prompts.render(
             "analyzer_plot_user",
             {{"problem_statement", bundle.problem_statement},
              {"params", render_parameters(bundle.parameters)}})},
         llm::ImagePart{bundle.target_plot, llm::Detail::high}});
}

inline PlotAnalysis analyze_plot(const corpus::AnnotationBundle& bundle, Session& session) {
    auto conversation = build_plot_conversation(bundle, session.prompts);
    return detail::complete_structured(
        session, conversation,
        "subplot_count, subplot_details, time_range, plot_behavior, features, parsed_values",
        [](const json& j) { return parse_plot_analysis(j); });
}

inline PaperContext build_paper_context(std::vector<EquationAnalysis> analyses,
                                        PlotAnalysis plot) {
    if (analyses.empty()) throw EmptyContext();
    PaperContext ctx;
    ctx.equations = std::move(analyses);
    ctx.plot = std::move(plot);
    return ctx;
}

inline CandidateScript generate_code(const corpus::AnnotationBundle& bundle,
                                     const PaperContext& context, Session& session) {
    if (context.equations.empty()) throw EmptyContext();
    auto conversation = llm::make_conversation(
        session.prompts.raw("coder_system"),
        {llm::TextPart{session.prompts.render(
            "coder_generate_user",
            {{"problem_statement", bundle.problem_statement},
             {"params", render_parameters(bundle.parameters)},
             {"paper_context", context_to_prompt_text(context)}})}});
    std::string response = session.complete(conversation);
    auto script = extract_script(response);
    if (!script) throw NoScriptFound();
    return CandidateScript{*script, 0};
}

inline CandidateScript repair_code(const corpus::AnnotationBundle& bundle,
                                   const PaperContext& context, const CandidateScript& current,
                                   const VerifierVerdict& verdict, Session& session) {
    if (verdict.match_confirmed)
        throw std::invalid_argument("repair_code called with a confirmed verdict");
    auto conversation = llm::make_conversation(
        session.prompts.raw("coder_system"),
        {llm::TextPart{session.prompts.render(
            "coder_repair_user",
            {{"problem_statement", bundle.problem_statement},
             {"params", render_parameters(bundle.parameters)},
             {"paper_context", context_to_prompt_text(context)},
             {"current_code", current.source},
             {"visual_diagnosis", verdict.raw_response}})}});
    std::string response = session.complete(conversation);
    auto script = extract_script(response);
    if (!script) throw NoScriptFound();
    return CandidateScript{*script, current.iteration + 1};
}

inline llm::Conversation build_verifier_conversation(const std::filesystem::path& generated,
                                                     const std::filesystem::path& target,
                                                     const prompts::PromptLibrary& prompts) {
    // Image 1 is always the generated plot.
    return llm::make_conversation(prompts.raw("verifier_system"),
                                  {llm::TextPart{prompts.raw("verifier_user")},
                                   llm::ImagePart{generated, llm::Detail::high},
                                   llm::ImagePart{target, llm::Detail::high}});
}

inline VerifierVerdict verify_plots(const std::filesystem::path& generated,
                                    const std::filesystem::path& target, Session& session) {
    if (!image::is_readable_image(generated)) throw UnreadableImage(generated.string());
    if (!image::is_readable_image(target)) throw UnreadableImage(target.string());
    auto conversation = build_verifier_conversation(generated, target, session.prompts);
    return parse_verifier_response(session.complete(conversation));
}

} // namespace rescore::agents
