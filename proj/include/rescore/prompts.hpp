#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "rescore/errors.hpp"
#include "rescore/util.hpp"

namespace rescore::prompts {

// Versioned prompt assets. The defaults below ship with the library; a
// directory of <name>.txt files may replace any of them at run time.
inline constexpr std::string_view kPromptsVersion = "1";

namespace text {

inline constexpr std::string_view filter_system =
    "You are an expert control systems engineer screening research papers. Decide whether a "
    "paper contains enough self-contained information to reconstruct its simulation results "
    "as executable code.";

inline constexpr std::string_view filter_user =
    "A paper is code-recoverable if four criteria are met: (i) parameter values are complete; "
    "(ii) it has primary simulations, excluding papers that rely on hardware experiments, "
    "third-party simulations, or proprietary data; (iii) it does not rely on training neural "
    "networks; (iv) it includes a clear target simulation figure.\n"
    "\n"
    "Title: {paper_title}\n"
    "\n"
    "Paper text:\n"
    "{paper_text}\n"
    "\n"
    "Judge the paper against the four criteria. Finish with a final label on its own line, "
    "exactly RECOVERABLE or NOT RECOVERABLE, followed by a one-sentence justification naming "
    "the decisive criterion.";

inline constexpr std::string_view analyzer_equation_system =
    "You are an expert control systems engineer analysing a research paper annotated with "
    "red bounding boxes around equations critical for implementation. Transcribe every "
    "equation exactly. Define every variable and symbol. Provide chain-of-thought reasoning "
    "about relevance.";

inline constexpr std::string_view analyzer_equation_user =
    "Analyzing page {page_num} of a given research paper. Red bounding boxes mark key "
    "equations for: {problem_statement}. Known parameters: {params}, {init_conditions}. "
    "Return a JSON object with fields: eq_num, eq_transcriptions, var_definitions, "
    "chain_of_thought, math_relevance.";

inline constexpr std::string_view analyzer_plot_system =
    "You are an expert researcher analyzing a simulation plot. Describe the plot in enough "
    "detail that a code generator can reproduce it exactly: subplot count, axis labels, "
    "units, curves, time range, expected qualitative behavior, and approximate numerical "
    "values.";

inline constexpr std::string_view analyzer_plot_user =
    "The image is a screenshot of a simulation plot. Problem: {problem_statement}. "
    "Parameters: {params}. Describe the plot to guide downstream code generation. "
    "Do not overinterpret. Return a JSON object with fields: subplot_count, "
    "subplot_details, time_range, plot_behavior, features, parsed_values.";

inline constexpr std::string_view coder_system =
    "You are an expert control systems engineer and Python programmer. Output a single "
    "self-contained Python file.";

inline constexpr std::string_view coder_generate_user =
    "Problem: {problem_statement}. Parameters: {params}. Paper analysis (equations + target "
    "plot description): {paper_context}.\n"
    "Use the verification plot as a guide to understand the system - do not hard-code values "
    "from it.\n"
    "Match the target plot layout (subplots, axes, grid, ticks).\n"
    "Use a non-interactive plotting backend and save the final figure to output.png in the "
    "current working directory. Do not open interactive windows.";

inline constexpr std::string_view coder_repair_user =
    "Problem: {problem_statement}. Parameters: {params}. Paper analysis: {paper_context}, "
    "Current candidate code: {current_code}.\n"
    "Visual diagnosis from Feedback LLM: {visual_diagnosis}.\n"
    "Fix the code so the generated plot matches the target. Cross-reference equation context "
    "to verify formulas.\n"
    "Output the full corrected file. Keep saving the final figure to output.png with a "
    "non-interactive backend.";

inline constexpr std::string_view verifier_system =
    "You are an expert control-systems engineer and data visualization specialist. Compare "
    "simulation plots with meticulous attention to physical correctness.";

inline constexpr std::string_view verifier_user =
    "Image 1 is the GENERATED plot. Image 2 is the TARGET plot from the paper.\n"
    "\n"
    "Comparison criteria:\n"
    "(1) Layout of sub-plots - same count?\n"
    "(2) Axes and labels - same quantities?\n"
    "(3) Qualitative curve shapes - same transient and steady-state?\n"
    "(4) Approximate numerical ranges - peaks, settling values and time scales?\n"
    "\n"
    "Minor cosmetic differences are acceptable. Focus on the underlying physics.\n"
    "\n"
    "If the plots match, end with: MATCH_CONFIRMED.\n"
    "\n"
    "If they do not match, provide:\n"
    "(1) Which sub-plot(s) differ and how;\n"
    "(2) What curve behavior is wrong;\n"
    "(3) Possible root-cause in the code;\n"
    "(4) Specific mathematical fixes.";

inline constexpr std::string_view judge_frs_system =
    "You are an expert control systems engineer grading how faithfully a generated "
    "simulation plot reconstructs the reference plot from a research paper.";

inline constexpr std::string_view judge_frs_user =
    "Image 1 is the GENERATED plot. Image 2 is the TARGET plot from the paper.\n"
    "Grade the reconstruction on this 4-level scale:\n"
    "1 (non-reconstructed): generated output fails to capture the behavior;\n"
    "2 (partial reconstruction): some qualitative behavior is present, but key dynamics are "
    "missing/incorrect;\n"
    "3 (near reconstruction): core behavior is recovered, with deviations due to initial "
    "conditions, scaling, or numerical differences;\n"
    "4 (high-fidelity reconstruction): no visible differences from the reported figure.\n"
    "Return a JSON object with fields: score, rationale.";

inline constexpr std::string_view judge_code_system =
    "You are an expert control systems engineer auditing a generated simulation script "
    "against the paper context and problem statement it was produced from.";

inline constexpr std::string_view judge_code_user =
    "Problem: {problem_statement}. Paper analysis: {paper_context}. Generated code:\n"
    "{current_code}\n"
    "Return a JSON object with fields: design_alignment (0-100, how accurately the code "
    "aligns with the paper and the problem statement) and equation_coverage (0-100, percent "
    "of the referenced equations implemented in the code).";

inline constexpr std::string_view schema_repair_user =
    "Your previous response could not be parsed.\n"
    "Previous response:\n"
    "{previous_response}\n"
    "Return only a valid JSON object with exactly these fields: {expected_fields}. "
    "No prose, no code fences.";

} // namespace text

/// Named prompt templates with `{placeholder}` interpolation.
class PromptLibrary {
public:
    static PromptLibrary defaults() {
        PromptLibrary lib;
        lib.templates_ = {
            {"filter_system", std::string(text::filter_system)},
            {"filter_user", std::string(text::filter_user)},
            {"analyzer_equation_system", std::string(text::analyzer_equation_system)},
            {"analyzer_equation_user", std::string(text::analyzer_equation_user)},
            {"analyzer_plot_system", std::string(text::analyzer_plot_system)},
            {"analyzer_plot_user", std::string(text::analyzer_plot_user)},
            {"coder_system", std::string(text::coder_system)},
            {"coder_generate_user", std::string(text::coder_generate_user)},
            {"coder_repair_user", std::string(text::coder_repair_user)},
            {"verifier_system", std::string(text::verifier_system)},
            {"verifier_user", std::string(text::verifier_user)},
            {"judge_frs_system", std::string(text::judge_frs_system)},
            {"judge_frs_user", std::string(text::judge_frs_user)},
            {"judge_code_system", std::string(text::judge_code_system)},
            {"judge_code_user", std::string(text::judge_code_user)},
            {"schema_repair_user", std::string(text::schema_repair_user)},
        };
        return lib;
    }

    /// Defaults overlaid with any `<name>.txt` files found in `dir`.
    static PromptLibrary load_dir(const std::filesystem::path& dir) {
        PromptLibrary lib = defaults();
        for (const auto& entry : std::filesystem::directory_iterator(dir)) {
            if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
            lib.templates_[entry.path().stem().string()] = util::read_file(entry.path());
        }
        return lib;
    }

    /// Writes every template as `<name>.txt` into `dir`, plus a VERSION marker.
    void dump_dir(const std::filesystem::path& dir) const {
        for (const auto& [name, body] : templates_)
            util::write_file(dir / (name + ".txt"), body);
        util::write_file(dir / "VERSION", std::string(kPromptsVersion) + "\n");
    }

    const std::string& raw(const std::string& name) const {
        auto it = templates_.find(name);
        if (it == templates_.end()) throw Error("unknown prompt template: " + name);
        return it->second;
    }

    std::string render(const std::string& name,
                       const std::map<std::string, std::string>& values) const {
        return util::interpolate(raw(name), values);
    }

    const std::map<std::string, std::string>& all() const { return templates_; }

private:
    std::map<std::string, std::string> templates_;
};

} // namespace rescore::prompts
