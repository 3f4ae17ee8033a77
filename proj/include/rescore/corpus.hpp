#pragma once

#include <algorithm>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "rescore/errors.hpp"
#include "rescore/image.hpp"
#include "rescore/util.hpp"

namespace rescore::corpus {

namespace fs = std::filesystem;
using nlohmann::json;

struct PaperRecord {
    std::string paper_id;
    std::string title;
    int year = 0;
    std::string venue;
    std::optional<std::string> category;

    bool operator==(const PaperRecord&) const = default;
};

struct Parameter {
    std::string name;
    std::string value;
    std::optional<std::string> units;

    bool operator==(const Parameter&) const = default;
};

struct Box {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    bool operator==(const Box&) const = default;
};

struct EquationPage {
    fs::path image; // resolved absolute path
    int page_num = 1;
    std::vector<Box> boxes;

    bool operator==(const EquationPage&) const = default;
};

struct AnnotationBundle {
    std::string paper_id;
    std::string problem_statement;
    std::vector<Parameter> parameters;
    std::string initial_conditions;
    std::vector<EquationPage> equation_pages;
    fs::path target_plot; // resolved absolute path
    std::optional<std::string> notes;
    fs::path root; // bundle directory

    bool operator==(const AnnotationBundle&) const = default;
};

enum class Severity { error, warning };

struct Issue {
    Severity severity = Severity::error;
    std::string field_path;
    std::string message;

    bool operator==(const Issue&) const = default;
};

struct ValidationReport {
    std::string bundle_id;
    std::vector<Issue> issues;

    std::size_t error_count() const {
        return static_cast<std::size_t>(std::count_if(
            issues.begin(), issues.end(),
            [](const Issue& i) { return i.severity == Severity::error; }));
    }
    /// Empty issue list (or warnings only) means the bundle is accepted.
    bool accepted() const { return error_count() == 0; }

    bool operator==(const ValidationReport&) const = default;
};

namespace detail {

inline const json& require_field(const json& obj, const std::string& field,
                                 const std::string& path) {
    if (!obj.is_object() || !obj.contains(field))
        throw MalformedManifest(path.empty() ? field : path + "." + field, "missing");
    return obj.at(field);
}

inline std::string require_string(const json& obj, const std::string& field,
                                  const std::string& path = "") {
    const json& v = require_field(obj, field, path);
    if (!v.is_string())
        throw MalformedManifest(path.empty() ? field : path + "." + field, "expected string");
    return v.get<std::string>();
}

inline int require_int(const json& obj, const std::string& field,
                       const std::string& path = "") {
    const json& v = require_field(obj, field, path);
    if (!v.is_number_integer())
        throw MalformedManifest(path.empty() ? field : path + "." + field, "expected integer");
    return v.get<int>();
}

} // namespace detail

inline json bundle_to_json(const AnnotationBundle& bundle) {
    json j;
    j["paper_id"] = bundle.paper_id;
    j["problem_statement"] = bundle.problem_statement;
    json params = json::array();
    for (const auto& p : bundle.parameters) {
        json e{{"name", p.name}, {"value", p.value}};
        if (p.units) e["units"] = *p.units;
        params.push_back(e);
    }
    j["parameters"] = params;
    j["initial_conditions"] = bundle.initial_conditions;
    json pages = json::array();
    for (const auto& page : bundle.equation_pages) {
        json boxes = json::array();
        for (const auto& b : page.boxes)
            boxes.push_back({{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}});
        pages.push_back({{"image", fs::relative(page.image, bundle.root).string()},
                         {"page_num", page.page_num},
                         {"boxes", boxes}});
    }
    j["equation_pages"] = pages;
    j["target_plot"] = fs::relative(bundle.target_plot, bundle.root).string();
    if (bundle.notes) j["notes"] = *bundle.notes;
    return j;
}

/// Writes `bundle.json` into `dir`. Image files are referenced relative to the
/// bundle root and are not copied.
inline void save_bundle(const AnnotationBundle& bundle, const fs::path& dir) {
    fs::create_directories(dir);
    AnnotationBundle copy = bundle;
    if (copy.root.empty()) copy.root = dir;
    util::write_file(dir / "bundle.json", bundle_to_json(copy).dump(2) + "\n");
}

inline AnnotationBundle load_bundle(const fs::path& dir) {
    const fs::path manifest = dir / "bundle.json";
    if (!fs::exists(manifest)) throw MissingManifest(manifest.string());

    json j;
    try {
        j = json::parse(util::read_file(manifest));
    } catch (const json::parse_error& e) {
        throw MalformedManifest("bundle.json", e.what());
    }
    if (!j.is_object()) throw MalformedManifest("bundle.json", "expected object");

    AnnotationBundle bundle;
    bundle.root = fs::absolute(dir);
    bundle.paper_id = detail::require_string(j, "paper_id");
    bundle.problem_statement = detail::require_string(j, "problem_statement");
    bundle.initial_conditions = detail::require_string(j, "initial_conditions");

    const json& params = detail::require_field(j, "parameters", "");
    if (!params.is_array()) throw MalformedManifest("parameters", "expected array");
    for (std::size_t i = 0; i < params.size(); ++i) {
        const std::string path = "parameters[" + std::to_string(i) + "]";
        Parameter p;
        p.name = detail::require_string(params[i], "name", path);
        p.value = detail::require_string(params[i], "value", path);
        if (params[i].contains("units")) {
            if (!params[i]["units"].is_string())
                throw MalformedManifest(path + ".units", "expected string");
            p.units = params[i]["units"].get<std::string>();
        }
        bundle.parameters.push_back(std::move(p));
    }

    const json& pages = detail::require_field(j, "equation_pages", "");
    if (!pages.is_array()) throw MalformedManifest("equation_pages", "expected array");
    for (std::size_t i = 0; i < pages.size(); ++i) {
        const std::string path = "equation_pages[" + std::to_string(i) + "]";
        EquationPage page;
        page.image = bundle.root / detail::require_string(pages[i], "image", path);
        page.page_num = detail::require_int(pages[i], "page_num", path);
        if (pages[i].contains("boxes")) {
            const json& boxes = pages[i]["boxes"];
            if (!boxes.is_array()) throw MalformedManifest(path + ".boxes", "expected array");
            for (std::size_t k = 0; k < boxes.size(); ++k) {
                const std::string bpath = path + ".boxes[" + std::to_string(k) + "]";
                Box b;
                b.x = detail::require_int(boxes[k], "x", bpath);
                b.y = detail::require_int(boxes[k], "y", bpath);
                b.w = detail::require_int(boxes[k], "w", bpath);
                b.h = detail::require_int(boxes[k], "h", bpath);
                page.boxes.push_back(b);
            }
        }
        bundle.equation_pages.push_back(std::move(page));
    }

    bundle.target_plot = bundle.root / detail::require_string(j, "target_plot");
    if (j.contains("notes")) {
        if (!j["notes"].is_string()) throw MalformedManifest("notes", "expected string");
        bundle.notes = j["notes"].get<std::string>();
    }

    // Resolve every referenced asset up front.
    for (const auto& page : bundle.equation_pages)
        if (!fs::exists(page.image)) throw MissingAsset(page.image.string());
    if (!fs::exists(bundle.target_plot)) throw MissingAsset(bundle.target_plot.string());

    return bundle;
}

/// Pure check of every bundle invariant; violations become report entries,
/// never exceptions. An empty parameter list is only a warning because some
/// papers state parameters exclusively in the problem statement prose.
inline ValidationReport validate_bundle(const AnnotationBundle& bundle) {
    ValidationReport report;
    report.bundle_id = bundle.paper_id;
    auto add = [&](Severity sev, std::string path, std::string msg) {
        report.issues.push_back({sev, std::move(path), std::move(msg)});
    };

    if (bundle.paper_id.empty()) add(Severity::error, "paper_id", "must be nonempty");
    if (util::trim(bundle.problem_statement).empty())
        add(Severity::error, "problem_statement", "must be nonempty");
    if (bundle.equation_pages.empty())
        add(Severity::error, "equation_pages", "at least one equation page required");
    if (bundle.parameters.empty())
        add(Severity::warning, "parameters",
            "no parameters listed; assuming they are embedded in the problem statement");

    for (std::size_t i = 0; i < bundle.equation_pages.size(); ++i) {
        const auto& page = bundle.equation_pages[i];
        const std::string path = "equation_pages[" + std::to_string(i) + "]";
        if (page.page_num < 1) add(Severity::error, path + ".page_num", "must be >= 1");
        auto info = image::probe_png(page.image);
        if (!info) {
            add(Severity::error, path + ".image",
                "does not decode as PNG: " + page.image.string());
            continue;
        }
        for (std::size_t k = 0; k < page.boxes.size(); ++k) {
            const auto& b = page.boxes[k];
            const std::string bpath = path + ".boxes[" + std::to_string(k) + "]";
            if (b.w <= 0 || b.h <= 0)
                add(Severity::error, bpath, "box must have positive extent");
            else if (b.x < 0 || b.y < 0 ||
                     b.x + b.w > static_cast<int>(info->width) ||
                     b.y + b.h > static_cast<int>(info->height))
                add(Severity::error, bpath, "box extends past image bounds");
        }
    }

    if (!image::probe_png(bundle.target_plot))
        add(Severity::error, "target_plot",
            "does not decode as PNG: " + bundle.target_plot.string());

    return report;
}

/// Loads `catalog.json` from `root` (a directory or the file itself).
/// Records come back sorted by (year, paper_id).
inline std::vector<PaperRecord> load_catalog(const fs::path& root) {
    fs::path file = fs::is_directory(root) ? root / "catalog.json" : root;
    if (!fs::exists(file)) throw MalformedCatalog("no catalog file at " + file.string());

    json j;
    try {
        j = json::parse(util::read_file(file));
    } catch (const json::parse_error& e) {
        throw MalformedCatalog(e.what());
    }
    if (!j.is_array()) throw MalformedCatalog("expected a top-level array");

    std::vector<PaperRecord> records;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const json& e = j[i];
        if (!e.is_object()) throw MalformedCatalog("entry " + std::to_string(i) + " not an object");
        PaperRecord r;
        try {
            r.paper_id = detail::require_string(e, "paper_id");
            r.title = detail::require_string(e, "title");
            r.year = detail::require_int(e, "year");
            r.venue = detail::require_string(e, "venue");
        } catch (const MalformedManifest& err) {
            throw MalformedCatalog("entry " + std::to_string(i) + ": " + err.what());
        }
        if (r.year <= 0)
            throw MalformedCatalog("entry " + std::to_string(i) + ": year must be positive");
        if (e.contains("category")) {
            if (!e["category"].is_string())
                throw MalformedCatalog("entry " + std::to_string(i) + ": category must be string");
            r.category = e["category"].get<std::string>();
        }
        if (!seen.insert(r.paper_id).second) throw DuplicatePaperId(r.paper_id);
        records.push_back(std::move(r));
    }

    std::sort(records.begin(), records.end(), [](const PaperRecord& a, const PaperRecord& b) {
        return std::tie(a.year, a.paper_id) < std::tie(b.year, b.paper_id);
    });
    return records;
}

} // namespace rescore::corpus
