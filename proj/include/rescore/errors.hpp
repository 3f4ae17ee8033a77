#pragma once

#include <stdexcept>
#include <string>

namespace rescore {

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// ---- corpus ----

class MissingManifest : public Error {
public:
    explicit MissingManifest(const std::string& path)
        : Error("missing bundle manifest: " + path), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

class MalformedManifest : public Error {
public:
    explicit MalformedManifest(const std::string& field, const std::string& detail = "")
        : Error("malformed manifest field '" + field + "'" +
                (detail.empty() ? "" : ": " + detail)),
          field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

class MissingAsset : public Error {
public:
    explicit MissingAsset(const std::string& path)
        : Error("missing bundle asset: " + path), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

class DuplicatePaperId : public Error {
public:
    explicit DuplicatePaperId(const std::string& id)
        : Error("duplicate paper_id in catalog: " + id), id_(id) {}
    const std::string& id() const { return id_; }

private:
    std::string id_;
};

class MalformedCatalog : public Error {
public:
    explicit MalformedCatalog(const std::string& detail)
        : Error("malformed catalog: " + detail) {}
};

// ---- llm gateway ----

class UnreadableImage : public Error {
public:
    explicit UnreadableImage(const std::string& path)
        : Error("unreadable image: " + path), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

class ContextOverflow : public Error {
public:
    ContextOverflow(long estimate, long budget)
        : Error("estimated input tokens " + std::to_string(estimate) +
                " exceed context budget " + std::to_string(budget)),
          estimate_(estimate), budget_(budget) {}
    long estimate() const { return estimate_; }
    long budget() const { return budget_; }

private:
    long estimate_;
    long budget_;
};

class ProviderError : public Error {
public:
    ProviderError(int status, const std::string& detail)
        : Error("provider error (status " + std::to_string(status) + "): " + detail),
          status_(status), detail_(detail) {}
    int status() const { return status_; }
    const std::string& detail() const { return detail_; }

private:
    int status_;
    std::string detail_;
};

class TranscriptMismatch : public Error {
public:
    TranscriptMismatch(const std::string& expected, const std::string& got)
        : Error("transcript fingerprint mismatch: recorded " + expected + ", request " + got),
          expected_(expected), got_(got) {}
    const std::string& expected() const { return expected_; }
    const std::string& got() const { return got_; }

private:
    std::string expected_;
    std::string got_;
};

class TranscriptExhausted : public Error {
public:
    TranscriptExhausted() : Error("transcript exhausted: no recorded entry left") {}
};

// ---- agents ----

class SchemaViolation : public Error {
public:
    explicit SchemaViolation(const std::string& missing_field)
        : Error("response violates agent schema: " + missing_field),
          missing_field_(missing_field) {}
    const std::string& missing_field() const { return missing_field_; }

private:
    std::string missing_field_;
};

class NoScriptFound : public Error {
public:
    NoScriptFound() : Error("no code block extractable from coder response") {}
};

class EmptyContext : public Error {
public:
    EmptyContext() : Error("paper context requires at least one equation analysis") {}
};

// ---- sandbox ----

class SpawnFailure : public Error {
public:
    explicit SpawnFailure(const std::string& detail)
        : Error("interpreter failed to start: " + detail), detail_(detail) {}
    const std::string& detail() const { return detail_; }

private:
    std::string detail_;
};

// ---- orchestrator ----

class IoFailure : public Error {
public:
    explicit IoFailure(const std::string& detail) : Error("io failure: " + detail) {}
};

class RunExists : public Error {
public:
    explicit RunExists(const std::string& path)
        : Error("run directory already holds a record: " + path), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

// ---- evaluation ----

class MalformedRow : public Error {
public:
    explicit MalformedRow(long line)
        : Error("malformed ratings row at line " + std::to_string(line)), line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

class OutOfRange : public Error {
public:
    explicit OutOfRange(const std::string& value)
        : Error("value outside the 4-level rubric: " + value), value_(value) {}
    const std::string& value() const { return value_; }

private:
    std::string value_;
};

class LengthMismatch : public Error {
public:
    LengthMismatch(std::size_t a, std::size_t b)
        : Error("paired samples differ in length: " + std::to_string(a) +
                " vs " + std::to_string(b)) {}
};

class EmptyInput : public Error {
public:
    EmptyInput() : Error("statistic requires at least one observation") {}
};

class NoNonzeroDifferences : public Error {
public:
    NoNonzeroDifferences() : Error("all paired differences are zero") {}
};

class UnknownPaper : public Error {
public:
    explicit UnknownPaper(const std::string& id)
        : Error("paper_id not present in catalog: " + id), id_(id) {}
    const std::string& id() const { return id_; }

private:
    std::string id_;
};

class MissingRating : public Error {
public:
    explicit MissingRating(const std::string& id)
        : Error("no rating row for paper_id: " + id), id_(id) {}
    const std::string& id() const { return id_; }

private:
    std::string id_;
};

} // namespace rescore
