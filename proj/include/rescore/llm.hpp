#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "rescore/errors.hpp"
#include "rescore/image.hpp"
#include "rescore/util.hpp"

namespace rescore::llm {

namespace fs = std::filesystem;
using nlohmann::json;

// Token accounting constants. The text heuristic is a declared
// approximation; the budget check is a guardrail, not billing.
inline constexpr long kCharsPerToken = 4;
inline constexpr long kHighDetailImageTokens = 1500;
inline constexpr long kLowDetailImageTokens = 85;
inline constexpr long kDefaultContextBudget = 128000;

enum class Detail { high, low };
enum class Role { system, user };

struct TextPart {
    std::string content;
    bool operator==(const TextPart&) const = default;
};

struct ImagePart {
    fs::path path;
    Detail detail = Detail::high;
    bool operator==(const ImagePart&) const = default;
};

using Part = std::variant<TextPart, ImagePart>;

struct Message {
    Role role = Role::user;
    std::vector<Part> parts;
    bool operator==(const Message&) const = default;
};

struct Conversation {
    std::vector<Message> messages;
    bool operator==(const Conversation&) const = default;

    /// Nonempty, and the first message carries the system role.
    bool valid() const {
        return !messages.empty() && messages.front().role == Role::system;
    }
};

/// Convenience builder: system text plus one user message of mixed parts.
inline Conversation make_conversation(std::string system_text, std::vector<Part> user_parts) {
    Conversation c;
    c.messages.push_back({Role::system, {TextPart{std::move(system_text)}}});
    c.messages.push_back({Role::user, std::move(user_parts)});
    return c;
}

struct TokenEstimate {
    long text_tokens = 0;
    long image_tokens = 0;
    long total() const { return text_tokens + image_tokens; }
};

inline TokenEstimate estimate_tokens(const Conversation& conversation) {
    TokenEstimate est;
    for (const auto& msg : conversation.messages) {
        for (const auto& part : msg.parts) {
            if (const auto* text = std::get_if<TextPart>(&part)) {
                est.text_tokens +=
                    (static_cast<long>(text->content.size()) + kCharsPerToken - 1) / kCharsPerToken;
            } else {
                const auto& img = std::get<ImagePart>(part);
                if (!image::is_readable_image(img.path))
                    throw UnreadableImage(img.path.string());
                est.image_tokens += img.detail == Detail::high ? kHighDetailImageTokens
                                                               : kLowDetailImageTokens;
            }
        }
    }
    return est;
}

struct CompletionRequest {
    Conversation conversation;
    std::string model_id;
    double temperature = 0.0;
    int max_output_tokens = 4096;
};

/// Canonical serialization of a request: message order preserved, image
/// bytes hashed, object keys sorted by the JSON library. Any change to a
/// text part, image content, model_id, or temperature changes the digest.
inline std::string fingerprint(const CompletionRequest& request) {
    json messages = json::array();
    for (const auto& msg : request.conversation.messages) {
        json parts = json::array();
        for (const auto& part : msg.parts) {
            if (const auto* text = std::get_if<TextPart>(&part)) {
                parts.push_back({{"type", "text"}, {"text", text->content}});
            } else {
                const auto& img = std::get<ImagePart>(part);
                std::string bytes;
                try {
                    bytes = util::read_file(img.path);
                } catch (const Error&) {
                    throw UnreadableImage(img.path.string());
                }
                parts.push_back({{"type", "image"},
                                 {"sha256", util::sha256_hex(bytes)},
                                 {"detail", img.detail == Detail::high ? "high" : "low"}});
            }
        }
        messages.push_back({{"role", msg.role == Role::system ? "system" : "user"},
                            {"parts", parts}});
    }
    json canonical{{"model", request.model_id},
                   {"temperature", request.temperature},
                   {"max_output_tokens", request.max_output_tokens},
                   {"messages", messages}};
    return util::sha256_hex(canonical.dump());
}

enum class TranscriptMode { live, record, replay };

inline std::string to_string(TranscriptMode mode) {
    switch (mode) {
        case TranscriptMode::live: return "live";
        case TranscriptMode::record: return "record";
        case TranscriptMode::replay: return "replay";
    }
    return "live";
}

inline TranscriptMode transcript_mode_from_string(const std::string& s) {
    if (s == "live") return TranscriptMode::live;
    if (s == "record") return TranscriptMode::record;
    if (s == "replay") return TranscriptMode::replay;
    throw Error("unknown transcript mode: " + s);
}

/// Ordered cassette of (request fingerprint, response text) pairs. A
/// transcript is owned by exactly one run at a time; replay consumes
/// entries in order and insists on matching fingerprints.
class Transcript {
public:
    struct Entry {
        std::string fingerprint;
        std::string response;
        bool operator==(const Entry&) const = default;
    };

    Transcript() = default;
    explicit Transcript(TranscriptMode mode) : mode_(mode) {}

    static Transcript load(const fs::path& path, TranscriptMode mode = TranscriptMode::replay) {
        json j;
        try {
            j = json::parse(util::read_file(path));
        } catch (const json::parse_error& e) {
            throw Error("malformed transcript " + path.string() + ": " + e.what());
        }
        if (!j.is_array()) throw Error("transcript must be a top-level array");
        Transcript t(mode);
        for (const auto& e : j) {
            if (!e.is_object() || !e.contains("fingerprint") || !e.contains("response"))
                throw Error("transcript entries need fingerprint and response fields");
            t.entries_.push_back({e["fingerprint"].get<std::string>(),
                                  e["response"].get<std::string>()});
        }
        return t;
    }

    void save(const fs::path& path) const {
        json j = json::array();
        for (const auto& e : entries_)
            j.push_back({{"fingerprint", e.fingerprint}, {"response", e.response}});
        util::write_file(path, j.dump(2) + "\n");
    }

    TranscriptMode mode() const { return mode_; }
    void set_mode(TranscriptMode mode) { mode_ = mode; }
    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    std::size_t consumed() const { return cursor_; }
    void rewind() { cursor_ = 0; }

    std::string replay_next(const std::string& request_fingerprint) {
        if (cursor_ >= entries_.size()) throw TranscriptExhausted();
        const Entry& e = entries_[cursor_];
        if (e.fingerprint != request_fingerprint)
            throw TranscriptMismatch(e.fingerprint, request_fingerprint);
        ++cursor_;
        return e.response;
    }

    void append(std::string request_fingerprint, std::string response) {
        entries_.push_back({std::move(request_fingerprint), std::move(response)});
    }

private:
    TranscriptMode mode_ = TranscriptMode::live;
    std::vector<Entry> entries_;
    std::size_t cursor_ = 0;
};

struct GatewayConfig {
    std::string api_base = "https://api.openai.com/v1";
    std::string api_key;
    std::string model = "gpt-5.2";
    long context_budget = kDefaultContextBudget;
    double temperature = 0.0;
    int max_output_tokens = 4096;
    int max_attempts = 3;
    double backoff_seconds = 1.0; // doubled per retry
    int timeout_seconds = 300;

    static GatewayConfig from_env() {
        GatewayConfig c;
        if (const char* v = std::getenv("RESCORE_API_BASE")) c.api_base = v;
        if (const char* v = std::getenv("RESCORE_API_KEY")) c.api_key = v;
        if (const char* v = std::getenv("RESCORE_MODEL")) c.model = v;
        if (const char* v = std::getenv("RESCORE_CONTEXT_BUDGET")) c.context_budget = std::atol(v);
        return c;
    }
};

namespace detail {

inline json request_to_openai_json(const CompletionRequest& request) {
    json messages = json::array();
    for (const auto& msg : request.conversation.messages) {
        json content = json::array();
        for (const auto& part : msg.parts) {
            if (const auto* text = std::get_if<TextPart>(&part)) {
                content.push_back({{"type", "text"}, {"text", text->content}});
            } else {
                const auto& img = std::get<ImagePart>(part);
                std::string bytes;
                try {
                    bytes = util::read_file(img.path);
                } catch (const Error&) {
                    throw UnreadableImage(img.path.string());
                }
                content.push_back(
                    {{"type", "image_url"},
                     {"image_url",
                      {{"url", "data:image/png;base64," + util::base64_encode(bytes)},
                       {"detail", img.detail == Detail::high ? "high" : "low"}}}});
            }
        }
        messages.push_back({{"role", msg.role == Role::system ? "system" : "user"},
                            {"content", content}});
    }
    return json{{"model", request.model_id},
                {"temperature", request.temperature},
                {"max_tokens", request.max_output_tokens},
                {"messages", messages}};
}

inline bool transient_status(int status) {
    return status == 429 || (status >= 500 && status < 600);
}

/// One chat-completion call against an OpenAI-style endpoint, with bounded
/// retries on transient failures.
inline std::string http_complete(const GatewayConfig& config, const CompletionRequest& request) {
    const std::string base = config.api_base;
    auto scheme_end = base.find("://");
    std::string origin = base;
    std::string prefix;
    if (scheme_end != std::string::npos) {
        auto path_start = base.find('/', scheme_end + 3);
        if (path_start != std::string::npos) {
            origin = base.substr(0, path_start);
            prefix = base.substr(path_start);
        }
    }
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

    const std::string body = request_to_openai_json(request).dump();
    int last_status = 0;
    std::string last_detail;
    for (int attempt = 0; attempt < config.max_attempts; ++attempt) {
        if (attempt > 0) {
            auto delay = config.backoff_seconds * static_cast<double>(1 << (attempt - 1));
            std::this_thread::sleep_for(std::chrono::duration<double>(delay));
        }
        httplib::Client client(origin);
        client.set_connection_timeout(std::chrono::seconds(30));
        client.set_read_timeout(std::chrono::seconds(config.timeout_seconds));
        httplib::Headers headers{{"Authorization", "Bearer " + config.api_key}};
        auto res = client.Post(prefix + "/chat/completions", headers, body, "application/json");
        if (!res) {
            last_status = 0;
            last_detail = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 200) {
            json j;
            try {
                j = json::parse(res->body);
            } catch (const json::parse_error& e) {
                throw ProviderError(res->status, std::string("unparseable body: ") + e.what());
            }
            try {
                const json& msg = j.at("choices").at(0).at("message").at("content");
                if (msg.is_string()) return msg.get<std::string>();
                // Some providers return content as a part list.
                if (msg.is_array()) {
                    std::string out;
                    for (const auto& p : msg)
                        if (p.contains("text")) out += p["text"].get<std::string>();
                    return out;
                }
                throw ProviderError(res->status, "unexpected content shape");
            } catch (const json::exception& e) {
                throw ProviderError(res->status, std::string("unexpected schema: ") + e.what());
            }
        }
        last_status = res->status;
        last_detail = util::tail(res->body, 512);
        if (!transient_status(res->status)) break;
    }
    throw ProviderError(last_status, last_detail);
}

} // namespace detail

struct CompletionOutcome {
    std::string text;
    TokenEstimate estimate;
};

/// Provider-agnostic chat-completion access. Safe for concurrent calls from
/// independent runs; all state is immutable configuration. The provider
/// function can be swapped for tests.
class LlmGateway {
public:
    using Provider = std::function<std::string(const CompletionRequest&)>;

    explicit LlmGateway(GatewayConfig config = GatewayConfig::from_env(), Provider provider = {})
        : config_(std::move(config)), provider_(std::move(provider)) {}

    const GatewayConfig& config() const { return config_; }

    CompletionRequest make_request(Conversation conversation) const {
        CompletionRequest req;
        req.conversation = std::move(conversation);
        req.model_id = config_.model;
        req.temperature = config_.temperature;
        req.max_output_tokens = config_.max_output_tokens;
        return req;
    }

    /// Budget check happens before any provider or transcript activity.
    CompletionOutcome complete_with_usage(const CompletionRequest& request,
                                          Transcript& transcript) const {
        if (!request.conversation.valid())
            throw Error("conversation must be nonempty and start with a system message");
        TokenEstimate est = estimate_tokens(request.conversation);
        if (est.total() > config_.context_budget)
            throw ContextOverflow(est.total(), config_.context_budget);

        if (transcript.mode() == TranscriptMode::replay) {
            std::string text = transcript.replay_next(fingerprint(request));
            return {std::move(text), est};
        }

        std::string text = provider_ ? provider_(request) : detail::http_complete(config_, request);
        if (transcript.mode() == TranscriptMode::record)
            transcript.append(fingerprint(request), text);
        return {std::move(text), est};
    }

    std::string complete(const CompletionRequest& request, Transcript& transcript) const {
        return complete_with_usage(request, transcript).text;
    }

private:
    GatewayConfig config_;
    Provider provider_;
};

} // namespace rescore::llm
