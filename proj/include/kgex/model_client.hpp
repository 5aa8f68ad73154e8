#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace kgex {

struct ModelRequest {
    std::string prompt;
    std::string image_base64;  // empty for text-only requests
    std::size_t max_tokens = 256;
    // Human-readable request identity ("<subject>.<relation>", ...) used to
    // key replay fixtures and audit logs.
    std::string replay_key;
};

struct ModelResponse {
    std::string text;
};

// Completion transport. Implementations must be safe to call from several
// threads at once.
class ModelClient {
public:
    virtual ~ModelClient() = default;
    virtual ModelResponse complete(const ModelRequest& request) = 0;
};

// POSTs {"prompt", "image"?, "max_tokens"} as JSON and expects {"text"}.
// Only plain http endpoints are supported. When auth_token is non-empty it
// is sent as a bearer Authorization header. Connection failures, non-200
// statuses and malformed response bodies raise TransportError.
class HttpModelClient : public ModelClient {
public:
    explicit HttpModelClient(std::string endpoint, std::string auth_token = {},
                             int timeout_seconds = 120);

    ModelResponse complete(const ModelRequest& request) override;

private:
    std::string host_;
    int port_ = 80;
    std::string path_;
    std::string auth_token_;
    int timeout_seconds_;
};

// Serves responses from <dir>/<replay_key>.txt. A request whose key has no
// fixture raises TransportError naming the key, so replays stay exact.
class ReplayClient : public ModelClient {
public:
    explicit ReplayClient(std::filesystem::path dir);

    ModelResponse complete(const ModelRequest& request) override;

    static std::filesystem::path fixture_path(const std::filesystem::path& dir,
                                              const std::string& replay_key);

private:
    std::filesystem::path dir_;
};

// Pulls the first JSON array out of the reply and returns its string
// elements, trimmed, empties dropped, exact duplicates collapsed. Raises
// ParseError when no well-formed array of strings is present.
std::vector<std::string> parse_entity_array(const std::string& text);

// Reads the leading yes/no token of a reply; nullopt when neither leads.
std::optional<bool> parse_yes_no(const std::string& text);

}  // namespace kgex
