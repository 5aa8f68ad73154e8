#include "kgex/model_client.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "httplib.h"
#include "json.hpp"

#include "kgex/error.hpp"
#include "kgex/strings.hpp"

namespace kgex {
namespace {

using nlohmann::json;

// Index of the ']' closing the array that opens at `start`, honouring JSON
// strings, or npos.
std::size_t matching_bracket(const std::string& text, std::size_t start) {
    int depth = 0;
    bool in_string = false, escaped = false;
    for (std::size_t i = start; i < text.size(); ++i) {
        char c = text[i];
        if (in_string) {
            if (escaped)
                escaped = false;
            else if (c == '\\')
                escaped = true;
            else if (c == '"')
                in_string = false;
            continue;
        }
        if (c == '"')
            in_string = true;
        else if (c == '[')
            ++depth;
        else if (c == ']' && --depth == 0)
            return i;
    }
    return std::string::npos;
}

}  // namespace

HttpModelClient::HttpModelClient(std::string endpoint, std::string auth_token,
                                 int timeout_seconds)
    : auth_token_(std::move(auth_token)), timeout_seconds_(timeout_seconds) {
    const std::string scheme = "http://";
    if (endpoint.rfind(scheme, 0) != 0)
        throw ConfigError("model endpoint must start with http://, got " + endpoint);
    std::string rest = endpoint.substr(scheme.size());
    std::size_t slash = rest.find('/');
    std::string authority = slash == std::string::npos ? rest : rest.substr(0, slash);
    path_ = slash == std::string::npos ? "/" : rest.substr(slash);
    std::size_t colon = authority.find(':');
    if (colon == std::string::npos) {
        host_ = authority;
    } else {
        host_ = authority.substr(0, colon);
        port_ = std::atoi(authority.c_str() + colon + 1);
    }
    if (host_.empty() || port_ <= 0) throw ConfigError("bad model endpoint: " + endpoint);
}

ModelResponse HttpModelClient::complete(const ModelRequest& request) {
    json body;
    body["prompt"] = request.prompt;
    if (!request.image_base64.empty()) body["image"] = request.image_base64;
    body["max_tokens"] = request.max_tokens;

    httplib::Client client(host_, port_);
    client.set_connection_timeout(timeout_seconds_, 0);
    client.set_read_timeout(timeout_seconds_, 0);
    httplib::Headers headers;
    if (!auth_token_.empty()) headers.emplace("Authorization", "Bearer " + auth_token_);

    auto result = client.Post(path_, headers, body.dump(), "application/json");
    if (!result)
        throw TransportError("cannot reach " + host_ + ":" + std::to_string(port_) + ": " +
                             httplib::to_string(result.error()));
    if (result->status != 200)
        throw TransportError("model endpoint returned status " + std::to_string(result->status) +
                             " for " + request.replay_key);

    json reply = json::parse(result->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("text") || !reply["text"].is_string())
        throw TransportError("model endpoint reply lacks a text field for " + request.replay_key);
    return ModelResponse{reply["text"].get<std::string>()};
}

ReplayClient::ReplayClient(std::filesystem::path dir) : dir_(std::move(dir)) {
    if (!std::filesystem::is_directory(dir_))
        throw IoError("replay directory does not exist: " + dir_.string());
}

std::filesystem::path ReplayClient::fixture_path(const std::filesystem::path& dir,
                                                 const std::string& replay_key) {
    return dir / (replay_key + ".txt");
}

ModelResponse ReplayClient::complete(const ModelRequest& request) {
    if (request.replay_key.empty()) throw TransportError("request has no replay key");
    std::filesystem::path path = fixture_path(dir_, request.replay_key);
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw TransportError("no replay fixture for key '" + request.replay_key + "' (" +
                             path.string() + ")");
    std::ostringstream text;
    text << in.rdbuf();
    return ModelResponse{text.str()};
}

std::vector<std::string> parse_entity_array(const std::string& text) {
    std::size_t start = text.find('[');
    if (start == std::string::npos) throw ParseError("reply contains no json array");
    std::size_t end = matching_bracket(text, start);
    if (end == std::string::npos) throw ParseError("reply's json array never closes");

    json parsed = json::parse(text.substr(start, end - start + 1), nullptr, false);
    if (parsed.is_discarded() || !parsed.is_array())
        throw ParseError("reply's bracketed text is not a json array");

    std::vector<std::string> entities;
    for (const json& element : parsed) {
        if (!element.is_string()) throw ParseError("json array element is not a string");
        std::string value = trim(element.get<std::string>());
        if (value.empty()) continue;
        bool seen = false;
        for (const std::string& prior : entities) seen = seen || prior == value;
        if (!seen) entities.push_back(value);
    }
    return entities;
}

std::optional<bool> parse_yes_no(const std::string& text) {
    std::size_t i = 0;
    while (i < text.size() && !std::isalpha(static_cast<unsigned char>(text[i]))) ++i;
    std::string token;
    while (i < text.size() && std::isalpha(static_cast<unsigned char>(text[i])))
        token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[i++]))));
    if (token == "yes") return true;
    if (token == "no") return false;
    return std::nullopt;
}

}  // namespace kgex
