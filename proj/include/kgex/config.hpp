#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace kgex {

// Flat `key = value` config file. '#' starts a comment, blank lines are
// skipped. Values keep internal whitespace; surrounding whitespace is trimmed.
class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig load(const std::filesystem::path& path);
    static KeyValueConfig from_string(const std::string& text);

    bool has(const std::string& key) const;
    std::optional<std::string> get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    // Comma-separated list value, items trimmed, empties dropped.
    std::vector<std::string> get_list(const std::string& key) const;

    void set(const std::string& key, const std::string& value);

    // Environment variables override file values: key "text.endpoint" is
    // overridden by KGEX_TEXT_ENDPOINT (dots and dashes become underscores).
    void apply_env_overrides(const std::string& prefix = "KGEX");

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

}  // namespace kgex
