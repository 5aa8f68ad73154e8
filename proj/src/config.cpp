#include "kgex/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "kgex/error.hpp"
#include "kgex/strings.hpp"

namespace kgex {

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return from_string(buf.str());
}

KeyValueConfig KeyValueConfig::from_string(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::uint64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected 'key = value'", lineno);
        std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) throw ParseError("empty config key", lineno);
        cfg.values_[key] = value;
    }
    return cfg;
}

bool KeyValueConfig::has(const std::string& key) const { return values_.count(key) > 0; }

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::string KeyValueConfig::get_or(const std::string& key, const std::string& fallback) const {
    auto v = get(key);
    return v ? *v : fallback;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    try {
        size_t pos = 0;
        double d = std::stod(*v, &pos);
        if (pos != v->size()) throw std::invalid_argument(*v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("value of '" + key + "' is not a number: " + *v);
    }
}

std::int64_t KeyValueConfig::get_int(const std::string& key, std::int64_t fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    try {
        size_t pos = 0;
        long long i = std::stoll(*v, &pos);
        if (pos != v->size()) throw std::invalid_argument(*v);
        return i;
    } catch (const std::exception&) {
        throw ConfigError("value of '" + key + "' is not an integer: " + *v);
    }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    std::string s = to_lower(*v);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError("value of '" + key + "' is not a boolean: " + *v);
}

std::vector<std::string> KeyValueConfig::get_list(const std::string& key) const {
    std::vector<std::string> items;
    auto v = get(key);
    if (!v) return items;
    for (const auto& part : split(*v, ',')) {
        std::string item = trim(part);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
    values_[key] = value;
}

void KeyValueConfig::apply_env_overrides(const std::string& prefix) {
    for (auto& [key, value] : values_) {
        std::string env_name = prefix + "_";
        for (char c : key) {
            if (c == '.' || c == '-') env_name.push_back('_');
            else env_name.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
        }
        if (const char* env = std::getenv(env_name.c_str())) value = env;
    }
}

}  // namespace kgex
