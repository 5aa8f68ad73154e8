#pragma once

#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "kgex/model_client.hpp"
#include "kgex/triple_set.hpp"

#ifndef KGEX_FIXTURE_DIR
#error "KGEX_FIXTURE_DIR must be defined by the build"
#endif
#ifndef KGEX_DATA_DIR
#error "KGEX_DATA_DIR must be defined by the build"
#endif

namespace kgex::test {

inline std::filesystem::path fixture(const std::string& name) {
    return std::filesystem::path(KGEX_FIXTURE_DIR) / name;
}

inline std::filesystem::path data_file(const std::string& name) {
    return std::filesystem::path(KGEX_DATA_DIR) / name;
}

inline std::string entity_name(std::size_t i) { return "urn:test/e" + std::to_string(i); }
inline std::string relation_name(std::size_t i) { return "urn:test/r" + std::to_string(i); }

// Random multigraph with duplicates possible before collapsing.
inline TripleSet random_graph(std::mt19937_64& rng, std::size_t max_triples = 1000) {
    std::uniform_int_distribution<std::size_t> size_dist(1, max_triples);
    std::size_t triples = size_dist(rng);
    std::uniform_int_distribution<std::size_t> entity_dist(0, 1 + triples / 3);
    std::uniform_int_distribution<std::size_t> relation_dist(0, 1 + triples / 50);
    TripleSet set;
    for (std::size_t i = 0; i < triples; ++i)
        set.add(entity_name(entity_dist(rng)), relation_name(relation_dist(rng)),
                entity_name(entity_dist(rng)));
    return set;
}

// Replays canned responses by replay key; records the keys it served.
class ScriptedClient : public ModelClient {
public:
    ScriptedClient& on(std::string key, std::string reply) {
        replies_[std::move(key)] = std::move(reply);
        return *this;
    }

    ModelResponse complete(const ModelRequest& request) override {
        calls.push_back(request.replay_key);
        auto it = replies_.find(request.replay_key);
        if (it == replies_.end())
            throw TransportError("no scripted reply for key: " + request.replay_key);
        return ModelResponse{it->second};
    }

    std::vector<std::string> calls;

private:
    std::unordered_map<std::string, std::string> replies_;
};

// Fails the moment anything tries to use it as a transport.
class FailOnUseClient : public ModelClient {
public:
    ModelResponse complete(const ModelRequest& request) override {
        throw TransportError("unexpected network use for key: " + request.replay_key);
    }
};

}  // namespace kgex::test
