#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "kgex/error.hpp"
#include "kgex/model_client.hpp"
#include "support.hpp"

using namespace kgex;

TEST_CASE("entity arrays parse from plain and wrapped replies") {
    auto direct = parse_entity_array(R"(["curtains","the belt","collar"])");
    CHECK(direct == std::vector<std::string>{"curtains", "the belt", "collar"});

    auto wrapped = parse_entity_array(
        "Sure! Here is the list you asked for:\n[\"horse\", \"lance\"]\nLet me know.");
    CHECK(wrapped == std::vector<std::string>{"horse", "lance"});

    auto spaced = parse_entity_array("[ \"a\" ,\n \"b\" ]");
    CHECK(spaced == std::vector<std::string>{"a", "b"});
}

TEST_CASE("entity arrays trim, drop empties, and collapse duplicates") {
    auto cleaned = parse_entity_array(R"(["  horse  ", "", "horse", "dragon", "   "])");
    CHECK(cleaned == std::vector<std::string>{"horse", "dragon"});
}

TEST_CASE("an empty array is a valid empty reply") {
    CHECK(parse_entity_array("[]").empty());
    CHECK(parse_entity_array("Answer: []").empty());
}

TEST_CASE("replies without a well-formed array are parse errors") {
    CHECK_THROWS_AS(parse_entity_array("a horse and a dragon"), ParseError);
    CHECK_THROWS_AS(parse_entity_array("[\"unterminated\""), ParseError);
    CHECK_THROWS_AS(parse_entity_array("[1, 2, 3]"), ParseError);
    CHECK_THROWS_AS(parse_entity_array(""), ParseError);
}

TEST_CASE("yes and no leading tokens parse case insensitively") {
    CHECK(parse_yes_no("yes") == true);
    CHECK(parse_yes_no("Yes, it does.") == true);
    CHECK(parse_yes_no("YES.") == true);
    CHECK(parse_yes_no("no") == false);
    CHECK(parse_yes_no("No, nothing of the sort.") == false);
    CHECK(parse_yes_no("  no\n") == false);
}

TEST_CASE("non yes-or-no replies return nothing") {
    CHECK(!parse_yes_no("maybe").has_value());
    CHECK(!parse_yes_no("the image shows a horse").has_value());
    CHECK(!parse_yes_no("yesterday").has_value());
    CHECK(!parse_yes_no("notably absent").has_value());
    CHECK(!parse_yes_no("").has_value());
}

TEST_CASE("replay clients serve fixture files by key") {
    auto dir = std::filesystem::temp_directory_path() / "kgex_replay_test";
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "george.depicts.text.txt");
        out << "[\"horse\"]";
    }
    ReplayClient client(dir);
    ModelRequest request;
    request.prompt = "anything";
    request.replay_key = "george.depicts.text";
    CHECK(client.complete(request).text == "[\"horse\"]");

    request.replay_key = "george.depicts.vision";
    CHECK_THROWS_AS(client.complete(request), TransportError);
    try {
        client.complete(request);
        FAIL("expected a transport error");
    } catch (const TransportError& e) {
        CHECK(std::string(e.what()).find("george.depicts.vision") != std::string::npos);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("fixture paths append the key and txt suffix") {
    auto path = ReplayClient::fixture_path("/tmp/replays", "a.b.text");
    CHECK(path == std::filesystem::path("/tmp/replays") / "a.b.text.txt");
}

TEST_CASE("scripted clients fail loudly on unexpected keys") {
    kgex::test::ScriptedClient client;
    client.on("k1", "yes");
    ModelRequest request;
    request.replay_key = "k1";
    CHECK(client.complete(request).text == "yes");
    request.replay_key = "k2";
    CHECK_THROWS_AS(client.complete(request), TransportError);
    CHECK(client.calls.size() == 2);
}

TEST_CASE("http client rejects endpoints it cannot speak to") {
    CHECK_THROWS_AS(HttpModelClient("https://example.test/api"), ConfigError);
    HttpModelClient unreachable("http://127.0.0.1:1/complete", "", 1);
    ModelRequest request;
    request.prompt = "hello";
    request.replay_key = "probe";
    CHECK_THROWS_AS(unreachable.complete(request), TransportError);
}
