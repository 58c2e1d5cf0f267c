#include <doctest.h>

#include <string>

#include "corrl/config.hpp"

using namespace corrl;

namespace {

const char* kMinimalConfig = R"(# smallest useful experiment
[instance]
generator = online_hard
d = 2
horizon = 3
seed = 7

[model_class]
generator = structured
cap = 8

[algorithm]
name = cr_omle
delta = 0.05
known_c = true
c = 2.0

[adversary]
strategy = null

[run]
episodes = 5
seeds = 1,2
out = results
)";

} // namespace

TEST_CASE("minimal config parses with expected fields") {
    const auto cfg = parse_config_text(kMinimalConfig, "minimal.cfg");
    CHECK(cfg.instance.generator == "online_hard");
    CHECK(cfg.instance.d == 2);
    CHECK(cfg.instance.horizon == 3);
    CHECK(cfg.model_class.cap == 8);
    CHECK(cfg.algorithm.names == std::vector<std::string>{"cr_omle"});
    CHECK(cfg.algorithm.c == doctest::Approx(2.0));
    CHECK(cfg.adversary.strategy == "null");
    CHECK(cfg.run.num_episodes == 5);
    CHECK(cfg.run.seeds == std::vector<uint64_t>{1, 2});
    CHECK(cfg.run.out == "results");
    CHECK_FALSE(cfg.algorithm.alpha.has_value());
}

TEST_CASE("config errors carry file and line diagnostics") {
    auto expect_error = [](const std::string& text, const char* needle) {
        try {
            parse_config_text(text, "bad.cfg");
            FAIL("expected a ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("bad.cfg:") != std::string::npos);
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };

    expect_error("[instance]\nwibble = 3\n", "unknown key 'wibble'");
    expect_error("[nope]\n", "unknown section");
    expect_error("[instance]\nd = two\n", "expected a number");
    expect_error("[algorithm]\nname = q_learning\n", "unknown algorithm");
    expect_error("d = 2\n", "outside any section");
    expect_error("[instance]\nd 2\n", "expected key = value");
    expect_error("[run]\nseeds = 1,1\n", "distinct");
    expect_error("[instance]\ngenerator = file\n", "path required");
    expect_error("[run]\nepisodes = 0\n", "episodes must be >= 1");
}

TEST_CASE("unknown keys are errors, not warnings") {
    std::string text = kMinimalConfig;
    text += "\n[measure]\nepsilon_grid = 0.1\n";
    CHECK_THROWS_AS(parse_config_text(text, "extra.cfg"), ConfigError);
}

TEST_CASE("canonical serialization round-trips") {
    const auto cfg = parse_config_text(kMinimalConfig, "minimal.cfg");
    const std::string text = config_to_text(cfg);
    const auto again = parse_config_text(text, "roundtrip.cfg");
    CHECK(again.instance.generator == cfg.instance.generator);
    CHECK(again.instance.d == cfg.instance.d);
    CHECK(again.run.seeds == cfg.run.seeds);
    CHECK(again.algorithm.names == cfg.algorithm.names);
    CHECK(config_to_text(again) == text);
}

TEST_CASE("comments and blank lines are ignored") {
    const auto cfg = parse_config_text(
        "# leading comment\n\n[run]\nepisodes = 3 # trailing\nseeds = 4\n",
        "c.cfg");
    CHECK(cfg.run.num_episodes == 3);
    CHECK(cfg.run.seeds == std::vector<uint64_t>{4});
}
