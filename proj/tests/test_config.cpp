#include "sysrisk/config.hpp"

#include <doctest.h>

#include <string>

using namespace sysrisk;
using namespace sysrisk::config;
using nlohmann::json;

TEST_CASE("default dump parses back to the defaults")
{
    const json doc = json::parse(default_config_dump());
    const Scenario s = scenario_from_json(doc);
    CHECK(s.seed == 42);
    CHECK(s.sim.assets.n_assets == 8);
    CHECK(s.sim.assets.n_periods == 150);
    CHECK(s.sim.population.total() == 10);
    CHECK(s.analysis.wavelet.scales == std::vector<double>{1.0, 5.0, 15.0, 60.0});
    CHECK(s.analysis.te.quantile == 0.85);
    CHECK(s.sri.mode == sri::SriMode::empirical_compat);
    CHECK(json::parse(to_json(s).dump()) == json::parse(default_config_dump()));
}

TEST_CASE("non-default values round-trip")
{
    Scenario s;
    s.set_seed(7);
    s.sim.policy.comm_tax = 0.25;
    s.sim.policy.position_limit = 300.0;
    s.sim.policy.breaker = {0.05, 4};
    s.sim.assets.cross_corr = 0.1;
    s.analysis.wavelet.scales = {2.0, 8.0};
    s.sri.mode = sri::SriMode::methodology;
    const Scenario back = scenario_from_json(json::parse(to_json(s).dump()));
    CHECK(back.seed == 7);
    CHECK(back.sim.assets.seed == 7);
    CHECK(back.sim.policy == s.sim.policy);
    CHECK(back.sim.assets.cross_corr == 0.1);
    CHECK(back.analysis.wavelet.scales == s.analysis.wavelet.scales);
    CHECK(back.sri.mode == sri::SriMode::methodology);
    CHECK(to_json(back).dump() == to_json(s).dump());
}

TEST_CASE("unlimited position limit is written as null")
{
    const auto j = to_json(Scenario{});
    CHECK(j.at("policy").at("position_limit").is_null());
}

TEST_CASE("unknown keys are named in the error")
{
    try {
        scenario_from_json(json::parse(R"({"policy": {"comm_tx": 0.1}})"));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("policy.comm_tx") != std::string::npos);
    }
    CHECK_THROWS_AS(scenario_from_json(json::parse(R"({"bogus": 1})")), ConfigError);
    CHECK_THROWS_AS(scenario_from_json(json::parse(R"({"assets": {"n_assets": "eight"}})")), ConfigError);
    CHECK_THROWS_AS(scenario_from_json(json::parse(R"({"version": 99})")), ConfigError);
    CHECK_THROWS_AS(scenario_from_json(json::parse(R"({"policy": {"comm_tax": -1}})")), ConfigError);
}

TEST_CASE("number lists and breaker syntax")
{
    CHECK(parse_number_list("0.3, 0.3,0.3,0.1", "--weights") == std::vector<double>{0.3, 0.3, 0.3, 0.1});
    CHECK_THROWS_AS(parse_number_list("1,x", "--weights"), ConfigError);
    CHECK_THROWS_AS(parse_number_list("", "--weights"), ConfigError);
    const auto b = parse_breaker("0.05:3");
    CHECK(b.threshold == 0.05);
    CHECK(b.halt_ticks == 3);
    CHECK_THROWS_AS(parse_breaker("0.05"), ConfigError);
    CHECK_THROWS_AS(parse_breaker("0.05:2.5"), ConfigError);
}
