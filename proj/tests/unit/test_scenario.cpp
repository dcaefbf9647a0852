#include "catch_amalgamated.hpp"

#include "tclsim/error.hpp"
#include "tclsim/scenario.hpp"

#include <string>

using namespace tclsim;
using Catch::Matchers::ContainsSubstring;

namespace {

std::string error_of(const std::string& yaml)
{
    try {
        parse_scenario(yaml, "case.yaml");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("presets round-trip through text")
{
    for (const std::string& name : preset_names()) {
        const ScenarioConfig c = preset(name);
        const std::string text = serialize_scenario(c);
        const ScenarioConfig back = parse_scenario(text);
        CHECK(back == c);
        CHECK(serialize_scenario(back) == text);
    }
    CHECK_THROWS_AS(preset("nope"), ConfigError);
}

TEST_CASE("a custom scenario round-trips, matrices included")
{
    const std::string yaml = R"(name: custom-grid
seed: 18446744073709551615
horizon: 12.5
max_step: 0.001
grid:
  model: matrices
  M: 4
  D: 0.75
  matrices:
    A_hat: |
      -1 0.5
      0 -2
    B_hat: [[1], [0.3]]
    C_hat: [[-1, -0.25]]
    D_hat: -0.1
population: {n_loads: 17, gamma: 3.3}
scheme: {kind: randomized, K_pi: 7.5, v_des: 0.9}
disturbance: [[0, 0], [0.1, 1e-3], [2, -0.4]]
)";
    const ScenarioConfig c = parse_scenario(yaml);
    CHECK(c.seed == 18446744073709551615ULL);
    CHECK(c.grid.kind == GridConfig::Kind::Matrices);
    CHECK(c.grid.matrices.A_hat(0, 1) == 0.5);
    CHECK(c.grid.matrices.B_hat(1, 0) == 0.3);
    CHECK(std::get<RandomizedFreq>(c.scheme).K_pi == 7.5);
    CHECK(c.disturbance.size() == 3);
    CHECK(parse_scenario(serialize_scenario(c)) == c);
}

TEST_CASE("preset overrides")
{
    const ScenarioConfig c = parse_scenario("preset: paper-vi-desk\nhorizon: 30\nscheme: {kind: iv}\n");
    ScenarioConfig want = preset("paper-vi-desk");
    want.horizon = 30.0;
    want.scheme = RandomizedFreqHighGain{};
    CHECK(c == want);
}

TEST_CASE("errors carry source, line and field")
{
    CHECK_THAT(error_of("seed: 1\nhorizon: fast\n"), ContainsSubstring("case.yaml:2") && ContainsSubstring("horizon"));
    CHECK_THAT(error_of("seed: 1\nbogus: 3\n"), ContainsSubstring("case.yaml:2") && ContainsSubstring("unknown key"));
    CHECK_THAT(error_of("grid:\n  model: matrices\n  matrices:\n    A_hat: [[1, 2], [3]]\n    B_hat: [[1]]\n"
                        "    C_hat: [[1]]\n    D_hat: 0\n"),
               ContainsSubstring("grid.matrices.A_hat"));
    CHECK_THAT(error_of("grid:\n  model: matrices\n  matrices:\n    A_hat: \"1 x\"\n    B_hat: [[1]]\n"
                        "    C_hat: [[1]]\n    D_hat: 0\n"),
               ContainsSubstring("grid.matrices"));
    CHECK_THAT(error_of("grid:\n  model: matrices\n  matrices:\n    A_hat: [[-1]]\n    B_hat: [[1], [2]]\n"
                        "    C_hat: [[1]]\n    D_hat: 0\n"),
               ContainsSubstring("grid.matrices.B_hat"));
    CHECK_THAT(error_of("disturbance: [[0, 0], [0, 1]]\n"), ContainsSubstring("disturbance"));
    CHECK_THAT(error_of("disturbance: [[1, 0]]\n"), ContainsSubstring("time 0"));
    CHECK_THAT(error_of("scheme: {kind: magic}\n"), ContainsSubstring("scheme.kind"));
    CHECK_THAT(error_of("scheme: {kind: conventional, K_pi: 3}\n"), ContainsSubstring("scheme"));
    CHECK_THAT(error_of("preset: unknown\n"), ContainsSubstring("preset"));
    CHECK_THAT(error_of("seed: [1\n"), ContainsSubstring("malformed"));
    CHECK_THAT(error_of("- 1\n- 2\n"), ContainsSubstring("mapping"));
    CHECK_THROWS_AS(load_scenario_file("/nonexistent/file.yaml"), ConfigError);
}

TEST_CASE("scheme names")
{
    CHECK(parse_scheme_name("deterministic").index() == 1);
    CHECK(parse_scheme_name("iii").index() == 2);
    CHECK(parse_scheme_name("randomized-high-gain").index() == 3);
    CHECK_THROWS_AS(parse_scheme_name("v"), ConfigError);
}

TEST_CASE("building a scenario")
{
    ScenarioConfig c = preset("paper-vi-desk");
    c.n_loads = 60;
    c.gamma = 3.0;
    const BuiltScenario b = build_scenario(c);
    CHECK(b.sim.grid.certified);
    CHECK(b.L_hat > 0.0);
    REQUIRE(b.allocation.has_value());
    CHECK(b.allocation->report.satisfied);
    CHECK(b.sim.population.size() == 60);

    c.grid.Ki = -1.0;
    CHECK_THROWS_AS(build_scenario(c), NumericError);

    const BuiltScenario open = build_scenario(preset("free-running-200"));
    CHECK(open.sim.channel == OmegaChannel::Open);
    CHECK_FALSE(open.allocation.has_value());
}

TEST_CASE("sha256")
{
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
