#include <doctest.h>

#include <algorithm>

#include "gptref/errors.hpp"
#include "gptref/json_io.hpp"
#include "gptref/quantum.hpp"

using namespace gptref;

TEST_SUITE("json_io") {

TEST_CASE("significant-digit rounding") {
    CHECK(round_sig(1.0 / 3.0) == doctest::Approx(0.333333333333).epsilon(1e-15));
    CHECK(round_sig(0.0) == 0.0);
    CHECK(round_sig(-2.0 * std::sqrt(3.0)) == doctest::Approx(-3.46410161514).epsilon(1e-14));
    CHECK(round_sig(12345.6789, 3) == doctest::Approx(12300.0));
    // idempotent: re-rounding a rounded value changes nothing
    const double once = round_sig(M_PI);
    CHECK(round_sig(once) == once);
}

TEST_CASE("space descriptors round trip") {
    for (auto space : {GptSpace::classical(5), GptSpace::quantum_complex(3),
                       GptSpace::quantum_real(2), GptSpace::square(), GptSpace::ball(4)}) {
        GptSpace back = space_from_json(space_to_json(space));
        CHECK(back.kind() == space.kind());
        CHECK(back.dim() == space.dim());
    }
    CHECK_THROWS_AS(space_from_json(json{{"kind", "octonionic"}, {"d", 3}}), Error);
    CHECK_THROWS_AS(space_from_json(json{{"kind", "classical"}}), Error);
}

TEST_CASE("device files round trip through JSON") {
    ReferenceDevice device = quantum::sic_d2();
    json j = device_to_json(device);
    ReferenceDevice back = device_from_json(j);
    CHECK((back.measurement.E - device.measurement.E).cwiseAbs().maxCoeff() <= 1e-11);
    CHECK((back.states.S - device.states.S).cwiseAbs().maxCoeff() <= 1e-11);
    REQUIRE(back.alpha.has_value());
    CHECK(*back.alpha == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("reader names every violated invariant") {
    json j = device_to_json(quantum::sic_d2());

    SUBCASE("corrupted states row") {
        j["states"][0][2] = 1.3;  // ones row broken
        j["states"][2][1] = 3.0;  // a state pushed outside the cone
        DeviceFile file = device_from_json_lenient(j);
        auto has = [&](const char* name) {
            return std::find(file.violations.begin(), file.violations.end(), name) !=
                   file.violations.end();
        };
        CHECK(has("states-first-row-ones"));
        CHECK(has("state-cone"));
        CHECK(has("alpha-born-consistency"));
        CHECK_THROWS_AS(device_from_json(j), DeviceValidationError);
    }
    SUBCASE("effects that do not sum to the unit effect") {
        j["effects"][0][0] = 0.5;
        DeviceFile file = device_from_json_lenient(j);
        CHECK(std::find(file.violations.begin(), file.violations.end(),
                        "effects-rows-sum-to-unit") != file.violations.end());
    }
    SUBCASE("alpha inconsistent with the stored blocks") {
        j["alpha"] = 2.5;
        DeviceFile file = device_from_json_lenient(j);
        CHECK(std::find(file.violations.begin(), file.violations.end(),
                        "alpha-born-consistency") != file.violations.end());
    }
    SUBCASE("exception carries the violation list") {
        j["alpha"] = 2.5;
        try {
            device_from_json(j);
            FAIL("expected DeviceValidationError");
        } catch (const DeviceValidationError& e) {
            CHECK(!e.violations().empty());
        }
    }
}

TEST_CASE("measurement-only files get canonical depolarizing states") {
    json j = device_to_json(quantum::sic_d2());
    j.erase("states");
    j.erase("alpha");
    DeviceFile file = device_from_json_lenient(j);
    CHECK(file.violations.empty());
    REQUIRE(file.device.alpha.has_value());
    CHECK(std::abs(*file.device.alpha - 3.0) <= 1e-4);
}

TEST_CASE("born serialization schema") {
    ReferenceDevice device = quantum::sic_d2();
    BornMatrix born = mic_born_matrix(device);
    json j = born_to_json(born, 1e-12, 2e-12, 2.0 * std::sqrt(3.0));
    CHECK(j.contains("phi"));
    CHECK(j["provenance"] == "mic_inverse");
    CHECK(j["residuals"]["born_identity"].get<double>() == doctest::Approx(1e-12));
    CHECK(j["deformation"]["p2"].get<double>() ==
          doctest::Approx(3.46410161514).epsilon(1e-11));
}

TEST_CASE("serialized output is deterministic") {
    ReferenceDevice device = quantum::wh_sic(3);
    const std::string once = device_to_json(device).dump(2);
    const std::string twice = device_to_json(device).dump(2);
    CHECK(once == twice);
    // parse -> dump is stable because every number is pre-rounded
    json parsed = json::parse(once);
    CHECK(parsed.dump(2) == once);
}

}  // TEST_SUITE
