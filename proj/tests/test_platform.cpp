#include <cmath>

#include "doctest.h"
#include "qrlink/platform.hpp"

using namespace qrlink;

TEST_CASE("builtin platform tables carry the published values") {
    const auto current = builtin_platforms(Era::current);
    REQUIRE(current.size() == 5);
    CHECK(current[4].name == "rubidium-atoms");
    CHECK(current[4].p_link == 0.70);
    CHECK(current[4].clock_mhz == 5.0);
    CHECK(current[4].tau_coh_ms == 100.0);
    CHECK(current[2].name == "quantum-dots");
    CHECK(current[2].p_link == 0.10);
    CHECK(current[2].clock_mhz == 1000.0);
    CHECK(current[2].tau_coh_ms == 0.003);
    CHECK(current[3].p_link == 0.004);
    CHECK(current[3].clock_mhz == 0.06);

    const auto future = builtin_platforms(Era::future);
    REQUIRE(future.size() == 5);
    CHECK(future[0].name == "nv");
    CHECK(future[0].p_link == 0.50);
    CHECK(future[0].clock_mhz == 250.0);
    CHECK(future[0].tau_coh_ms == 10000.0);
    for (const auto& platform : future) CHECK_NOTHROW(platform.validate());
}

TEST_CASE("config parsing: round trip of a builtin entry") {
    const auto platforms = load_platforms(
        "# hand-written set\n"
        "[platform] name=rubidium-atoms p_link=0.7 clock_mhz=5 tcoh_ms=100\n");
    REQUIRE(platforms.size() == 1);
    CHECK(platforms[0].name == "rubidium-atoms");
    CHECK(platforms[0].p_link == 0.7);
    CHECK(platforms[0].clock_mhz == 5.0);
    CHECK(platforms[0].tau_coh_ms == 100.0);
}

TEST_CASE("config parsing is whitespace-insensitive around '='") {
    const auto config = parse_config(
        "l_att_km = 25\n"
        "[platform] name =lab p_link= 0.3 clock_mhz = 10 tcoh_ms=5\n");
    REQUIRE(config.platforms.size() == 1);
    CHECK(config.platforms[0].name == "lab");
    CHECK(config.platforms[0].p_link == 0.3);
    CHECK(config.channel.l_att_km == 25.0);
}

TEST_CASE("config parsing: multi-line blocks and channel overrides") {
    const auto config = parse_config(
        "l_att_km=25\n"
        "signal_speed_km_per_ms=100\n"
        "[platform]\n"
        "  name=lab-demo   # trailing comment\n"
        "  p_link=0.3\n"
        "  clock_mhz=10\n"
        "  tcoh_ms=5\n");
    REQUIRE(config.platforms.size() == 1);
    CHECK(config.platforms[0].name == "lab-demo");
    CHECK(config.channel.l_att_km == 25.0);
    CHECK(config.channel.signal_speed_km_per_ms == 100.0);
}

TEST_CASE("config parsing: empty input gives an empty list") {
    CHECK(load_platforms("").empty());
    CHECK(load_platforms("# only comments\n\n").empty());
}

TEST_CASE("config parsing: invariant violations name the field and line") {
    try {
        load_platforms("[platform] name=x p_link=1.5 clock_mhz=5 tcoh_ms=100\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& err) {
        CHECK(std::string(err.what()).find("p_link") != std::string::npos);
        CHECK(err.line() == 1);
    }
    try {
        load_platforms("\n\n[platform] name=x p_link=0.5 clock_mhz=5\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& err) {
        CHECK(std::string(err.what()).find("tcoh_ms") != std::string::npos);
        CHECK(err.line() == 3);
    }
    CHECK_THROWS_AS(load_platforms("p_link=0.5\n"), ConfigError);
    CHECK_THROWS_AS(load_platforms("[platform] name=x p_link=abc clock_mhz=5 tcoh_ms=1\n"),
                    ConfigError);
    CHECK_THROWS_AS(load_platforms("[platform] name=x p_link=0.5 clock_mhz=5 tcoh_ms=1 bogus=1\n"),
                    ConfigError);
}

namespace {

LinkContext resolve(const PlatformParams& platform, ProtocolKind kind, double distance) {
    return resolve_context(platform, ProtocolSpec{kind, 1.0}, ChannelParams{}, distance);
}

}  // namespace

TEST_CASE("resolve_context composes the per-protocol link budgets") {
    const PlatformParams rubidium{"rubidium-atoms", 0.70, 5.0, 100.0, Era::current};

    SUBCASE("NSP cell at zero length keeps the bare coupling") {
        const LinkContext ctx = resolve(rubidium, ProtocolKind::nsp_cell, 0.0);
        CHECK(ctx.p == doctest::Approx(0.70).epsilon(1e-15));
        CHECK(ctx.t0_ms == doctest::Approx(rubidium.tau_clock_ms()).epsilon(1e-15));  // clock floor
        CHECK(ctx.extra_units == 2);
    }
    SUBCASE("one attenuation length per half-link") {
        const LinkContext ctx = resolve(rubidium, ProtocolKind::nsp_cell, 44.0);
        CHECK(ctx.p == doctest::Approx(0.70 * std::exp(-1.0)).epsilon(1e-14));
        CHECK(ctx.t0_ms == doctest::Approx(44.0 / 200.0).epsilon(1e-15));
    }
    SUBCASE("two-segment budget halves the attempt and squares the coupling") {
        const PlatformParams half{"half", 0.5, 5.0, 100.0, Era::current};
        const LinkContext ctx = resolve(half, ProtocolKind::nsp_two_segment, 0.0);
        CHECK(ctx.p == doctest::Approx(0.125).epsilon(1e-15));
        const LinkContext far = resolve(half, ProtocolKind::nsp_two_segment, 100.0);
        CHECK(far.t0_ms == doctest::Approx(100.0 / 400.0).epsilon(1e-15));
    }
    SUBCASE("NRP attempt duration is the clock time at any distance") {
        const LinkContext near = resolve(rubidium, ProtocolKind::nrp_cell_ideal, 0.0);
        const LinkContext far = resolve(rubidium, ProtocolKind::nrp_cell_ideal, 400.0);
        CHECK(near.t0_ms == far.t0_ms);
        CHECK(near.t0_ms == doctest::Approx(2e-4).epsilon(1e-15));
        CHECK(near.extra_units == 0);
        const LinkContext bm = resolve(rubidium, ProtocolKind::nrp_cell_bm_write_in, 0.0);
        CHECK(bm.p == doctest::Approx(0.5 * 0.7 * 0.7).epsilon(1e-15));
    }
}

TEST_CASE("resolved p decreases with distance; NSP t0 grows linearly") {
    const PlatformParams nv{"nv", 0.05, 50.0, 10.0, Era::current};
    double previous_p = 1.0;
    for (double distance = 0.0; distance <= 400.0; distance += 20.0) {
        const LinkContext ctx = resolve(nv, ProtocolKind::nsp_cell, distance);
        CHECK(ctx.p <= previous_p);
        previous_p = ctx.p;
        if (distance >= 20.0)
            CHECK(ctx.t0_ms == doctest::Approx(distance / 200.0).epsilon(1e-14));
    }
}

TEST_CASE("resolve_context rejects invalid inputs") {
    const PlatformParams rubidium{"rubidium-atoms", 0.70, 5.0, 100.0, Era::current};
    CHECK_THROWS_AS(resolve(rubidium, ProtocolKind::nsp_cell, -1.0), std::invalid_argument);
    PlatformParams broken = rubidium;
    broken.clock_mhz = 0.0;
    CHECK_THROWS_AS(resolve(broken, ProtocolKind::nsp_cell, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(resolve_context(rubidium, ProtocolSpec{ProtocolKind::nsp_cell, 0.0},
                                    ChannelParams{}, 10.0),
                    std::invalid_argument);
}

TEST_CASE("protocol names round-trip") {
    for (ProtocolKind kind : {ProtocolKind::nsp_cell, ProtocolKind::nsp_two_segment,
                              ProtocolKind::nrp_cell_ideal, ProtocolKind::nrp_cell_bm_write_in}) {
        const auto parsed = parse_protocol(protocol_name(kind));
        REQUIRE(parsed.has_value());
        CHECK(*parsed == kind);
        CHECK(ProtocolSpec{kind, 1.0}.extra_dephasing_units() == (is_nsp(kind) ? 2 : 0));
    }
    CHECK(!parse_protocol("bogus").has_value());
}
