#include <cmath>
#include <sstream>

#include "doctest.h"
#include "qrlink/csv.hpp"
#include "qrlink/sweep.hpp"

using namespace qrlink;

namespace {

PlatformParams rubidium_current() { return {"rubidium-atoms", 0.70, 5.0, 100.0, Era::current}; }
PlatformParams quantum_dots_current() { return {"quantum-dots", 0.10, 1000.0, 0.003, Era::current}; }

}  // namespace

TEST_CASE("default grid covers 0..400 km in 2 km steps") {
    const auto grid = default_distance_grid();
    REQUIRE(grid.size() == 201);
    CHECK(grid.front() == 0.0);
    CHECK(grid.back() == 400.0);
    CHECK(grid[1] == 2.0);
}

TEST_CASE("a one-point grid yields a single row") {
    const double distance = 50.0;
    const auto sweep = sweep_skr(rubidium_current(), {ProtocolKind::nsp_cell, 1.0}, ChannelParams{},
                                 std::span(&distance, 1), Cutoff::finite(20));
    REQUIRE(sweep.rows.size() == 1);
    CHECK(sweep.rows[0].distance_km == 50.0);
    REQUIRE(sweep.rows[0].rate.has_value());
}

TEST_CASE("sweep rows are consistent with the rates module") {
    std::vector<double> grid = {0.0, 30.0, 60.0, 90.0, 120.0};
    const PlatformParams platform = rubidium_current();
    const ProtocolSpec protocol{ProtocolKind::nsp_cell, 1.0};
    const ChannelParams channel;

    SUBCASE("SKR mode with a pinned cutoff") {
        const auto sweep = sweep_skr(platform, protocol, channel, grid, Cutoff::finite(40));
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const SweepRow& row = sweep.rows[i];
            REQUIRE(row.rate.has_value());
            const LinkContext ctx = resolve_context(platform, protocol, channel, grid[i]);
            const RatePoint point = evaluate(ctx, Cutoff::finite(40), grid[i]);
            CHECK(*row.rate == doctest::Approx(point.skr_per_use_per_mode).epsilon(1e-14));
            CHECK(*row.fidelity == doctest::Approx(point.fidelity).epsilon(1e-14));
            CHECK(*row.e_x == doctest::Approx(point.e_x).epsilon(1e-14));
            if (*row.rate > 0.0)
                CHECK(*row.rate_db == doctest::Approx(to_decibel(*row.rate)).epsilon(1e-14));
            const BenchmarkPoint bench = benchmark_at(grid[i], channel, platform.p_link);
            CHECK(row.realistic_ppl_db == doctest::Approx(to_decibel(bench.realistic_ppl)).epsilon(1e-14));
        }
    }
    SUBCASE("RR mode emits raw_rate per mode at the fidelity-floor cutoff") {
        const auto sweep = sweep_rr(platform, protocol, channel, grid, 0.95);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const SweepRow& row = sweep.rows[i];
            REQUIRE(row.cutoff.has_value());
            const LinkContext ctx = resolve_context(platform, protocol, channel, grid[i]);
            const auto choice = max_cutoff_for_fidelity(ctx, 0.95);
            REQUIRE(choice.m.has_value());
            CHECK(*row.cutoff == *choice.m);
            CHECK(*row.rate ==
                  doctest::Approx(raw_rate(ctx.p, *choice.m) / 2.0).epsilon(1e-14));
            CHECK(*row.fidelity >= 0.95);
        }
    }
    SUBCASE("per-distance-optimal policy matches the cutoff module") {
        const auto sweep = sweep_skr(platform, protocol, channel, grid, PerDistanceOptimalPolicy{});
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const LinkContext ctx = resolve_context(platform, protocol, channel, grid[i]);
            const auto choice = optimal_cutoff_for_skr(ctx);
            CHECK(*sweep.rows[i].cutoff == *choice.m);
            CHECK(*sweep.rows[i].rate == doctest::Approx(choice.achieved_value).epsilon(1e-14));
        }
    }
}

TEST_CASE("high-fidelity curve disappears where the floor is unattainable") {
    // Quantum dots, NSP: one attempt over any real distance already dephases
    // the state far below F = 0.95; only the zero-length point survives.
    const auto grid = default_distance_grid();
    const auto sweep =
        sweep_rr(quantum_dots_current(), {ProtocolKind::nsp_cell, 1.0}, ChannelParams{}, grid, 0.95);
    for (const SweepRow& row : sweep.rows) {
        if (row.distance_km == 0.0) continue;
        CHECK(!row.cutoff.has_value());
        CHECK(!row.rate.has_value());
        CHECK(!row.rate_db.has_value());
    }
    CHECK(!sweep.regime.ideal_crossing_km.has_value());
}

TEST_CASE("infinite coherence keeps the RR curve at the unbounded rate") {
    PlatformParams platform = rubidium_current();
    platform.tau_coh_ms = 1e18;  // effectively no dephasing on this grid
    std::vector<double> grid = {0.0, 100.0, 200.0};
    const auto sweep = sweep_rr(platform, {ProtocolKind::nsp_cell, 1.0}, ChannelParams{}, grid, 0.95);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        REQUIRE(sweep.rows[i].cutoff.has_value());
        CHECK(sweep.rows[i].cutoff->is_unbounded());
        const LinkContext ctx =
            resolve_context(platform, {ProtocolKind::nsp_cell, 1.0}, ChannelParams{}, grid[i]);
        CHECK(*sweep.rows[i].rate ==
              doctest::Approx(raw_rate(ctx.p, Cutoff::unbounded()) / 2.0).epsilon(1e-13));
    }
}

TEST_CASE("regime classification") {
    SUBCASE("a rate identically below both bounds never crosses") {
        PlatformParams weak{"weak", 0.001, 5.0, 0.01, Era::current};
        std::vector<double> grid = {0.0, 50.0, 100.0};
        const auto sweep =
            sweep_skr(weak, {ProtocolKind::nsp_cell, 1.0}, ChannelParams{}, grid, Cutoff::finite(0));
        CHECK(!sweep.regime.ideal_crossing_km.has_value());
        CHECK(!sweep.regime.realistic_crossing_km.has_value());
    }
    SUBCASE("quantum dots stay below even the realistic bound at all distances") {
        const auto sweep = sweep_skr(quantum_dots_current(), {ProtocolKind::nsp_cell, 1.0},
                                     ChannelParams{}, default_distance_grid(), FixedOverRangePolicy{});
        CHECK(!sweep.regime.realistic_crossing_km.has_value());
        CHECK(!sweep.regime.ideal_crossing_km.has_value());
    }
    SUBCASE("Rubidium NSP cell enters the repeater regime within 400 km") {
        const auto sweep = sweep_skr(rubidium_current(), {ProtocolKind::nsp_cell, 1.0},
                                     ChannelParams{}, default_distance_grid(), FixedOverRangePolicy{});
        REQUIRE(sweep.regime.ideal_crossing_km.has_value());
        CHECK(*sweep.regime.ideal_crossing_km > 0.0);
        CHECK(*sweep.regime.ideal_crossing_km <= 400.0);
        // The realistic bound is met strictly earlier than the ideal one.
        REQUIRE(sweep.regime.realistic_crossing_km.has_value());
        CHECK(*sweep.regime.realistic_crossing_km < *sweep.regime.ideal_crossing_km);
    }
}

TEST_CASE("fitted dB slope of a pure exponential matches the analytic loss") {
    // RR of a dephasing-free platform falls as sqrt(eta): -10/(2*22*ln10) dB/km.
    PlatformParams platform = rubidium_current();
    platform.tau_coh_ms = 1e18;
    const auto sweep = sweep_rr(platform, {ProtocolKind::nsp_cell, 1.0}, ChannelParams{},
                                default_distance_grid(), 0.95);
    const double slope = fitted_db_slope(sweep, 200.0, 400.0);
    CHECK(std::abs(slope - (-0.09870329134164814)) < 2e-4);
}

TEST_CASE("sweep output is independent of the thread count") {
    std::vector<double> grid;
    for (int km = 0; km <= 120; km += 4) grid.push_back(km);
    const auto serial = sweep_skr(rubidium_current(), {ProtocolKind::nrp_cell_ideal, 1.0},
                                  ChannelParams{}, grid, PerDistanceOptimalPolicy{}, 1);
    const auto parallel = sweep_skr(rubidium_current(), {ProtocolKind::nrp_cell_ideal, 1.0},
                                    ChannelParams{}, grid, PerDistanceOptimalPolicy{}, 5);
    RunManifest manifest{"test", {}, "-", "-"};
    std::ostringstream a, b;
    write_sweep_csv(a, serial, manifest);
    write_sweep_csv(b, parallel, manifest);
    CHECK(a.str() == b.str());
}

TEST_CASE("sweep rejects bad grids") {
    std::vector<double> unsorted = {10.0, 5.0};
    CHECK_THROWS_AS(sweep_skr(rubidium_current(), {ProtocolKind::nsp_cell, 1.0}, ChannelParams{},
                              unsorted, Cutoff::finite(1)),
                    std::invalid_argument);
    CHECK_THROWS_AS(sweep_skr(rubidium_current(), {ProtocolKind::nsp_cell, 1.0}, ChannelParams{},
                              {}, Cutoff::finite(1)),
                    std::invalid_argument);
}

TEST_CASE("CSV layout: manifest comments, exact header, NA markers") {
    std::vector<double> grid = {0.0, 40.0};
    const auto skr_sweep = sweep_skr(rubidium_current(), {ProtocolKind::nsp_cell, 1.0},
                                     ChannelParams{}, grid, Cutoff::unbounded());
    RunManifest manifest{"sweep --era current", {"mode=skr"}, "-", "-"};
    std::ostringstream out;
    write_sweep_csv(out, skr_sweep, manifest);
    const std::string text = out.str();
    CHECK(text.rfind("# qrlink v", 0) == 0);
    CHECK(text.find("# command: sweep --era current\n") != std::string::npos);
    CHECK(text.find("distance_km,cutoff_m,rate_linear,rate_db,fidelity,e_x,ideal_bound_db,"
                    "realistic_ppl_db,sqrt_eta_db\n") != std::string::npos);
    CHECK(text.find("\n0,inf,") != std::string::npos);  // unbounded cutoff marker

    // Header comments must precede the column header.
    CHECK(text.find("# ") < text.find("distance_km,"));

    const auto rr_sweep = sweep_rr(quantum_dots_current(), {ProtocolKind::nsp_cell, 1.0},
                                   ChannelParams{}, std::vector<double>{100.0}, 0.95);
    std::ostringstream rr_out;
    write_sweep_csv(rr_out, rr_sweep, manifest);
    CHECK(rr_out.str().find("100,NA,NA,NA,NA,NA,") != std::string::npos);
}

TEST_CASE("number formatting uses nine significant digits") {
    CHECK(format_number(0.284374972232165) == "0.284374972");
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(-5.46108628405557) == "-5.46108628");
    CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(format_cutoff(Cutoff::unbounded()) == "inf");
    CHECK(format_cutoff(Cutoff::finite(42)) == "42");
}
