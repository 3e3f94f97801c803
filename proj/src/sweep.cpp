#include "qrlink/sweep.hpp"

#include <algorithm>
#include <cmath>

#include "parallel.hpp"

namespace qrlink {

std::vector<double> default_distance_grid() {
    std::vector<double> grid;
    for (int km = 0; km <= 400; km += 2) grid.push_back(static_cast<double>(km));
    return grid;
}

namespace {

void check_grid(std::span<const double> distances) {
    if (distances.empty()) throw std::invalid_argument("distance grid must be non-empty");
    for (std::size_t i = 1; i < distances.size(); ++i)
        if (!(distances[i] > distances[i - 1]))
            throw std::invalid_argument("distance grid must be strictly increasing");
}

SweepRow benchmark_row(double distance_km, const ChannelParams& channel, double p_link) {
    const BenchmarkPoint bench = benchmark_at(distance_km, channel, p_link);
    SweepRow row;
    row.distance_km = distance_km;
    row.ideal_bound_db = to_decibel(bench.ideal_bound);
    row.realistic_ppl_db = to_decibel(bench.realistic_ppl);
    row.sqrt_eta_db = to_decibel(bench.sqrt_eta_line);
    return row;
}

void fill_rate_fields(SweepRow& row, const RatePoint& point, SweepMode mode) {
    const double rate = mode == SweepMode::skr ? point.skr_per_use_per_mode
                                               : point.raw_rate / LinkContext::n_modes;
    row.cutoff = point.cutoff;
    row.rate = rate;
    row.rate_db = to_decibel(rate);
    row.fidelity = point.fidelity;
    row.e_x = point.e_x;
}

}  // namespace

SweepResult sweep_skr(const PlatformParams& platform, const ProtocolSpec& protocol,
                      const ChannelParams& channel, std::span<const double> distances_km,
                      const CutoffPolicy& policy, int threads) {
    check_grid(distances_km);

    SweepResult result;
    result.platform = platform.name;
    result.protocol = protocol.kind;
    result.era = platform.era;
    result.mode = SweepMode::skr;

    std::vector<LinkContext> contexts;
    contexts.reserve(distances_km.size());
    for (double distance : distances_km)
        contexts.push_back(resolve_context(platform, protocol, channel, distance));

    std::vector<Cutoff> cutoffs(contexts.size(), Cutoff::unbounded());
    if (const Cutoff* pinned = std::get_if<Cutoff>(&policy)) {
        std::fill(cutoffs.begin(), cutoffs.end(), *pinned);
        result.fixed_cutoff = *pinned;
    } else if (std::holds_alternative<FixedOverRangePolicy>(policy)) {
        const RangeCutoffResult range = fixed_cutoff_over_range(contexts, kDefaultCutoffSearchCap, threads);
        // A fixed choice of "none" cannot happen: the SKR criterion always
        // admits m = 0.
        std::fill(cutoffs.begin(), cutoffs.end(), *range.fixed.m);
        result.fixed_cutoff = *range.fixed.m;
    } else {
        detail::parallel_for(contexts.size(), threads, [&](std::size_t i) {
            cutoffs[i] = *optimal_cutoff_for_skr(contexts[i]).m;
        });
    }

    result.rows.resize(contexts.size());
    for (std::size_t i = 0; i < contexts.size(); ++i) {
        SweepRow row = benchmark_row(distances_km[i], channel, platform.p_link);
        const RatePoint point = evaluate(contexts[i], cutoffs[i], distances_km[i]);
        fill_rate_fields(row, point, SweepMode::skr);
        result.rows[i] = row;
    }
    result.regime = classify_regime(result);
    return result;
}

SweepResult sweep_rr(const PlatformParams& platform, const ProtocolSpec& protocol,
                     const ChannelParams& channel, std::span<const double> distances_km,
                     double f_min, int threads) {
    check_grid(distances_km);

    SweepResult result;
    result.platform = platform.name;
    result.protocol = protocol.kind;
    result.era = platform.era;
    result.mode = SweepMode::rr;
    result.f_min = f_min;

    std::vector<LinkContext> contexts;
    contexts.reserve(distances_km.size());
    for (double distance : distances_km)
        contexts.push_back(resolve_context(platform, protocol, channel, distance));

    result.rows.resize(contexts.size());
    detail::parallel_for(contexts.size(), threads, [&](std::size_t i) {
        SweepRow row = benchmark_row(distances_km[i], channel, platform.p_link);
        const CutoffChoice choice = max_cutoff_for_fidelity(contexts[i], f_min);
        if (choice.m) {
            const RatePoint point = evaluate(contexts[i], *choice.m, distances_km[i]);
            fill_rate_fields(row, point, SweepMode::rr);
        }
        result.rows[i] = row;  // absent rate fields mark the vanished curve
    });
    result.regime = classify_regime(result);
    return result;
}

namespace {

// First grid distance where `rate_db` rises above `bound_db`, interpolated
// linearly in dB between adjacent grid points.
std::optional<double> first_crossing(const std::vector<SweepRow>& rows,
                                     double SweepRow::* bound_db) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const SweepRow& row = rows[i];
        if (!row.rate_db) continue;
        const double margin = *row.rate_db - row.*bound_db;
        if (!(margin > 0.0)) continue;
        if (i == 0) return row.distance_km;
        const SweepRow& prev = rows[i - 1];
        if (!prev.rate_db || !std::isfinite(*prev.rate_db) || !std::isfinite(prev.*bound_db) ||
            !std::isfinite(margin))
            return row.distance_km;
        const double prev_margin = *prev.rate_db - prev.*bound_db;
        if (!(prev_margin < 0.0)) return row.distance_km;
        const double t = -prev_margin / (margin - prev_margin);
        return prev.distance_km + t * (row.distance_km - prev.distance_km);
    }
    return std::nullopt;
}

}  // namespace

RegimeReport classify_regime(const SweepResult& sweep) {
    RegimeReport report;
    report.ideal_crossing_km = first_crossing(sweep.rows, &SweepRow::ideal_bound_db);
    report.realistic_crossing_km = first_crossing(sweep.rows, &SweepRow::realistic_ppl_db);
    return report;
}

double fitted_db_slope(const SweepResult& sweep, double l_min, double l_max) {
    double n = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const SweepRow& row : sweep.rows) {
        if (row.distance_km < l_min || row.distance_km > l_max) continue;
        if (!row.rate_db || !std::isfinite(*row.rate_db)) continue;
        n += 1.0;
        sx += row.distance_km;
        sy += *row.rate_db;
        sxx += row.distance_km * row.distance_km;
        sxy += row.distance_km * *row.rate_db;
    }
    if (n < 2.0) return std::numeric_limits<double>::quiet_NaN();
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace qrlink
