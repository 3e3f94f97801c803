#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qrlink/channel.hpp"
#include "qrlink/cutoff.hpp"
#include "qrlink/rates.hpp"

namespace qrlink {

enum class SweepMode { skr, rr };

/// Cutoff policy for SKR sweeps: one cutoff fixed over the whole range, the
/// per-distance SKR optimum, or an explicitly pinned value.
struct FixedOverRangePolicy {};
struct PerDistanceOptimalPolicy {};
using CutoffPolicy = std::variant<FixedOverRangePolicy, PerDistanceOptimalPolicy, Cutoff>;

struct SweepRow {
    double distance_km = 0.0;
    // nullopt cutoff/rate marks an absent RR row (fidelity floor unattainable).
    std::optional<Cutoff> cutoff;
    std::optional<double> rate;      // per channel use per mode
    std::optional<double> rate_db;
    std::optional<double> fidelity;
    std::optional<double> e_x;
    double ideal_bound_db = 0.0;
    double realistic_ppl_db = 0.0;
    double sqrt_eta_db = 0.0;
};

struct RegimeReport {
    std::optional<double> ideal_crossing_km;      // rate first exceeds -log2(1-eta)
    std::optional<double> realistic_crossing_km;  // rate first exceeds p_link*eta/2
};

struct SweepResult {
    std::string platform;
    ProtocolKind protocol = ProtocolKind::nsp_cell;
    Era era = Era::current;
    SweepMode mode = SweepMode::skr;
    std::optional<double> f_min;          // RR sweeps only
    std::optional<Cutoff> fixed_cutoff;   // resolved value for the fixed policy
    std::vector<SweepRow> rows;           // sorted by strictly increasing distance
    RegimeReport regime;
};

std::vector<double> default_distance_grid();  // 0..400 km, step 2

/// SKR as a function of distance with the chosen cutoff policy, plus all
/// benchmark columns. Rows are per channel use and per mode.
SweepResult sweep_skr(const PlatformParams& platform, const ProtocolSpec& protocol,
                      const ChannelParams& channel, std::span<const double> distances_km,
                      const CutoffPolicy& policy, int threads = 0);

/// High-fidelity raw rate: per distance the largest cutoff holding the
/// fidelity floor; distances where no cutoff does are emitted with absent
/// rate fields (the curve disappears).
SweepResult sweep_rr(const PlatformParams& platform, const ProtocolSpec& protocol,
                     const ChannelParams& channel, std::span<const double> distances_km,
                     double f_min = 0.95, int threads = 0);

/// First distances (linear interpolation in dB between grid points) where the
/// swept rate exceeds the ideal and the realistic repeaterless bounds.
RegimeReport classify_regime(const SweepResult& sweep);

/// Least-squares slope of 10*log10(rate) vs distance over [l_min, l_max],
/// ignoring absent or non-positive rows. NaN when fewer than two points.
double fitted_db_slope(const SweepResult& sweep, double l_min, double l_max);

}  // namespace qrlink
