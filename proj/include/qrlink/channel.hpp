#pragma once

#include "qrlink/platform.hpp"

namespace qrlink {

// Rates below this render as the negative-infinity dB sentinel.
inline constexpr double kDecibelFloor = 1e-30;

/// exp(-L/L_att): probability that a photonic qubit survives the full fiber.
double end_to_end_transmission(double distance_km, double l_att_km);

/// Secret key capacity of direct transmission, -log2(1 - eta).
/// Returns +infinity at eta == 1 (out of domain).
double ideal_repeaterless_bound(double eta);

/// Error-free point-to-point link with finite coupling, per channel use and
/// per mode: p_link * eta / 2.
double realistic_ppl_rate(double p_link, double eta);

/// 10*log10(rate); -infinity sentinel for rates at or below the floor.
double to_decibel(double rate);

/// All benchmark quantities for one distance. `sqrt_eta_line` is the bare
/// sqrt(eta) guide line marking the optimal single-node scaling.
struct BenchmarkPoint {
    double distance_km = 0.0;
    double eta = 0.0;
    double ideal_bound = 0.0;
    double realistic_ppl = 0.0;
    double sqrt_eta_line = 0.0;
};

BenchmarkPoint benchmark_at(double distance_km, const ChannelParams& channel, double p_link);

}  // namespace qrlink
