#include "qrlink/channel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace qrlink {

double end_to_end_transmission(double distance_km, double l_att_km) {
    if (!(distance_km >= 0.0))
        throw std::invalid_argument("distance_km must be non-negative");
    if (!(l_att_km > 0.0))
        throw std::invalid_argument("l_att_km must be positive");
    return std::exp(-distance_km / l_att_km);
}

double ideal_repeaterless_bound(double eta) {
    if (!(eta >= 0.0) || eta > 1.0)
        throw std::invalid_argument("eta must lie in [0, 1]");
    if (eta == 1.0) return std::numeric_limits<double>::infinity();
    // -log2(1-eta); log1p keeps the eta -> 0 tail at full precision where the
    // bound approaches eta/ln 2.
    return -std::log1p(-eta) / std::numbers::ln2;
}

double realistic_ppl_rate(double p_link, double eta) {
    if (!(p_link >= 0.0) || p_link > 1.0)
        throw std::invalid_argument("p_link must lie in [0, 1]");
    if (!(eta >= 0.0) || eta > 1.0)
        throw std::invalid_argument("eta must lie in [0, 1]");
    return p_link * eta / 2.0;
}

double to_decibel(double rate) {
    if (!(rate > kDecibelFloor))
        return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(rate);
}

BenchmarkPoint benchmark_at(double distance_km, const ChannelParams& channel, double p_link) {
    const double eta = end_to_end_transmission(distance_km, channel.l_att_km);
    BenchmarkPoint point;
    point.distance_km = distance_km;
    point.eta = eta;
    point.ideal_bound = ideal_repeaterless_bound(eta);
    point.realistic_ppl = realistic_ppl_rate(p_link, eta);
    point.sqrt_eta_line = std::sqrt(eta);
    return point;
}

}  // namespace qrlink
