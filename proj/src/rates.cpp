#include "qrlink/rates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qrlink {

namespace {

void check_p(double p) {
    if (!(p > 0.0))
        throw std::invalid_argument("p must be positive: no attempt ever succeeds at p = 0");
    if (p > 1.0)
        throw std::invalid_argument("p must not exceed 1");
}

void check_timing(double t0, double tau_coh) {
    if (!(t0 > 0.0)) throw std::invalid_argument("t0 must be positive");
    if (!(tau_coh > 0.0)) throw std::invalid_argument("tau_coh must be positive");
}

// q^n via exp(n*log1p(-p)); stable for tiny p with large n.
double q_pow(double p, std::int64_t n) {
    if (n == 0) return 1.0;
    if (p >= 1.0) return 0.0;
    return std::exp(static_cast<double>(n) * std::log1p(-p));
}

// Geometric sum x + x^2 + ... + x^m = x*(1 - x^m)/(1 - x). The caller
// supplies log x and 1 - x in cancellation-free form.
double geometric_sum(double x, double log_x, double one_minus_x, std::int64_t m) {
    if (m <= 0) return 0.0;
    if (x == 0.0) return 0.0;
    if (one_minus_x <= 0.0) return static_cast<double>(m);  // x == 1
    return x * (-std::expm1(static_cast<double>(m) * log_x)) / one_minus_x;
}

// d = q - q^(m+1) = q*(1 - q^m); the cutoff slack in the raw-rate ratio.
double cutoff_slack(double p, Cutoff cutoff) {
    const double q = 1.0 - p;
    if (cutoff.is_unbounded()) return q;
    if (cutoff.value() == 0 || q == 0.0) return 0.0;
    return q * (-std::expm1(static_cast<double>(cutoff.value()) * std::log1p(-p)));
}

}  // namespace

WaitingDistribution::WaitingDistribution(double p, Cutoff cutoff) : p_(p), cutoff_(cutoff) {
    check_p(p);
    if (cutoff.is_unbounded()) {
        norm_ = 1.0;
    } else if (cutoff.value() == 0) {
        norm_ = p / (2.0 - p);
    } else {
        // Unnormalized masses sum to [p + 2q(1 - q^m)] / (2 - p).
        const double q = 1.0 - p;
        const double tail = q_pow(p, cutoff.value());
        norm_ = (p + 2.0 * q * (1.0 - tail)) / (2.0 - p);
    }
}

double WaitingDistribution::mass(std::int64_t j) const {
    if (j < 0) return 0.0;
    if (!cutoff_.is_unbounded() && j > cutoff_.value()) return 0.0;
    const double unnormalized = (j == 0) ? p_ / (2.0 - p_)
                                         : 2.0 * p_ * q_pow(p_, j) / (2.0 - p_);
    return unnormalized / norm_;
}

std::vector<double> WaitingDistribution::table() const {
    if (cutoff_.is_unbounded())
        throw std::invalid_argument("cannot tabulate an unbounded waiting distribution");
    std::vector<double> masses(static_cast<std::size_t>(cutoff_.value()) + 1);
    for (std::int64_t j = 0; j <= cutoff_.value(); ++j)
        masses[static_cast<std::size_t>(j)] = mass(j);
    return masses;
}

WaitingDistribution waiting_distribution(double p, Cutoff cutoff) {
    return WaitingDistribution(p, cutoff);
}

double dephasing_expectation(double p, Cutoff cutoff, double t0, double tau_coh) {
    check_p(p);
    check_timing(t0, tau_coh);
    const double q = 1.0 - p;
    const double r = t0 / tau_coh;
    const double a = std::exp(-r);

    if (cutoff.is_unbounded()) {
        if (a == 1.0) return 1.0;
        // 1 - q*a = p + q*(1 - a), free of cancellation for small p and r.
        const double one_minus_qa = p + q * (-std::expm1(-r));
        return (p / (2.0 - p)) * (1.0 + q * a) / one_minus_qa;
    }
    const std::int64_t m = cutoff.value();
    if (m == 0) return 1.0;  // only M = 0 survives truncation
    // E_m = (1 + 2*sum_{j=1..m} (qa)^j) / (1 + 2*sum_{j=1..m} q^j); the
    // common factor p/(2-p) cancels against the renormalization.
    const double log_q = std::log1p(-p);
    const double weighted = geometric_sum(q * a, log_q - r, p + q * (-std::expm1(-r)), m);
    const double plain = geometric_sum(q, log_q, p, m);
    return (1.0 + 2.0 * weighted) / (1.0 + 2.0 * plain);
}

double raw_rate(double p, Cutoff cutoff, double p_bm) {
    check_p(p);
    if (!(p_bm > 0.0) || p_bm > 1.0)
        throw std::invalid_argument("p_bm must lie in (0, 1]");
    // d = q - q^(m+1) rewrites R(m) as p(p + 2d)/(1 + 2d), exact at m = 0
    // and in the unbounded limit.
    const double d = cutoff_slack(p, cutoff);
    return p * (p + 2.0 * d) / (1.0 + 2.0 * d) * p_bm;
}

double effective_fidelity(double p, Cutoff cutoff, double t0, double tau_coh, int extra_units) {
    if (extra_units < 0) throw std::invalid_argument("extra_units must be non-negative");
    const double expectation = dephasing_expectation(p, cutoff, t0, tau_coh);
    const double constant = std::exp(-static_cast<double>(extra_units) * t0 / tau_coh);
    return 0.5 * (1.0 + constant * expectation);
}

double binary_entropy(double x) {
    if (!(x >= 0.0) || x > 1.0)
        throw std::invalid_argument("binary_entropy argument must lie in [0, 1]");
    if (x == 0.0 || x == 1.0) return 0.0;
    return -(x * std::log2(x) + (1.0 - x) * std::log2(1.0 - x));
}

double secret_key_fraction(double e_x, double e_z) {
    if (!(e_x >= 0.0) || e_x > 0.5)
        throw std::invalid_argument("e_x must lie in [0, 1/2]");
    if (!(e_z >= 0.0) || e_z > 0.5)
        throw std::invalid_argument("e_z must lie in [0, 1/2]");
    return std::max(0.0, 1.0 - binary_entropy(e_x) - binary_entropy(e_z));
}

RatePoint evaluate(const LinkContext& ctx, Cutoff cutoff, double distance_km) {
    RatePoint point;
    point.distance_km = distance_km;
    point.cutoff = cutoff;
    point.raw_rate = raw_rate(ctx.p, cutoff, ctx.p_bm);
    point.expectation_e = dephasing_expectation(ctx.p, cutoff, ctx.t0_ms, ctx.tau_coh_ms);
    const double constant = std::exp(-static_cast<double>(ctx.extra_units) * ctx.dephasing_ratio());
    point.e_x = std::clamp(0.5 * (1.0 - constant * point.expectation_e), 0.0, 0.5);
    point.e_z = 0.0;
    point.fidelity = 1.0 - point.e_x;
    point.secret_fraction = secret_key_fraction(point.e_x, point.e_z);
    point.skr_per_use_per_mode = (point.raw_rate / 2.0) * point.secret_fraction;
    return point;
}

}  // namespace qrlink
