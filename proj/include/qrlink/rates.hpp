#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "qrlink/platform.hpp"

namespace qrlink {

/// Memory cutoff: maximal number of attempts a loaded memory waits before the
/// protocol aborts and restarts. Unbounded is a first-class value with its
/// own closed forms.
class Cutoff {
public:
    static constexpr Cutoff finite(std::int64_t m) { return Cutoff(m); }
    static constexpr Cutoff unbounded() { return Cutoff(-1); }

    constexpr bool is_unbounded() const { return m_ < 0; }
    constexpr std::int64_t value() const { return m_; }  // finite only

    friend constexpr bool operator==(Cutoff a, Cutoff b) = default;

private:
    explicit constexpr Cutoff(std::int64_t m) : m_(m) {}
    std::int64_t m_ = -1;
};

/// Distribution of the waiting time M = |X1 - X2| between the two half-link
/// successes, truncated at the cutoff and renormalized:
///   P(M = 0)    prop. to p/(2-p)
///   P(M = j>=1) prop. to 2*p*q^j/(2-p),  q = 1-p.
class WaitingDistribution {
public:
    WaitingDistribution(double p, Cutoff cutoff);  // throws on p <= 0 or p > 1

    double p() const { return p_; }
    Cutoff cutoff() const { return cutoff_; }

    /// Probability mass at waiting time j (0 beyond a finite cutoff).
    double mass(std::int64_t j) const;

    /// Tabulated masses 0..m; finite cutoffs only.
    std::vector<double> table() const;

private:
    double p_;
    Cutoff cutoff_;
    double norm_;  // sum of unnormalized masses 0..m (1 when unbounded)
};

WaitingDistribution waiting_distribution(double p, Cutoff cutoff);

/// E[exp(-M*t0/tau_coh)] over the truncated, renormalized distribution of M.
/// Unbounded cutoff uses the closed form (p/(2-p)) * (1+q*a)/(1-q*a) with
/// a = exp(-t0/tau_coh).
double dephasing_expectation(double p, Cutoff cutoff, double t0, double tau_coh);

/// Qubits transmitted per channel use under the cutoff-restart protocol:
///   R(m) = p*(2 - p - 2q^(m+1)) / (3 - 2p - 2q^(m+1)) * p_bm,
/// computed as p*(p + 2d)/(1 + 2d) with d = q - q^(m+1) for stability.
/// R(0) = p^2 (no-memory case); unbounded gives p*(2-p)/(3-2p).
double raw_rate(double p, Cutoff cutoff, double p_bm = 1.0);

/// F = (1 + exp(-extra_units*t0/tau_coh) * E_m) / 2, the weight of the
/// correlated Bell component of the effective state.
double effective_fidelity(double p, Cutoff cutoff, double t0, double tau_coh, int extra_units);

/// h(x) = -x log2 x - (1-x) log2 (1-x), with h(0) = h(1) = 0.
double binary_entropy(double x);

/// Asymptotic BB84 fraction max(0, 1 - h(e_x) - h(e_z)); sifting factor is
/// one (biased basis choice).
double secret_key_fraction(double e_x, double e_z);

/// One (distance, cutoff) evaluation. All rates are per channel use; the SKR
/// is additionally per mode (divided by the two optical modes).
struct RatePoint {
    double distance_km = std::numeric_limits<double>::quiet_NaN();
    Cutoff cutoff = Cutoff::unbounded();
    double raw_rate = 0.0;
    double expectation_e = 1.0;
    double fidelity = 1.0;
    double e_x = 0.0;
    double e_z = 0.0;
    double secret_fraction = 1.0;
    double skr_per_use_per_mode = 0.0;
};

RatePoint evaluate(const LinkContext& ctx, Cutoff cutoff,
                   double distance_km = std::numeric_limits<double>::quiet_NaN());

}  // namespace qrlink
