#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrlink/rates.hpp"

namespace qrlink {

/// Monte Carlo estimates with standard errors from per-trial variance.
struct McEstimate {
    double raw_rate_hat = 0.0;       // trials / total steps
    double raw_rate_se = 0.0;
    double expectation_hat = 0.0;    // mean exp(-M*t0/tau_coh)
    double expectation_se = 0.0;
    double fidelity_hat = 0.0;       // (1 + mean exp(-(M+extra)*t0/tau_coh))/2
    double fidelity_se = 0.0;
    double mean_attempts_hat = 0.0;  // mean steps per delivered qubit
    double mean_attempts_se = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
};

struct McConfig {
    std::uint64_t trials = 1'000'000;
    std::uint64_t seed = 1;
    std::uint64_t step_budget = 1'000'000'000;
    int threads = 0;  // <= 0: all hardware threads
};

class BudgetExceeded : public std::runtime_error {
public:
    explicit BudgetExceeded(std::uint64_t budget)
        : std::runtime_error("step budget of " + std::to_string(budget) + " exceeded"),
          budget_(budget) {}
    std::uint64_t budget() const { return budget_; }

private:
    std::uint64_t budget_;
};

/// Discrete-event simulation of the cutoff-restart protocol. Each time step
/// both half-links attempt with probability p (one channel use per step); a
/// lone success waits up to `cutoff` further steps for its partner, else both
/// reset. Trials are partitioned into deterministic independent RNG streams,
/// so results are identical for any thread count.
McEstimate simulate_cell(double p, Cutoff cutoff, double t0, double tau_coh, int extra_units,
                         const McConfig& config);

/// Per-trial step counts from a single stream, for distribution-level checks
/// on the simulated process.
std::vector<std::uint64_t> simulate_trial_steps(double p, Cutoff cutoff, std::uint64_t trials,
                                                std::uint64_t seed);

struct McGridPoint {
    double p = 0.0;
    Cutoff cutoff = Cutoff::unbounded();
    double dephasing_ratio = 0.0;  // t0 / tau_coh
};

struct McComparisonRow {
    McGridPoint point;
    McEstimate estimate;
    double analytic_raw_rate = 0.0;
    double analytic_expectation = 0.0;
    double analytic_fidelity = 0.0;
    double z_raw_rate = 0.0;
    double z_expectation = 0.0;
    double z_fidelity = 0.0;
    bool pass = false;  // all |z| < threshold
};

struct McComparisonReport {
    std::vector<McComparisonRow> rows;
    double z_threshold = 4.0;
    bool all_pass = false;
};

/// Runs the simulation on every grid point and reports z-scores
/// (analytic - estimate) / stderr for raw rate, expectation and fidelity.
/// Throws std::invalid_argument on an empty grid.
McComparisonReport compare_with_analytic(std::span<const McGridPoint> grid, int extra_units,
                                         const McConfig& config, double z_threshold = 4.0);

/// The default validation grid: p in {0.05,0.2,0.5,0.9} x m in {0,1,2,5,20}
/// x t0/tau_coh in {0.01,0.3}.
std::vector<McGridPoint> default_validation_grid();

}  // namespace qrlink
