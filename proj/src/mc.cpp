#include "qrlink/mc.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "parallel.hpp"

namespace qrlink {

namespace {

constexpr std::uint64_t kPartitionTrials = 1 << 16;

struct PartitionStats {
    double sum_steps = 0.0;
    double sum_steps_sq = 0.0;
    double sum_weight = 0.0;  // exp(-M*t0/tau_coh)
    double sum_weight_sq = 0.0;
    std::uint64_t trials = 0;

    void merge(const PartitionStats& other) {
        sum_steps += other.sum_steps;
        sum_steps_sq += other.sum_steps_sq;
        sum_weight += other.sum_weight;
        sum_weight_sq += other.sum_weight_sq;
        trials += other.trials;
    }
};

// One stream per partition, derived from (seed, partition); reproducible
// for any thread count because partition boundaries are fixed.
std::mt19937_64 partition_rng(std::uint64_t seed, std::uint64_t partition) {
    std::seed_seq sequence{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                           static_cast<std::uint32_t>(partition),
                           static_cast<std::uint32_t>(partition >> 32)};
    return std::mt19937_64(sequence);
}

inline bool bernoulli(std::mt19937_64& rng, double p) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53 < p;
}

struct TrialOutcome {
    std::uint64_t steps = 0;
    std::int64_t waiting_time = 0;  // M of the final, successful round
};

TrialOutcome run_trial(std::mt19937_64& rng, double p, bool bounded, std::int64_t m) {
    std::uint64_t steps = 0;
    std::int64_t waited = -1;  // -1: no memory loaded yet
    std::int64_t waiting_time = -1;
    while (waiting_time < 0) {
        ++steps;
        const bool first = bernoulli(rng, p);
        const bool second = bernoulli(rng, p);
        if (waited < 0) {
            if (first && second) {
                waiting_time = 0;
            } else if (first || second) {
                // One side locks; with a zero cutoff it resets at once.
                if (!bounded || m > 0) waited = 0;
            }
        } else {
            // The locked side keeps firing but its attempts are ignored.
            ++waited;
            if (first) {
                waiting_time = waited;
            } else if (bounded && waited >= m) {
                waited = -1;  // storage limit exceeded: both reset
            }
        }
    }
    return {steps, waiting_time};
}

PartitionStats run_partition(std::uint64_t seed, std::uint64_t partition, std::uint64_t trials,
                             double p, Cutoff cutoff, double dephasing_ratio) {
    std::mt19937_64 rng = partition_rng(seed, partition);
    const bool bounded = !cutoff.is_unbounded();
    const std::int64_t m = bounded ? cutoff.value() : 0;

    PartitionStats stats;
    stats.trials = trials;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        const TrialOutcome outcome = run_trial(rng, p, bounded, m);
        const double weight = std::exp(-static_cast<double>(outcome.waiting_time) * dephasing_ratio);
        const double steps_d = static_cast<double>(outcome.steps);
        stats.sum_steps += steps_d;
        stats.sum_steps_sq += steps_d * steps_d;
        stats.sum_weight += weight;
        stats.sum_weight_sq += weight * weight;
    }
    return stats;
}

}  // namespace

McEstimate simulate_cell(double p, Cutoff cutoff, double t0, double tau_coh, int extra_units,
                         const McConfig& config) {
    if (config.trials < 1) throw std::invalid_argument("trials must be at least 1");
    const double analytic_rate = raw_rate(p, cutoff);  // validates p as well
    if (extra_units < 0) throw std::invalid_argument("extra_units must be non-negative");
    if (!(t0 > 0.0) || !(tau_coh > 0.0))
        throw std::invalid_argument("t0 and tau_coh must be positive");

    // The budget gates expected work, not a lucky draw: mean steps per trial
    // is 1/R(m).
    const double expected_steps = static_cast<double>(config.trials) / analytic_rate;
    if (expected_steps > static_cast<double>(config.step_budget))
        throw BudgetExceeded(config.step_budget);

    const double ratio = t0 / tau_coh;
    const std::uint64_t partitions = (config.trials + kPartitionTrials - 1) / kPartitionTrials;
    std::vector<PartitionStats> partial(partitions);
    detail::parallel_for(partitions, config.threads, [&](std::size_t i) {
        const std::uint64_t begin = static_cast<std::uint64_t>(i) * kPartitionTrials;
        const std::uint64_t count = std::min<std::uint64_t>(kPartitionTrials, config.trials - begin);
        partial[i] = run_partition(config.seed, i, count, p, cutoff, ratio);
    });

    PartitionStats total;
    for (const PartitionStats& stats : partial) total.merge(stats);  // fixed merge order

    const double n = static_cast<double>(total.trials);
    const double mean_steps = total.sum_steps / n;
    const double mean_weight = total.sum_weight / n;
    // A single trial has no variance estimate: report an unbounded interval.
    const double unknown = std::numeric_limits<double>::infinity();
    const double var_steps =
        n > 1 ? std::max(0.0, (total.sum_steps_sq - n * mean_steps * mean_steps) / (n - 1.0))
              : unknown;
    const double var_weight =
        n > 1 ? std::max(0.0, (total.sum_weight_sq - n * mean_weight * mean_weight) / (n - 1.0))
              : unknown;
    const double se_mean_steps = std::sqrt(var_steps / n);
    const double se_mean_weight = std::sqrt(var_weight / n);
    const double constant = std::exp(-static_cast<double>(extra_units) * ratio);

    McEstimate estimate;
    estimate.trials = total.trials;
    estimate.seed = config.seed;
    estimate.mean_attempts_hat = mean_steps;
    estimate.mean_attempts_se = se_mean_steps;
    estimate.raw_rate_hat = 1.0 / mean_steps;
    // Delta method: se(1/x) = se(x)/x^2.
    estimate.raw_rate_se = se_mean_steps / (mean_steps * mean_steps);
    estimate.expectation_hat = mean_weight;
    estimate.expectation_se = se_mean_weight;
    estimate.fidelity_hat = 0.5 * (1.0 + constant * mean_weight);
    estimate.fidelity_se = 0.5 * constant * se_mean_weight;
    return estimate;
}

std::vector<std::uint64_t> simulate_trial_steps(double p, Cutoff cutoff, std::uint64_t trials,
                                                std::uint64_t seed) {
    raw_rate(p, cutoff);  // validates p
    std::mt19937_64 rng = partition_rng(seed, 0);
    const bool bounded = !cutoff.is_unbounded();
    const std::int64_t m = bounded ? cutoff.value() : 0;
    std::vector<std::uint64_t> steps;
    steps.reserve(trials);
    for (std::uint64_t trial = 0; trial < trials; ++trial)
        steps.push_back(run_trial(rng, p, bounded, m).steps);
    return steps;
}

namespace {

double z_score(double analytic, double estimate, double stderr_value) {
    if (stderr_value > 0.0) return (analytic - estimate) / stderr_value;
    return analytic == estimate ? 0.0 : std::numeric_limits<double>::infinity();
}

}  // namespace

McComparisonReport compare_with_analytic(std::span<const McGridPoint> grid, int extra_units,
                                         const McConfig& config, double z_threshold) {
    if (grid.empty()) throw std::invalid_argument("comparison grid must be non-empty");

    McComparisonReport report;
    report.z_threshold = z_threshold;
    report.all_pass = true;
    for (const McGridPoint& point : grid) {
        McComparisonRow row;
        row.point = point;
        // t0/tau_coh only enters through the ratio; pin tau_coh = 1.
        row.estimate =
            simulate_cell(point.p, point.cutoff, point.dephasing_ratio, 1.0, extra_units, config);
        row.analytic_raw_rate = raw_rate(point.p, point.cutoff);
        row.analytic_expectation =
            dephasing_expectation(point.p, point.cutoff, point.dephasing_ratio, 1.0);
        row.analytic_fidelity =
            effective_fidelity(point.p, point.cutoff, point.dephasing_ratio, 1.0, extra_units);
        row.z_raw_rate = z_score(row.analytic_raw_rate, row.estimate.raw_rate_hat,
                                 row.estimate.raw_rate_se);
        row.z_expectation = z_score(row.analytic_expectation, row.estimate.expectation_hat,
                                    row.estimate.expectation_se);
        row.z_fidelity =
            z_score(row.analytic_fidelity, row.estimate.fidelity_hat, row.estimate.fidelity_se);
        row.pass = std::abs(row.z_raw_rate) < z_threshold &&
                   std::abs(row.z_expectation) < z_threshold &&
                   std::abs(row.z_fidelity) < z_threshold;
        report.all_pass = report.all_pass && row.pass;
        report.rows.push_back(row);
    }
    return report;
}

std::vector<McGridPoint> default_validation_grid() {
    std::vector<McGridPoint> grid;
    for (double p : {0.05, 0.2, 0.5, 0.9})
        for (std::int64_t m : {0, 1, 2, 5, 20})
            for (double ratio : {0.01, 0.3})
                grid.push_back({p, Cutoff::finite(m), ratio});
    return grid;
}

}  // namespace qrlink
