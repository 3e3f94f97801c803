#include "qrlink/cutoff.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "parallel.hpp"

namespace qrlink {

namespace {

double skr_at(const LinkContext& ctx, Cutoff cutoff) {
    return evaluate(ctx, cutoff).skr_per_use_per_mode;
}

double fidelity_at(const LinkContext& ctx, Cutoff cutoff) {
    return effective_fidelity(ctx.p, cutoff, ctx.t0_ms, ctx.tau_coh_ms, ctx.extra_units);
}

}  // namespace

CutoffChoice max_cutoff_for_fidelity(const LinkContext& ctx, double f_min) {
    if (!(f_min > 0.5) || !(f_min < 1.0))
        throw std::invalid_argument("f_min must lie in (1/2, 1)");

    CutoffChoice choice;
    choice.criterion = CutoffCriterion::fidelity_floor;

    const double f0 = fidelity_at(ctx, Cutoff::finite(0));
    if (f0 < f_min) {
        choice.m = std::nullopt;  // even the constant dephasing breaks the floor
        choice.achieved_value = f0;
        return choice;
    }
    const double f_unbounded = fidelity_at(ctx, Cutoff::unbounded());
    if (f_unbounded >= f_min) {
        choice.m = Cutoff::unbounded();
        choice.achieved_value = f_unbounded;
        return choice;
    }

    // F(m) is non-increasing in m, so the maximal admissible cutoff is the
    // boundary of a monotone predicate: double, then bisect.
    std::int64_t lo = 0;
    std::int64_t hi = 1;
    constexpr std::int64_t kSearchCeiling = std::int64_t{1} << 50;
    while (fidelity_at(ctx, Cutoff::finite(hi)) >= f_min) {
        lo = hi;
        if (hi >= kSearchCeiling) {
            // Indistinguishable from the unbounded limit at double precision.
            choice.m = Cutoff::unbounded();
            choice.achieved_value = f_unbounded;
            return choice;
        }
        hi *= 2;
    }
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (fidelity_at(ctx, Cutoff::finite(mid)) >= f_min)
            lo = mid;
        else
            hi = mid;
    }
    choice.m = Cutoff::finite(lo);
    choice.achieved_value = fidelity_at(ctx, Cutoff::finite(lo));
    return choice;
}

CutoffChoice optimal_cutoff_for_skr(const LinkContext& ctx, std::int64_t m_max_search) {
    if (m_max_search < 1) throw std::invalid_argument("m_max_search must be at least 1");

    const double p = ctx.p;
    const double q = 1.0 - p;
    const double r = ctx.dephasing_ratio();
    const double a = std::exp(-r);
    const double qa = q * a;
    const double constant = std::exp(-static_cast<double>(ctx.extra_units) * r);

    // Incremental scan over m: running geometric sums give E_m and R(m) in
    // O(1) per step. skr rises to a single peak and then relaxes toward the
    // unbounded limit, so the scan stops once it is far past the best m
    // (by doubling and by the R-saturation scale of a few 1/p).
    std::int64_t best_m = 0;
    double qpow = 1.0;   // q^m
    double qapow = 1.0;  // (qa)^m
    double sq = 0.0;     // sum_{j=1..m} q^j
    double sqa = 0.0;    // sum_{j=1..m} (qa)^j
    double best_value;
    {
        const double e0 = std::clamp(0.5 * (1.0 - constant), 0.0, 0.5);
        best_value = (p * p * ctx.p_bm / 2.0) * secret_key_fraction(e0, 0.0);
    }
    const double patience_scale = std::min(2.0 / p, static_cast<double>(m_max_search));
    for (std::int64_t m = 1; m <= m_max_search; ++m) {
        qpow *= q;
        qapow *= qa;
        if (qpow == 0.0) break;  // sums are frozen; nothing further can change
        sq += qpow;
        sqa += qapow;
        const double expectation = (1.0 + 2.0 * sqa) / (1.0 + 2.0 * sq);
        const double d = p * sq;  // q - q^(m+1) without cancellation
        const double rate = p * (p + 2.0 * d) / (1.0 + 2.0 * d) * ctx.p_bm;
        const double e_x = std::clamp(0.5 * (1.0 - constant * expectation), 0.0, 0.5);
        const double value = (rate / 2.0) * secret_key_fraction(e_x, 0.0);
        if (value > best_value) {
            best_value = value;
            best_m = m;
        }
        const double limit = std::max(2.0 * static_cast<double>(best_m) + 1000.0,
                                      static_cast<double>(best_m) + patience_scale + 1000.0);
        if (static_cast<double>(m) > limit) break;
    }

    // Final selection with the closed forms, so the reported value matches
    // evaluate() exactly. Unbounded wins ties against any finite candidate:
    // where the scan only plateaus, the supremum lies at the limit.
    CutoffChoice choice;
    choice.criterion = CutoffCriterion::skr_optimal;
    const double at_zero = skr_at(ctx, Cutoff::finite(0));
    const double at_best = skr_at(ctx, Cutoff::finite(best_m));
    const double at_unbounded = skr_at(ctx, Cutoff::unbounded());
    const double finite_value = std::max(at_zero, at_best);
    const std::int64_t finite_m = at_best > at_zero ? best_m : 0;
    if (at_unbounded >= finite_value) {
        choice.m = Cutoff::unbounded();
        choice.achieved_value = at_unbounded;
    } else {
        choice.m = Cutoff::finite(finite_m);
        choice.achieved_value = finite_value;
    }
    return choice;
}

namespace {

// Worst-case ratio of skr(ctx, m) to the per-distance optimum over the grid.
double range_objective(std::span<const LinkContext> contexts,
                       std::span<const CutoffChoice> optima, Cutoff candidate) {
    double worst = 1.0;
    for (std::size_t i = 0; i < contexts.size(); ++i) {
        const double best = optima[i].achieved_value;
        if (!(best > 0.0)) continue;  // a dead point constrains nothing
        worst = std::min(worst, skr_at(contexts[i], candidate) / best);
    }
    return worst;
}

}  // namespace

RangeCutoffResult fixed_cutoff_over_range(std::span<const LinkContext> contexts,
                                          std::int64_t m_max_search, int threads) {
    if (contexts.empty()) throw std::invalid_argument("distance grid must be non-empty");

    RangeCutoffResult result;
    result.per_distance.resize(contexts.size());
    detail::parallel_for(contexts.size(), threads, [&](std::size_t i) {
        result.per_distance[i] = optimal_cutoff_for_skr(contexts[i], m_max_search);
    });

    // Candidates: every per-distance optimum, a geometric fill between the
    // smallest and largest of them, and the unbounded limit.
    std::set<std::int64_t> finite_candidates{0};
    for (const CutoffChoice& opt : result.per_distance) {
        if (opt.m && !opt.m->is_unbounded()) finite_candidates.insert(opt.m->value());
    }
    {
        const std::int64_t low = *finite_candidates.begin();
        const std::int64_t high = *finite_candidates.rbegin();
        for (double mark = std::max<double>(1.0, static_cast<double>(low));
             mark < static_cast<double>(high); mark *= 1.05)
            finite_candidates.insert(static_cast<std::int64_t>(mark));
    }

    double best_objective = range_objective(contexts, result.per_distance, Cutoff::unbounded());
    std::optional<Cutoff> best = Cutoff::unbounded();
    for (std::int64_t m : finite_candidates) {
        const double objective = range_objective(contexts, result.per_distance, Cutoff::finite(m));
        if (objective > best_objective) {
            best_objective = objective;
            best = Cutoff::finite(m);
        }
    }

    // Deterministic pattern search around the best finite candidate.
    if (!best->is_unbounded()) {
        std::int64_t center = best->value();
        std::int64_t step = std::max<std::int64_t>(1, center / 64);
        while (step >= 1) {
            const double up = range_objective(contexts, result.per_distance, Cutoff::finite(center + step));
            if (up > best_objective) {
                center += step;
                best_objective = up;
                continue;
            }
            if (center >= step) {
                const double down =
                    range_objective(contexts, result.per_distance, Cutoff::finite(center - step));
                if (down > best_objective) {
                    center -= step;
                    best_objective = down;
                    continue;
                }
            }
            step /= 2;
        }
        best = Cutoff::finite(center);
    }

    result.fixed.criterion = CutoffCriterion::fixed_over_range;
    result.fixed.m = best;
    result.fixed.achieved_value = best_objective;
    return result;
}

}  // namespace qrlink
