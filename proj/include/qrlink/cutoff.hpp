#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qrlink/rates.hpp"

namespace qrlink {

enum class CutoffCriterion { fidelity_floor, skr_optimal, fixed_over_range };

struct CutoffChoice {
    // nullopt means no cutoff satisfies the criterion (even m = 0 fails).
    std::optional<Cutoff> m;
    CutoffCriterion criterion = CutoffCriterion::skr_optimal;
    // Fidelity at the choice, SKR at the choice, or the worst-case ratio to
    // the per-distance optimum, depending on the criterion.
    double achieved_value = 0.0;
};

inline constexpr std::int64_t kDefaultCutoffSearchCap = 1'000'000;

/// Largest cutoff (possibly unbounded) whose effective fidelity still meets
/// f_min; nullopt if even m = 0 falls below the floor. Uses the monotone
/// decrease of E_m in m.
CutoffChoice max_cutoff_for_fidelity(const LinkContext& ctx, double f_min);

/// Cutoff in {0..m_max_search, unbounded} maximizing the SKR. Ties between
/// finite candidates break toward smaller m; unbounded is returned whenever
/// no finite candidate is strictly better (the supremum of a plateau that
/// only rises toward the limit lies at unbounded).
CutoffChoice optimal_cutoff_for_skr(const LinkContext& ctx,
                                    std::int64_t m_max_search = kDefaultCutoffSearchCap);

struct RangeCutoffResult {
    CutoffChoice fixed;                       // single cutoff for the range
    std::vector<CutoffChoice> per_distance;   // SKR-optimal per grid point
};

/// Single cutoff for a whole distance range, maximizing the minimum over the
/// grid of skr(L, m) / skr(L, m*_L) (worst-case ratio to the per-distance
/// optimum). `threads` <= 0 means all hardware threads.
RangeCutoffResult fixed_cutoff_over_range(std::span<const LinkContext> contexts,
                                          std::int64_t m_max_search = kDefaultCutoffSearchCap,
                                          int threads = 0);

}  // namespace qrlink
