#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "lboost/linalg.hpp"

namespace lboost {

enum class StopRule { fixed, aicc, aicc_doubled };

/// Degrees of freedom fed to the corrected AIC. `automatic` is the trace of
/// the boosting operator for LS-boost and the number of distinct selected
/// variables for forward stagewise (which is not a linear smoother).
enum class DfMode { automatic, operator_trace, active_count };

enum class BoostEngine { ls_boost, forward_stagewise };

struct BoostConfig {
    double learning_rate = 0.01;
    int max_iter = 0;  // 0 means 10 * n
    StopRule stop_rule = StopRule::aicc_doubled;
    int aicc_multiplier = 2;
    DfMode df_mode = DfMode::automatic;

    void validate() const;
    int resolved_max_iter(Index n) const { return max_iter > 0 ? max_iter : static_cast<int>(10 * n); }
};

struct BoostStep {
    Index column;      // column of the full design
    double increment;  // change applied to that coefficient
};

struct BoostPath {
    BoostEngine engine = BoostEngine::ls_boost;
    double learning_rate = 0.0;
    Index p = 0;
    ActiveSet subset;
    std::vector<BoostStep> steps;
    std::vector<double> rss;  // rss[k] = ||y - X beta^k||^2, rss[0] = ||y||^2
    std::vector<double> df;   // df[k], present when an AICc rule ran
    std::size_t aicc_index = 0;
    std::size_t stop_index = 0;
    bool stalled = false;  // zero gradient reached

    std::size_t steps_taken() const { return steps.size(); }
    Vector coefficients_at(std::size_t k) const;
    /// Coefficient vectors at the requested (nondecreasing) step counts.
    std::vector<Vector> coefficients_at(std::span<const std::size_t> ks) const;
};

/// Extra termination test, consulted after every step.
using BoostHalt = std::function<bool(const BoostPath&)>;

BoostPath ls_boost(const Matrix& X, const Vector& y, const ActiveSet& subset, const BoostConfig& config);
BoostPath ls_boost(const StandardizedDataset& data, const ActiveSet& subset, const BoostConfig& config);

BoostPath forward_stagewise(const Matrix& X, const Vector& y, const ActiveSet& subset, const BoostConfig& config);
BoostPath forward_stagewise(const StandardizedDataset& data, const ActiveSet& subset, const BoostConfig& config);

/// Runs `engine` with StopRule::fixed semantics until max_iter, a zero
/// gradient, or `halt` returns true.
BoostPath run_boost_until(BoostEngine engine, const Matrix& X, const Vector& y, const ActiveSet& subset,
                          double learning_rate, int max_iter, const BoostHalt& halt);

/// trace(B_k) for B_k = B_{k-1} + eps * H_{j_k} (I - B_{k-1}), B_0 = 0, with
/// H_j the projection onto column j. Computed in the p_q x p_q coordinates
/// of the subset, never forming an n x n matrix.
std::vector<double> boosting_df(const Matrix& X, const BoostPath& path);
std::vector<double> boosting_df(const StandardizedDataset& data, const BoostPath& path);

/// log(rss_k / n) + (1 + df_k/n) / (1 - (df_k + 2)/n); NaN where df_k + 2 >= n.
std::vector<double> aicc_curve(std::span<const double> rss, std::span<const double> df, Index n);

/// argmin over k >= 1 of the AICc curve, truncated at the first k with
/// df_k + 2 >= n. Returns 0 when no step is admissible.
std::size_t aicc_stop(std::span<const double> rss, std::span<const double> df, Index n);
std::size_t aicc_stop(const BoostPath& path, Index n);

/// `count` equally spaced step indices on [1, stop], rounded half-up and
/// deduplicated. Empty when stop == 0.
std::vector<std::size_t> subsample_steps(std::size_t stop, std::size_t count);

}  // namespace lboost
