#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "lboost/boosting.hpp"
#include "lboost/lasso.hpp"
#include "lboost/linalg.hpp"
#include "lboost/parallel.hpp"

namespace lboost {

enum class Method {
    lasso,
    forward_stepwise,
    relaxed_lasso,
    lassoed_boosting,
    lassoed_forward_stagewise,
    twiced_lasso,
    twiced_boosting,
};

std::string to_string(Method m);
/// Throws std::invalid_argument for unknown names.
Method parse_method(const std::string& name);
const std::vector<Method>& all_methods();

/// One second-stage candidate. Values are stored only on the entry's active
/// set, in the standardized scale of the training data.
struct Candidate {
    std::size_t stage2_index = 0;
    Vector values;
};

struct FamilyEntry {
    std::size_t q = 0;  // first-stage position (lambda index or boosting step)
    double lambda = std::numeric_limits<double>::quiet_NaN();
    ActiveSet active;
    std::vector<Candidate> candidates;
    bool converged = true;
};

/// Every second-stage candidate handed to tuning, grouped by first-stage entry.
struct PathFamily {
    Method method = Method::lasso;
    std::string stage2_grid;
    Index p = 0;
    Standardization scaling;
    std::vector<FamilyEntry> entries;

    std::size_t candidate_count() const;
    /// Length-p standardized coefficients.
    Vector standardized(const FamilyEntry& e, const Candidate& c) const;
    /// Original-scale coefficients with intercept.
    CoefVector coefficients(const FamilyEntry& e, const Candidate& c) const;
};

struct TwoStageOptions {
    LassoOptions lasso;
    BoostConfig boost;
    std::size_t boost_steps = 50;      // candidates per active set for boosting variants
    std::size_t relax_weights = 50;    // equally spaced weights on [0, 1]
    bool twiced_lasso_recompute_grid = false;  // reuse the first-stage grid verbatim by default
    std::size_t stepwise_max_steps = 50;
    Execution execution = Execution::parallel;
};

/// Unique supports of the lasso path in order of first appearance.
std::vector<PathSupport> distinct_supports(const LassoPath& path);

PathFamily lasso_family(const StandardizedDataset& data, const LassoPath& path);

PathFamily lassoed_boosting(const StandardizedDataset& data, const LassoPath& path, const TwoStageOptions& opts);
PathFamily lassoed_boosting(const StandardizedDataset& data, const LambdaGrid& grid, const TwoStageOptions& opts);

PathFamily lassoed_forward_stagewise(const StandardizedDataset& data, const LassoPath& path, const TwoStageOptions& opts);
PathFamily lassoed_forward_stagewise(const StandardizedDataset& data, const LambdaGrid& grid,
                                     const TwoStageOptions& opts);

/// 0, 1/(count-1), ..., 1
std::vector<double> equally_spaced_weights(std::size_t count);

/// weight * lasso + (1 - weight) * restricted LS, for every lambda of the path.
PathFamily relaxed_lasso(const StandardizedDataset& data, const LassoPath& path, const std::vector<double>& weights);

PathFamily twiced_lasso(const StandardizedDataset& data, const LassoPath& path, const TwoStageOptions& opts);
PathFamily twiced_lasso(const StandardizedDataset& data, const LambdaGrid& grid, const TwoStageOptions& opts);

/// Supports visited by a screening LS-boost run on all non-constant columns,
/// in order of first appearance. Stops once every such column is active.
std::vector<ActiveSet> boosting_screen(const StandardizedDataset& data, const BoostConfig& config);
PathFamily twiced_boosting(const StandardizedDataset& data, const TwoStageOptions& opts);

/// Greedy selection with exact least-squares refits; candidate m is the LS fit
/// on the first m selected variables, candidate 0 the empty model.
PathFamily forward_stepwise(const StandardizedDataset& data, std::size_t max_steps);

/// Fits one method end to end on standardized training data.
PathFamily fit_method(Method method, const StandardizedDataset& data, const LambdaGrid& grid,
                      const TwoStageOptions& opts);

/// Fits several methods, computing the first-stage lasso path once.
std::vector<PathFamily> fit_methods(const std::vector<Method>& methods, const StandardizedDataset& data,
                                    const LambdaGrid& grid, const TwoStageOptions& opts);

}  // namespace lboost
