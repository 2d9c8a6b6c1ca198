#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "lboost/boosting.hpp"
#include "lboost/linalg.hpp"
#include "lboost/parallel.hpp"
#include "lboost/simulation.hpp"
#include "lboost/two_stage.hpp"

namespace lboost {

/// 1 - eps (2 - eps) lambda_pmin / (4 p). Throws std::invalid_argument when
/// eps is outside (0, 1), lambda_pmin < 0 or p < 1.
double gamma(double epsilon, double lambda_pmin, Index p);

/// Scaling of the Gram matrix whose smallest nonzero eigenvalue enters gamma.
/// `normalized` is X'X/n, i.e. unit-length columns for standardized data;
/// `raw` is X'X.
enum class GramScaling { normalized, raw };

struct GammaValue {
    double gamma = 1.0;
    double lambda_pmin = 0.0;  // 0 when the restricted Gram matrix vanishes
    Index size = 0;
};

GammaValue gamma_on_active_set(const Matrix& X, const ActiveSet& subset, double epsilon,
                               GramScaling scaling = GramScaling::normalized);

struct RateCurve {
    std::vector<Index> sizes;
    std::vector<double> gamma_mean, gamma_sd, gamma_min, gamma_max;
    std::vector<double> lambda_mean, lambda_sd;
    double rho = 0.0;
    Index n = 0;
    int replications = 0;
};

struct EigenCurveOptions {
    GramScaling scaling = GramScaling::normalized;
    bool random_subsets = false;  // leading columns by default
    Execution execution = Execution::parallel;
};

/// For every replication a fresh standardized N(0, Sigma) design with
/// max(sizes) columns; gamma and lambda_pmin on subsets of each size.
RateCurve eigen_curve(Index n, double rho, const std::vector<Index>& sizes, double epsilon, int replications,
                      std::uint64_t seed, const EigenCurveOptions& opts = {});

/// Largest |v_i - f_i| over max |v_i|, with f the least-squares monotone fit
/// (pool adjacent violators). Zero for an already monotone sequence.
double isotonic_deviation(const std::vector<double>& values, bool increasing);

struct BoundTrace {
    std::vector<double> lhs;    // ||X beta^k - X beta*||
    std::vector<double> term1;  // ||X beta_LS|| gamma^(k/2)
    double term2 = 0.0;         // sqrt(2 n ||grad L(beta*)|| ||beta_LS - beta*||)
    double gamma = 1.0;

    /// Largest lhs - (term1 + term2); nonpositive when the bound holds.
    double worst_slack() const;
};

/// Both sides of the LS-boost prediction bound at every recorded step.
/// beta_LS is the minimum-norm least-squares fit on the whole subset (its
/// fitted values are unique). The bound needs supp(beta*) inside the subset.
BoundTrace prediction_bound_terms(const Matrix& X, const Vector& y, const Vector& beta_star, const BoostPath& path,
                                  GramScaling scaling = GramScaling::normalized);

struct StagewiseBound {
    std::optional<std::size_t> witness;  // first i in {0..k} meeting the bound
    double bound = 0.0;
    double best_lhs = 0.0;  // min over i <= k of ||X beta^i - X beta*||
};

/// Forward-stagewise counterpart on data with columns of squared length n:
/// sqrt(p) / sqrt(lambda) [ ||X beta_LS||^2 / (e (k+1)) + e ] + term2 with
/// lambda = lambda_pmin(X'X/n) and e = eps sqrt(n), the step measured on
/// unit-length columns.
StagewiseBound fs_bound_terms(const Matrix& X, const Vector& y, const Vector& beta_star, const BoostPath& path,
                              std::size_t k);

struct RateRow {
    Index n = 0;
    double n_inf_loss = 0.0;    // mean over replications of n * min family training loss
    double n_excess = 0.0;      // mean of n * (L(beta*) - min family loss)
    std::size_t completed = 0;
};

struct RateCheck {
    Method method = Method::lassoed_boosting;
    std::vector<RateRow> rows;
    /// max / min of n_inf_loss over the grid.
    double spread() const;
    /// max / min of n_excess over the grid.
    double excess_spread() const;
};

/// Minimum training loss over a fitted family.
double family_inf_loss(const PathFamily& family, const StandardizedDataset& train);

/// Runs `method` on draws of `base` at every n in `ns`, at the first SNR of
/// the config.
RateCheck rate_check(const SimConfig& base, const std::vector<Index>& ns, Method method);

}  // namespace lboost
