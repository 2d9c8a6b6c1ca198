#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lboost/linalg.hpp"

namespace lboost {

/// Strictly decreasing positive penalties lambda_1 > ... > lambda_Q with
/// lambda_1 <= lambda0.
struct LambdaGrid {
    std::vector<double> values;
    double lambda0 = 0.0;

    std::size_t size() const { return values.size(); }
    void validate() const;
};

struct LassoOptions {
    /// Sweeps stop once the largest coefficient change is below tol and the
    /// KKT conditions hold to tol.
    double tol = 1e-7;
    int max_sweeps = 100000;
    /// Records the objective after every sweep (for auditing monotonicity).
    bool trace_objective = false;
};

struct LassoPath {
    LambdaGrid grid;
    std::vector<Vector> coefs;          // standardized scale, one per lambda
    std::vector<ActiveSet> active;
    std::vector<bool> converged;
    std::vector<int> sweeps;
    std::vector<std::vector<double>> objective_trace;  // filled when requested

    std::size_t size() const { return coefs.size(); }
};

/// max_j |<x_j, y>| / n
double lambda_max(const Matrix& X, const Vector& y);
double lambda_max(const StandardizedDataset& data);

/// `count` log-equally-spaced values from lambda0 down to lambda0 * min_ratio.
LambdaGrid make_lambda_grid(double lambda0, std::size_t count, double min_ratio);
/// 1e-4 when n >= p, 1e-2 otherwise.
double default_min_ratio(Index n, Index p);

/// (1/2n)||y - X beta||^2 + lam * ||beta||_1
double lasso_objective(const Matrix& X, const Vector& y, const Vector& beta, double lam);

/// Cyclic coordinate descent along the grid with warm starts. Columns need
/// not be unit-scaled; all-zero columns stay at zero. Penalties may be zero.
LassoPath fit_lasso_path(const Matrix& X, const Vector& y, std::span<const double> lambdas,
                         const LassoOptions& opts = {});
LassoPath fit_lasso_path(const StandardizedDataset& data, const LambdaGrid& grid, const LassoOptions& opts = {});

struct KktViolation {
    Index index;
    double correlation;  // <x_j, y - X beta> / n
    double lambda;
};

/// Empty iff beta satisfies the lasso optimality conditions at `lam` within tol.
std::vector<KktViolation> kkt_check(const Matrix& X, const Vector& y, const Vector& beta, double lam, double tol);
std::vector<KktViolation> kkt_check(const StandardizedDataset& data, const Vector& beta, double lam, double tol);

struct PathSupport {
    std::size_t q;  // position in the grid
    double lambda;
    ActiveSet set;
};

/// Supports in grid order; with dedupe, consecutive repeats keep the first lambda.
std::vector<PathSupport> active_sets(const LassoPath& path, bool dedupe);

}  // namespace lboost
