#include "lboost/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lboost {

void LambdaGrid::validate() const {
    if (values.empty()) throw std::invalid_argument("lambda grid: empty");
    if (values.front() > lambda0) throw std::invalid_argument("lambda grid: first value exceeds lambda0");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0)) throw std::invalid_argument("lambda grid: values must be positive");
        if (i > 0 && !(values[i] < values[i - 1])) throw std::invalid_argument("lambda grid: values must strictly decrease");
    }
}

double lambda_max(const Matrix& X, const Vector& y) {
    if (X.cols() == 0) throw std::invalid_argument("lambda_max: no columns");
    return (X.transpose() * y).cwiseAbs().maxCoeff() / static_cast<double>(X.rows());
}

double lambda_max(const StandardizedDataset& data) { return lambda_max(data.X(), data.y()); }

LambdaGrid make_lambda_grid(double lambda0, std::size_t count, double min_ratio) {
    if (!(lambda0 > 0.0)) throw std::invalid_argument("make_lambda_grid: lambda0 must be positive");
    if (count == 0) throw std::invalid_argument("make_lambda_grid: count must be positive");
    if (!(min_ratio > 0.0 && min_ratio < 1.0)) throw std::invalid_argument("make_lambda_grid: min_ratio must lie in (0,1)");
    LambdaGrid grid;
    grid.lambda0 = lambda0;
    grid.values.resize(count);
    grid.values[0] = lambda0;
    const double log_ratio = std::log(min_ratio);
    for (std::size_t i = 1; i < count; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(count - 1);
        grid.values[i] = lambda0 * std::exp(t * log_ratio);
    }
    return grid;
}

double default_min_ratio(Index n, Index p) { return n >= p ? 1e-4 : 1e-2; }

double lasso_objective(const Matrix& X, const Vector& y, const Vector& beta, double lam) {
    return loss(X, y, beta) + lam * beta.lpNorm<1>();
}

namespace {

double soft_threshold(double z, double lam) {
    if (z > lam) return z - lam;
    if (z < -lam) return z + lam;
    return 0.0;
}

}  // namespace

std::vector<KktViolation> kkt_check(const Matrix& X, const Vector& y, const Vector& beta, double lam, double tol) {
    if (beta.size() != X.cols() || y.size() != X.rows()) throw std::invalid_argument("kkt_check: dimension mismatch");
    const Vector corr = X.transpose() * (y - X * beta) / static_cast<double>(X.rows());
    std::vector<KktViolation> out;
    for (Index j = 0; j < beta.size(); ++j) {
        const bool bad = beta(j) != 0.0 ? std::abs(corr(j) - lam * (beta(j) > 0 ? 1.0 : -1.0)) > tol
                                        : std::abs(corr(j)) > lam + tol;
        if (bad) out.push_back({j, corr(j), lam});
    }
    return out;
}

std::vector<KktViolation> kkt_check(const StandardizedDataset& data, const Vector& beta, double lam, double tol) {
    return kkt_check(data.X(), data.y(), beta, lam, tol);
}

LassoPath fit_lasso_path(const Matrix& X, const Vector& y, std::span<const double> lambdas, const LassoOptions& opts) {
    if (y.size() != X.rows()) throw std::invalid_argument("fit_lasso_path: dimension mismatch");
    if (!(opts.tol > 0.0)) throw std::invalid_argument("fit_lasso_path: tol must be positive");
    const Index n = X.rows(), p = X.cols();
    const double dn = static_cast<double>(n);

    Vector diag(p);
    for (Index j = 0; j < p; ++j) diag(j) = X.col(j).squaredNorm() / dn;

    LassoPath path;
    path.grid.values.assign(lambdas.begin(), lambdas.end());
    path.grid.lambda0 = p > 0 ? lambda_max(X, y) : 0.0;

    Vector beta = Vector::Zero(p);
    for (double lam : lambdas) {
        if (lam < 0.0) throw std::invalid_argument("fit_lasso_path: negative penalty");
        Vector r = y - X * beta;
        int sweeps = 0;
        bool converged = false;
        std::vector<double> trace;

        // One cyclic pass over `cols` in ascending order; returns the largest change.
        auto sweep = [&](bool active_only) {
            double max_change = 0.0;
            for (Index j = 0; j < p; ++j) {
                if (diag(j) == 0.0 || (active_only && beta(j) == 0.0)) continue;
                const double z = X.col(j).dot(r) / dn + diag(j) * beta(j);
                const double updated = soft_threshold(z, lam) / diag(j);
                const double delta = updated - beta(j);
                if (delta != 0.0) {
                    r.noalias() -= delta * X.col(j);
                    beta(j) = updated;
                    max_change = std::max(max_change, std::abs(delta));
                }
            }
            ++sweeps;
            if (opts.trace_objective) trace.push_back(lasso_objective(X, y, beta, lam));
            return max_change;
        };

        while (sweeps < opts.max_sweeps) {
            const double full_change = sweep(false);
            if (full_change < opts.tol) {
                r = y - X * beta;
                if (kkt_check(X, y, beta, lam, opts.tol).empty()) {
                    converged = true;
                    break;
                }
            }
            while (sweeps < opts.max_sweeps && sweep(true) >= opts.tol) {
            }
        }

        path.coefs.push_back(beta);
        path.active.push_back(ActiveSet::support(beta));
        path.converged.push_back(converged);
        path.sweeps.push_back(sweeps);
        if (opts.trace_objective) path.objective_trace.push_back(std::move(trace));
    }
    return path;
}

LassoPath fit_lasso_path(const StandardizedDataset& data, const LambdaGrid& grid, const LassoOptions& opts) {
    grid.validate();
    LassoPath path = fit_lasso_path(data.X(), data.y(), grid.values, opts);
    path.grid = grid;
    return path;
}

std::vector<PathSupport> active_sets(const LassoPath& path, bool dedupe) {
    std::vector<PathSupport> out;
    for (std::size_t q = 0; q < path.size(); ++q) {
        if (dedupe && !out.empty() && out.back().set == path.active[q]) continue;
        out.push_back({q, path.grid.values[q], path.active[q]});
    }
    return out;
}

}  // namespace lboost
