#pragma once

#include <cstddef>

#include "lboost/linalg.hpp"
#include "lboost/two_stage.hpp"

namespace lboost {

struct TuningSelection {
    Method method = Method::lasso;
    std::size_t entry = 0;         // position in PathFamily::entries
    std::size_t q = 0;             // first-stage index of that entry
    std::size_t stage2_index = 0;  // second-stage index within the entry
    CoefVector coef;               // original scale
    double criterion = 0.0;        // validation MSE or oracle risk, whichever selected it
    std::size_t nnz = 0;
};

/// Candidate with the smallest ||y_val - X_val beta - b||^2 / n_val. Ties go to
/// the smaller nnz, then the smaller q, then the smaller second-stage index.
/// Throws std::invalid_argument for an empty family or a column mismatch.
TuningSelection validate_select(const PathFamily& family, const Dataset& val);

/// Candidate with the smallest (beta - beta*)' Sigma (beta - beta*); same ties.
TuningSelection oracle_select(const PathFamily& family, const CoefVector& beta_star, const Matrix& sigma);

/// (b - beta*)' Sigma (b - beta*) on the slope coefficients.
double excess_risk(const Vector& beta_hat, const Vector& beta_star, const Matrix& sigma);
/// Throws std::domain_error when beta*' Sigma beta* is zero.
double relative_risk(const Vector& beta_hat, const Vector& beta_star, const Matrix& sigma);
double relative_test_error(const Vector& beta_hat, const Vector& beta_star, const Matrix& sigma, double sigma2);
double pve(const Vector& beta_hat, const Vector& beta_star, const Matrix& sigma, double sigma2);

struct NonzeroCount {
    std::size_t nnz = 0;
    std::size_t correct = 0;  // nonzero in both vectors
};
/// Exact zero test, no threshold.
NonzeroCount nnz_and_correct(const Vector& beta_hat, const Vector& beta_star);

/// Mean squared prediction error on `test`, intercept included.
double mspe(const CoefVector& beta, const Dataset& test);

struct MetricsRecord {
    double rr = 0.0;
    double rte = 0.0;
    double pve = 0.0;
    std::size_t nnz = 0;
    std::size_t correct_nonzeros = 0;
};

MetricsRecord evaluate_metrics(const Vector& beta_hat, const Vector& beta_star, const Matrix& sigma, double sigma2);

}  // namespace lboost
