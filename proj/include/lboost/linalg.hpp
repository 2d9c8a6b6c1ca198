#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lboost {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Rows are observations, columns are variables.
struct Dataset {
    Matrix X;
    Vector y;
    std::vector<std::string> column_names;

    Index n() const { return X.rows(); }
    Index p() const { return X.cols(); }

    /// Throws std::invalid_argument when the shape, names or entries are invalid.
    void validate() const;
};

/// Builds a dataset with names x0, x1, ... and validates it.
Dataset make_dataset(Matrix X, Vector y);

struct CoefVector {
    Vector values;
    double intercept = 0.0;
};

/// Column statistics needed to move coefficients between the original and the
/// standardized coordinate systems.
struct Standardization {
    Vector col_means;
    Vector col_scales;         // root-mean-square of the centered column
    double y_mean = 0.0;
    std::vector<bool> constant;

    Index p() const { return col_means.size(); }

    /// Original-scale coefficients (with intercept) from standardized ones.
    CoefVector destandardize(const Vector& beta_std) const;
    /// Inverse of destandardize on the non-constant columns.
    Vector restandardize(const CoefVector& beta) const;
    /// Applies the stored statistics to another dataset with the same columns.
    Dataset apply(const Dataset& data) const;
};

/// Centered y and columns scaled so that <x_j, x_j>/n = 1. Constant columns
/// are left all-zero and flagged.
struct StandardizedDataset {
    Dataset base;
    Standardization scaling;

    Index n() const { return base.n(); }
    Index p() const { return base.p(); }
    const Matrix& X() const { return base.X; }
    const Vector& y() const { return base.y; }
};

StandardizedDataset standardize(const Dataset& data);

/// Strictly increasing list of column indices.
class ActiveSet {
public:
    ActiveSet() = default;
    /// Throws std::invalid_argument unless indices are strictly increasing and in [0, p).
    ActiveSet(std::vector<Index> indices, Index p);

    static ActiveSet all(Index p);
    /// Indices of the exactly-nonzero entries.
    static ActiveSet support(const Vector& beta);

    const std::vector<Index>& indices() const { return indices_; }
    std::size_t size() const { return indices_.size(); }
    bool empty() const { return indices_.empty(); }
    bool contains(Index j) const;
    bool includes(const ActiveSet& other) const;
    Index operator[](std::size_t i) const { return indices_[i]; }

    friend bool operator==(const ActiveSet&, const ActiveSet&) = default;

private:
    std::vector<Index> indices_;
};

/// Copies the listed columns.
Matrix select_columns(const Matrix& X, const ActiveSet& subset);
/// Scatters subset coefficients into a length-p vector.
Vector embed(const Vector& sub_values, const ActiveSet& subset, Index p);

/// (1/2n) ||y - X beta - intercept||^2
double loss(const Dataset& data, const CoefVector& beta);
double loss(const Matrix& X, const Vector& y, const Vector& beta);

/// -X^T (y - X beta - intercept) / n
Vector loss_gradient(const Dataset& data, const CoefVector& beta);
Vector loss_gradient(const Matrix& X, const Vector& y, const Vector& beta);

/// Minimum-norm least squares on the subset columns, zeros elsewhere.
/// The intercept is left at zero.
CoefVector ls_solve(const Dataset& data, const ActiveSet& subset);
Vector ls_solve(const Matrix& X, const Vector& y, const ActiveSet& subset);

/// Smallest eigenvalue above dim * eps * lambda_max. Empty when every
/// eigenvalue is below that threshold (numerically zero matrix).
std::optional<double> min_nonzero_eigenvalue(const Matrix& M);

/// Pairwise summation; the result does not depend on how work was scheduled.
double pairwise_sum(std::span<const double> values);

}  // namespace lboost
