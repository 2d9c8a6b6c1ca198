#include "lboost/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace lboost {

void Dataset::validate() const {
    if (X.rows() < 1 || X.cols() < 1) throw std::invalid_argument("dataset: need n >= 1 and p >= 1");
    if (y.size() != X.rows()) throw std::invalid_argument("dataset: y length differs from the number of rows of X");
    if (static_cast<Index>(column_names.size()) != X.cols())
        throw std::invalid_argument("dataset: column_names must have exactly p entries");
    std::unordered_set<std::string> seen;
    for (const auto& name : column_names)
        if (!seen.insert(name).second) throw std::invalid_argument("dataset: duplicate column name '" + name + "'");
    if (!X.allFinite()) throw std::invalid_argument("dataset: X has non-finite entries");
    if (!y.allFinite()) throw std::invalid_argument("dataset: y has non-finite entries");
}

Dataset make_dataset(Matrix X, Vector y) {
    Dataset d{std::move(X), std::move(y), {}};
    d.column_names.reserve(static_cast<std::size_t>(d.X.cols()));
    for (Index j = 0; j < d.X.cols(); ++j) d.column_names.push_back("x" + std::to_string(j));
    d.validate();
    return d;
}

StandardizedDataset standardize(const Dataset& data) {
    data.validate();
    const Index n = data.n(), p = data.p();
    if (n < 2) throw std::invalid_argument("standardize: need n >= 2");

    StandardizedDataset out;
    out.base.column_names = data.column_names;
    out.base.X.resize(n, p);
    auto& s = out.scaling;
    s.col_means.resize(p);
    s.col_scales.resize(p);
    s.constant.assign(static_cast<std::size_t>(p), false);

    const double dn = static_cast<double>(n);
    for (Index j = 0; j < p; ++j) {
        const double mean = data.X.col(j).sum() / dn;
        Vector centered = data.X.col(j).array() - mean;
        const double scale = std::sqrt(centered.squaredNorm() / dn);
        s.col_means(j) = mean;
        s.col_scales(j) = scale;
        if (scale <= 1e-12 * std::max(1.0, std::abs(mean))) {
            s.constant[static_cast<std::size_t>(j)] = true;
            out.base.X.col(j).setZero();
        } else {
            out.base.X.col(j) = centered / scale;
        }
    }
    s.y_mean = data.y.sum() / dn;
    out.base.y = data.y.array() - s.y_mean;
    return out;
}

CoefVector Standardization::destandardize(const Vector& beta_std) const {
    if (beta_std.size() != p()) throw std::invalid_argument("destandardize: dimension mismatch");
    CoefVector out{Vector::Zero(p()), y_mean};
    for (Index j = 0; j < p(); ++j) {
        if (constant[static_cast<std::size_t>(j)] || beta_std(j) == 0.0) continue;
        out.values(j) = beta_std(j) / col_scales(j);
        out.intercept -= col_means(j) * out.values(j);
    }
    return out;
}

Vector Standardization::restandardize(const CoefVector& beta) const {
    if (beta.values.size() != p()) throw std::invalid_argument("restandardize: dimension mismatch");
    Vector out = Vector::Zero(p());
    for (Index j = 0; j < p(); ++j)
        if (!constant[static_cast<std::size_t>(j)]) out(j) = beta.values(j) * col_scales(j);
    return out;
}

Dataset Standardization::apply(const Dataset& data) const {
    if (data.p() != p()) throw std::invalid_argument("standardization: column count mismatch");
    Dataset out{Matrix(data.n(), p()), data.y.array() - y_mean, data.column_names};
    for (Index j = 0; j < p(); ++j) {
        if (constant[static_cast<std::size_t>(j)])
            out.X.col(j).setZero();
        else
            out.X.col(j) = (data.X.col(j).array() - col_means(j)) / col_scales(j);
    }
    return out;
}

ActiveSet::ActiveSet(std::vector<Index> indices, Index p) : indices_(std::move(indices)) {
    for (std::size_t i = 0; i < indices_.size(); ++i) {
        if (indices_[i] < 0 || indices_[i] >= p) throw std::invalid_argument("active set: index out of range");
        if (i > 0 && indices_[i] <= indices_[i - 1])
            throw std::invalid_argument("active set: indices must be strictly increasing");
    }
}

ActiveSet ActiveSet::all(Index p) {
    std::vector<Index> idx(static_cast<std::size_t>(p));
    for (Index j = 0; j < p; ++j) idx[static_cast<std::size_t>(j)] = j;
    return ActiveSet(std::move(idx), p);
}

ActiveSet ActiveSet::support(const Vector& beta) {
    ActiveSet s;
    for (Index j = 0; j < beta.size(); ++j)
        if (beta(j) != 0.0) s.indices_.push_back(j);
    return s;
}

bool ActiveSet::contains(Index j) const { return std::binary_search(indices_.begin(), indices_.end(), j); }

bool ActiveSet::includes(const ActiveSet& other) const {
    return std::includes(indices_.begin(), indices_.end(), other.indices_.begin(), other.indices_.end());
}

Matrix select_columns(const Matrix& X, const ActiveSet& subset) {
    Matrix out(X.rows(), static_cast<Index>(subset.size()));
    for (std::size_t k = 0; k < subset.size(); ++k) out.col(static_cast<Index>(k)) = X.col(subset[k]);
    return out;
}

Vector embed(const Vector& sub_values, const ActiveSet& subset, Index p) {
    if (sub_values.size() != static_cast<Index>(subset.size())) throw std::invalid_argument("embed: size mismatch");
    Vector out = Vector::Zero(p);
    for (std::size_t k = 0; k < subset.size(); ++k) out(subset[k]) = sub_values(static_cast<Index>(k));
    return out;
}

namespace {

void check_dims(const Matrix& X, const Vector& y, const Vector& beta) {
    if (y.size() != X.rows() || beta.size() != X.cols())
        throw std::invalid_argument("dimension mismatch between data and coefficients");
}

}  // namespace

double loss(const Matrix& X, const Vector& y, const Vector& beta) {
    check_dims(X, y, beta);
    return (y - X * beta).squaredNorm() / (2.0 * static_cast<double>(X.rows()));
}

double loss(const Dataset& data, const CoefVector& beta) {
    check_dims(data.X, data.y, beta.values);
    Vector r = data.y - data.X * beta.values;
    r.array() -= beta.intercept;
    return r.squaredNorm() / (2.0 * static_cast<double>(data.n()));
}

Vector loss_gradient(const Matrix& X, const Vector& y, const Vector& beta) {
    check_dims(X, y, beta);
    return -(X.transpose() * (y - X * beta)) / static_cast<double>(X.rows());
}

Vector loss_gradient(const Dataset& data, const CoefVector& beta) {
    check_dims(data.X, data.y, beta.values);
    Vector r = data.y - data.X * beta.values;
    r.array() -= beta.intercept;
    return -(data.X.transpose() * r) / static_cast<double>(data.n());
}

Vector ls_solve(const Matrix& X, const Vector& y, const ActiveSet& subset) {
    if (subset.empty()) throw std::invalid_argument("ls_solve: empty subset");
    if (y.size() != X.rows()) throw std::invalid_argument("ls_solve: dimension mismatch");
    const Matrix Xs = select_columns(X, subset);
    const Vector sub = Xs.completeOrthogonalDecomposition().solve(y);
    return embed(sub, subset, X.cols());
}

CoefVector ls_solve(const Dataset& data, const ActiveSet& subset) {
    return CoefVector{ls_solve(data.X, data.y, subset), 0.0};
}

std::optional<double> min_nonzero_eigenvalue(const Matrix& M) {
    if (M.rows() != M.cols() || M.rows() == 0) throw std::invalid_argument("min_nonzero_eigenvalue: need a square matrix");
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw std::invalid_argument("min_nonzero_eigenvalue: matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> es(M, Eigen::EigenvaluesOnly);
    const Vector& ev = es.eigenvalues();  // ascending
    const double lmax = ev(ev.size() - 1);
    if (!(lmax > 0.0)) return std::nullopt;
    const double tol = static_cast<double>(M.rows()) * std::numeric_limits<double>::epsilon() * lmax;
    for (Index i = 0; i < ev.size(); ++i)
        if (ev(i) > tol) return ev(i);
    return std::nullopt;
}

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace lboost
