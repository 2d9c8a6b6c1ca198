#include "lboost/attribution.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lboost/boosting.hpp"
#include "lboost/lasso.hpp"

namespace lboost {

std::string to_string(TrajectorySource s) {
    switch (s) {
        case TrajectorySource::lasso: return "lasso";
        case TrajectorySource::ls_boost: return "ls_boost";
        case TrajectorySource::other: return "other";
    }
    return "other";
}

void CoefTrajectory::validate() const {
    if (points.size() < 2) throw std::invalid_argument("trajectory: need at least two points");
    if (y.size() != X.rows()) throw std::invalid_argument("trajectory: data dimension mismatch");
    for (const auto& b : points)
        if (b.size() != X.cols()) throw std::invalid_argument("trajectory: coefficient length differs from p");
}

Dataset demean(const Dataset& data) {
    Dataset out = data;
    const double dn = static_cast<double>(data.n());
    for (Index j = 0; j < data.p(); ++j) out.X.col(j).array() -= data.X.col(j).sum() / dn;
    out.y.array() -= data.y.sum() / dn;
    return out;
}

CoefTrajectory lasso_trajectory(const Dataset& data, std::size_t count) {
    if (count < 1) throw std::invalid_argument("lasso_trajectory: count must be positive");
    const Dataset d = demean(data);
    const double l0 = lambda_max(d.X, d.y);
    std::vector<double> lambdas(count + 1);
    for (std::size_t q = 0; q <= count; ++q)
        lambdas[q] = l0 * static_cast<double>(count - q) / static_cast<double>(count);
    LassoPath path = fit_lasso_path(d.X, d.y, lambdas);
    return CoefTrajectory{std::move(path.coefs), TrajectorySource::lasso, d.X, d.y};
}

CoefTrajectory ls_boost_trajectory(const Dataset& data, double learning_rate, std::size_t iterations) {
    const Dataset d = demean(data);
    std::vector<Index> usable;
    for (Index j = 0; j < d.p(); ++j)
        if (d.X.col(j).squaredNorm() > 0.0) usable.push_back(j);
    CoefTrajectory traj{{}, TrajectorySource::ls_boost, d.X, d.y};
    if (usable.empty()) {
        traj.points.assign(iterations + 1, Vector::Zero(d.p()));
        return traj;
    }
    const BoostPath path = run_boost_until(BoostEngine::ls_boost, d.X, d.y, ActiveSet(usable, d.p()), learning_rate,
                                           static_cast<int>(iterations), nullptr);
    traj.points.reserve(iterations + 1);
    Vector beta = Vector::Zero(d.p());
    traj.points.push_back(beta);
    for (const auto& s : path.steps) {
        beta(s.column) += s.increment;
        traj.points.push_back(beta);
    }
    // A zero gradient ends the run early; the remaining iterates are stationary.
    while (traj.points.size() < iterations + 1) traj.points.push_back(beta);
    return traj;
}

Vector straight_line_ig(const Matrix& X, const Vector& y, const Vector& z, const Vector& z_prime, int steps) {
    if (steps < 1) throw std::invalid_argument("straight_line_ig: steps must be positive");
    if (z.size() != X.cols() || z_prime.size() != X.cols() || y.size() != X.rows())
        throw std::invalid_argument("straight_line_ig: dimension mismatch");
    const Vector delta = z - z_prime;
    Vector acc = Vector::Zero(X.cols());
    for (int i = 0; i <= steps; ++i) {
        const double alpha = static_cast<double>(i) / static_cast<double>(steps);
        const double w = (i == 0 || i == steps) ? 0.5 : 1.0;
        acc += w * loss_gradient(X, y, z_prime + alpha * delta);
    }
    return delta.cwiseProduct(acc) / static_cast<double>(steps);
}

Matrix path_ig_matrix(const CoefTrajectory& traj, Execution exec) {
    traj.validate();
    const std::size_t Q = traj.steps();
    std::vector<Vector> grads(Q + 1);
    for_each_index(exec, Q + 1, [&](std::size_t q) { grads[q] = loss_gradient(traj.X, traj.y, traj.points[q]); });
    Matrix G(traj.X.cols(), static_cast<Index>(Q));
    for_each_index(exec, Q, [&](std::size_t q) {
        G.col(static_cast<Index>(q)) =
            (0.5 * (grads[q + 1] + grads[q])).cwiseProduct(traj.points[q + 1] - traj.points[q]);
    });
    return G;
}

namespace {

double sum_of(const auto& expr) {
    const Vector v = expr;
    return pairwise_sum(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
}

}  // namespace

Vector per_parameter_attribution(const Matrix& G) {
    Vector out(G.rows());
    for (Index j = 0; j < G.rows(); ++j) out(j) = sum_of(G.row(j).transpose());
    return out;
}

Vector sapa(const Matrix& G) {
    Vector out(G.cols());
    for (Index q = 0; q < G.cols(); ++q) out(q) = sum_of(G.col(q));
    return out;
}

CumulativeAttribution scpa_capa(const Matrix& G) {
    CumulativeAttribution out{Matrix(G.rows(), G.cols()), Vector(G.cols())};
    Vector running = Vector::Zero(G.rows());
    for (Index q = 0; q < G.cols(); ++q) {
        running += G.col(q);
        const double total = sum_of(running);
        out.capa(q) = total;
        if (total == 0.0)
            out.scpa.col(q).setConstant(std::numeric_limits<double>::quiet_NaN());
        else
            out.scpa.col(q) = running / total;
    }
    return out;
}

double ftc_check(const CoefTrajectory& traj, const Matrix& G) {
    traj.validate();
    if (G.rows() != traj.X.cols() || G.cols() != static_cast<Index>(traj.steps()))
        throw std::invalid_argument("ftc_check: attribution matrix does not match the trajectory");
    const double start = loss(traj.X, traj.y, traj.points.front());
    const double end = loss(traj.X, traj.y, traj.points.back());
    const double total = pairwise_sum(std::span<const double>(G.data(), static_cast<std::size_t>(G.size())));
    return std::abs(start + total - end) / std::max(1.0, std::abs(end));
}

}  // namespace lboost
