#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "lboost/linalg.hpp"
#include "lboost/parallel.hpp"

namespace lboost {

enum class TrajectorySource { lasso, ls_boost, other };
std::string to_string(TrajectorySource s);

/// Recorded coefficient path beta_0, ..., beta_Q together with the data the
/// loss (1/2n)||y - X beta||^2 is evaluated on.
struct CoefTrajectory {
    std::vector<Vector> points;
    TrajectorySource source = TrajectorySource::other;
    Matrix X;
    Vector y;

    std::size_t steps() const { return points.empty() ? 0 : points.size() - 1; }
    /// Throws unless Q >= 1 and every point has length p.
    void validate() const;
};

/// Columns and response with their sample means removed; no scaling.
Dataset demean(const Dataset& data);

/// Lasso solutions on `count` + 1 linearly spaced penalties from lambda_max
/// down to 0, on demeaned data. beta_0 is the zero vector.
CoefTrajectory lasso_trajectory(const Dataset& data, std::size_t count);
/// LS-boost iterates beta^0 = 0, ..., beta^iterations on demeaned data.
CoefTrajectory ls_boost_trajectory(const Dataset& data, double learning_rate, std::size_t iterations);

/// Per-coordinate integrated gradient from z_prime to z on the straight line,
/// with `steps` trapezoid panels.
Vector straight_line_ig(const Matrix& X, const Vector& y, const Vector& z, const Vector& z_prime, int steps);

/// G(j, q) = (d_j L(beta_{q+1}) + d_j L(beta_q)) / 2 * (beta_{q+1,j} - beta_{q,j}); p x Q.
Matrix path_ig_matrix(const CoefTrajectory& traj, Execution exec = Execution::parallel);

/// Row sums of G.
Vector per_parameter_attribution(const Matrix& G);
/// Column sums of G.
Vector sapa(const Matrix& G);

struct CumulativeAttribution {
    Matrix scpa;  // p x Q shares; NaN where the cumulative total is zero
    Vector capa;  // cumulative aggregate attribution through each step
};
CumulativeAttribution scpa_capa(const Matrix& G);

/// |L(beta_0) + sum G - L(beta_Q)| / max(1, |L(beta_Q)|)
double ftc_check(const CoefTrajectory& traj, const Matrix& G);

}  // namespace lboost
