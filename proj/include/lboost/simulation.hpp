#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lboost/linalg.hpp"
#include "lboost/parallel.hpp"
#include "lboost/rng.hpp"
#include "lboost/tuning.hpp"
#include "lboost/two_stage.hpp"

namespace lboost {

enum class Tuning { validation, oracle };
std::string to_string(Tuning t);
Tuning parse_tuning(const std::string& name);

/// (0.05, 0.09, 0.14, 0.25, 0.42, 0.71, 1.22, 2.07, 3.52, 6.00)
const std::vector<double>& default_snr_grid();

struct SimConfig {
    std::string setting = "low";
    int beta_type = 2;
    Index n = 100;
    Index p = 10;
    Index s = 5;
    double rho = 0.35;
    std::vector<double> snrs = default_snr_grid();
    int replications = 10;
    std::uint64_t seed = 1;
    std::vector<Method> methods{Method::forward_stepwise, Method::lasso, Method::lassoed_boosting,
                                Method::relaxed_lasso};
    Tuning tuning = Tuning::validation;
    std::size_t lambda_count = 50;
    double min_ratio = 0.0;  // 0 picks default_min_ratio(n, p)
    TwoStageOptions two_stage;
    Execution execution = Execution::parallel;

    void validate() const;
};

/// Named sizes: low (100, 10, 5), medium (500, 100, 5), high5 (50, 1000, 5),
/// high10 (100, 1000, 10). The low setting uses 50 penalties, the others 100.
SimConfig preset(const std::string& name);

/// Sigma_ij = rho^|i-j|
Matrix make_sigma(Index p, double rho);
/// Coefficient patterns 1, 2, 3 and 5; the intercept is zero.
CoefVector make_beta(int beta_type, Index p, Index s);
/// beta*' Sigma beta* / snr
double noise_variance(const CoefVector& beta_star, const Matrix& sigma, double snr);

struct TestContext {
    Vector beta_star;
    Matrix sigma;
    double sigma2 = 0.0;
    double snr = 0.0;
};

struct SimDraw {
    Dataset train;
    Dataset validation;  // independent, same size as train
    TestContext test;
};

/// Rows of X are N(0, Sigma) through a Cholesky factor, y ~ N(X beta*, sigma^2 I).
/// The stream is addressed by (seed, setting, beta type, rho, snr, replication).
SimDraw draw_dataset(const SimConfig& config, double snr, std::size_t replication);

/// n x p matrix with independent N(0, Sigma) rows.
Matrix draw_gaussian_design(Index n, const Matrix& sigma, RandomStream& rng);

struct ReplicationRecord {
    std::size_t snr_index = 0;
    std::size_t replication = 0;
    Method method = Method::lasso;
    bool ok = true;
    std::string error;
    MetricsRecord metrics;
    std::size_t q = 0;
    std::size_t stage2_index = 0;
    double criterion = 0.0;
};

struct CellAverage {
    double snr = 0.0;
    Method method = Method::lasso;
    double rr = 0.0, rte = 0.0, pve = 0.0, nnz = 0.0, correct_nonzeros = 0.0;
    std::size_t completed = 0;
    std::size_t failed = 0;

    bool complete() const { return failed == 0; }
};

struct ExperimentResult {
    SimConfig config;
    std::vector<ReplicationRecord> raws;  // ordered by snr, replication, method
    std::vector<CellAverage> cells;       // ordered by snr, method

    const CellAverage& cell(std::size_t snr_index, Method method) const;
};

/// Fits, tunes and evaluates every method for one simulated draw.
std::vector<ReplicationRecord> run_replication(const SimConfig& config, std::size_t snr_index,
                                               std::size_t replication);

/// Every (snr, replication) unit runs independently; averages are taken in a
/// fixed order afterwards, so the result does not depend on the thread count.
ExperimentResult run_experiment(const SimConfig& config);

/// Penalty grid for standardized training data under the config's settings.
LambdaGrid config_grid(const SimConfig& config, const StandardizedDataset& data);

}  // namespace lboost
