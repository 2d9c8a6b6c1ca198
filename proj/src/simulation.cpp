#include "lboost/simulation.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lboost {

std::string to_string(Tuning t) { return t == Tuning::validation ? "validation" : "oracle"; }

Tuning parse_tuning(const std::string& name) {
    if (name == "validation") return Tuning::validation;
    if (name == "oracle") return Tuning::oracle;
    throw std::invalid_argument("unknown tuning mode '" + name + "'");
}

const std::vector<double>& default_snr_grid() {
    static const std::vector<double> grid{0.05, 0.09, 0.14, 0.25, 0.42, 0.71, 1.22, 2.07, 3.52, 6.00};
    return grid;
}

void SimConfig::validate() const {
    if (beta_type != 1 && beta_type != 2 && beta_type != 3 && beta_type != 5)
        throw std::invalid_argument("sim config: beta_type must be 1, 2, 3 or 5");
    if (n < 3 || p < 1 || s < 1) throw std::invalid_argument("sim config: need n >= 3, p >= 1, s >= 1");
    if (s > p) throw std::invalid_argument("sim config: s must not exceed p");
    if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("sim config: rho must lie in [0, 1)");
    if (snrs.empty()) throw std::invalid_argument("sim config: empty SNR grid");
    for (double v : snrs)
        if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("sim config: SNR values must be positive");
    if (replications < 1) throw std::invalid_argument("sim config: replications must be at least 1");
    if (methods.empty()) throw std::invalid_argument("sim config: no methods");
    if (lambda_count < 1) throw std::invalid_argument("sim config: lambda_count must be positive");
    if (min_ratio != 0.0 && !(min_ratio > 0.0 && min_ratio < 1.0))
        throw std::invalid_argument("sim config: min_ratio must lie in (0, 1)");
    two_stage.boost.validate();
}

SimConfig preset(const std::string& name) {
    SimConfig c;
    c.setting = name;
    if (name == "low") {
        c.n = 100, c.p = 10, c.s = 5, c.lambda_count = 50;
    } else if (name == "medium") {
        c.n = 500, c.p = 100, c.s = 5, c.lambda_count = 100;
    } else if (name == "high5") {
        c.n = 50, c.p = 1000, c.s = 5, c.lambda_count = 100;
    } else if (name == "high10") {
        c.n = 100, c.p = 1000, c.s = 10, c.lambda_count = 100;
    } else {
        throw std::invalid_argument("unknown setting '" + name + "' (expected low, medium, high5 or high10)");
    }
    return c;
}

Matrix make_sigma(Index p, double rho) {
    if (p < 1) throw std::invalid_argument("make_sigma: p must be positive");
    if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("make_sigma: rho must lie in [0, 1)");
    Matrix sigma(p, p);
    for (Index i = 0; i < p; ++i)
        for (Index j = 0; j < p; ++j) sigma(i, j) = i == j ? 1.0 : std::pow(rho, static_cast<double>(std::abs(i - j)));
    return sigma;
}

CoefVector make_beta(int beta_type, Index p, Index s) {
    if (p < 1 || s < 1 || s > p) throw std::invalid_argument("make_beta: need 1 <= s <= p");
    CoefVector beta{Vector::Zero(p), 0.0};
    switch (beta_type) {
        case 1:
            // Half-up rounding; for tiny p two positions may coincide and collapse.
            for (Index j = 1; j <= s; ++j) {
                const double pos = s == 1 ? 1.0 : 1.0 + static_cast<double>((j - 1) * (p - 1)) / static_cast<double>(s - 1);
                beta.values(static_cast<Index>(std::floor(pos + 0.5)) - 1) = 1.0;
            }
            break;
        case 2:
            beta.values.head(s).setOnes();
            break;
        case 3:
            for (Index j = 0; j < s; ++j)
                beta.values(j) = s == 1 ? 10.0 : 10.0 - 9.5 * static_cast<double>(j) / static_cast<double>(s - 1);
            break;
        case 5:
            beta.values.head(s).setOnes();
            for (Index i = s; i < p; ++i) beta.values(i) = std::pow(0.5, static_cast<double>(i + 1 - s));
            break;
        default:
            throw std::invalid_argument("make_beta: beta_type must be 1, 2, 3 or 5");
    }
    return beta;
}

double noise_variance(const CoefVector& beta_star, const Matrix& sigma, double snr) {
    if (!(snr > 0.0)) throw std::invalid_argument("noise_variance: SNR must be positive");
    if (sigma.rows() != beta_star.values.size() || sigma.cols() != beta_star.values.size())
        throw std::invalid_argument("noise_variance: dimension mismatch");
    return beta_star.values.dot(sigma * beta_star.values) / snr;
}

Matrix draw_gaussian_design(Index n, const Matrix& sigma, RandomStream& rng) {
    const Eigen::LLT<Matrix> llt(sigma);
    if (llt.info() != Eigen::Success) throw std::runtime_error("draw_dataset: covariance is not positive definite");
    const Matrix L = llt.matrixL();
    Matrix Z(n, sigma.rows());
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < Z.cols(); ++j) Z(i, j) = rng.normal();
    return Z * L.transpose();
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

Dataset draw_split(Index n, const Matrix& sigma, const Vector& beta, double noise_sd, RandomStream& rng) {
    Matrix X = draw_gaussian_design(n, sigma, rng);
    Vector y = X * beta;
    for (Index i = 0; i < n; ++i) y(i) += noise_sd * rng.normal();
    return make_dataset(std::move(X), std::move(y));
}

}  // namespace

SimDraw draw_dataset(const SimConfig& config, double snr, std::size_t replication) {
    config.validate();
    RandomStream rng(config.seed, {fnv1a(config.setting), static_cast<std::uint64_t>(config.beta_type),
                                   std::bit_cast<std::uint64_t>(config.rho), std::bit_cast<std::uint64_t>(snr),
                                   static_cast<std::uint64_t>(replication)});
    SimDraw d;
    d.test.sigma = make_sigma(config.p, config.rho);
    const CoefVector beta = make_beta(config.beta_type, config.p, config.s);
    d.test.beta_star = beta.values;
    d.test.snr = snr;
    d.test.sigma2 = noise_variance(beta, d.test.sigma, snr);
    const double sd = std::sqrt(d.test.sigma2);
    d.train = draw_split(config.n, d.test.sigma, beta.values, sd, rng);
    d.validation = draw_split(config.n, d.test.sigma, beta.values, sd, rng);
    return d;
}

LambdaGrid config_grid(const SimConfig& config, const StandardizedDataset& data) {
    double l0 = lambda_max(data);
    if (!(l0 > 0.0)) l0 = 1.0;  // y is constant: every positive penalty gives the null model
    const double ratio = config.min_ratio > 0.0 ? config.min_ratio : default_min_ratio(data.n(), data.p());
    return make_lambda_grid(l0, config.lambda_count, ratio);
}

std::vector<ReplicationRecord> run_replication(const SimConfig& config, std::size_t snr_index,
                                               std::size_t replication) {
    const double snr = config.snrs.at(snr_index);
    std::vector<ReplicationRecord> out(config.methods.size());
    for (std::size_t m = 0; m < out.size(); ++m) {
        out[m].snr_index = snr_index;
        out[m].replication = replication;
        out[m].method = config.methods[m];
    }
    auto fail_all = [&](const std::string& what) {
        for (auto& r : out) {
            r.ok = false;
            r.error = what;
        }
    };
    try {
        const SimDraw draw = draw_dataset(config, snr, replication);
        const StandardizedDataset train = standardize(draw.train);
        const LambdaGrid grid = config_grid(config, train);
        TwoStageOptions opts = config.two_stage;
        opts.execution = Execution::serial;  // the replication itself is the parallel unit
        const auto families = fit_methods(config.methods, train, grid, opts);
        for (std::size_t m = 0; m < out.size(); ++m) {
            try {
                const TuningSelection sel =
                    config.tuning == Tuning::validation
                        ? validate_select(families[m], draw.validation)
                        : oracle_select(families[m], CoefVector{draw.test.beta_star, 0.0}, draw.test.sigma);
                out[m].metrics =
                    evaluate_metrics(sel.coef.values, draw.test.beta_star, draw.test.sigma, draw.test.sigma2);
                out[m].q = sel.q;
                out[m].stage2_index = sel.stage2_index;
                out[m].criterion = sel.criterion;
            } catch (const std::exception& e) {
                out[m].ok = false;
                out[m].error = e.what();
            }
        }
    } catch (const std::exception& e) {
        fail_all(e.what());
    }
    return out;
}

const CellAverage& ExperimentResult::cell(std::size_t snr_index, Method method) const {
    for (std::size_t m = 0; m < config.methods.size(); ++m)
        if (config.methods[m] == method) return cells.at(snr_index * config.methods.size() + m);
    throw std::out_of_range("experiment result: method was not run");
}

ExperimentResult run_experiment(const SimConfig& config) {
    config.validate();
    const std::size_t reps = static_cast<std::size_t>(config.replications);
    const std::size_t units = config.snrs.size() * reps;
    std::vector<std::vector<ReplicationRecord>> per_unit(units);
    for_each_index(config.execution, units,
                   [&](std::size_t u) { per_unit[u] = run_replication(config, u / reps, u % reps); });

    ExperimentResult result;
    result.config = config;
    for (auto& unit : per_unit)
        for (auto& r : unit) result.raws.push_back(std::move(r));

    const std::size_t nm = config.methods.size();
    result.cells.resize(config.snrs.size() * nm);
    for (std::size_t si = 0; si < config.snrs.size(); ++si) {
        for (std::size_t m = 0; m < nm; ++m) {
            CellAverage& c = result.cells[si * nm + m];
            c.snr = config.snrs[si];
            c.method = config.methods[m];
            for (std::size_t r = 0; r < reps; ++r) {
                const ReplicationRecord& rec = result.raws[(si * reps + r) * nm + m];
                if (!rec.ok) {
                    ++c.failed;
                    continue;
                }
                ++c.completed;
                c.rr += rec.metrics.rr;
                c.rte += rec.metrics.rte;
                c.pve += rec.metrics.pve;
                c.nnz += static_cast<double>(rec.metrics.nnz);
                c.correct_nonzeros += static_cast<double>(rec.metrics.correct_nonzeros);
            }
            if (c.completed > 0) {
                const double k = static_cast<double>(c.completed);
                c.rr /= k, c.rte /= k, c.pve /= k, c.nnz /= k, c.correct_nonzeros /= k;
            } else {
                const double nan = std::numeric_limits<double>::quiet_NaN();
                c.rr = c.rte = c.pve = c.nnz = c.correct_nonzeros = nan;
            }
        }
    }
    return result;
}

}  // namespace lboost
