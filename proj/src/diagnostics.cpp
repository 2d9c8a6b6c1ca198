#include "lboost/diagnostics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "lboost/rng.hpp"

namespace lboost {

double gamma(double epsilon, double lambda_pmin, Index p) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("gamma: epsilon must lie in (0, 1)");
    if (!(lambda_pmin >= 0.0)) throw std::invalid_argument("gamma: lambda_pmin must be nonnegative");
    if (p < 1) throw std::invalid_argument("gamma: p must be positive");
    return 1.0 - epsilon * (2.0 - epsilon) * lambda_pmin / (4.0 * static_cast<double>(p));
}

GammaValue gamma_on_active_set(const Matrix& X, const ActiveSet& subset, double epsilon, GramScaling scaling) {
    if (subset.empty()) throw std::invalid_argument("gamma_on_active_set: empty subset");
    const Matrix Xs = select_columns(X, subset);
    Matrix gram = Xs.transpose() * Xs;
    if (scaling == GramScaling::normalized) gram /= static_cast<double>(X.rows());
    GammaValue out;
    out.size = static_cast<Index>(subset.size());
    out.lambda_pmin = min_nonzero_eigenvalue(gram).value_or(0.0);
    out.gamma = gamma(epsilon, out.lambda_pmin, out.size);
    return out;
}

namespace {

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

double sd_of(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

RateCurve eigen_curve(Index n, double rho, const std::vector<Index>& sizes, double epsilon, int replications,
                      std::uint64_t seed, const EigenCurveOptions& opts) {
    if (sizes.empty() || replications < 1) throw std::invalid_argument("eigen_curve: need sizes and replications");
    for (std::size_t i = 0; i < sizes.size(); ++i)
        if (sizes[i] < 1 || (i > 0 && sizes[i] <= sizes[i - 1]))
            throw std::invalid_argument("eigen_curve: sizes must be positive and strictly increasing");
    const Index pmax = sizes.back();
    const Matrix sigma = make_sigma(pmax, rho);
    const std::size_t reps = static_cast<std::size_t>(replications);

    std::vector<std::vector<GammaValue>> values(reps);
    for_each_index(opts.execution, reps, [&](std::size_t r) {
        RandomStream rng(seed, {0x45494745ULL, static_cast<std::uint64_t>(n), std::bit_cast<std::uint64_t>(rho), r});
        const Matrix X = standardize(make_dataset(draw_gaussian_design(n, sigma, rng), Vector::Zero(n))).X();
        std::vector<Index> order(static_cast<std::size_t>(pmax));
        std::iota(order.begin(), order.end(), Index{0});
        for (Index size : sizes) {
            std::vector<Index> cols;
            if (opts.random_subsets) {
                shuffle(order, rng);
                cols.assign(order.begin(), order.begin() + size);
                std::sort(cols.begin(), cols.end());
            } else {
                cols.assign(order.begin(), order.begin() + size);
            }
            values[r].push_back(gamma_on_active_set(X, ActiveSet(cols, pmax), epsilon, opts.scaling));
        }
    });

    RateCurve curve;
    curve.sizes = sizes;
    curve.rho = rho;
    curve.n = n;
    curve.replications = replications;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        std::vector<double> g(reps), l(reps);
        for (std::size_t r = 0; r < reps; ++r) {
            g[r] = values[r][i].gamma;
            l[r] = values[r][i].lambda_pmin;
        }
        const double gm = mean_of(g), lm = mean_of(l);
        curve.gamma_mean.push_back(gm);
        curve.gamma_sd.push_back(sd_of(g, gm));
        curve.gamma_min.push_back(*std::min_element(g.begin(), g.end()));
        curve.gamma_max.push_back(*std::max_element(g.begin(), g.end()));
        curve.lambda_mean.push_back(lm);
        curve.lambda_sd.push_back(sd_of(l, lm));
    }
    return curve;
}

double isotonic_deviation(const std::vector<double>& values, bool increasing) {
    if (values.empty()) return 0.0;
    const double sign = increasing ? 1.0 : -1.0;
    // Blocks of pooled means; each holds (sum, count).
    std::vector<std::pair<double, std::size_t>> blocks;
    for (double v : values) {
        blocks.emplace_back(sign * v, 1);
        while (blocks.size() > 1) {
            auto& a = blocks[blocks.size() - 2];
            const auto& b = blocks.back();
            if (a.first / static_cast<double>(a.second) <= b.first / static_cast<double>(b.second)) break;
            a.first += b.first;
            a.second += b.second;
            blocks.pop_back();
        }
    }
    double worst = 0.0, scale = 0.0;
    std::size_t i = 0;
    for (const auto& [sum, count] : blocks) {
        const double fit = sign * sum / static_cast<double>(count);
        for (std::size_t c = 0; c < count; ++c, ++i) {
            worst = std::max(worst, std::abs(values[i] - fit));
            scale = std::max(scale, std::abs(values[i]));
        }
    }
    return scale > 0.0 ? worst / scale : 0.0;
}

double BoundTrace::worst_slack() const {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < lhs.size(); ++k) worst = std::max(worst, lhs[k] - (term1[k] + term2));
    return worst;
}

namespace {

/// sqrt(2 n ||grad L(beta*)|| ||beta_LS - beta*||)
double gradient_term(const Matrix& X, const Vector& y, const Vector& beta_star, const Vector& beta_ls) {
    const double g = loss_gradient(X, y, beta_star).norm();
    return std::sqrt(2.0 * static_cast<double>(X.rows()) * g * (beta_ls - beta_star).norm());
}

}  // namespace

BoundTrace prediction_bound_terms(const Matrix& X, const Vector& y, const Vector& beta_star, const BoostPath& path,
                                  GramScaling scaling) {
    if (beta_star.size() != X.cols() || path.p != X.cols()) throw std::invalid_argument("bound terms: dimension mismatch");
    const Vector beta_ls = ls_solve(X, y, path.subset);
    const double fit_norm = (X * beta_ls).norm();
    BoundTrace out;
    out.gamma = gamma_on_active_set(X, path.subset, path.learning_rate, scaling).gamma;
    out.term2 = gradient_term(X, y, beta_star, beta_ls);

    const Vector truth = X * beta_star;
    Vector fitted = Vector::Zero(X.rows());
    out.lhs.reserve(path.steps.size() + 1);
    out.term1.reserve(path.steps.size() + 1);
    for (std::size_t k = 0;; ++k) {
        out.lhs.push_back((fitted - truth).norm());
        out.term1.push_back(fit_norm * std::pow(out.gamma, 0.5 * static_cast<double>(k)));
        if (k == path.steps.size()) break;
        fitted.noalias() += path.steps[k].increment * X.col(path.steps[k].column);
    }
    return out;
}

StagewiseBound fs_bound_terms(const Matrix& X, const Vector& y, const Vector& beta_star, const BoostPath& path,
                              std::size_t k) {
    if (beta_star.size() != X.cols() || path.p != X.cols()) throw std::invalid_argument("bound terms: dimension mismatch");
    const double n = static_cast<double>(X.rows());
    const Vector beta_ls = ls_solve(X, y, path.subset);
    const double fit2 = (X * beta_ls).squaredNorm();
    const GammaValue g = gamma_on_active_set(X, path.subset, path.learning_rate, GramScaling::normalized);
    const double step = path.learning_rate * std::sqrt(n);

    StagewiseBound out;
    out.bound = g.lambda_pmin > 0.0
                    ? std::sqrt(static_cast<double>(g.size)) / std::sqrt(g.lambda_pmin) *
                              (fit2 / (step * static_cast<double>(k + 1)) + step) +
                          gradient_term(X, y, beta_star, beta_ls)
                    : std::numeric_limits<double>::infinity();

    const Vector truth = X * beta_star;
    Vector fitted = Vector::Zero(X.rows());
    out.best_lhs = std::numeric_limits<double>::infinity();
    const std::size_t last = std::min(k, path.steps.size());
    for (std::size_t i = 0;; ++i) {
        const double lhs = (fitted - truth).norm();
        out.best_lhs = std::min(out.best_lhs, lhs);
        if (!out.witness && lhs <= out.bound) out.witness = i;
        if (i == last) break;
        fitted.noalias() += path.steps[i].increment * X.col(path.steps[i].column);
    }
    return out;
}

namespace {

double ratio_spread(const std::vector<RateRow>& rows, double RateRow::*field) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& r : rows) {
        lo = std::min(lo, r.*field);
        hi = std::max(hi, r.*field);
    }
    return rows.empty() || !(lo > 0.0) ? std::numeric_limits<double>::quiet_NaN() : hi / lo;
}

}  // namespace

double RateCheck::spread() const { return ratio_spread(rows, &RateRow::n_inf_loss); }
double RateCheck::excess_spread() const { return ratio_spread(rows, &RateRow::n_excess); }

double family_inf_loss(const PathFamily& family, const StandardizedDataset& train) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : family.entries)
        for (const auto& c : e.candidates) best = std::min(best, loss(train.X(), train.y(), family.standardized(e, c)));
    return best;
}

RateCheck rate_check(const SimConfig& base, const std::vector<Index>& ns, Method method) {
    base.validate();
    RateCheck out;
    out.method = method;
    const std::size_t reps = static_cast<std::size_t>(base.replications);
    for (Index n : ns) {
        SimConfig cfg = base;
        cfg.n = n;
        cfg.setting = base.setting + "/n=" + std::to_string(n);
        std::vector<double> inf(reps, std::numeric_limits<double>::quiet_NaN()), excess(reps, inf[0]);
        for_each_index(base.execution, reps, [&](std::size_t r) {
            const SimDraw draw = draw_dataset(cfg, cfg.snrs.front(), r);
            const StandardizedDataset train = standardize(draw.train);
            TwoStageOptions opts = cfg.two_stage;
            opts.execution = Execution::serial;
            const PathFamily family = fit_method(method, train, config_grid(cfg, train), opts);
            inf[r] = family_inf_loss(family, train);
            excess[r] = loss(draw.train, CoefVector{draw.test.beta_star, 0.0}) - inf[r];
        });
        RateRow row;
        row.n = n;
        row.completed = reps;
        row.n_inf_loss = static_cast<double>(n) * mean_of(inf);
        row.n_excess = static_cast<double>(n) * mean_of(excess);
        out.rows.push_back(row);
    }
    return out;
}

}  // namespace lboost
