#include "lboost/two_stage.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace lboost {

std::string to_string(Method m) {
    switch (m) {
        case Method::lasso: return "lasso";
        case Method::forward_stepwise: return "forward_stepwise";
        case Method::relaxed_lasso: return "relaxed_lasso";
        case Method::lassoed_boosting: return "lassoed_boosting";
        case Method::lassoed_forward_stagewise: return "lassoed_forward_stagewise";
        case Method::twiced_lasso: return "twiced_lasso";
        case Method::twiced_boosting: return "twiced_boosting";
    }
    return "unknown";
}

const std::vector<Method>& all_methods() {
    static const std::vector<Method> methods{Method::lasso,           Method::forward_stepwise,
                                             Method::relaxed_lasso,   Method::lassoed_boosting,
                                             Method::lassoed_forward_stagewise, Method::twiced_lasso,
                                             Method::twiced_boosting};
    return methods;
}

Method parse_method(const std::string& name) {
    for (Method m : all_methods())
        if (to_string(m) == name) return m;
    throw std::invalid_argument("unknown method '" + name + "'");
}

std::size_t PathFamily::candidate_count() const {
    std::size_t total = 0;
    for (const auto& e : entries) total += e.candidates.size();
    return total;
}

Vector PathFamily::standardized(const FamilyEntry& e, const Candidate& c) const {
    if (c.values.size() == 0) return Vector::Zero(p);
    return embed(c.values, e.active, p);
}

CoefVector PathFamily::coefficients(const FamilyEntry& e, const Candidate& c) const {
    return scaling.destandardize(standardized(e, c));
}

namespace {

PathFamily empty_family(Method m, const StandardizedDataset& data, std::string grid) {
    PathFamily f;
    f.method = m;
    f.stage2_grid = std::move(grid);
    f.p = data.p();
    f.scaling = data.scaling;
    return f;
}

Vector restrict_to(const Vector& beta, const ActiveSet& set) {
    Vector out(static_cast<Index>(set.size()));
    for (std::size_t k = 0; k < set.size(); ++k) out(static_cast<Index>(k)) = beta(set[k]);
    return out;
}

Candidate zero_candidate() { return Candidate{0, Vector()}; }

struct StageOneSet {
    std::size_t q;
    double lambda;
    ActiveSet set;
    bool converged;
};

/// Second-stage boosting on every set; one entry per set.
std::vector<FamilyEntry> boost_sets(BoostEngine engine, const StandardizedDataset& data,
                                    const std::vector<StageOneSet>& sets, const TwoStageOptions& opts) {
    std::vector<FamilyEntry> entries(sets.size());
    for_each_index(opts.execution, sets.size(), [&](std::size_t i) {
        FamilyEntry& e = entries[i];
        e.q = sets[i].q;
        e.lambda = sets[i].lambda;
        e.active = sets[i].set;
        e.converged = sets[i].converged;
        if (e.active.empty()) {
            e.candidates.push_back(zero_candidate());
            return;
        }
        const BoostPath bp = engine == BoostEngine::ls_boost ? ls_boost(data, e.active, opts.boost)
                                                             : forward_stagewise(data, e.active, opts.boost);
        const auto ks = subsample_steps(bp.stop_index, opts.boost_steps);
        if (ks.empty()) {
            e.candidates.push_back(zero_candidate());
            return;
        }
        const auto coefs = bp.coefficients_at(ks);
        e.candidates.reserve(ks.size());
        for (std::size_t c = 0; c < ks.size(); ++c) e.candidates.push_back({ks[c], restrict_to(coefs[c], e.active)});
    });
    return entries;
}

std::vector<StageOneSet> lasso_sets(const LassoPath& path) {
    std::vector<StageOneSet> out;
    for (const auto& s : distinct_supports(path)) out.push_back({s.q, s.lambda, s.set, path.converged[s.q]});
    return out;
}

std::string boost_grid_label(const TwoStageOptions& opts) {
    return std::to_string(opts.boost_steps) + " equally spaced steps on [1, stop]";
}

LassoPath first_stage(const StandardizedDataset& data, const LambdaGrid& grid, const TwoStageOptions& opts) {
    return fit_lasso_path(data, grid, opts.lasso);
}

}  // namespace

std::vector<PathSupport> distinct_supports(const LassoPath& path) {
    std::vector<PathSupport> out;
    for (const auto& s : active_sets(path, true)) {
        const bool seen = std::any_of(out.begin(), out.end(), [&](const PathSupport& o) { return o.set == s.set; });
        if (!seen) out.push_back(s);
    }
    return out;
}

PathFamily lasso_family(const StandardizedDataset& data, const LassoPath& path) {
    PathFamily f = empty_family(Method::lasso, data, "lasso solution");
    f.entries.reserve(path.size());
    for (std::size_t q = 0; q < path.size(); ++q) {
        FamilyEntry e{q, path.grid.values[q], path.active[q], {}, path.converged[q]};
        e.candidates.push_back({0, restrict_to(path.coefs[q], e.active)});
        f.entries.push_back(std::move(e));
    }
    return f;
}

PathFamily lassoed_boosting(const StandardizedDataset& data, const LassoPath& path, const TwoStageOptions& opts) {
    PathFamily f = empty_family(Method::lassoed_boosting, data, boost_grid_label(opts));
    f.entries = boost_sets(BoostEngine::ls_boost, data, lasso_sets(path), opts);
    return f;
}

PathFamily lassoed_boosting(const StandardizedDataset& data, const LambdaGrid& grid, const TwoStageOptions& opts) {
    return lassoed_boosting(data, first_stage(data, grid, opts), opts);
}

PathFamily lassoed_forward_stagewise(const StandardizedDataset& data, const LassoPath& path,
                                     const TwoStageOptions& opts) {
    PathFamily f = empty_family(Method::lassoed_forward_stagewise, data, boost_grid_label(opts));
    f.entries = boost_sets(BoostEngine::forward_stagewise, data, lasso_sets(path), opts);
    return f;
}

PathFamily lassoed_forward_stagewise(const StandardizedDataset& data, const LambdaGrid& grid,
                                     const TwoStageOptions& opts) {
    return lassoed_forward_stagewise(data, first_stage(data, grid, opts), opts);
}

std::vector<double> equally_spaced_weights(std::size_t count) {
    if (count < 2) throw std::invalid_argument("relaxed lasso: need at least two weights");
    std::vector<double> w(count);
    for (std::size_t i = 0; i < count; ++i) w[i] = static_cast<double>(i) / static_cast<double>(count - 1);
    w.back() = 1.0;
    return w;
}

PathFamily relaxed_lasso(const StandardizedDataset& data, const LassoPath& path, const std::vector<double>& weights) {
    const bool has_zero = std::find(weights.begin(), weights.end(), 0.0) != weights.end();
    const bool has_one = std::find(weights.begin(), weights.end(), 1.0) != weights.end();
    if (!has_zero || !has_one) throw std::invalid_argument("relaxed lasso: weights must include 0 and 1");
    for (double w : weights)
        if (w < 0.0 || w > 1.0) throw std::invalid_argument("relaxed lasso: weights must lie in [0, 1]");

    PathFamily f = empty_family(Method::relaxed_lasso, data, std::to_string(weights.size()) + " weights on [0, 1]");
    std::map<std::vector<Index>, Vector> ls_cache;
    for (std::size_t q = 0; q < path.size(); ++q) {
        FamilyEntry e{q, path.grid.values[q], path.active[q], {}, path.converged[q]};
        if (e.active.empty()) {
            e.candidates.push_back(zero_candidate());
            f.entries.push_back(std::move(e));
            continue;
        }
        auto it = ls_cache.find(e.active.indices());
        if (it == ls_cache.end())
            it = ls_cache.emplace(e.active.indices(), restrict_to(ls_solve(data.X(), data.y(), e.active), e.active)).first;
        const Vector& ls = it->second;
        const Vector lasso = restrict_to(path.coefs[q], e.active);
        e.candidates.reserve(weights.size());
        for (std::size_t i = 0; i < weights.size(); ++i)
            e.candidates.push_back({i, weights[i] * lasso + (1.0 - weights[i]) * ls});
        f.entries.push_back(std::move(e));
    }
    return f;
}

PathFamily twiced_lasso(const StandardizedDataset& data, const LassoPath& path, const TwoStageOptions& opts) {
    const auto sets = lasso_sets(path);
    const std::string label = opts.twiced_lasso_recompute_grid ? "lambda grid recomputed per active set"
                                                               : "first-stage lambda grid";
    PathFamily f = empty_family(Method::twiced_lasso, data, label);
    f.entries.resize(sets.size());
    for_each_index(opts.execution, sets.size(), [&](std::size_t i) {
        FamilyEntry& e = f.entries[i];
        e.q = sets[i].q;
        e.lambda = sets[i].lambda;
        e.active = sets[i].set;
        e.converged = sets[i].converged;
        if (e.active.empty()) {
            e.candidates.push_back(zero_candidate());
            return;
        }
        const Matrix Xs = select_columns(data.X(), e.active);
        std::vector<double> lambdas = path.grid.values;
        if (opts.twiced_lasso_recompute_grid) {
            const double l0 = lambda_max(Xs, data.y());
            const double ratio = path.grid.values.back() / path.grid.lambda0;
            if (l0 > 0.0) lambdas = make_lambda_grid(l0, path.grid.size(), std::clamp(ratio, 1e-12, 0.999999)).values;
        }
        const LassoPath second = fit_lasso_path(Xs, data.y(), lambdas, opts.lasso);
        e.candidates.reserve(second.size());
        for (std::size_t k = 0; k < second.size(); ++k) {
            e.candidates.push_back({k, second.coefs[k]});
            e.converged = e.converged && second.converged[k];
        }
    });
    return f;
}

PathFamily twiced_lasso(const StandardizedDataset& data, const LambdaGrid& grid, const TwoStageOptions& opts) {
    return twiced_lasso(data, first_stage(data, grid, opts), opts);
}

std::vector<ActiveSet> boosting_screen(const StandardizedDataset& data, const BoostConfig& config) {
    config.validate();
    std::vector<Index> usable;
    for (Index j = 0; j < data.p(); ++j)
        if (!data.scaling.constant[static_cast<std::size_t>(j)]) usable.push_back(j);
    if (usable.empty()) return {};
    const ActiveSet candidates(usable, data.p());

    std::vector<ActiveSet> sets;
    std::vector<Index> current;
    auto halt = [&](const BoostPath& bp) {
        const Index j = bp.steps.back().column;
        if (!std::binary_search(current.begin(), current.end(), j)) {
            current.insert(std::upper_bound(current.begin(), current.end(), j), j);
            sets.emplace_back(current, data.p());
        }
        return current.size() == usable.size();
    };
    run_boost_until(BoostEngine::ls_boost, data.X(), data.y(), candidates, config.learning_rate,
                    config.resolved_max_iter(data.n()), halt);
    return sets;
}

PathFamily twiced_boosting(const StandardizedDataset& data, const TwoStageOptions& opts) {
    std::vector<StageOneSet> sets;
    const auto screened = boosting_screen(data, opts.boost);
    for (std::size_t i = 0; i < screened.size(); ++i)
        sets.push_back({i + 1, std::numeric_limits<double>::quiet_NaN(), screened[i], true});
    PathFamily f = empty_family(Method::twiced_boosting, data, boost_grid_label(opts));
    f.entries = boost_sets(BoostEngine::ls_boost, data, sets, opts);
    if (f.entries.empty()) {
        FamilyEntry e;
        e.candidates.push_back(zero_candidate());
        f.entries.push_back(std::move(e));
    }
    return f;
}

PathFamily forward_stepwise(const StandardizedDataset& data, std::size_t max_steps) {
    const Matrix& X = data.X();
    const Vector& y = data.y();
    const Index n = data.n(), p = data.p();
    const std::size_t limit = std::min<std::size_t>(max_steps, static_cast<std::size_t>(std::min<Index>(n - 1, p)));

    Matrix Z = X;  // columns orthogonalized against the selected ones
    Vector r = y;
    std::vector<Index> order;
    std::vector<bool> used(static_cast<std::size_t>(p), false);
    std::vector<Vector> fits;  // length-p LS refits after each step
    const double floor = 1e-30 * y.squaredNorm();

    while (order.size() < limit) {
        Index best = -1;
        double best_score = 0.0;
        for (Index j = 0; j < p; ++j) {
            if (used[static_cast<std::size_t>(j)]) continue;
            const double xx = X.col(j).squaredNorm();
            const double zz = Z.col(j).squaredNorm();
            if (xx == 0.0 || zz <= 1e-10 * xx) continue;  // collinear with the current set
            const double zr = Z.col(j).dot(r);
            const double score = zr * zr / zz;
            if (score > best_score) {
                best_score = score;
                best = j;
            }
        }
        if (best < 0 || best_score <= floor) break;
        const Vector q = Z.col(best) / Z.col(best).norm();
        r -= q * q.dot(r);
        Z -= q * (q.transpose() * Z);
        used[static_cast<std::size_t>(best)] = true;
        order.push_back(best);

        std::vector<Index> sorted = order;
        std::sort(sorted.begin(), sorted.end());
        fits.push_back(ls_solve(X, y, ActiveSet(sorted, p)));
    }

    PathFamily f = empty_family(Method::forward_stepwise, data, "exact LS refit per step");
    FamilyEntry e;
    std::vector<Index> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    e.active = ActiveSet(sorted, p);
    e.candidates.push_back({0, Vector::Zero(static_cast<Index>(e.active.size()))});
    for (std::size_t m = 0; m < fits.size(); ++m) e.candidates.push_back({m + 1, restrict_to(fits[m], e.active)});
    if (e.active.empty()) e.candidates.front().values = Vector();
    f.entries.push_back(std::move(e));
    return f;
}

PathFamily fit_method(Method method, const StandardizedDataset& data, const LambdaGrid& grid,
                      const TwoStageOptions& opts) {
    switch (method) {
        case Method::forward_stepwise: return forward_stepwise(data, opts.stepwise_max_steps);
        case Method::twiced_boosting: return twiced_boosting(data, opts);
        default: break;
    }
    const LassoPath path = first_stage(data, grid, opts);
    switch (method) {
        case Method::lasso: return lasso_family(data, path);
        case Method::relaxed_lasso: return relaxed_lasso(data, path, equally_spaced_weights(opts.relax_weights));
        case Method::lassoed_boosting: return lassoed_boosting(data, path, opts);
        case Method::lassoed_forward_stagewise: return lassoed_forward_stagewise(data, path, opts);
        case Method::twiced_lasso: return twiced_lasso(data, path, opts);
        default: break;
    }
    throw std::invalid_argument("fit_method: unsupported method");
}

std::vector<PathFamily> fit_methods(const std::vector<Method>& methods, const StandardizedDataset& data,
                                    const LambdaGrid& grid, const TwoStageOptions& opts) {
    const bool needs_path = std::any_of(methods.begin(), methods.end(), [](Method m) {
        return m != Method::forward_stepwise && m != Method::twiced_boosting;
    });
    const LassoPath path = needs_path ? first_stage(data, grid, opts) : LassoPath{};
    std::vector<PathFamily> out;
    out.reserve(methods.size());
    for (Method m : methods) {
        switch (m) {
            case Method::lasso: out.push_back(lasso_family(data, path)); break;
            case Method::forward_stepwise: out.push_back(forward_stepwise(data, opts.stepwise_max_steps)); break;
            case Method::relaxed_lasso:
                out.push_back(relaxed_lasso(data, path, equally_spaced_weights(opts.relax_weights)));
                break;
            case Method::lassoed_boosting: out.push_back(lassoed_boosting(data, path, opts)); break;
            case Method::lassoed_forward_stagewise: out.push_back(lassoed_forward_stagewise(data, path, opts)); break;
            case Method::twiced_lasso: out.push_back(twiced_lasso(data, path, opts)); break;
            case Method::twiced_boosting: out.push_back(twiced_boosting(data, opts)); break;
        }
    }
    return out;
}

}  // namespace lboost
