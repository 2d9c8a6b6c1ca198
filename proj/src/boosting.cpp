#include "lboost/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace lboost {

void BoostConfig::validate() const {
    if (!(learning_rate > 0.0 && learning_rate < 1.0)) throw std::invalid_argument("boost config: learning rate must lie in (0,1)");
    if (max_iter < 0) throw std::invalid_argument("boost config: max_iter must be positive");
    if (aicc_multiplier < 1) throw std::invalid_argument("boost config: aicc multiplier must be positive");
}

Vector BoostPath::coefficients_at(std::size_t k) const {
    if (k > steps.size()) throw std::out_of_range("boost path: step beyond the recorded run");
    Vector beta = Vector::Zero(p);
    for (std::size_t i = 0; i < k; ++i) beta(steps[i].column) += steps[i].increment;
    return beta;
}

std::vector<Vector> BoostPath::coefficients_at(std::span<const std::size_t> ks) const {
    std::vector<Vector> out;
    out.reserve(ks.size());
    Vector beta = Vector::Zero(p);
    std::size_t done = 0;
    for (std::size_t k : ks) {
        if (k < done) throw std::invalid_argument("boost path: step indices must be nondecreasing");
        if (k > steps.size()) throw std::out_of_range("boost path: step beyond the recorded run");
        for (; done < k; ++done) beta(steps[done].column) += steps[done].increment;
        out.push_back(beta);
    }
    return out;
}

namespace {

/// Incremental trace of the LS-boost operator. With B_k = X_A D_k the
/// recursion closes on E_k = D_k X_A, and trace(B_k) = trace(E_k).
class OperatorTrace {
public:
    explicit OperatorTrace(const Matrix& Xs) : gram_(Xs.transpose() * Xs), E_(Matrix::Zero(Xs.cols(), Xs.cols())) {}

    double step(Index a, double eps) {
        const Eigen::RowVectorXd update = eps * (gram_.row(a) - gram_.row(a) * E_) / gram_(a, a);
        E_.row(a) += update;
        return E_.trace();
    }

private:
    Matrix gram_;
    Matrix E_;
};

/// Shared state for one boosting run on a column subset.
class Booster {
public:
    Booster(BoostEngine engine, const Matrix& X, const Vector& y, const ActiveSet& subset, double eps, bool track_df,
            DfMode df_mode)
        : engine_(engine), eps_(eps), Xs_(select_columns(X, subset)), u_(y), track_df_(track_df), df_mode_(df_mode) {
        if (subset.empty()) throw std::invalid_argument("boosting: empty subset");
        if (y.size() != X.rows()) throw std::invalid_argument("boosting: dimension mismatch");
        norms2_.resize(Xs_.cols());
        for (Index a = 0; a < Xs_.cols(); ++a) {
            norms2_(a) = Xs_.col(a).squaredNorm();
            if (norms2_(a) == 0.0) throw std::invalid_argument("boosting: all-zero column in subset");
        }
        if (df_mode_ == DfMode::automatic)
            df_mode_ = engine == BoostEngine::ls_boost ? DfMode::operator_trace : DfMode::active_count;
        if (track_df_ && df_mode_ == DfMode::operator_trace && engine == BoostEngine::forward_stagewise)
            throw std::invalid_argument("boosting: operator-trace df is undefined for forward stagewise");
        if (track_df_ && df_mode_ == DfMode::operator_trace) trace_.emplace(Xs_);
        selected_.assign(static_cast<std::size_t>(Xs_.cols()), false);

        path_.engine = engine;
        path_.learning_rate = eps;
        path_.p = X.cols();
        path_.subset = subset;
        const double rss0 = u_.squaredNorm();
        path_.rss.push_back(rss0);
        if (track_df_) path_.df.push_back(0.0);
        // Correlations at or below this level are treated as an exact zero gradient.
        stall_ = 1e-30 * rss0 * norms2_.maxCoeff();
    }

    /// One step; false when the gradient vanished and nothing changed.
    bool step() {
        const Vector c = Xs_.transpose() * u_;
        Index best = -1;
        double best_score = 0.0;
        for (Index a = 0; a < c.size(); ++a) {
            const double score = engine_ == BoostEngine::ls_boost ? c(a) * c(a) / norms2_(a) : c(a) * c(a);
            if (score > best_score) {
                best_score = score;
                best = a;
            }
        }
        const double threshold = engine_ == BoostEngine::ls_boost ? stall_ / norms2_.maxCoeff() : stall_;
        if (best < 0 || best_score <= threshold) {
            path_.stalled = true;
            return false;
        }
        const double increment = engine_ == BoostEngine::ls_boost ? eps_ * c(best) / norms2_(best)
                                                                  : eps_ * (c(best) > 0.0 ? 1.0 : -1.0);
        u_.noalias() -= increment * Xs_.col(best);
        path_.steps.push_back({path_.subset[static_cast<std::size_t>(best)], increment});
        path_.rss.push_back(u_.squaredNorm());
        if (track_df_) {
            if (trace_) {
                path_.df.push_back(trace_->step(best, eps_));
            } else {
                if (!selected_[static_cast<std::size_t>(best)]) {
                    selected_[static_cast<std::size_t>(best)] = true;
                    ++distinct_;
                }
                path_.df.push_back(static_cast<double>(distinct_));
            }
        }
        return true;
    }

    BoostPath& path() { return path_; }

private:
    BoostEngine engine_;
    double eps_;
    Matrix Xs_;
    Vector u_;
    Vector norms2_;
    bool track_df_;
    DfMode df_mode_;
    std::optional<OperatorTrace> trace_;
    std::vector<bool> selected_;
    std::size_t distinct_ = 0;
    double stall_ = 0.0;
    BoostPath path_;
};

BoostPath run_with_rule(BoostEngine engine, const Matrix& X, const Vector& y, const ActiveSet& subset,
                        const BoostConfig& config) {
    config.validate();
    const int max_iter = config.resolved_max_iter(X.rows());
    const bool aicc = config.stop_rule != StopRule::fixed;
    Booster booster(engine, X, y, subset, config.learning_rate, aicc, config.df_mode);

    for (int k = 0; k < max_iter; ++k) {
        if (!booster.step()) break;
        // The criterion is undefined once df + 2 reaches n.
        if (aicc && booster.path().df.back() + 2.0 >= static_cast<double>(X.rows())) break;
    }
    BoostPath& path = booster.path();
    if (!aicc) {
        path.stop_index = path.steps.size();
        return std::move(path);
    }
    path.aicc_index = aicc_stop(path.rss, path.df, X.rows());
    std::size_t budget = path.aicc_index;
    if (config.stop_rule == StopRule::aicc_doubled) {
        budget = path.aicc_index * static_cast<std::size_t>(config.aicc_multiplier);
        while (path.steps.size() < budget && booster.step()) {
        }
    }
    path.stop_index = std::min(budget, path.steps.size());
    return std::move(path);
}

}  // namespace

BoostPath ls_boost(const Matrix& X, const Vector& y, const ActiveSet& subset, const BoostConfig& config) {
    return run_with_rule(BoostEngine::ls_boost, X, y, subset, config);
}

BoostPath ls_boost(const StandardizedDataset& data, const ActiveSet& subset, const BoostConfig& config) {
    return ls_boost(data.X(), data.y(), subset, config);
}

BoostPath forward_stagewise(const Matrix& X, const Vector& y, const ActiveSet& subset, const BoostConfig& config) {
    return run_with_rule(BoostEngine::forward_stagewise, X, y, subset, config);
}

BoostPath forward_stagewise(const StandardizedDataset& data, const ActiveSet& subset, const BoostConfig& config) {
    return forward_stagewise(data.X(), data.y(), subset, config);
}

BoostPath run_boost_until(BoostEngine engine, const Matrix& X, const Vector& y, const ActiveSet& subset,
                          double learning_rate, int max_iter, const BoostHalt& halt) {
    if (!(learning_rate > 0.0 && learning_rate < 1.0)) throw std::invalid_argument("boosting: learning rate must lie in (0,1)");
    Booster booster(engine, X, y, subset, learning_rate, false, DfMode::automatic);
    for (int k = 0; k < max_iter; ++k) {
        if (!booster.step()) break;
        if (halt && halt(booster.path())) break;
    }
    BoostPath& path = booster.path();
    path.stop_index = path.steps.size();
    return std::move(path);
}

std::vector<double> boosting_df(const Matrix& X, const BoostPath& path) {
    std::vector<double> df{0.0};
    if (path.subset.empty()) return df;
    OperatorTrace trace(select_columns(X, path.subset));
    df.reserve(path.steps.size() + 1);
    for (const auto& s : path.steps) {
        const auto it = std::lower_bound(path.subset.indices().begin(), path.subset.indices().end(), s.column);
        const Index a = static_cast<Index>(it - path.subset.indices().begin());
        df.push_back(trace.step(a, path.learning_rate));
    }
    return df;
}

std::vector<double> boosting_df(const StandardizedDataset& data, const BoostPath& path) {
    return boosting_df(data.X(), path);
}

std::vector<double> aicc_curve(std::span<const double> rss, std::span<const double> df, Index n) {
    if (rss.size() != df.size()) throw std::invalid_argument("aicc: rss and df traces differ in length");
    const double dn = static_cast<double>(n);
    std::vector<double> out(rss.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t k = 0; k < rss.size(); ++k) {
        if (df[k] + 2.0 >= dn) break;
        out[k] = std::log(rss[k] / dn) + (1.0 + df[k] / dn) / (1.0 - (df[k] + 2.0) / dn);
    }
    return out;
}

std::size_t aicc_stop(std::span<const double> rss, std::span<const double> df, Index n) {
    const auto curve = aicc_curve(rss, df, n);
    std::size_t best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < curve.size(); ++k) {
        if (std::isnan(curve[k])) break;
        if (curve[k] < best_value) {
            best_value = curve[k];
            best = k;
        }
    }
    return best;
}

std::size_t aicc_stop(const BoostPath& path, Index n) {
    if (path.df.size() != path.rss.size()) throw std::invalid_argument("aicc_stop: path has no df trace");
    return aicc_stop(path.rss, path.df, n);
}

std::vector<std::size_t> subsample_steps(std::size_t stop, std::size_t count) {
    if (count == 0) throw std::invalid_argument("subsample_steps: count must be positive");
    std::vector<std::size_t> out;
    if (stop == 0) return out;
    if (count == 1) return {stop};
    const double span = static_cast<double>(stop - 1);
    for (std::size_t i = 0; i < count; ++i) {
        const double x = 1.0 + static_cast<double>(i) * span / static_cast<double>(count - 1);
        const auto k = static_cast<std::size_t>(std::floor(x + 0.5));
        if (out.empty() || out.back() != k) out.push_back(k);
    }
    return out;
}

}  // namespace lboost
