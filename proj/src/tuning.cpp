#include "lboost/tuning.hpp"

#include <limits>
#include <stdexcept>
#include <tuple>

namespace lboost {

namespace {

std::size_t count_nonzero(const Vector& v) {
    std::size_t k = 0;
    for (Index j = 0; j < v.size(); ++j) k += v(j) != 0.0;
    return k;
}

/// Scans every candidate and keeps the lexicographically smallest
/// (criterion, nnz, q, stage-2 index, entry).
template <typename Criterion>
TuningSelection select_min(const PathFamily& family, Criterion&& criterion) {
    if (family.candidate_count() == 0) throw std::invalid_argument("tuning: empty path family");
    TuningSelection best;
    best.method = family.method;
    bool have = false;
    auto key = [](const TuningSelection& s) { return std::tie(s.criterion, s.nnz, s.q, s.stage2_index, s.entry); };
    for (std::size_t e = 0; e < family.entries.size(); ++e) {
        const FamilyEntry& entry = family.entries[e];
        for (const Candidate& c : entry.candidates) {
            TuningSelection s;
            s.method = family.method;
            s.entry = e;
            s.q = entry.q;
            s.stage2_index = c.stage2_index;
            s.coef = family.coefficients(entry, c);
            s.nnz = count_nonzero(s.coef.values);
            s.criterion = criterion(entry, s.coef);
            if (!have || key(s) < key(best)) {
                best = std::move(s);
                have = true;
            }
        }
    }
    return best;
}

}  // namespace

TuningSelection validate_select(const PathFamily& family, const Dataset& val) {
    if (val.p() != family.p) throw std::invalid_argument("validate_select: validation data has a different column count");
    if (val.n() < 1) throw std::invalid_argument("validate_select: empty validation set");
    const double dn = static_cast<double>(val.n());
    return select_min(family, [&](const FamilyEntry& entry, const CoefVector& coef) {
        Vector r = val.y.array() - coef.intercept;
        for (Index j : entry.active.indices())
            if (coef.values(j) != 0.0) r.noalias() -= coef.values(j) * val.X.col(j);
        return r.squaredNorm() / dn;
    });
}

TuningSelection oracle_select(const PathFamily& family, const CoefVector& beta_star, const Matrix& sigma) {
    if (beta_star.values.size() != family.p || sigma.rows() != family.p || sigma.cols() != family.p)
        throw std::invalid_argument("oracle_select: dimension mismatch");
    return select_min(family, [&](const FamilyEntry&, const CoefVector& coef) {
        return excess_risk(coef.values, beta_star.values, sigma);
    });
}

double excess_risk(const Vector& beta_hat, const Vector& beta_star, const Matrix& sigma) {
    if (beta_hat.size() != beta_star.size() || sigma.rows() != beta_hat.size() || sigma.cols() != beta_hat.size())
        throw std::invalid_argument("metrics: dimension mismatch");
    const Vector d = beta_hat - beta_star;
    return d.dot(sigma * d);
}

double relative_risk(const Vector& beta_hat, const Vector& beta_star, const Matrix& sigma) {
    const double signal = excess_risk(Vector::Zero(beta_star.size()), beta_star, sigma);
    if (!(signal > 0.0)) throw std::domain_error("relative_risk: beta*' Sigma beta* is zero");
    return excess_risk(beta_hat, beta_star, sigma) / signal;
}

double relative_test_error(const Vector& beta_hat, const Vector& beta_star, const Matrix& sigma, double sigma2) {
    if (!(sigma2 > 0.0)) throw std::domain_error("relative_test_error: noise variance must be positive");
    return (excess_risk(beta_hat, beta_star, sigma) + sigma2) / sigma2;
}

double pve(const Vector& beta_hat, const Vector& beta_star, const Matrix& sigma, double sigma2) {
    if (!(sigma2 > 0.0)) throw std::domain_error("pve: noise variance must be positive");
    const double signal = excess_risk(Vector::Zero(beta_star.size()), beta_star, sigma);
    return 1.0 - (excess_risk(beta_hat, beta_star, sigma) + sigma2) / (signal + sigma2);
}

NonzeroCount nnz_and_correct(const Vector& beta_hat, const Vector& beta_star) {
    if (beta_hat.size() != beta_star.size()) throw std::invalid_argument("nnz_and_correct: dimension mismatch");
    NonzeroCount out;
    for (Index j = 0; j < beta_hat.size(); ++j) {
        if (beta_hat(j) == 0.0) continue;
        ++out.nnz;
        if (beta_star(j) != 0.0) ++out.correct;
    }
    return out;
}

double mspe(const CoefVector& beta, const Dataset& test) {
    if (beta.values.size() != test.p()) throw std::invalid_argument("mspe: dimension mismatch");
    if (test.n() < 1) throw std::invalid_argument("mspe: empty test set");
    const Vector r = (test.y - test.X * beta.values).array() - beta.intercept;
    return r.squaredNorm() / static_cast<double>(test.n());
}

MetricsRecord evaluate_metrics(const Vector& beta_hat, const Vector& beta_star, const Matrix& sigma, double sigma2) {
    MetricsRecord m;
    m.rr = relative_risk(beta_hat, beta_star, sigma);
    m.rte = relative_test_error(beta_hat, beta_star, sigma, sigma2);
    m.pve = pve(beta_hat, beta_star, sigma, sigma2);
    const auto counts = nnz_and_correct(beta_hat, beta_star);
    m.nnz = counts.nnz;
    m.correct_nonzeros = counts.correct;
    return m;
}

}  // namespace lboost
