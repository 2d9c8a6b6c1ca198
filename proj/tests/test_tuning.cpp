#include <algorithm>
#include <random>

#include "doctest.h"
#include "lboost/tuning.hpp"
#include "oracles.hpp"

using namespace lboost;

namespace {

/// Family over `p` columns whose candidates are the given standardized vectors,
/// one entry each, with identity scaling so original and standardized agree.
PathFamily family_of(const std::vector<Vector>& cands, Index p) {
    PathFamily f;
    f.p = p;
    f.scaling.col_means = Vector::Zero(p);
    f.scaling.col_scales = Vector::Ones(p);
    f.scaling.constant.assign(static_cast<std::size_t>(p), false);
    for (std::size_t i = 0; i < cands.size(); ++i) {
        FamilyEntry e;
        e.q = i;
        e.active = ActiveSet::all(p);
        e.candidates.push_back({0, cands[i]});
        f.entries.push_back(e);
    }
    return f;
}

Matrix random_sigma(std::mt19937_64& gen, Index p) {
    const Matrix A = oracle::random_matrix(gen, p + 3, p);
    return A.transpose() * A / static_cast<double>(p + 3);
}

}  // namespace

TEST_CASE("relative risk examples") {
    const Matrix I = Matrix::Identity(2, 2);
    const Vector bs{{1.0, 0.0}};
    CHECK(relative_risk(bs, bs, I) == 0.0);
    CHECK(relative_risk(Vector::Zero(2), bs, I) == 1.0);
    CHECK(relative_risk(Vector{{0.0, 1.0}}, bs, I) == doctest::Approx(2.0));
    CHECK_THROWS_AS(relative_risk(bs, Vector::Zero(2), I), std::domain_error);
}

TEST_CASE("relative test error and proportion of variance explained") {
    const Matrix I = Matrix::Identity(3, 3);
    const Vector bs{{1.0, 1.0, 1.0}};
    const double sigma2 = 1.5;
    const double snr = 3.0 / sigma2;
    CHECK(relative_test_error(bs, bs, I, sigma2) == 1.0);
    CHECK(relative_test_error(Vector::Zero(3), bs, I, sigma2) == doctest::Approx(snr + 1.0));
    CHECK(relative_test_error(Vector{{1.0, 1.0, 1.0 + std::sqrt(3.0)}}, bs, I, 1.0) == doctest::Approx(4.0));
    CHECK(pve(bs, bs, I, sigma2) == doctest::Approx(snr / (1.0 + snr)));
    CHECK(pve(Vector::Zero(3), bs, I, sigma2) == doctest::Approx(0.0));
    CHECK(pve(bs, bs, I, 3.0) == doctest::Approx(0.5));
}

TEST_CASE("metric identities hold on random inputs") {
    std::mt19937_64 gen(71);
    std::uniform_real_distribution<double> u(0.1, 5.0);
    for (int rep = 0; rep < 200; ++rep) {
        const Index p = 2 + rep % 6;
        const Matrix S = random_sigma(gen, p);
        const Vector bs = oracle::random_vector(gen, p), bh = oracle::random_vector(gen, p);
        const double s2 = u(gen);
        const double signal = bs.dot(S * bs), snr = signal / s2;
        const double rr = relative_risk(bh, bs, S), rte = relative_test_error(bh, bs, S, s2);
        CHECK(std::abs(rte - (rr * snr + 1.0)) < 1e-12 * std::max(1.0, rte));
        CHECK(std::abs(pve(bh, bs, S, s2) - (1.0 - rte * s2 / (signal + s2))) < 1e-12);
        CHECK(std::abs(excess_risk(bh, bs, S) - rr * signal) < 1e-12 * std::max(1.0, rr * signal));
    }
}

TEST_CASE("nonzero counts use exact zeros") {
    CHECK(nnz_and_correct(Vector{{0.0, 1.2, 0.0}}, Vector{{1.0, 0.0, 0.0}}).nnz == 1);
    const auto c = nnz_and_correct(Vector{{0.5, 0.0, 0.1}}, Vector{{1.0, 1.0, 0.0}});
    CHECK(c.nnz == 2);
    CHECK(c.correct == 1);
    const auto z = nnz_and_correct(Vector::Zero(3), Vector{{1.0, 1.0, 0.0}});
    CHECK(z.nnz == 0);
    CHECK(z.correct == 0);
    CHECK(nnz_and_correct(Vector{{1e-300}}, Vector{{1.0}}).nnz == 1);
}

TEST_CASE("mean squared prediction error") {
    Matrix X(2, 1);
    X << 1, 2;
    Vector y(2);
    y << 1, -1;
    CHECK(mspe(CoefVector{Vector::Zero(1), 0.0}, make_dataset(X, y)) == doctest::Approx(1.0));
    CHECK(mspe(CoefVector{Vector{{2.0}}, 0.5}, make_dataset(X, Vector{{2.5, 4.5}})) == 0.0);
    // Root of the error level quoted for the application.
    CHECK(std::sqrt(3.136e-5) == doctest::Approx(0.0056).epsilon(1e-3));
}

TEST_CASE("validation selection picks the exact model and respects ties") {
    std::mt19937_64 gen(73);
    const Matrix Xv = oracle::random_matrix(gen, 30, 3);
    const Vector bs{{1.0, -2.0, 0.0}};
    const Dataset val = make_dataset(Xv, Xv * bs);
    const PathFamily f = family_of({Vector::Zero(3), Vector{{1.0, -1.0, 0.0}}, bs, Vector{{0.5, 0.5, 0.5}}}, 3);
    const TuningSelection s = validate_select(f, val);
    CHECK(s.entry == 2);
    CHECK(s.coef.values == bs);
    CHECK(s.criterion == doctest::Approx(0.0));

    const TuningSelection one = validate_select(family_of({Vector{{0.1, 0.2, 0.3}}}, 3), val);
    CHECK(one.entry == 0);

    // Two candidates with the same validation error: the sparser one wins.
    Matrix Xt(2, 5);
    Xt << 1, 1, 0, 0, 0, 0, 0, 1, 1, 1;
    const Dataset tie = make_dataset(Xt, Vector{{1.0, 1.0}});
    const Vector dense{{0.5, 0.5, 0.25, 0.25, 0.5}};  // exact fit, nnz 5
    const Vector sparse{{1.0, 0.0, 0.0, 1.0, 0.0}};     // exact fit, nnz 2
    const PathFamily ft = family_of({dense, sparse}, 5);
    CHECK(validate_select(ft, tie).entry == 1);
    CHECK(validate_select(ft, tie).nnz == 2);

    CHECK_THROWS(validate_select(PathFamily{}, val));
}

TEST_CASE("oracle selection matches exhaustive evaluation") {
    std::mt19937_64 gen(79);
    for (int rep = 0; rep < 20; ++rep) {
        const Matrix S = random_sigma(gen, 4);
        const Vector bs = oracle::random_vector(gen, 4);
        std::vector<Vector> cands;
        for (int i = 0; i < 20; ++i) cands.push_back(oracle::random_vector(gen, 4));
        const TuningSelection s = oracle_select(family_of(cands, 4), CoefVector{bs, 0.0}, S);
        std::size_t best = 0;
        for (std::size_t i = 1; i < cands.size(); ++i)
            if ((cands[i] - bs).dot(S * (cands[i] - bs)) < (cands[best] - bs).dot(S * (cands[best] - bs))) best = i;
        CHECK(s.entry == best);
        CHECK(s.criterion == doctest::Approx(relative_risk(cands[best], bs, S) * bs.dot(S * bs)));
    }
    const Vector bs{{0.0, 2.0}};
    const TuningSelection exact = oracle_select(family_of({Vector::Zero(2), bs}, 2), CoefVector{bs, 0.0},
                                                Matrix::Identity(2, 2));
    CHECK(exact.entry == 1);
    CHECK(exact.criterion == 0.0);
}

TEST_CASE("validation selection ignores candidate order") {
    std::mt19937_64 gen(83);
    const Matrix Xv = oracle::random_matrix(gen, 25, 4);
    const Dataset val = make_dataset(Xv, oracle::random_vector(gen, 25));
    std::vector<Vector> cands;
    for (int i = 0; i < 15; ++i) cands.push_back(oracle::random_vector(gen, 4));
    cands.push_back(cands[3]);  // a duplicate makes ties part of the test
    const TuningSelection ref = validate_select(family_of(cands, 4), val);
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<std::size_t> order(cands.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::shuffle(order.begin(), order.end(), gen);
        std::vector<Vector> shuffled;
        for (auto i : order) shuffled.push_back(cands[i]);
        const TuningSelection s = validate_select(family_of(shuffled, 4), val);
        CHECK(s.coef.values == ref.coef.values);
        CHECK(s.criterion == ref.criterion);
    }
}

TEST_CASE("metrics record bundles every metric") {
    const Matrix I = Matrix::Identity(3, 3);
    const MetricsRecord m = evaluate_metrics(Vector{{1.0, 0.0, 0.5}}, Vector{{1.0, 1.0, 0.0}}, I, 2.0);
    CHECK(m.rr == doctest::Approx(relative_risk(Vector{{1.0, 0.0, 0.5}}, Vector{{1.0, 1.0, 0.0}}, I)));
    CHECK(m.nnz == 2);
    CHECK(m.correct_nonzeros == 1);
    CHECK(m.rte == doctest::Approx(m.rr * 1.0 + 1.0));
}
