#include <random>

#include "doctest.h"
#include "lboost/two_stage.hpp"
#include "oracles.hpp"

using namespace lboost;

namespace {

StandardizedDataset sparse_data(std::uint64_t seed, Index n, Index p, double rho = 0.35, double noise = 1.0) {
    std::mt19937_64 gen(seed);
    const Matrix X = oracle::ar1_design(gen, n, p, rho);
    Vector beta = Vector::Zero(p);
    for (Index j = 0; j < std::min<Index>(4, p); ++j) beta(j) = 1.0;
    return standardize(make_dataset(X, X * beta + noise * oracle::random_vector(gen, n)));
}

LambdaGrid grid_for(const StandardizedDataset& d, std::size_t count = 20) {
    return make_lambda_grid(lambda_max(d), count, default_min_ratio(d.n(), d.p()));
}

void check_supports(const PathFamily& f) {
    for (const auto& e : f.entries) {
        if (!e.active.empty()) CHECK_FALSE(e.candidates.empty());
        for (const auto& c : e.candidates) {
            const Vector b = f.standardized(e, c);
            CHECK(e.active.includes(ActiveSet::support(b)));
        }
    }
}

bool same_family(const PathFamily& a, const PathFamily& b) {
    if (a.entries.size() != b.entries.size()) return false;
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        const auto &x = a.entries[i], &y = b.entries[i];
        if (x.q != y.q || !(x.active == y.active) || x.candidates.size() != y.candidates.size()) return false;
        for (std::size_t c = 0; c < x.candidates.size(); ++c)
            if (x.candidates[c].stage2_index != y.candidates[c].stage2_index ||
                x.candidates[c].values != y.candidates[c].values)
                return false;
    }
    return true;
}

double min_family_loss(const PathFamily& f, const StandardizedDataset& d) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : f.entries)
        for (const auto& c : e.candidates) best = std::min(best, loss(d.X(), d.y(), f.standardized(e, c)));
    return best;
}

}  // namespace

TEST_CASE("method names round-trip") {
    for (Method m : all_methods()) CHECK(parse_method(to_string(m)) == m);
    CHECK_THROWS_AS(parse_method("best_subset"), std::invalid_argument);
}

TEST_CASE("lassoed boosting family structure") {
    const StandardizedDataset d = sparse_data(1, 60, 8);
    const LambdaGrid grid = grid_for(d);
    const LassoPath path = fit_lasso_path(d, grid);
    TwoStageOptions opts;
    const PathFamily f = lassoed_boosting(d, path, opts);
    check_supports(f);
    REQUIRE_FALSE(f.entries.empty());
    CHECK(f.entries.front().active.empty());
    REQUIRE(f.entries.front().candidates.size() == 1);
    CHECK(f.standardized(f.entries.front(), f.entries.front().candidates[0]).isZero(0.0));
    for (const auto& e : f.entries) CHECK(e.candidates.size() <= opts.boost_steps);

    // No two entries share an active set.
    for (std::size_t i = 0; i < f.entries.size(); ++i)
        for (std::size_t j = i + 1; j < f.entries.size(); ++j) CHECK_FALSE(f.entries[i].active == f.entries[j].active);

    // Stage-two candidates never beat the restricted least-squares fit in sample.
    for (const auto& e : f.entries) {
        if (e.active.empty()) continue;
        const double floor = loss(d.X(), d.y(), ls_solve(d.X(), d.y(), e.active));
        for (const auto& c : e.candidates) CHECK(loss(d.X(), d.y(), f.standardized(e, c)) >= floor - 1e-10);
    }
}

TEST_CASE("singleton active set approaches the univariate fit") {
    const StandardizedDataset d = sparse_data(2, 50, 1, 0.0, 0.5);
    TwoStageOptions opts;
    opts.boost.learning_rate = 0.1;
    opts.boost.stop_rule = StopRule::fixed;
    opts.boost.max_iter = 2000;
    const PathFamily f = lassoed_boosting(d, grid_for(d, 10), opts);
    const FamilyEntry& e = f.entries.back();
    REQUIRE(e.active.size() == 1);
    const Vector last = f.standardized(e, e.candidates.back());
    CHECK(std::abs(last(0) - ls_solve(d.X(), d.y(), e.active)(0)) < 1e-4);
}

TEST_CASE("lassoed forward stagewise moves in multiples of the step") {
    const StandardizedDataset d = sparse_data(3, 50, 6);
    TwoStageOptions opts;
    opts.boost.learning_rate = 0.01;
    const PathFamily f = lassoed_forward_stagewise(d, grid_for(d), opts);
    check_supports(f);
    CHECK(f.entries.front().active.empty());
    for (const auto& e : f.entries) {
        if (e.active.size() != 1) continue;
        for (const auto& c : e.candidates) {
            const double v = std::abs(c.values(0)) / 0.01;
            CHECK(std::abs(v - std::round(v)) < 1e-9);
        }
    }
}

TEST_CASE("relaxed lasso contains both endpoints exactly") {
    const StandardizedDataset d = sparse_data(4, 60, 8);
    const LassoPath path = fit_lasso_path(d, grid_for(d));
    const auto w = equally_spaced_weights(50);
    CHECK(w.front() == 0.0);
    CHECK(w.back() == 1.0);
    const PathFamily f = relaxed_lasso(d, path, w);
    check_supports(f);
    REQUIRE(f.entries.size() == path.size());
    for (std::size_t q = 0; q < path.size(); ++q) {
        const FamilyEntry& e = f.entries[q];
        if (e.active.empty()) continue;
        const Vector ls = ls_solve(d.X(), d.y(), e.active);
        bool has_lasso = false, has_ls = false;
        for (const auto& c : e.candidates) {
            const Vector b = f.standardized(e, c);
            has_lasso |= b == path.coefs[q];
            has_ls |= b == ls;
        }
        CHECK(has_lasso);
        CHECK(has_ls);
    }
    const PathFamily mid = relaxed_lasso(d, path, {0.0, 0.5, 1.0});
    for (const auto& e : mid.entries) {
        if (e.active.empty()) continue;
        const Vector half = mid.standardized(e, e.candidates[1]);
        const Vector expect = 0.5 * (mid.standardized(e, e.candidates[0]) + mid.standardized(e, e.candidates[2]));
        CHECK((half - expect).cwiseAbs().maxCoeff() < 1e-12);
    }
    CHECK_THROWS(relaxed_lasso(d, path, {0.2, 1.0}));
}

TEST_CASE("families that contain restricted least squares reach its in-sample loss") {
    const StandardizedDataset d = sparse_data(5, 60, 8);
    const LassoPath path = fit_lasso_path(d, grid_for(d, 30));
    double best_ls = std::numeric_limits<double>::infinity();
    for (const auto& s : distinct_supports(path))
        if (!s.set.empty()) best_ls = std::min(best_ls, loss(d.X(), d.y(), ls_solve(d.X(), d.y(), s.set)));
    CHECK(min_family_loss(relaxed_lasso(d, path, equally_spaced_weights(50)), d) <= best_ls + 1e-10);
}

TEST_CASE("twiced lasso on the full support repeats the first stage") {
    const StandardizedDataset d = sparse_data(6, 80, 5, 0.0);
    const LambdaGrid grid = grid_for(d, 25);
    const LassoPath path = fit_lasso_path(d, grid);
    const PathFamily f = twiced_lasso(d, path, TwoStageOptions{});
    check_supports(f);
    bool found_full = false;
    for (const auto& e : f.entries) {
        if (e.active.size() != 5) continue;
        found_full = true;
        REQUIRE(e.candidates.size() == grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k)
            CHECK((f.standardized(e, e.candidates[k]) - path.coefs[k]).cwiseAbs().maxCoeff() < 1e-8);
    }
    CHECK(found_full);
    for (const auto& e : f.entries) {
        if (e.active.empty()) continue;
        CHECK(f.standardized(e, e.candidates[0]).isZero(0.0));  // lambda_1 is the full-data lambda max
    }
}

TEST_CASE("twiced boosting screening sets grow one variable at a time") {
    const StandardizedDataset d = sparse_data(7, 50, 5, 0.2);
    BoostConfig c;
    const auto sets = boosting_screen(d, c);
    REQUIRE_FALSE(sets.empty());
    CHECK(sets.size() <= 5);
    CHECK(sets.front().size() == 1);
    for (std::size_t i = 1; i < sets.size(); ++i) {
        CHECK(sets[i].size() == sets[i - 1].size() + 1);
        CHECK(sets[i].includes(sets[i - 1]));
    }
    const PathFamily f = twiced_boosting(d, TwoStageOptions{});
    check_supports(f);
    CHECK(f.entries.size() == sets.size());

    const StandardizedDataset one = sparse_data(8, 30, 1);
    const auto single = boosting_screen(one, c);
    REQUIRE(single.size() == 1);
    CHECK(single[0] == ActiveSet({0}, 1));
}

TEST_CASE("forward stepwise") {
    Matrix X(4, 3);
    X << 1, 1, 1, 1, -1, -1, -1, 1, -1, -1, -1, 1;
    Vector y(4);
    y << 1, 2, 3, 4;
    const StandardizedDataset o = standardize(make_dataset(X, y));
    const PathFamily fo = forward_stepwise(o, 1);
    Index best = 0;
    const Vector corr = (o.X().transpose() * o.y()).cwiseAbs();
    corr.maxCoeff(&best);
    CHECK(fo.entries[0].candidates.size() == 2);
    CHECK(ActiveSet::support(fo.standardized(fo.entries[0], fo.entries[0].candidates[1])) == ActiveSet({best}, 3));

    const StandardizedDataset d = sparse_data(9, 40, 6);
    const PathFamily f = forward_stepwise(d, 6);
    const FamilyEntry& e = f.entries.front();
    REQUIRE(e.candidates.size() == 7);
    CHECK(f.standardized(e, e.candidates[0]).isZero(0.0));
    const Vector full = oracle::normal_equations(d.X(), d.y());
    CHECK((f.standardized(e, e.candidates.back()) - full).cwiseAbs().maxCoeff() < 1e-8);
    for (std::size_t m = 0; m < e.candidates.size(); ++m)
        CHECK(ActiveSet::support(f.standardized(e, e.candidates[m])).size() == m);

    const StandardizedDataset zero = standardize(make_dataset(d.X(), Vector::Zero(40)));
    const PathFamily fz = forward_stepwise(zero, 6);
    CHECK(fz.candidate_count() == 1);
}

TEST_CASE("serial and parallel stage two agree bitwise") {
    const StandardizedDataset d = sparse_data(10, 80, 12);
    const LambdaGrid grid = grid_for(d, 30);
    TwoStageOptions serial, parallel;
    serial.execution = Execution::serial;
    parallel.execution = Execution::parallel;
    for (Method m : all_methods())
        CHECK(same_family(fit_method(m, d, grid, serial), fit_method(m, d, grid, parallel)));
}

TEST_CASE("fitting several methods at once matches fitting them one by one") {
    const StandardizedDataset d = sparse_data(11, 60, 7);
    const LambdaGrid grid = grid_for(d, 20);
    const TwoStageOptions opts;
    const auto many = fit_methods(all_methods(), d, grid, opts);
    REQUIRE(many.size() == all_methods().size());
    for (std::size_t i = 0; i < many.size(); ++i) CHECK(same_family(many[i], fit_method(all_methods()[i], d, grid, opts)));
}

TEST_CASE("original-scale coefficients reproduce standardized predictions") {
    std::mt19937_64 gen(12);
    Matrix X = oracle::random_matrix(gen, 50, 4) * 2.0;
    X.array() += 3.0;
    const Dataset raw = make_dataset(X, X.col(0) + oracle::random_vector(gen, 50));
    const StandardizedDataset d = standardize(raw);
    const PathFamily f = lassoed_boosting(d, grid_for(d), TwoStageOptions{});
    for (const auto& e : f.entries)
        for (const auto& c : e.candidates) {
            const CoefVector b = f.coefficients(e, c);
            const Vector a = (raw.X * b.values).array() + b.intercept;
            const Vector s = (d.X() * f.standardized(e, c)).array() + d.scaling.y_mean;
            CHECK((a - s).cwiseAbs().maxCoeff() < 1e-10);
        }
}
