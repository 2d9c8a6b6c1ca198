#include "doctest.h"
#include "lboost/simulation.hpp"
#include "oracles.hpp"

using namespace lboost;

namespace {

SimConfig small_config() {
    SimConfig c = preset("low");
    c.snrs = {0.5, 3.0};
    c.replications = 2;
    c.seed = 99;
    return c;
}

bool same_result(const ExperimentResult& a, const ExperimentResult& b) {
    if (a.raws.size() != b.raws.size() || a.cells.size() != b.cells.size()) return false;
    for (std::size_t i = 0; i < a.raws.size(); ++i) {
        const auto &x = a.raws[i].metrics, &y = b.raws[i].metrics;
        if (x.rr != y.rr || x.rte != y.rte || x.pve != y.pve || x.nnz != y.nnz ||
            x.correct_nonzeros != y.correct_nonzeros || a.raws[i].q != b.raws[i].q ||
            a.raws[i].stage2_index != b.raws[i].stage2_index)
            return false;
    }
    for (std::size_t i = 0; i < a.cells.size(); ++i)
        if (a.cells[i].rr != b.cells[i].rr || a.cells[i].nnz != b.cells[i].nnz) return false;
    return true;
}

}  // namespace

TEST_CASE("covariance examples") {
    CHECK(make_sigma(4, 0.0) == Matrix::Identity(4, 4));
    Matrix expect(3, 3);
    expect << 1, 0.5, 0.25, 0.5, 1, 0.5, 0.25, 0.5, 1;
    CHECK((make_sigma(3, 0.5) - expect).cwiseAbs().maxCoeff() < 1e-15);
    const Eigen::LLT<Matrix> llt(make_sigma(100, 0.7));
    CHECK(llt.info() == Eigen::Success);
}

TEST_CASE("coefficient patterns") {
    CHECK(make_beta(2, 5, 3).values == Vector{{1.0, 1.0, 1.0, 0.0, 0.0}});
    const Vector t3 = make_beta(3, 7, 5).values;
    const Vector e3{{10.0, 7.625, 5.25, 2.875, 0.5, 0.0, 0.0}};
    CHECK((t3 - e3).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(make_beta(5, 3, 1).values == Vector{{1.0, 0.5, 0.25}});
    CHECK(make_beta(1, 10, 5).values == Vector{{1.0, 0, 1.0, 0, 0, 1.0, 0, 1.0, 0, 1.0}});
    CHECK(make_beta(1, 5, 1).values == Vector{{1.0, 0, 0, 0, 0}});
    CHECK(make_beta(3, 4, 1).values == Vector{{10.0, 0, 0, 0}});
    CHECK(make_beta(2, 5, 3).intercept == 0.0);
    CHECK_THROWS(make_beta(4, 10, 5));
    CHECK_THROWS(make_beta(2, 5, 6));
}

TEST_CASE("noise variance") {
    const CoefVector b = make_beta(2, 10, 5);
    CHECK(noise_variance(b, make_sigma(10, 0.0), 2.0) == doctest::Approx(2.5));
    const Matrix S = make_sigma(10, 0.35);
    CHECK(noise_variance(b, S, 1.0) == doctest::Approx(b.values.transpose() * S * b.values));
    CHECK(noise_variance(b, S, 1e12) < 1e-10);
}

TEST_CASE("default signal-to-noise grid") {
    const std::vector<double> expect{0.05, 0.09, 0.14, 0.25, 0.42, 0.71, 1.22, 2.07, 3.52, 6.00};
    CHECK(default_snr_grid() == expect);
}

TEST_CASE("presets") {
    CHECK(preset("low").n == 100);
    CHECK(preset("low").lambda_count == 50);
    CHECK(preset("medium").p == 100);
    CHECK(preset("high5").n == 50);
    CHECK(preset("high10").s == 10);
    CHECK(preset("high10").lambda_count == 100);
    CHECK_THROWS(preset("huge"));
}

TEST_CASE("draws are reproducible and streams are distinct") {
    const SimConfig c = small_config();
    const SimDraw a = draw_dataset(c, 0.5, 0), b = draw_dataset(c, 0.5, 0);
    CHECK(a.train.X == b.train.X);
    CHECK(a.train.y == b.train.y);
    CHECK(a.validation.y == b.validation.y);
    CHECK(a.validation.n() == a.train.n());
    CHECK_FALSE(draw_dataset(c, 0.5, 1).train.X == a.train.X);
    CHECK_FALSE(a.validation.X == a.train.X);
    CHECK(a.test.sigma2 == doctest::Approx(noise_variance(make_beta(2, 10, 5), make_sigma(10, 0.35), 0.5)));
}

TEST_CASE("Monte Carlo covariance and signal-to-noise ratio") {
    SimConfig c;
    c.n = 100000;
    c.p = 3;
    c.s = 3;
    c.rho = 0.5;
    c.snrs = {2.0};
    c.replications = 1;
    const SimDraw d = draw_dataset(c, 2.0, 0);
    const Matrix centered = d.train.X.rowwise() - d.train.X.colwise().mean();
    const Matrix cov = centered.transpose() * centered / static_cast<double>(c.n - 1);
    CHECK((cov - make_sigma(3, 0.5)).cwiseAbs().maxCoeff() < 0.02);
    const Vector resid = d.train.y - d.train.X * d.test.beta_star;
    const double s2 = resid.squaredNorm() / static_cast<double>(c.n);
    const double snr = d.test.beta_star.dot(cov * d.test.beta_star) / s2;
    CHECK(std::abs(snr / 2.0 - 1.0) < 0.05);
}

TEST_CASE("single replication averages equal the raw record") {
    SimConfig c = small_config();
    c.snrs = {1.0};
    c.replications = 1;
    c.methods = {Method::lassoed_boosting};
    const ExperimentResult r = run_experiment(c);
    REQUIRE(r.raws.size() == 1);
    REQUIRE(r.cells.size() == 1);
    CHECK(r.cells[0].rr == r.raws[0].metrics.rr);
    CHECK(r.cells[0].rte == r.raws[0].metrics.rte);
    CHECK(r.cells[0].pve == r.raws[0].metrics.pve);
    CHECK(r.cells[0].nnz == static_cast<double>(r.raws[0].metrics.nnz));
    CHECK(r.cells[0].completed == 1);
}

TEST_CASE("cell averages are arithmetic means of the raws") {
    const ExperimentResult r = run_experiment(small_config());
    for (const auto& cell : r.cells) {
        double rr = 0.0, nnz = 0.0;
        std::size_t k = 0;
        for (const auto& raw : r.raws)
            if (raw.method == cell.method && r.config.snrs[raw.snr_index] == cell.snr && raw.ok) {
                rr += raw.metrics.rr;
                nnz += static_cast<double>(raw.metrics.nnz);
                ++k;
            }
        CHECK(k == cell.completed);
        CHECK(std::abs(cell.rr - rr / static_cast<double>(k)) < 1e-12);
        CHECK(std::abs(cell.nnz - nnz / static_cast<double>(k)) < 1e-12);
        CHECK(cell.complete());
    }
    CHECK(&r.cell(1, Method::lasso) == &r.cells[1 * r.config.methods.size() + 1]);
}

TEST_CASE("results do not depend on the thread count or schedule") {
    SimConfig c = small_config();
    c.execution = Execution::serial;
    const ExperimentResult serial = run_experiment(c);
    c.execution = Execution::parallel;
    set_thread_count(1);
    const ExperimentResult one = run_experiment(c);
    set_thread_count(4);
    const ExperimentResult four = run_experiment(c);
    CHECK(same_result(serial, one));
    CHECK(same_result(serial, four));
}

TEST_CASE("the null model scores at the documented endpoints") {
    const SimConfig c = small_config();
    for (double snr : c.snrs) {
        const SimDraw d = draw_dataset(c, snr, 0);
        const MetricsRecord m = evaluate_metrics(Vector::Zero(c.p), d.test.beta_star, d.test.sigma, d.test.sigma2);
        CHECK(m.rr == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(m.rte == doctest::Approx(snr + 1.0).epsilon(1e-12));
        CHECK(std::abs(m.pve) < 1e-12);
        CHECK(m.nnz == 0);
    }
}

TEST_CASE("oracle tuning runs end to end") {
    SimConfig c = small_config();
    c.tuning = Tuning::oracle;
    c.snrs = {6.0};
    const ExperimentResult r = run_experiment(c);
    for (const auto& cell : r.cells) {
        CHECK(cell.complete());
        CHECK(cell.rr < 0.5);
    }
}

TEST_CASE("config validation") {
    SimConfig c;
    c.s = 11;
    CHECK_THROWS(c.validate());
    c = SimConfig{};
    c.replications = 0;
    CHECK_THROWS(c.validate());
    c = SimConfig{};
    c.rho = 1.0;
    CHECK_THROWS(c.validate());
    CHECK(parse_tuning("oracle") == Tuning::oracle);
    CHECK_THROWS(parse_tuning("cv"));
}
