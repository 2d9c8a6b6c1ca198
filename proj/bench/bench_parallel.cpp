// Times the OpenMP kernels against their serial reference and checks that
// both produce identical results.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lboost/attribution.hpp"
#include "lboost/parallel.hpp"
#include "lboost/simulation.hpp"
#include "lboost/two_stage.hpp"

using namespace lboost;

namespace {

template <class F>
double best_of(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

struct Row {
    std::string kernel;
    double serial = 0.0, parallel = 0.0;
    bool identical = false;
};

bool same_family(const PathFamily& a, const PathFamily& b) {
    if (a.entries.size() != b.entries.size()) return false;
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        const auto &ea = a.entries[i], &eb = b.entries[i];
        if (ea.candidates.size() != eb.candidates.size()) return false;
        for (std::size_t c = 0; c < ea.candidates.size(); ++c)
            if (ea.candidates[c].values != eb.candidates[c].values) return false;
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Serial versus OpenMP timings for the parallel kernels"};
    int reps = 3;
    int threads = 0;
    std::string setting = "medium";
    app.add_option("--reps", reps, "timed repetitions per kernel (best is reported)")->check(CLI::PositiveNumber);
    app.add_option("--threads", threads, "OpenMP threads, 0 keeps the runtime default")->check(CLI::NonNegativeNumber);
    app.add_option("--setting", setting, "simulation preset used for the data")->check(CLI::IsMember({"low", "medium", "high5", "high10"}));
    CLI11_PARSE(app, argc, argv);
    if (threads > 0) set_thread_count(threads);

    std::vector<Row> rows;

    SimConfig sim = preset(setting);
    sim.seed = 7;
    const SimDraw draw = draw_dataset(sim, 1.22, 0);
    const StandardizedDataset train = standardize(draw.train);
    const LassoPath path = fit_lasso_path(train, config_grid(sim, train));
    {
        TwoStageOptions so, po;
        so.execution = Execution::serial;
        po.execution = Execution::parallel;
        PathFamily a, b;
        Row r{"lassoed boosting, second stage"};
        r.serial = best_of(reps, [&] { a = lassoed_boosting(train, path, so); });
        r.parallel = best_of(reps, [&] { b = lassoed_boosting(train, path, po); });
        r.identical = same_family(a, b);
        rows.push_back(r);
    }
    {
        SimConfig s = preset("low");
        s.replications = 2;
        s.seed = 3;
        SimConfig p = s;
        s.execution = Execution::serial;
        p.execution = Execution::parallel;
        ExperimentResult a, b;
        Row r{"simulation sweep (low, 2 reps)"};
        r.serial = best_of(1, [&] { a = run_experiment(s); });
        r.parallel = best_of(1, [&] { b = run_experiment(p); });
        r.identical = a.raws.size() == b.raws.size();
        for (std::size_t i = 0; r.identical && i < a.raws.size(); ++i)
            r.identical = a.raws[i].metrics.rte == b.raws[i].metrics.rte && a.raws[i].metrics.nnz == b.raws[i].metrics.nnz;
        rows.push_back(r);
    }
    {
        const CoefTrajectory traj = ls_boost_trajectory(draw.train, 0.1, 2000);
        Matrix a, b;
        Row r{"path integrated gradients (2000 steps)"};
        r.serial = best_of(reps, [&] { a = path_ig_matrix(traj, Execution::serial); });
        r.parallel = best_of(reps, [&] { b = path_ig_matrix(traj, Execution::parallel); });
        r.identical = a == b;
        rows.push_back(r);
    }

    std::printf("threads: %d\n", thread_count());
    std::printf("%-40s %12s %12s %9s %10s\n", "kernel", "serial [s]", "parallel [s]", "speedup", "identical");
    bool all_same = true;
    for (const auto& r : rows) {
        std::printf("%-40s %12.4f %12.4f %9.2f %10s\n", r.kernel.c_str(), r.serial, r.parallel, r.serial / r.parallel,
                    r.identical ? "yes" : "NO");
        all_same = all_same && r.identical;
    }
    return all_same ? 0 : 1;
}
