#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lboost/commands.hpp"
#include "lboost/parallel.hpp"

namespace {

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::vector<std::string> methods;
    int threads = 0;
    std::string input;
    std::string kind;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config, "key = value configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", f.seed, "master seed (overrides the config)");
    cmd->add_option("--out", f.out, "output directory (overrides the config)");
    cmd->add_option("--method", f.methods, "method name; repeat for several (overrides the config)");
    cmd->add_option("--threads", f.threads, "OpenMP threads; results do not depend on this")->check(CLI::NonNegativeNumber);
}

lboost::RunConfig resolve(const CommonFlags& f) {
    lboost::RunConfig cfg = f.config.empty() ? lboost::RunConfig{} : lboost::load_config(f.config);
    if (f.seed) cfg.seed = *f.seed;
    if (!f.out.empty()) cfg.out = f.out;
    if (!f.methods.empty()) {
        cfg.methods.clear();
        for (const auto& m : f.methods) cfg.methods.push_back(lboost::parse_method(m));
    }
    if (f.threads > 0) cfg.threads = f.threads;
    if (!f.input.empty()) cfg.plot_input = f.input;
    if (!f.kind.empty()) cfg.plot_kind = f.kind;
    lboost::set_thread_count(cfg.threads);
    return cfg;
}

void report(const lboost::FileList& files) {
    for (const auto& f : files) std::cout << "wrote " << f.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-stage sparse regression: lasso screening with boosting or least-squares refits"};
    app.require_subcommand(1);
    CommonFlags flags;

    auto* simulate = app.add_subcommand("simulate", "run the simulation study and write metric tables");
    auto* fit = app.add_subcommand("fit", "fit, tune on validation and score on test, per group");
    auto* predict = app.add_subcommand("predict", "score a CSV file with a saved model");
    auto* attribute = app.add_subcommand("attribute", "path-integrated-gradient attribution of a coefficient path");
    auto* diagnose = app.add_subcommand("diagnose", "convergence-rate curves and bound audits");
    auto* plot = app.add_subcommand("plot", "render a plot-data CSV as SVG");
    for (auto* cmd : {simulate, fit, predict, attribute, diagnose, plot}) add_common(cmd, flags);
    plot->add_option("--input", flags.input, "plot-data CSV (x, series, y[, label])");
    plot->add_option("--kind", flags.kind, "line, line_logx or scatter");

    CLI11_PARSE(app, argc, argv);

    try {
        const lboost::RunConfig cfg = resolve(flags);
        if (simulate->parsed()) {
            const auto res = lboost::cmd_simulate(cfg);
            report(res.files);
            for (const auto& c : res.result.cells)
                if (!c.complete())
                    std::cerr << "warning: " << c.failed << " failed fits for " << lboost::to_string(c.method)
                              << " at SNR " << c.snr << '\n';
        } else if (fit->parsed()) {
            const auto res = lboost::cmd_fit_predict(cfg);
            report(res.files);
            for (const auto& s : res.report.summary)
                std::cout << lboost::to_string(s.method) << ": mean MSPE " << s.mean_mspe << ", median MSPE "
                          << s.median_mspe << ", mean size " << s.mean_nnz << " over " << s.completed << " group(s)"
                          << (s.skipped ? " (" + std::to_string(s.skipped) + " skipped)" : "") << '\n';
        } else if (predict->parsed()) {
            report(lboost::cmd_predict(cfg));
        } else if (attribute->parsed()) {
            const auto res = lboost::cmd_attribute(cfg);
            report(res.files);
            std::cout << "fundamental-theorem discrepancy " << res.ftc << '\n';
        } else if (diagnose->parsed()) {
            report(lboost::cmd_diagnose(cfg));
        } else if (plot->parsed()) {
            report({lboost::cmd_plot(cfg)});
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
