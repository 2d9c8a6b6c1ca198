#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lboost/boosting.hpp"
#include "lboost/csv.hpp"
#include "lboost/diagnostics.hpp"
#include "lboost/simulation.hpp"
#include "lboost/two_stage.hpp"

namespace lboost {

/// Settings shared by every command. Read from a flat `key = value` file;
/// `#` starts a comment, lists are comma-separated, unknown or repeated keys
/// are errors. See the README for the full key list.
struct RunConfig {
    std::uint64_t seed = 1;
    std::filesystem::path out = "out";
    int threads = 0;  // 0 keeps the OpenMP default
    std::vector<Method> methods;  // empty means the command's default set
    Tuning tuning = Tuning::validation;

    // solvers
    std::optional<std::size_t> lambda_count;  // unset: the setting's value for simulate, 100 otherwise
    double min_ratio = 0.0;                   // 0 picks the n/p dependent default
    double lasso_tol = 1e-7;
    BoostConfig boost;
    std::size_t boost_steps = 50;
    std::size_t relax_weights = 50;
    std::size_t stepwise_max_steps = 50;
    bool twiced_lasso_recompute_grid = false;

    // data commands
    std::filesystem::path input;
    std::string response = "y";
    std::optional<std::string> group;
    SplitFractions fractions;
    std::filesystem::path model;
    bool write_families = false;

    // simulate
    SimConfig sim;

    // attribute
    std::string trajectory = "lasso";  // lasso | ls_boost | file
    std::filesystem::path trajectory_file;
    std::optional<std::string> attribute_group;    // group of a grouped input, also filters a "group" column
    std::optional<std::string> trajectory_method;  // keeps trajectory rows with this "method" value
    std::size_t attribution_steps = 1000;
    double attribution_learning_rate = 0.1;
    std::size_t attribution_iterations = 1000;

    // diagnose
    Index diag_n = 100;
    std::vector<double> diag_rhos{0.0, 0.35, 0.7};
    std::vector<Index> diag_sizes;  // empty means 2, 4, ..., 80
    int diag_replications = 30;
    double diag_epsilon = 0.01;
    GramScaling gram_scaling = GramScaling::normalized;
    bool diag_random_subsets = false;
    std::size_t bound_steps = 500;
    std::vector<Index> rate_ns{100, 200, 400, 800};
    std::vector<Method> rate_methods{Method::lassoed_boosting, Method::relaxed_lasso};
    int rate_replications = 10;

    // plot
    std::filesystem::path plot_input;
    std::string plot_kind = "line";

    TwoStageOptions two_stage() const;
    /// Simulation settings with the solver and seed fields applied.
    SimConfig sim_config() const;
    std::size_t lambda_count_or(std::size_t fallback) const { return lambda_count.value_or(fallback); }
};

RunConfig parse_config(std::istream& in);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
/// Every recognised key, sorted.
std::vector<std::string> config_keys();

std::vector<Method> parse_method_list(const std::string& value);

}  // namespace lboost
