#include "lboost/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace lboost {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    const auto x = parse_double(v);
    if (!x) throw std::invalid_argument("config: '" + key + "' expects a number, got '" + v + "'");
    return *x;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& v) {
    Int x{};
    const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw std::invalid_argument("config: '" + key + "' expects an integer, got '" + v + "'");
    return x;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("config: '" + key + "' expects true or false, got '" + v + "'");
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& item : split_list(v)) out.push_back(to_double(key, item));
    if (out.empty()) throw std::invalid_argument("config: '" + key + "' expects a non-empty list");
    return out;
}

std::vector<Index> to_indices(const std::string& key, const std::string& v) {
    std::vector<Index> out;
    for (const auto& item : split_list(v)) out.push_back(to_int<Index>(key, item));
    if (out.empty()) throw std::invalid_argument("config: '" + key + "' expects a non-empty list");
    return out;
}

StopRule parse_stop_rule(const std::string& v) {
    if (v == "fixed") return StopRule::fixed;
    if (v == "aicc") return StopRule::aicc;
    if (v == "aicc_doubled") return StopRule::aicc_doubled;
    throw std::invalid_argument("config: stop_rule must be fixed, aicc or aicc_doubled");
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table{
        {"seed", [](RunConfig& c, auto& k, auto& v) { c.seed = to_int<std::uint64_t>(k, v); }},
        {"out", [](RunConfig& c, auto&, auto& v) { c.out = v; }},
        {"threads", [](RunConfig& c, auto& k, auto& v) { c.threads = to_int<int>(k, v); }},
        {"methods", [](RunConfig& c, auto&, auto& v) { c.methods = parse_method_list(v); }},
        {"tuning", [](RunConfig& c, auto&, auto& v) { c.tuning = parse_tuning(v); }},
        {"lambda_count", [](RunConfig& c, auto& k, auto& v) { c.lambda_count = to_int<std::size_t>(k, v); }},
        {"min_ratio", [](RunConfig& c, auto& k, auto& v) { c.min_ratio = to_double(k, v); }},
        {"lasso_tol", [](RunConfig& c, auto& k, auto& v) { c.lasso_tol = to_double(k, v); }},
        {"learning_rate", [](RunConfig& c, auto& k, auto& v) { c.boost.learning_rate = to_double(k, v); }},
        {"max_iter", [](RunConfig& c, auto& k, auto& v) { c.boost.max_iter = to_int<int>(k, v); }},
        {"stop_rule", [](RunConfig& c, auto&, auto& v) { c.boost.stop_rule = parse_stop_rule(v); }},
        {"aicc_multiplier", [](RunConfig& c, auto& k, auto& v) { c.boost.aicc_multiplier = to_int<int>(k, v); }},
        {"boost_steps", [](RunConfig& c, auto& k, auto& v) { c.boost_steps = to_int<std::size_t>(k, v); }},
        {"relax_weights", [](RunConfig& c, auto& k, auto& v) { c.relax_weights = to_int<std::size_t>(k, v); }},
        {"stepwise_max_steps", [](RunConfig& c, auto& k, auto& v) { c.stepwise_max_steps = to_int<std::size_t>(k, v); }},
        {"twiced_lasso_recompute_grid",
         [](RunConfig& c, auto& k, auto& v) { c.twiced_lasso_recompute_grid = to_bool(k, v); }},
        {"input", [](RunConfig& c, auto&, auto& v) { c.input = v; }},
        {"response", [](RunConfig& c, auto&, auto& v) { c.response = v; }},
        {"group", [](RunConfig& c, auto&, auto& v) { c.group = v; }},
        {"split",
         [](RunConfig& c, auto& k, auto& v) {
             const auto f = to_doubles(k, v);
             if (f.size() != 3) throw std::invalid_argument("config: split expects three fractions");
             c.fractions = {f[0], f[1], f[2]};
             c.fractions.validate();
         }},
        {"model", [](RunConfig& c, auto&, auto& v) { c.model = v; }},
        {"write_families", [](RunConfig& c, auto& k, auto& v) { c.write_families = to_bool(k, v); }},
        {"setting", [](RunConfig& c, auto&, auto& v) { c.sim = preset(v); }},
        {"beta_type", [](RunConfig& c, auto& k, auto& v) { c.sim.beta_type = to_int<int>(k, v); }},
        {"n", [](RunConfig& c, auto& k, auto& v) { c.sim.n = to_int<Index>(k, v); }},
        {"p", [](RunConfig& c, auto& k, auto& v) { c.sim.p = to_int<Index>(k, v); }},
        {"s", [](RunConfig& c, auto& k, auto& v) { c.sim.s = to_int<Index>(k, v); }},
        {"rho", [](RunConfig& c, auto& k, auto& v) { c.sim.rho = to_double(k, v); }},
        {"snrs", [](RunConfig& c, auto& k, auto& v) { c.sim.snrs = to_doubles(k, v); }},
        {"replications", [](RunConfig& c, auto& k, auto& v) { c.sim.replications = to_int<int>(k, v); }},
        {"trajectory",
         [](RunConfig& c, auto&, auto& v) {
             if (v != "lasso" && v != "ls_boost" && v != "file")
                 throw std::invalid_argument("config: trajectory must be lasso, ls_boost or file");
             c.trajectory = v;
         }},
        {"trajectory_file", [](RunConfig& c, auto&, auto& v) { c.trajectory_file = v; }},
        {"attribute_group", [](RunConfig& c, auto&, auto& v) { c.attribute_group = v; }},
        {"trajectory_method", [](RunConfig& c, auto&, auto& v) { c.trajectory_method = v; }},
        {"attribution_steps", [](RunConfig& c, auto& k, auto& v) { c.attribution_steps = to_int<std::size_t>(k, v); }},
        {"attribution_learning_rate",
         [](RunConfig& c, auto& k, auto& v) { c.attribution_learning_rate = to_double(k, v); }},
        {"attribution_iterations",
         [](RunConfig& c, auto& k, auto& v) { c.attribution_iterations = to_int<std::size_t>(k, v); }},
        {"diag_n", [](RunConfig& c, auto& k, auto& v) { c.diag_n = to_int<Index>(k, v); }},
        {"diag_rhos", [](RunConfig& c, auto& k, auto& v) { c.diag_rhos = to_doubles(k, v); }},
        {"diag_sizes", [](RunConfig& c, auto& k, auto& v) { c.diag_sizes = to_indices(k, v); }},
        {"diag_replications", [](RunConfig& c, auto& k, auto& v) { c.diag_replications = to_int<int>(k, v); }},
        {"diag_epsilon", [](RunConfig& c, auto& k, auto& v) { c.diag_epsilon = to_double(k, v); }},
        {"gram_scaling",
         [](RunConfig& c, auto&, auto& v) {
             if (v == "normalized")
                 c.gram_scaling = GramScaling::normalized;
             else if (v == "raw")
                 c.gram_scaling = GramScaling::raw;
             else
                 throw std::invalid_argument("config: gram_scaling must be normalized or raw");
         }},
        {"diag_random_subsets", [](RunConfig& c, auto& k, auto& v) { c.diag_random_subsets = to_bool(k, v); }},
        {"bound_steps", [](RunConfig& c, auto& k, auto& v) { c.bound_steps = to_int<std::size_t>(k, v); }},
        {"rate_ns", [](RunConfig& c, auto& k, auto& v) { c.rate_ns = to_indices(k, v); }},
        {"rate_methods", [](RunConfig& c, auto&, auto& v) { c.rate_methods = parse_method_list(v); }},
        {"rate_replications", [](RunConfig& c, auto& k, auto& v) { c.rate_replications = to_int<int>(k, v); }},
        {"plot_input", [](RunConfig& c, auto&, auto& v) { c.plot_input = v; }},
        {"plot_kind", [](RunConfig& c, auto&, auto& v) { c.plot_kind = v; }},
    };
    return table;
}

}  // namespace

std::vector<Method> parse_method_list(const std::string& value) {
    std::vector<Method> out;
    for (const auto& item : split_list(value)) {
        const Method m = parse_method(item);
        if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    }
    if (out.empty()) throw std::invalid_argument("config: empty method list");
    return out;
}

TwoStageOptions RunConfig::two_stage() const {
    TwoStageOptions o;
    o.lasso.tol = lasso_tol;
    o.boost = boost;
    o.boost_steps = boost_steps;
    o.relax_weights = relax_weights;
    o.stepwise_max_steps = stepwise_max_steps;
    o.twiced_lasso_recompute_grid = twiced_lasso_recompute_grid;
    return o;
}

SimConfig RunConfig::sim_config() const {
    SimConfig s = sim;
    s.seed = seed;
    s.tuning = tuning;
    if (!methods.empty()) s.methods = methods;
    if (lambda_count) s.lambda_count = *lambda_count;
    s.min_ratio = min_ratio;
    s.two_stage = two_stage();
    return s;
}

RunConfig parse_config(std::istream& in) {
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (!setters().contains(key))
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        for (const auto& e : entries)
            if (e.first == key)
                throw std::invalid_argument("config line " + std::to_string(line_no) + ": repeated key '" + key + "'");
        entries.emplace_back(key, trim(line.substr(eq + 1)));
    }
    // A named setting supplies defaults that the other keys then refine.
    std::stable_partition(entries.begin(), entries.end(), [](const auto& e) { return e.first == "setting"; });
    RunConfig cfg;
    for (const auto& [key, value] : entries) setters().at(key)(cfg, key, value);
    return cfg;
}

RunConfig parse_config_text(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config '" + path.string() + "'");
    return parse_config(in);
}

std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& [k, v] : setters()) keys.push_back(k);
    return keys;
}

}  // namespace lboost
