#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "lboost/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Write a synthetic grouped panel for trying out `lboost fit`"};
    std::string out = "panel.csv";
    int groups = 12, rows = 120, p = 12;
    std::uint64_t seed = 7;
    app.add_option("--out", out, "output CSV");
    app.add_option("--groups", groups, "number of months")->check(CLI::PositiveNumber);
    app.add_option("--rows", rows, "observations per month")->check(CLI::PositiveNumber);
    app.add_option("--p", p, "number of predictors")->check(CLI::Range(2, 10000));
    app.add_option("--seed", seed, "seed");
    CLI11_PARSE(app, argc, argv);
    try {
        lboost::write_synthetic_panel(out, groups, rows, p, seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return EXIT_FAILURE;
    }
    std::cout << "wrote " << out << '\n';
    return EXIT_SUCCESS;
}
