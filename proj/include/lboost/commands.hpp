#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "lboost/attribution.hpp"
#include "lboost/config.hpp"
#include "lboost/simulation.hpp"
#include "lboost/tuning.hpp"

namespace lboost {

using FileList = std::vector<std::filesystem::path>;

struct SimulateOutput {
    ExperimentResult result;
    FileList files;
};

/// metrics.csv (one row per replication and method), summary.csv (averages),
/// plot_{rr,rte,pve,nnz}.csv and manifest.json.
SimulateOutput cmd_simulate(const RunConfig& cfg);

struct SavedModel {
    std::string group;
    Method method = Method::lasso;
    std::vector<std::string> column_names;
    CoefVector coef;
};

struct GroupReport {
    std::string group;
    Method method = Method::lasso;
    bool ok = true;
    std::string error;
    Index n_train = 0, n_validation = 0, n_test = 0;
    double mspe = 0.0;
    double rmspe = 0.0;
    std::size_t nnz = 0;
    std::vector<std::string> selected;
};

struct MethodSummary {
    Method method = Method::lasso;
    double mean_mspe = 0.0, median_mspe = 0.0, mean_rmspe = 0.0, mean_nnz = 0.0;
    std::size_t completed = 0, skipped = 0;
};

struct PredictionReport {
    std::vector<GroupReport> rows;        // ordered by group, then method
    std::vector<MethodSummary> summary;   // over completed groups only
};

struct FitOutput {
    PredictionReport report;
    std::vector<SavedModel> models;
    FileList files;
};

/// One row per candidate: group, method, entry, q, lambda, stage2_index,
/// nnz, intercept and the original-scale coefficients under `column_names`.
/// Every family must share those columns.
void write_path_families(const std::filesystem::path& path, const std::vector<std::string>& column_names,
                         const std::vector<std::pair<std::string, PathFamily>>& families);

/// Ingest, split, fit, tune on validation and score on test, per group.
/// Writes report.csv, summary.csv, model_size.csv, model_size_pairs.csv (when
/// lassoed boosting is among the methods), model.json, manifest.json and,
/// when cfg.write_families is set, families.csv.
FitOutput cmd_fit_predict(const RunConfig& cfg);

void save_models(const std::filesystem::path& path, const std::string& response, const std::vector<SavedModel>& models);
std::vector<SavedModel> load_models(const std::filesystem::path& path);

/// Scores `cfg.input` with the models in `cfg.model`; writes predictions.csv
/// and, when the response column is present, predict_summary.csv.
FileList cmd_predict(const RunConfig& cfg);

struct AttributeOutput {
    CoefTrajectory trajectory;
    Matrix G;
    double ftc = 0.0;
    FileList files;
};

/// Attribution of a lasso, LS-boost or ingested trajectory. Without an input
/// file the data are one simulated draw at the largest SNR of the grid.
AttributeOutput cmd_attribute(const RunConfig& cfg);

/// Gamma and eigenvalue curves, the LS-boost and stagewise bound audits on a
/// simulated draw, and the n * inf-loss table.
FileList cmd_diagnose(const RunConfig& cfg);

/// Writes an SVG next to cfg.plot_input (or into cfg.out) and returns its path.
std::filesystem::path cmd_plot(const RunConfig& cfg);

/// Demo panel: `groups` blocks of `rows` observations with a sparse linear
/// signal, a "month" column and a few blank cells.
void write_synthetic_panel(const std::filesystem::path& path, int groups, int rows, int p, std::uint64_t seed);

}  // namespace lboost
