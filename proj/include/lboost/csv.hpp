#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lboost/linalg.hpp"

namespace lboost {

/// Shortest decimal string that parses back to exactly `x`; "nan", "inf" and
/// "-inf" for non-finite values.
std::string format_double(double x);
/// Whole-string parse; std::nullopt on any trailing characters.
std::optional<double> parse_double(std::string_view s);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Comma-separated with a header row; fields may be double-quoted with
/// backslash escapes. Throws std::runtime_error on ragged rows or an empty file.
CsvTable parse_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);

/// Quotes fields containing commas, quotes or whitespace at the ends.
std::string csv_row(const std::vector<std::string>& fields);

/// Writes rows with '\n' line endings; throws std::runtime_error when the
/// file cannot be opened or a write fails.
class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path);
    void row(const std::vector<std::string>& fields);
    void close();

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

struct GroupData {
    std::string label;  // empty when no group column was given
    Dataset data;
    std::vector<std::string> constant_columns;
    std::size_t imputed_cells = 0;
};

struct IngestResult {
    std::vector<GroupData> groups;  // in order of first appearance
    std::size_t dropped_rows = 0;   // rows whose response was missing
};

/// Reads predictors and the response from a CSV file. Missing cells (blank,
/// "NA" or "nan") in predictors are replaced by the column mean, computed
/// within each group when `group_column` is set. Rows without a response are
/// dropped. Non-numeric cells and all-missing columns are errors naming the
/// offending column.
IngestResult ingest_csv(const std::filesystem::path& path, const std::string& response,
                        const std::optional<std::string>& group_column = std::nullopt);
IngestResult ingest_table(const CsvTable& table, const std::string& response,
                          const std::optional<std::string>& group_column = std::nullopt);

struct SplitFractions {
    double train = 0.5, validation = 0.25, test = 0.25;
    void validate() const;
};

struct DataSplit {
    Dataset train, validation, test;
};

/// Random disjoint partition: validation gets floor(n fv) rows, test floor(n ft),
/// train the rest. Row order inside each part follows the input.
DataSplit split(const Dataset& data, const SplitFractions& fractions, std::uint64_t seed);
/// Sizes that split() will produce.
std::array<Index, 3> split_sizes(Index n, const SplitFractions& fractions);

}  // namespace lboost
