#include "lboost/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <stdexcept>

#include <boost/tokenizer.hpp>

#include "lboost/rng.hpp"

namespace lboost {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    double x = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
    return x;
}

CsvTable parse_csv(std::istream& in) {
    using Tokenizer = boost::tokenizer<boost::escaped_list_separator<char>>;
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!have_header && line.empty()) continue;
        std::vector<std::string> fields;
        try {
            Tokenizer tok(line);
            fields.assign(tok.begin(), tok.end());
        } catch (const boost::escaped_list_error& e) {
            throw std::runtime_error("csv line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!have_header) {
            table.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (line.empty()) continue;
        if (fields.size() != table.header.size())
            throw std::runtime_error("csv line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(table.header.size()) + " fields, found " +
                                     std::to_string(fields.size()));
        table.rows.push_back(std::move(fields));
    }
    if (!have_header) throw std::runtime_error("csv: empty file");
    return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    return parse_csv(in);
}

std::string csv_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) out += ',';
        const std::string& f = fields[i];
        const bool quote = f.find_first_of(",\"\\\n") != std::string::npos ||
                           (!f.empty() && (std::isspace(static_cast<unsigned char>(f.front())) ||
                                           std::isspace(static_cast<unsigned char>(f.back()))));
        if (!quote) {
            out += f;
            continue;
        }
        out += '"';
        for (char c : f) {
            if (c == '"' || c == '\\') out += '\\';
            out += c;
        }
        out += '"';
    }
    return out;
}

CsvWriter::CsvWriter(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot write '" + path.string() + "'");
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    out_ << csv_row(fields) << '\n';
    if (!out_) throw std::runtime_error("write failed for '" + path_.string() + "'");
}

void CsvWriter::close() {
    out_.close();
    if (!out_) throw std::runtime_error("write failed for '" + path_.string() + "'");
}

namespace {

bool is_missing(const std::string& cell) {
    std::string t;
    for (char c : cell)
        if (!std::isspace(static_cast<unsigned char>(c))) t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return t.empty() || t == "na" || t == "nan";
}

std::size_t column_index(const CsvTable& table, const std::string& name) {
    const auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) throw std::runtime_error("column '" + name + "' not found in the header");
    return static_cast<std::size_t>(it - table.header.begin());
}

}  // namespace

IngestResult ingest_table(const CsvTable& table, const std::string& response,
                          const std::optional<std::string>& group_column) {
    if (table.rows.empty()) throw std::runtime_error("csv: no data rows");
    const std::size_t yi = column_index(table, response);
    const std::optional<std::size_t> gi =
        group_column ? std::optional<std::size_t>(column_index(table, *group_column)) : std::nullopt;
    if (gi && *gi == yi) throw std::runtime_error("group column and response must differ");
    std::vector<std::size_t> predictors;
    for (std::size_t c = 0; c < table.header.size(); ++c)
        if (c != yi && (!gi || c != *gi)) predictors.push_back(c);
    if (predictors.empty()) throw std::runtime_error("csv: no predictor columns");

    IngestResult result;
    std::vector<std::string> labels;
    std::map<std::string, std::vector<std::size_t>> members;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        if (is_missing(table.rows[r][yi])) {
            ++result.dropped_rows;
            continue;
        }
        const std::string label = gi ? table.rows[r][*gi] : std::string();
        auto [it, inserted] = members.try_emplace(label);
        if (inserted) labels.push_back(label);
        it->second.push_back(r);
    }
    if (labels.empty()) throw std::runtime_error("csv: every row is missing the response");

    auto cell_value = [&](std::size_t r, std::size_t c) -> std::optional<double> {
        const std::string& cell = table.rows[r][c];
        if (is_missing(cell)) return std::nullopt;
        const auto v = parse_double(cell);
        if (!v || !std::isfinite(*v))
            throw std::runtime_error("non-numeric value '" + cell + "' at data row " + std::to_string(r + 1) +
                                     ", column '" + table.header[c] + "'");
        return v;
    };

    for (const std::string& label : labels) {
        const auto& rows = members[label];
        const Index n = static_cast<Index>(rows.size());
        const Index p = static_cast<Index>(predictors.size());
        GroupData g;
        g.label = label;
        g.data.X.resize(n, p);
        g.data.y.resize(n);
        for (std::size_t c = 0; c < predictors.size(); ++c) g.data.column_names.push_back(table.header[predictors[c]]);
        for (Index i = 0; i < n; ++i) g.data.y(i) = *cell_value(rows[static_cast<std::size_t>(i)], yi);
        for (Index j = 0; j < p; ++j) {
            const std::size_t col = predictors[static_cast<std::size_t>(j)];
            double sum = 0.0;
            Index present = 0;
            std::vector<std::optional<double>> vals(static_cast<std::size_t>(n));
            for (Index i = 0; i < n; ++i) {
                vals[static_cast<std::size_t>(i)] = cell_value(rows[static_cast<std::size_t>(i)], col);
                if (vals[static_cast<std::size_t>(i)]) {
                    sum += *vals[static_cast<std::size_t>(i)];
                    ++present;
                }
            }
            if (present == 0)
                throw std::runtime_error("column '" + table.header[col] + "' has no values" +
                                         (gi ? " in group '" + label + "'" : std::string()));
            const double mean = sum / static_cast<double>(present);
            bool constant = true;
            for (Index i = 0; i < n; ++i) {
                const auto& v = vals[static_cast<std::size_t>(i)];
                g.data.X(i, j) = v ? *v : mean;
                if (!v) ++g.imputed_cells;
                if (g.data.X(i, j) != g.data.X(0, j)) constant = false;
            }
            if (constant) g.constant_columns.push_back(table.header[col]);
        }
        g.data.validate();
        result.groups.push_back(std::move(g));
    }
    return result;
}

IngestResult ingest_csv(const std::filesystem::path& path, const std::string& response,
                        const std::optional<std::string>& group_column) {
    return ingest_table(read_csv(path), response, group_column);
}

void SplitFractions::validate() const {
    if (!(train > 0.0 && validation > 0.0 && test > 0.0)) throw std::invalid_argument("split fractions must be positive");
    if (train + validation + test > 1.0 + 1e-12) throw std::invalid_argument("split fractions must sum to at most 1");
}

std::array<Index, 3> split_sizes(Index n, const SplitFractions& f) {
    f.validate();
    const double dn = static_cast<double>(n);
    const Index nv = static_cast<Index>(std::floor(dn * f.validation + 1e-9));
    const Index nt = static_cast<Index>(std::floor(dn * f.test + 1e-9));
    return {n - nv - nt, nv, nt};
}

DataSplit split(const Dataset& data, const SplitFractions& fractions, std::uint64_t seed) {
    const auto sizes = split_sizes(data.n(), fractions);
    std::vector<Index> order(static_cast<std::size_t>(data.n()));
    for (Index i = 0; i < data.n(); ++i) order[static_cast<std::size_t>(i)] = i;
    RandomStream rng(seed, {0x53504c4954ULL});
    shuffle(order, rng);

    auto take = [&](std::size_t from, Index count) {
        std::vector<Index> rows(order.begin() + static_cast<std::ptrdiff_t>(from),
                                order.begin() + static_cast<std::ptrdiff_t>(from) + count);
        std::sort(rows.begin(), rows.end());
        Dataset d{Matrix(count, data.p()), Vector(count), data.column_names};
        for (Index i = 0; i < count; ++i) {
            d.X.row(i) = data.X.row(rows[static_cast<std::size_t>(i)]);
            d.y(i) = data.y(rows[static_cast<std::size_t>(i)]);
        }
        return d;
    };
    DataSplit out;
    out.train = take(0, sizes[0]);
    out.validation = take(static_cast<std::size_t>(sizes[0]), sizes[1]);
    out.test = take(static_cast<std::size_t>(sizes[0] + sizes[1]), sizes[2]);
    return out;
}

}  // namespace lboost
