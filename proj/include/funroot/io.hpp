#pragma once

// JSON forms of grid functions, operators, noise and models, plus CSV
// ingestion/export of functional time series.

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "funroot/error.hpp"
#include "funroot/far.hpp"
#include "funroot/funcspace.hpp"
#include "funroot/operators.hpp"

namespace funroot::io {

using nlohmann::json;

// ---------------------------------------------------------------------------
// JSON

/// Shares one GridDomain between all functions read with identical nodes.
class DomainCache {
public:
    DomainPtr get(std::vector<double> nodes) {
        for (const auto& d : cache_)
            if (d->nodes() == nodes) return d;
        cache_.push_back(GridDomain::trapezoid(std::move(nodes)));
        return cache_.back();
    }

private:
    std::vector<DomainPtr> cache_;
};

inline const json& require(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw DataError(std::string("JSON: missing field '") + key + "'");
    return j.at(key);
}

template <typename T>
T get_as(const json& j, const char* key) {
    try {
        return require(j, key).get<T>();
    } catch (const json::exception& e) {
        throw DataError(std::string("JSON: field '") + key + "': " + e.what());
    }
}

inline json to_json(const GridFunction& f) {
    return {{"nodes", f.domain()->nodes()},
            {"values", std::vector<double>(f.values().data(), f.values().data() + f.values().size())}};
}

inline GridFunction grid_function_from_json(const json& j, DomainCache& cache) {
    auto nodes = get_as<std::vector<double>>(j, "nodes");
    auto values = get_as<std::vector<double>>(j, "values");
    if (nodes.size() != values.size()) throw DataError("JSON: grid function nodes and values differ in length");
    return {cache.get(std::move(nodes)), Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()))};
}

inline json to_json(std::span<const GridFunction> fs) {
    json arr = json::array();
    for (const auto& f : fs) arr.push_back(to_json(f));
    return arr;
}

inline std::vector<GridFunction> functions_from_json(const json& j, const char* key, DomainCache& cache) {
    const auto& arr = require(j, key);
    if (!arr.is_array()) throw DataError(std::string("JSON: field '") + key + "' must be an array");
    std::vector<GridFunction> out;
    for (const auto& e : arr) out.push_back(grid_function_from_json(e, cache));
    return out;
}

inline json to_json(const OperatorSpec& rho) {
    struct V {
        json operator()(const SeparableKernelOp& op) const {
            return {{"kind", "separable"}, {"a", to_json(op.a())}, {"b", to_json(op.b())}};
        }
        json operator()(const SpectralOp& op) const {
            return {{"kind", "spectral"}, {"eigenvalues", op.eigenvalues()}, {"eigenfunctions", to_json(op.eigenfunctions())}};
        }
        json operator()(const PointEvalExpOp& op) const {
            return {{"kind", "pointexp"}, {"theta", op.theta()}, {"nodes", op.domain()->nodes()}};
        }
    };
    return std::visit(V{}, rho);
}

inline OperatorSpec operator_from_json(const json& j, DomainCache& cache) {
    const auto kind = get_as<std::string>(j, "kind");
    if (kind == "separable") return SeparableKernelOp(functions_from_json(j, "a", cache), functions_from_json(j, "b", cache));
    if (kind == "spectral")
        return SpectralOp(get_as<std::vector<double>>(j, "eigenvalues"), functions_from_json(j, "eigenfunctions", cache));
    if (kind == "pointexp") return PointEvalExpOp(get_as<double>(j, "theta"), cache.get(get_as<std::vector<double>>(j, "nodes")));
    throw DataError("JSON: unknown operator kind '" + kind + "'");
}

inline json to_json(const NoiseSpec& n) {
    return {{"basis", to_json(n.basis())}, {"std_devs", n.std_devs()}, {"seed", n.seed()}};
}

inline NoiseSpec noise_from_json(const json& j, DomainCache& cache) {
    return {functions_from_json(j, "basis", cache), get_as<std::vector<double>>(j, "std_devs"), get_as<std::uint64_t>(j, "seed")};
}

inline json to_json(const FARModel& m) {
    json j{{"order", m.order()}, {"rho1", to_json(m.rho1())}, {"noise", to_json(m.noise())}};
    if (m.rho2()) j["rho2"] = to_json(*m.rho2());
    return j;
}

inline FARModel model_from_json(const json& j, DomainCache& cache) {
    const int order = get_as<int>(j, "order");
    auto rho1 = operator_from_json(require(j, "rho1"), cache);
    auto noise = noise_from_json(require(j, "noise"), cache);
    if (order == 1) {
        if (j.contains("rho2")) throw DataError("JSON: order-1 model must not carry rho2");
        return FARModel::ar1(std::move(rho1), std::move(noise));
    }
    if (order == 2) return FARModel::ar2(std::move(rho1), operator_from_json(require(j, "rho2"), cache), std::move(noise));
    throw DataError("JSON: model order must be 1 or 2");
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw DataError("'" + path + "': " + e.what());
    }
}

// ---------------------------------------------------------------------------
// CSV

/// grid_rows: first column = grid label (age), first row = time labels (years).
/// time_rows: first row = grid positions, first column = time index (sample-path export).
enum class CsvLayout { grid_rows, time_rows };

inline CsvLayout parse_layout(const std::string& s) {
    if (s == "grid-rows") return CsvLayout::grid_rows;
    if (s == "time-rows") return CsvLayout::time_rows;
    throw InvalidArgument("unknown CSV layout '" + s + "' (expected grid-rows or time-rows)");
}

struct IngestOptions {
    std::optional<double> grid_min, grid_max;  ///< e.g. ages 10..65
    std::optional<long> time_min, time_max;    ///< e.g. years 1959..2012
    bool log = false;
    CsvLayout layout = CsvLayout::grid_rows;
};

/// Selected block of a labeled table: one frame per time label.
struct IngestResult {
    FunctionSeries series;
    std::vector<double> grid_labels;  ///< original labels (e.g. ages) of the grid nodes
    std::vector<long> time_labels;
    bool log = false;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '"' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::optional<double> parse_double(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

inline std::string location(const std::string& path, std::size_t line, std::size_t col) {
    return path + ":" + std::to_string(line) + ", column " + std::to_string(col);
}

struct RawTable {
    std::vector<double> header;            ///< column labels (without the corner cell)
    std::vector<double> labels;            ///< row labels
    std::vector<std::vector<std::string>> cells;
    std::vector<std::size_t> line_numbers;  ///< 1-based source line of each row
};

inline RawTable read_raw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    RawTable t;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split(line);
        if (!have_header) {
            if (fields.size() < 2) throw DataError(location(path, lineno, 1) + ": header needs a corner cell and labels");
            for (std::size_t c = 1; c < fields.size(); ++c) {
                const auto v = parse_double(fields[c]);
                if (!v) throw DataError(location(path, lineno, c + 1) + ": header label '" + std::string(fields[c]) + "' is not a number");
                t.header.push_back(*v);
            }
            have_header = true;
            continue;
        }
        if (fields.size() != t.header.size() + 1)
            throw DataError(location(path, lineno, 1) + ": expected " + std::to_string(t.header.size() + 1) + " fields, got " +
                            std::to_string(fields.size()));
        const auto label = parse_double(fields[0]);
        if (!label) throw DataError(location(path, lineno, 1) + ": row label '" + std::string(fields[0]) + "' is not a number");
        t.labels.push_back(*label);
        std::vector<std::string> row;
        for (std::size_t c = 1; c < fields.size(); ++c) row.emplace_back(fields[c]);
        t.cells.push_back(std::move(row));
        t.line_numbers.push_back(lineno);
    }
    if (!have_header || t.labels.empty()) throw DataError("'" + path + "': no data rows");
    return t;
}

inline long as_time_label(double v, const std::string& where) {
    if (v != std::floor(v)) throw DataError(where + ": time label " + std::to_string(v) + " is not an integer");
    return static_cast<long>(v);
}

}  // namespace detail

/// Reads a labeled CSV, selects the requested grid/time ranges and returns one
/// GridFunction per time label on the grid labels rescaled affinely to [0,1].
inline IngestResult ingest_csv(const std::string& path, const IngestOptions& opt = {}) {
    const auto raw = detail::read_raw(path);
    const bool grid_rows = opt.layout == CsvLayout::grid_rows;
    const auto& grid_all = grid_rows ? raw.labels : raw.header;
    const auto& time_all = grid_rows ? raw.header : raw.labels;

    for (std::size_t i = 1; i < grid_all.size(); ++i)
        if (!(grid_all[i] > grid_all[i - 1])) throw DataError("'" + path + "': grid labels must be strictly increasing");
    const double gmin = opt.grid_min.value_or(grid_all.front());
    const double gmax = opt.grid_max.value_or(grid_all.back());
    if (gmin < grid_all.front() || gmax > grid_all.back() || !(gmin < gmax))
        throw DataError("'" + path + "': grid range [" + std::to_string(gmin) + ", " + std::to_string(gmax) +
                        "] outside the file range [" + std::to_string(grid_all.front()) + ", " + std::to_string(grid_all.back()) + "]");
    std::vector<long> times;
    for (std::size_t i = 0; i < time_all.size(); ++i) times.push_back(detail::as_time_label(time_all[i], "'" + path + "'"));
    const long tmin = opt.time_min.value_or(*std::min_element(times.begin(), times.end()));
    const long tmax = opt.time_max.value_or(*std::max_element(times.begin(), times.end()));
    if (tmin < *std::min_element(times.begin(), times.end()) || tmax > *std::max_element(times.begin(), times.end()) || tmin > tmax)
        throw DataError("'" + path + "': time range [" + std::to_string(tmin) + ", " + std::to_string(tmax) + "] outside the file range");

    std::vector<std::size_t> gsel, tsel;
    for (std::size_t i = 0; i < grid_all.size(); ++i)
        if (grid_all[i] >= gmin && grid_all[i] <= gmax) gsel.push_back(i);
    for (std::size_t i = 0; i < times.size(); ++i)
        if (times[i] >= tmin && times[i] <= tmax) tsel.push_back(i);
    if (gsel.size() < 2) throw DataError("'" + path + "': fewer than 2 grid points selected");

    std::vector<double> grid_labels, nodes;
    for (auto i : gsel) grid_labels.push_back(grid_all[i]);
    const double lo = grid_labels.front(), hi = grid_labels.back();
    for (double g : grid_labels) nodes.push_back((g - lo) / (hi - lo));
    nodes.front() = 0.0;
    nodes.back() = 1.0;
    const auto domain = GridDomain::trapezoid(std::move(nodes));

    std::vector<GridFunction> frames;
    std::vector<long> time_labels;
    for (auto ti : tsel) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(gsel.size()));
        for (std::size_t k = 0; k < gsel.size(); ++k) {
            const std::size_t row = grid_rows ? gsel[k] : ti;
            const std::size_t col = grid_rows ? ti : gsel[k];
            const auto& cell = raw.cells[row][col];
            const auto where = detail::location(path, raw.line_numbers[row], col + 2);
            auto value = detail::parse_double(cell);
            if (!value || !std::isfinite(*value))
                throw DataError(where + " (grid " + std::to_string(grid_all[gsel[k]]) + ", time " + std::to_string(times[ti]) +
                                "): missing or non-numeric cell '" + cell + "'");
            if (opt.log) {
                if (!(*value > 0.0)) throw DataError(where + ": cannot take the log of " + cell);
                *value = std::log(*value);
            }
            v(static_cast<Eigen::Index>(k)) = *value;
        }
        frames.emplace_back(domain, std::move(v));
        time_labels.push_back(times[ti]);
    }
    if (frames.empty()) throw DataError("'" + path + "': no time points selected");
    return {FunctionSeries(std::move(frames)), std::move(grid_labels), std::move(time_labels), opt.log};
}

inline std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

/// Writes the time-rows layout: header "n,<grid labels>", then "<time>,<values>".
/// Grid labels default to the node positions, time labels to 1..T.
inline void write_series_csv(std::ostream& out, const FunctionSeries& x, std::span<const double> grid_labels = {},
                             std::span<const long> time_labels = {}) {
    const auto& nodes = x.domain()->nodes();
    if (!grid_labels.empty() && grid_labels.size() != nodes.size()) throw InvalidArgument("write_series_csv: grid label count mismatch");
    if (!time_labels.empty() && time_labels.size() != x.length()) throw InvalidArgument("write_series_csv: time label count mismatch");
    out << "n";
    for (std::size_t k = 0; k < nodes.size(); ++k) out << ',' << format_double(grid_labels.empty() ? nodes[k] : grid_labels[k]);
    out << '\n';
    for (std::size_t n = 0; n < x.length(); ++n) {
        out << (time_labels.empty() ? static_cast<long>(n + 1) : time_labels[n]);
        for (Eigen::Index k = 0; k < x[n].values().size(); ++k) out << ',' << format_double(x[n].values()(k));
        out << '\n';
    }
}

inline void write_series_csv(const std::string& path, const FunctionSeries& x, std::span<const double> grid_labels = {},
                             std::span<const long> time_labels = {}) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    write_series_csv(out, x, grid_labels, time_labels);
}

/// Numeric columns of a plain CSV (an optional non-numeric header line is skipped).
inline Eigen::MatrixXd read_numeric_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split(line);
        std::vector<double> row;
        bool numeric = true;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const auto v = detail::parse_double(fields[c]);
            if (!v || !std::isfinite(*v)) {
                if (rows.empty() && lineno == 1) {
                    numeric = false;
                    break;
                }
                throw DataError(detail::location(path, lineno, c + 1) + ": non-numeric cell '" + std::string(fields[c]) + "'");
            }
            row.push_back(*v);
        }
        if (!numeric) continue;
        if (!rows.empty() && row.size() != rows.front().size())
            throw DataError(detail::location(path, lineno, 1) + ": inconsistent number of columns");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError("'" + path + "': no numeric rows");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return m;
}

}  // namespace funroot::io
