// funroot command-line front end.
//
//   funroot <subcommand> [--config path] [--seed N] [--out dir] [--format json,csv,svg] <inputs...>
//
// Exit codes: 0 success, 1 usage, 2 data, 3 numerical.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "funroot/funroot.hpp"
#include "svg.hpp"

#ifndef FUNROOT_VERSION
#define FUNROOT_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using funroot::io::json;

namespace {

using namespace funroot;

// ---------------------------------------------------------------------------
// configuration

struct RunConfig {
    std::optional<std::uint64_t> seed;
    std::size_t grid_size = 101;
    std::string tolerance = "exact";
    std::string out = ".";
    std::set<std::string> formats{"json", "csv"};

    bool wants(const std::string& f) const { return formats.count(f) > 0; }
};

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> format;
};

std::set<std::string> parse_formats(const std::vector<std::string>& items) {
    std::set<std::string> out;
    for (const auto& raw : items) {
        std::stringstream ss(raw);
        std::string f;
        while (std::getline(ss, f, ',')) {
            if (f.empty()) continue;
            if (f != "json" && f != "csv" && f != "svg") throw InvalidArgument("unknown report format '" + f + "' (json, csv, svg)");
            out.insert(f);
        }
    }
    if (out.empty()) throw InvalidArgument("at least one report format is required");
    return out;
}

RunConfig resolve_config(const CommonFlags& flags) {
    RunConfig cfg;
    if (!flags.config.empty()) {
        const json j = io::read_json_file(flags.config);
        if (!j.is_object()) throw DataError("config '" + flags.config + "' must be a JSON object");
        for (const auto& [key, value] : j.items()) {
            if (key == "seed") {
                if (!value.is_number_integer() || value.get<long long>() < 0)
                    throw InvalidArgument("config: seed must be a non-negative integer");
                cfg.seed = value.get<std::uint64_t>();
            } else if (key == "grid_size") {
                if (!value.is_number_integer() || value.get<long long>() < 3) throw InvalidArgument("config: grid_size must be an integer >= 3");
                cfg.grid_size = value.get<std::size_t>();
            } else if (key == "tolerance") {
                if (!value.is_string()) throw InvalidArgument("config: tolerance must be \"exact\" or \"estimated\"");
                cfg.tolerance = value.get<std::string>();
                tolerance_profile(cfg.tolerance);
            } else if (key == "out") {
                if (!value.is_string()) throw InvalidArgument("config: out must be a string");
                cfg.out = value.get<std::string>();
            } else if (key == "formats") {
                if (value.is_string())
                    cfg.formats = parse_formats({value.get<std::string>()});
                else if (value.is_array())
                    cfg.formats = parse_formats(value.get<std::vector<std::string>>());
                else
                    throw InvalidArgument("config: formats must be a list or a comma-separated string");
            } else {
                throw InvalidArgument("config: unknown field '" + key + "'");
            }
        }
    }
    if (flags.seed) cfg.seed = flags.seed;
    if (flags.out) cfg.out = *flags.out;
    if (flags.format) cfg.formats = parse_formats({*flags.format});
    if (const char* env = std::getenv("FUNROOT_OUT"); env && *env) cfg.out = env;
    return cfg;
}

// ---------------------------------------------------------------------------
// reports

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 || EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw NumericalError("sha256 failed");
    }
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// One command invocation: resolved config, input files and parameters.
class Run {
public:
    Run(std::string command, const CommonFlags& flags) : command_(std::move(command)), cfg_(resolve_config(flags)) {}

    const RunConfig& config() const { return cfg_; }
    const std::string& command() const { return command_; }

    void input(const std::string& path) { inputs_.push_back(path); }
    json& params() { return params_; }

    /// Digest of the input file contents followed by the effective parameters.
    std::string digest() const {
        std::string buf;
        for (const auto& p : inputs_) {
            const auto content = read_file(p);
            buf += std::to_string(content.size()) + ":" + content;
        }
        json p = params_;
        p["grid_size"] = cfg_.grid_size;
        p["tolerance"] = cfg_.tolerance;
        if (cfg_.seed) p["seed"] = *cfg_.seed;
        buf += p.dump();
        return sha256_hex(buf);
    }

    json header() const {
        return {{"version", FUNROOT_VERSION}, {"command", command_}, {"inputs_digest", digest()}, {"parameters", params_}};
    }

    fs::path path(const std::string& name) const {
        const fs::path dir(cfg_.out);
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw DataError("cannot create output directory '" + cfg_.out + "': " + ec.message());
        return dir / name;
    }

    std::ofstream open(const std::string& name) const {
        const auto p = path(name);
        std::ofstream out(p, std::ios::binary);
        if (!out) throw DataError("cannot write '" + p.string() + "'");
        written_.push_back(p.string());
        return out;
    }

    /// Writes <command>.json when json output is enabled.
    void report(json body, const std::string& name = {}) const {
        if (!cfg_.wants("json")) return;
        json doc = header();
        for (auto& [k, v] : body.items()) doc[k] = std::move(v);
        auto out = open((name.empty() ? command_ : name) + ".json");
        out << doc.dump(2) << '\n';
    }

    void finish() const {
        for (const auto& p : written_) std::cout << p << '\n';
    }

private:
    std::string command_;
    RunConfig cfg_;
    std::vector<std::string> inputs_;
    json params_ = json::object();
    mutable std::vector<std::string> written_;
};

// ---------------------------------------------------------------------------
// shared inputs

struct IngestFlags {
    std::string layout = "grid-rows";
    std::optional<double> grid_min, grid_max;
    std::optional<long> time_min, time_max;
    bool log = false;

    void add_to(CLI::App* app) {
        app->add_option("--layout", layout, "grid-rows (first column = grid label, header = time) or time-rows");
        app->add_option("--grid-min", grid_min, "smallest grid label kept (e.g. age)");
        app->add_option("--grid-max", grid_max, "largest grid label kept");
        app->add_option("--time-min", time_min, "first time label kept (e.g. year)");
        app->add_option("--time-max", time_max, "last time label kept");
        app->add_flag("--log", log, "natural log of every cell before analysis");
    }

    io::IngestOptions options() const {
        io::IngestOptions o;
        o.layout = io::parse_layout(layout);
        o.grid_min = grid_min;
        o.grid_max = grid_max;
        o.time_min = time_min;
        o.time_max = time_max;
        o.log = log;
        return o;
    }

    json to_json() const {
        json j = {{"layout", layout}, {"log", log}};
        if (grid_min) j["grid_min"] = *grid_min;
        if (grid_max) j["grid_max"] = *grid_max;
        if (time_min) j["time_min"] = *time_min;
        if (time_max) j["time_max"] = *time_max;
        return j;
    }
};

/// An operator file ({"kind": ...}) or a model file ({"order": ...}).
struct LoadedSpec {
    std::optional<FARModel> model;
    OperatorSpec rho1;
    std::optional<OperatorSpec> rho2;
};

LoadedSpec load_spec(const std::string& path) {
    io::DomainCache cache;
    const json j = io::read_json_file(path);
    if (j.is_object() && j.contains("kind")) return {std::nullopt, io::operator_from_json(j, cache), std::nullopt};
    auto model = io::model_from_json(j, cache);
    return {model, model.rho1(), model.rho2()};
}

double resolve_tolerance(const RunConfig& cfg, const std::string& flag) {
    return tolerance_profile(flag.empty() ? cfg.tolerance : flag);
}

json data_summary(const io::IngestResult& data) {
    return {{"frames", data.series.length()},
            {"grid_points", data.series.domain()->size()},
            {"grid_range", {data.grid_labels.front(), data.grid_labels.back()}},
            {"time_range", {data.time_labels.front(), data.time_labels.back()}},
            {"log", data.log}};
}

void write_scores(const Run& run, const io::IngestResult& data, const Eigen::MatrixXd& scores, const std::string& title) {
    if (run.config().wants("csv")) {
        auto out = run.open("scores.csv");
        out << "time";
        for (Eigen::Index j = 0; j < scores.cols(); ++j) out << ",pc" << j + 1;
        out << '\n';
        for (Eigen::Index n = 0; n < scores.rows(); ++n) {
            out << data.time_labels[static_cast<std::size_t>(n)];
            for (Eigen::Index j = 0; j < scores.cols(); ++j) out << ',' << io::format_double(scores(n, j));
            out << '\n';
        }
    }
    if (run.config().wants("svg")) {
        std::vector<double> x(data.time_labels.begin(), data.time_labels.end());
        std::vector<tools::Series> series;
        for (Eigen::Index j = 0; j < scores.cols(); ++j) series.push_back({"PC " + std::to_string(j + 1), scores.col(j)});
        auto out = run.open("scores.svg");
        tools::write_line_chart(out, title, x, series);
    }
}

std::complex<double> parse_complex(const std::string& s) {
    const auto comma = s.find(',');
    try {
        std::size_t used = 0;
        const double re = std::stod(s.substr(0, comma), &used);
        if (used != s.substr(0, comma).size()) throw std::invalid_argument(s);
        double im = 0.0;
        if (comma != std::string::npos) {
            const auto tail = s.substr(comma + 1);
            im = std::stod(tail, &used);
            if (used != tail.size()) throw std::invalid_argument(s);
        }
        return {re, im};
    } catch (const std::logic_error&) {
        throw InvalidArgument("cannot parse complex number '" + s + "' (expected re or re,im)");
    }
}

// ---------------------------------------------------------------------------
// subcommands

void add_common(CLI::App* app, CommonFlags& flags) {
    app->add_option("--config", flags.config, "run configuration JSON (seed, grid_size, tolerance, out, formats)");
    app->add_option("--seed", flags.seed, "random seed (overrides the config and the model's noise seed)");
    app->add_option("--out", flags.out, "output directory (FUNROOT_OUT overrides)");
    app->add_option("--format", flags.format, "comma-separated subset of json,csv,svg");
}

struct SimulateCmd {
    std::string model;
    std::size_t length = 500;
    std::optional<std::size_t> burn_in;

    void run(Run& r) const {
        r.input(model);
        r.params() = {{"length", length}};
        if (burn_in) r.params()["burn_in"] = *burn_in;
        auto spec = load_spec(model);
        if (!spec.model) throw InvalidArgument("simulate needs a model file (order, rho1, noise), not a bare operator");
        FARModel m = *spec.model;
        if (r.config().seed) m = m.with_noise(m.noise().with_seed(*r.config().seed));
        SimulateOptions opt;
        opt.burn_in = burn_in;
        const auto path = simulate(m, length, std::nullopt, opt);
        if (r.config().wants("csv")) {
            auto out = r.open("path.csv");
            io::write_series_csv(out, path.series);
        }
        r.report({{"model", io::to_json(m)},
                  {"seed", m.noise().seed()},
                  {"burn_in", path.burn_in},
                  {"length", path.series.length()},
                  {"generator", path.generator}},
                 "path");
    }
};

struct SpectrumCmd {
    std::string input;
    std::string tolerance;

    static json describe(const OperatorSpec& rho, double tol) {
        const auto red = matrix_reduction(rho);
        return {{"kind", kind_name(rho)},
                {"reduction", {{"kind", to_string(red.kind)}, {"matrix", io::matrix_to_json(red.matrix)}}},
                {"classification", io::to_json(classify(rho, tol))}};
    }

    void run(Run& r) const {
        r.input(input);
        r.params() = {{"tolerance", tolerance.empty() ? r.config().tolerance : tolerance}};
        const double tol = resolve_tolerance(r.config(), tolerance);
        const auto spec = load_spec(input);
        json body = {{"rho1", describe(spec.rho1, tol)}};
        if (spec.rho2) body["rho2"] = describe(*spec.rho2, tol);
        if (spec.model) {
            const auto st = is_stationary(*spec.model);
            body["stationarity"] = {{"stationary", st.stationary}, {"radius", st.radius}};
            if (spec.model->order() == 2) body["ar2"] = io::to_json(ar2_unit_root_check(*spec.model, tol));
        }
        r.report(body);
    }
};

struct FredholmCmd {
    std::string input;
    std::vector<std::string> points;

    void run(Run& r) const {
        r.input(input);
        r.params() = {{"z", points}};
        const auto spec = load_spec(input);
        std::vector<std::complex<double>> zs;
        for (const auto& p : points) zs.push_back(parse_complex(p));
        if (zs.empty()) zs.push_back(1.0);
        json values = json::array();
        for (const auto& z : zs)
            values.push_back({{"z", io::to_json(z)}, {"p", io::to_json(fredholm_determinant(spec.rho1, z))}});
        json zeros = json::array();
        for (const auto& l : spectrum(spec.rho1))
            zeros.push_back({{"eigenvalue", io::to_json(l)}, {"abs_p_at_inverse", std::abs(fredholm_determinant(spec.rho1, 1.0 / l))}});
        r.report({{"values", values}, {"zeros", zeros}});
    }
};

struct DecomposeCmd {
    std::string input;
    std::string path;
    std::string tolerance;

    void run(Run& r) const {
        r.input(input);
        if (!path.empty()) r.input(path);
        r.params() = {{"tolerance", tolerance.empty() ? r.config().tolerance : tolerance}, {"path", !path.empty()}};
        const auto spec = load_spec(input);
        const auto dec = decompose(spec.rho1, resolve_tolerance(r.config(), tolerance));
        json body = io::to_json(dec);
        if (!path.empty()) {
            io::IngestOptions opt;
            opt.layout = io::CsvLayout::time_rows;
            const auto data = io::ingest_csv(path, opt);
            if (data.series.domain()->nodes() != domain_of(spec.rho1)->nodes())
                throw DomainMismatch("decompose: the path grid differs from the operator grid");
            // rebuild on the operator's own domain object
            std::vector<GridFunction> frames;
            for (const auto& f : data.series) frames.emplace_back(domain_of(spec.rho1), f.values());
            const auto [trend, stat] = split_path(dec, FunctionSeries(std::move(frames)));
            if (r.config().wants("csv")) {
                auto t = r.open("trend.csv");
                io::write_series_csv(t, trend, {}, data.time_labels);
                auto s = r.open("stationary.csv");
                io::write_series_csv(s, stat, {}, data.time_labels);
            }
            Eigen::MatrixXd scores(static_cast<Eigen::Index>(trend.length()), static_cast<Eigen::Index>(dec.dim_u));
            for (std::size_t j = 0; j < dec.dim_u; ++j) scores.col(static_cast<Eigen::Index>(j)) = score_series(trend, dec.trend_basis[j]);
            body["path"] = {{"frames", trend.length()}};
            if (r.config().wants("svg")) {
                std::vector<double> x(data.time_labels.begin(), data.time_labels.end());
                std::vector<tools::Series> series;
                for (Eigen::Index j = 0; j < scores.cols(); ++j) series.push_back({"trend " + std::to_string(j + 1), scores.col(j)});
                auto out = r.open("trend.svg");
                tools::write_line_chart(out, "Common-trend scores", x, series);
            }
        }
        r.report(body);
    }
};

struct FpcaCmd {
    std::string data;
    std::size_t k = 3;
    IngestFlags ingest;

    void run(Run& r) const {
        r.input(data);
        r.params() = {{"k", k}, {"ingest", ingest.to_json()}};
        const auto d = io::ingest_csv(data, ingest.options());
        const auto res = fpca(d.series, k);
        json body = io::to_json(res);
        body["data"] = data_summary(d);
        write_scores(r, d, res.scores, "Principal component scores");
        r.report(body);
    }
};

Eigen::VectorXd pick_column(const Eigen::MatrixXd& m, std::size_t column) {
    if (column < 1 || column > static_cast<std::size_t>(m.cols()))
        throw InvalidArgument("column " + std::to_string(column) + " out of range (file has " + std::to_string(m.cols()) + ")");
    return m.col(static_cast<Eigen::Index>(column - 1));
}

struct AdfCmd {
    std::string data;
    std::size_t column = 1;
    std::size_t lags = 0;
    std::string spec = "none";

    void run(Run& r) const {
        r.input(data);
        r.params() = {{"column", column}, {"lags", lags}, {"spec", spec}};
        const auto y = pick_column(io::read_numeric_csv(data), column);
        r.report(io::to_json(adf_test(y, lags, parse_adf_spec(spec))));
    }
};

struct JohansenCmd {
    std::string data;
    std::vector<std::size_t> columns;
    std::size_t lags = 1;
    std::string det = "none";
    std::string level = "1%";

    void run(Run& r) const {
        r.input(data);
        r.params() = {{"columns", columns}, {"lags", lags}, {"det", det}, {"level", level}};
        const auto m = io::read_numeric_csv(data);
        Eigen::MatrixXd y = m;
        if (!columns.empty()) {
            y.resize(m.rows(), static_cast<Eigen::Index>(columns.size()));
            for (std::size_t i = 0; i < columns.size(); ++i) y.col(static_cast<Eigen::Index>(i)) = pick_column(m, columns[i]);
        }
        const auto lv = parse_level(level);
        r.report(io::to_json(johansen_trace(y, lags, parse_johansen_det(det)), lv));
    }
};

struct DetectCmd {
    std::string data;
    std::size_t k = 3;
    IngestFlags ingest;
    std::string level = to_string(DetectOptions{}.level);
    std::string adf_spec = to_string(DetectOptions{}.adf_spec);
    std::size_t adf_lags = 0;
    std::size_t johansen_lags = 1;
    std::string johansen_det = "none";
    std::string johansen_level = "1%";

    void run(Run& r) const {
        r.input(data);
        DetectOptions opt;
        opt.level = parse_level(level);
        opt.adf_spec = parse_adf_spec(adf_spec);
        opt.adf_lags = adf_lags;
        opt.johansen_lags = johansen_lags;
        opt.johansen_det = parse_johansen_det(johansen_det);
        opt.johansen_level = parse_level(johansen_level);
        r.params() = {{"k", k}, {"ingest", ingest.to_json()}};
        const auto d = io::ingest_csv(data, ingest.options());
        const auto rep = detect_unit_roots(d.series, k, opt);
        json body = io::to_json(rep);
        body["data"] = data_summary(d);
        write_scores(r, d, rep.fpca.scores, "Principal component scores");
        r.report(body);
    }
};

struct ExampleModelCmd {
    std::string name;
    double alpha = -0.5 + std::sqrt(5.0) / 2.0;
    double theta = 0.0;
    std::vector<double> eigenvalues{1.0, 0.6, 0.3};
    std::vector<double> std_devs;

    void run(Run& r) const {
        r.params() = {{"name", name}};
        const auto d = GridDomain::uniform(r.config().grid_size);
        const std::uint64_t seed = r.config().seed.value_or(0);
        auto noise = [&](std::size_t count, std::vector<double> fallback) {
            const auto basis = fourier_basis(d, count);
            auto sd = std_devs.empty() ? std::move(fallback) : std_devs;
            if (sd.size() != count) throw InvalidArgument("--std-devs needs " + std::to_string(count) + " values");
            return NoiseSpec(basis, sd, seed);
        };
        std::optional<FARModel> model;
        if (name == "fibonacci") {
            r.params()["alpha"] = alpha;
            const auto b = fourier_basis(d, 2);
            // rho(v) = alpha(<v,e1> + <v,e2>) e1 + alpha <v,e1> e2, noise only along e1
            model = FARModel::ar1(SeparableKernelOp({b[0], b[1]}, {alpha * (b[0] + b[1]), alpha * b[0]}), noise(2, {1.0, 0.0}));
        } else if (name == "ou") {
            r.params()["theta"] = theta;
            model = FARModel::ar1(PointEvalExpOp(theta, d), noise(3, {1.0, 0.5, 0.25}));
        } else if (name == "spectral") {
            r.params()["eigenvalues"] = eigenvalues;
            const auto m = eigenvalues.size();
            std::vector<double> sd(m);
            for (std::size_t i = 0; i < m; ++i) sd[i] = std::pow(0.7, static_cast<double>(i));
            model = FARModel::ar1(SpectralOp(eigenvalues, fourier_basis(d, m)), noise(m, sd));
        } else {
            throw InvalidArgument("unknown example model '" + name + "' (fibonacci, ou, spectral)");
        }
        auto out = r.open("model.json");
        out << io::to_json(*model).dump(2) << '\n';
    }
};

int exit_code(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::usage: return 1;
        case ErrorCategory::data: return 2;
        case ErrorCategory::numerical: return 3;
    }
    return 3;
}

const char* category_name(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::usage: return "usage";
        case ErrorCategory::data: return "data";
        case ErrorCategory::numerical: return "numerical";
    }
    return "numerical";
}

int fail(const std::string& command, const std::optional<std::string>& out_dir, ErrorCategory category, const std::string& kind,
         const std::string& message) {
    const int code = exit_code(category);
    const json doc = {{"version", FUNROOT_VERSION},
                      {"command", command},
                      {"error", {{"category", category_name(category)}, {"kind", kind}, {"message", message}, {"exit_code", code}}}};
    std::cerr << doc.dump() << '\n';
    if (out_dir) {
        std::error_code ec;
        fs::create_directories(*out_dir, ec);
        std::ofstream(fs::path(*out_dir) / "error.json") << doc.dump(2) << '\n';
    }
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unit roots of functional AR(1)/AR(2) processes"};
    app.set_version_flag("--version", FUNROOT_VERSION);
    app.require_subcommand(1);

    CommonFlags flags;
    SimulateCmd simulate_cmd;
    SpectrumCmd spectrum_cmd;
    FredholmCmd fredholm_cmd;
    DecomposeCmd decompose_cmd;
    FpcaCmd fpca_cmd;
    AdfCmd adf_cmd;
    JohansenCmd johansen_cmd;
    DetectCmd detect_cmd;
    ExampleModelCmd example_cmd;

    auto* sim = app.add_subcommand("simulate", "simulate a sample path from a model file");
    sim->add_option("model", simulate_cmd.model, "model JSON")->required();
    sim->add_option("--length", simulate_cmd.length, "number of returned frames")->check(CLI::PositiveNumber);
    sim->add_option("--burn-in", simulate_cmd.burn_in, "discarded frames (default 200 if stationary, else 0)");

    auto* spec = app.add_subcommand("spectrum", "nonzero spectrum and unit-root classification");
    spec->add_option("input", spectrum_cmd.input, "model or operator JSON")->required();
    spec->add_option("--tolerance", spectrum_cmd.tolerance, "tolerance profile: exact or estimated");

    auto* fred = app.add_subcommand("fredholm", "Fredholm determinant p(z) = prod(1 - lambda z)");
    fred->add_option("input", fredholm_cmd.input, "model or operator JSON")->required();
    fred->add_option("--z", fredholm_cmd.points, "evaluation point re or re,im (repeatable; default 1)");

    auto* dec = app.add_subcommand("decompose", "random-walk / stationary decomposition");
    dec->add_option("input", decompose_cmd.input, "model or operator JSON")->required();
    dec->add_option("--path", decompose_cmd.path, "sample path CSV (time rows) to split");
    dec->add_option("--tolerance", decompose_cmd.tolerance, "tolerance profile: exact or estimated");

    auto* fp = app.add_subcommand("fpca", "functional principal components of a dataset");
    fp->add_option("data", fpca_cmd.data, "dataset CSV")->required();
    fp->add_option("-k,--components", fpca_cmd.k, "number of components")->check(CLI::PositiveNumber);
    fpca_cmd.ingest.add_to(fp);

    auto* adf = app.add_subcommand("adf", "augmented Dickey-Fuller test on one CSV column");
    adf->add_option("data", adf_cmd.data, "numeric CSV")->required();
    adf->add_option("--column", adf_cmd.column, "1-based column");
    adf->add_option("--lags", adf_cmd.lags, "lagged differences");
    adf->add_option("--spec", adf_cmd.spec, "none, constant or trend");

    auto* joh = app.add_subcommand("johansen", "Johansen trace test");
    joh->add_option("data", johansen_cmd.data, "numeric CSV, one series per column")->required();
    joh->add_option("--columns", johansen_cmd.columns, "1-based columns (default all)")->delimiter(',');
    joh->add_option("--lags", johansen_cmd.lags, "VAR order in levels");
    joh->add_option("--det", johansen_cmd.det, "none or constant");
    joh->add_option("--level", johansen_cmd.level, "1%, 5% or 10%");

    auto* det = app.add_subcommand("detect", "FPCA -> ADF per score -> Johansen on the trend scores");
    det->add_option("data", detect_cmd.data, "dataset CSV")->required();
    det->add_option("-k,--components", detect_cmd.k, "number of components")->check(CLI::PositiveNumber);
    detect_cmd.ingest.add_to(det);
    det->add_option("--level", detect_cmd.level, "ADF level: 1%, 5% or 10%");
    det->add_option("--adf-spec", detect_cmd.adf_spec, "none, constant or trend");
    det->add_option("--adf-lags", detect_cmd.adf_lags, "ADF lagged differences");
    det->add_option("--johansen-lags", detect_cmd.johansen_lags, "Johansen VAR order");
    det->add_option("--johansen-det", detect_cmd.johansen_det, "none or constant");
    det->add_option("--johansen-level", detect_cmd.johansen_level, "Johansen rank level");

    auto* ex = app.add_subcommand("example-model", "write a ready-made model file");
    ex->add_option("name", example_cmd.name, "fibonacci, ou or spectral")->required();
    ex->add_option("--alpha", example_cmd.alpha, "fibonacci coefficient (default: the unit-root value)");
    ex->add_option("--theta", example_cmd.theta, "ou decay rate");
    ex->add_option("--eigenvalues", example_cmd.eigenvalues, "spectral eigenvalues")->delimiter(',');
    ex->add_option("--std-devs", example_cmd.std_devs, "noise standard deviations")->delimiter(',');

    for (auto* sub : app.get_subcommands({})) add_common(sub, flags);

    std::string command = "funroot";
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        for (auto* sub : app.get_subcommands()) command = sub->get_name();
        return fail(command, std::nullopt, ErrorCategory::usage, "usage", e.what());
    }

    auto* chosen = app.get_subcommands().front();
    command = chosen->get_name();
    std::optional<std::string> out_dir;
    try {
        Run run(command, flags);
        out_dir = run.config().out;
        if (chosen == sim) simulate_cmd.run(run);
        else if (chosen == spec) spectrum_cmd.run(run);
        else if (chosen == fred) fredholm_cmd.run(run);
        else if (chosen == dec) decompose_cmd.run(run);
        else if (chosen == fp) fpca_cmd.run(run);
        else if (chosen == adf) adf_cmd.run(run);
        else if (chosen == joh) johansen_cmd.run(run);
        else if (chosen == det) detect_cmd.run(run);
        else example_cmd.run(run);
        run.finish();
        return 0;
    } catch (const Error& e) {
        return fail(command, out_dir, e.category(), e.kind(), e.what());
    } catch (const std::exception& e) {
        return fail(command, out_dir, ErrorCategory::numerical, "internal", e.what());
    }
}
