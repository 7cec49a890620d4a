#pragma once

// JSON views of analysis results. Component indices are 1-based here, as in
// "first principal component".

#include <complex>
#include <vector>

#include <nlohmann/json.hpp>

#include "funroot/io.hpp"
#include "funroot/stats.hpp"
#include "funroot/unitroot.hpp"

namespace funroot::io {

inline json to_json(std::complex<double> z) { return {{"re", z.real()}, {"im", z.imag()}}; }

inline json to_json(const std::vector<std::complex<double>>& zs) {
    json a = json::array();
    for (const auto& z : zs) a.push_back(to_json(z));
    return a;
}

inline json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        std::vector<double> r(static_cast<std::size_t>(m.cols()));
        for (Eigen::Index j = 0; j < m.cols(); ++j) r[static_cast<std::size_t>(j)] = m(i, j);
        rows.push_back(r);
    }
    return rows;
}

inline json vector_to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

template <typename T>
json by_level(const std::array<T, 3>& values) {
    json j = json::object();
    for (auto l : all_levels) j[to_string(l)] = values[level_index(l)];
    return j;
}

inline json to_json(const SpectrumReport& r) {
    return {{"eigenvalues", to_json(r.eigenvalues)},
            {"spectral_radius", [&] {
                 double m = 0.0;
                 for (const auto& l : r.eigenvalues) m = std::max(m, std::abs(l));
                 return m;
             }()},
            {"unit_set", r.unit_set},
            {"stable_set", r.stable_set},
            {"boundary_set", r.boundary_set},
            {"tol_unit", r.tol_unit},
            {"strong_unit_root", r.strong_unit_root()},
            {"multiplicity_flag", r.multiplicity_flag},
            {"geometric_multiplicity", r.geometric_multiplicity}};
}

inline json to_json(const Decomposition& d) {
    return {{"classification", to_json(d.report)},
            {"dim_u", d.dim_u},
            {"residual_commutation", d.residual_commutation},
            {"residual_idempotent", d.residual_idempotent},
            {"complement_radius", d.complement_radius},
            {"projector", matrix_to_json(d.projector)},
            {"trend_basis", to_json(std::span<const GridFunction>(d.trend_basis))}};
}

inline json to_json(const AR2UnitRootReport& r) {
    json pairs = json::array();
    for (const auto& p : r.eligible_pairs)
        pairs.push_back({{"lambda1", p.lambda1}, {"lambda2", p.lambda2}, {"intersection_dim", p.intersection_dim}});
    return {{"eligible_pairs", pairs},
            {"total_trends", r.total_trends},
            {"conditions_met", {r.conditions_met[0], r.conditions_met[1], r.conditions_met[2]}}};
}

inline json to_json(const ADFResult& r) {
    return {{"tau", r.tau},
            {"coefficient", r.coefficient},
            {"std_error", r.std_error},
            {"lags", r.lags},
            {"nobs", r.nobs},
            {"spec", to_string(r.spec)},
            {"critical_values", by_level(r.critical_values)},
            {"reject", by_level(r.reject_at)}};
}

inline json to_json(const JohansenResult& r, Level level) {
    json cv = json::array();
    for (const auto& row : r.critical_values) cv.push_back(by_level(row));
    return {{"eigenvalues", r.eigenvalues},
            {"trace_stats", r.trace_stats},
            {"critical_values", cv},
            {"lags", r.lags},
            {"nobs", r.nobs},
            {"det", to_string(r.det)},
            {"level", to_string(level)},
            {"selected_rank", r.selected_rank(level)}};
}

inline json to_json(const FPCAResult& r) {
    double total = 0.0;
    for (double l : r.all_eigenvalues) total += std::max(l, 0.0);
    json comps = json::array();
    for (std::size_t j = 0; j < r.eigenfunctions.size(); ++j)
        comps.push_back({{"index", j + 1},
                         {"eigenvalue", r.eigenvalues[j]},
                         {"explained", total > 0.0 ? r.eigenvalues[j] / total : 0.0},
                         {"eigenfunction", to_json(r.eigenfunctions[j])}});
    return {{"components", comps}, {"mean", to_json(r.mean)}, {"frames", r.scores.rows()}};
}

inline json to_json(const DetectionReport& r) {
    json comps = json::array();
    for (const auto& c : r.components)
        comps.push_back({{"index", c.index + 1},
                         {"eigenvalue", c.eigenvalue},
                         {"tau", c.adf.tau},
                         {"critical_values", by_level(c.adf.critical_values)},
                         {"reject", by_level(c.adf.reject_at)}});
    std::vector<std::size_t> trend;
    for (auto i : r.trend_components) trend.push_back(i + 1);
    json j = {{"components", comps},
              {"trend_dim", r.trend_dim},
              {"trend_components", trend},
              {"johansen", nullptr},
              {"options",
               {{"level", to_string(r.options.level)},
                {"adf_spec", to_string(r.options.adf_spec)},
                {"adf_lags", r.options.adf_lags},
                {"johansen_lags", r.options.johansen_lags},
                {"johansen_det", to_string(r.options.johansen_det)},
                {"johansen_level", to_string(r.options.johansen_level)}}}};
    if (r.johansen) j["johansen"] = to_json(*r.johansen, r.options.johansen_level);
    return j;
}

}  // namespace funroot::io
