#pragma once

// Strong unit roots of a functional AR(1), the random-walk / stationary
// decomposition X = Pi_U X + Pi_S X, weak unit roots Ker(rho* - I) and the
// AR(2) unit-root conditions.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "funroot/error.hpp"
#include "funroot/far.hpp"
#include "funroot/funcspace.hpp"
#include "funroot/linalg.hpp"
#include "funroot/operators.hpp"

namespace funroot {

/// Tolerance for operators given in closed form.
inline constexpr double exact_unit_tol = 1e-8;
/// Tolerance for operators estimated from data.
inline constexpr double estimated_unit_tol = 0.05;

inline double tolerance_profile(const std::string& name) {
    if (name == "exact") return exact_unit_tol;
    if (name == "estimated") return estimated_unit_tol;
    throw InvalidArgument("unknown tolerance profile '" + name + "' (expected exact or estimated)");
}

struct SpectrumReport {
    std::vector<std::complex<double>> eigenvalues;
    std::vector<std::size_t> unit_set;
    std::vector<std::size_t> stable_set;
    std::vector<std::size_t> boundary_set;
    double tol_unit = exact_unit_tol;
    /// Eigenvalue 1 is defective (geometric < algebraic multiplicity).
    bool multiplicity_flag = false;
    std::size_t geometric_multiplicity = 0;

    bool strong_unit_root() const noexcept { return !unit_set.empty() && boundary_set.empty(); }
};

namespace detail {

/// Right/left eigenvector bases for the unit-set eigenvalues of a reduction.
/// Eigenvalues closer than 1e-6 form one cluster; each cluster of size m at
/// mean mu takes the m smallest singular directions of A - mu I.
struct UnitEigenbasis {
    Eigen::MatrixXd right;
    Eigen::MatrixXd left;
    Eigen::VectorXd shift;  ///< cluster eigenvalue per column
    std::size_t algebraic = 0;
    std::size_t geometric = 0;
};

inline UnitEigenbasis unit_eigenbasis(const Eigen::MatrixXd& a, const std::vector<std::complex<double>>& ev,
                                      const std::vector<std::size_t>& unit_set) {
    UnitEigenbasis out;
    const Eigen::Index n = a.rows();
    std::vector<double> values;
    for (auto i : unit_set) values.push_back(ev[i].real());
    std::sort(values.begin(), values.end());
    out.algebraic = values.size();
    if (values.empty()) return out;

    const double null_tol = 1e-6 * std::max(1.0, linalg::spectral_norm(a));
    std::vector<Eigen::VectorXd> rights, lefts;
    std::vector<double> shifts;
    std::size_t start = 0;
    while (start < values.size()) {
        std::size_t end = start + 1;
        while (end < values.size() && values[end] - values[end - 1] <= 1e-6) ++end;
        const auto m = static_cast<Eigen::Index>(end - start);
        double mu = 0.0;
        for (std::size_t i = start; i < end; ++i) mu += values[i];
        mu /= static_cast<double>(m);

        const Eigen::MatrixXd shifted = a - mu * Eigen::MatrixXd::Identity(n, n);
        const auto small = linalg::smallest_singular(shifted, m);
        for (Eigen::Index j = 0; j < m; ++j) {
            if (small.values(j) <= null_tol) ++out.geometric;
            rights.emplace_back(small.right.col(j));
            lefts.emplace_back(small.left.col(j));
            shifts.push_back(mu);
        }
        start = end;
    }
    const auto k = static_cast<Eigen::Index>(rights.size());
    out.right.resize(n, k);
    out.left.resize(n, k);
    out.shift.resize(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        out.right.col(j) = rights[static_cast<std::size_t>(j)];
        out.left.col(j) = lefts[static_cast<std::size_t>(j)];
        out.shift(j) = shifts[static_cast<std::size_t>(j)];
    }
    return out;
}

}  // namespace detail

/// Splits the nonzero spectrum into unit, stable (|l| < 1 - tol) and boundary sets.
inline SpectrumReport classify(const OperatorSpec& rho, double tol_unit = exact_unit_tol) {
    if (!(tol_unit > 0.0)) throw InvalidArgument("classify: tol_unit must be > 0");
    SpectrumReport rep;
    rep.tol_unit = tol_unit;
    rep.eigenvalues = spectrum(rho);
    for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i) {
        const auto l = rep.eigenvalues[i];
        if (std::abs(l - 1.0) <= tol_unit && std::abs(l.imag()) <= tol_unit)
            rep.unit_set.push_back(i);
        else if (std::abs(l) < 1.0 - tol_unit)
            rep.stable_set.push_back(i);
        else
            rep.boundary_set.push_back(i);
    }
    if (!rep.unit_set.empty()) {
        const auto basis = detail::unit_eigenbasis(matrix_reduction(rho).matrix, rep.eigenvalues, rep.unit_set);
        rep.geometric_multiplicity = basis.geometric;
        rep.multiplicity_flag = basis.geometric < basis.algebraic;
    }
    return rep;
}

/// Pi_U as a spectral (Riesz) projection, with Pi_S = I - Pi_U.
struct Decomposition {
    OperatorSpec op;
    std::vector<GridFunction> range_basis;
    /// Orthonormal basis of U_X = Ker(rho - I).
    std::vector<GridFunction> trend_basis;
    /// P acting on range-basis coefficients: P = R (L^T R)^{-1} L^T.
    Eigen::MatrixXd projector;
    /// Maps coordinates(rho, x) to the range-basis coefficients of Pi_U x.
    Eigen::MatrixXd coordinate_projector;
    std::size_t dim_u = 0;
    double residual_commutation = 0.0;  ///< |PA - AP|_2
    double residual_idempotent = 0.0;   ///< |P^2 - P|_2
    double complement_radius = 0.0;     ///< r(A (I - P))
    SpectrumReport report;

    GridFunction trend_part(const GridFunction& x) const {
        return linear_combination(coordinate_projector * coordinates(op, x), range_basis);
    }
    GridFunction stationary_part(const GridFunction& x) const { return x - trend_part(x); }
};

inline Decomposition decompose(const OperatorSpec& rho, double tol_unit = exact_unit_tol) {
    auto rep = classify(rho, tol_unit);
    if (!rep.strong_unit_root())
        throw PreconditionError("decompose: the operator has no strong unit root (unit set " +
                                std::to_string(rep.unit_set.size()) + ", boundary set " +
                                std::to_string(rep.boundary_set.size()) + ")");
    const auto red = matrix_reduction(rho);
    const auto& a = red.matrix;
    const Eigen::Index n = a.rows();
    const auto basis = detail::unit_eigenbasis(a, rep.eigenvalues, rep.unit_set);
    if (basis.geometric < basis.algebraic)
        throw DefectiveUnitRoot(basis.algebraic, basis.geometric,
                                "decompose: eigenvalue 1 has algebraic multiplicity " + std::to_string(basis.algebraic) +
                                    " but geometric multiplicity " + std::to_string(basis.geometric));

    const Eigen::MatrixXd& r = basis.right;
    const Eigen::MatrixXd& l = basis.left;
    const Eigen::MatrixXd gram = l.transpose() * r;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
    if (!lu.isInvertible()) throw NumericalError("decompose: left and right unit eigenvectors are not biorthogonalizable");
    const Eigen::MatrixXd gram_inv = lu.inverse();

    Decomposition d{rho, red.range_basis, {}, {}, {}, 0, 0.0, 0.0, 0.0, std::move(rep)};
    d.projector = r * gram_inv * l.transpose();
    d.coordinate_projector = r * gram_inv * basis.shift.cwiseInverse().asDiagonal() * l.transpose();

    std::vector<GridFunction> funcs;
    for (Eigen::Index j = 0; j < r.cols(); ++j) funcs.push_back(linear_combination(Eigen::VectorXd(r.col(j)), red.range_basis));
    d.trend_basis = orthonormalize(funcs);
    d.dim_u = static_cast<std::size_t>(r.cols());
    if (d.trend_basis.size() != d.dim_u)
        throw NumericalError("decompose: unit eigenvectors map to linearly dependent functions");

    const Eigen::MatrixXd& p = d.projector;
    d.residual_commutation = linalg::spectral_norm(p * a - a * p);
    d.residual_idempotent = linalg::spectral_norm(p * p - p);
    d.complement_radius = linalg::spectral_radius(a * (Eigen::MatrixXd::Identity(n, n) - p));
    return d;
}

/// Framewise (Pi_U X_n, Pi_S X_n).
inline std::pair<FunctionSeries, FunctionSeries> split_path(const Decomposition& dec, const FunctionSeries& x) {
    require_same_domain(domain_of(dec.op), x.domain(), "split_path");
    std::vector<GridFunction> trend, stat;
    trend.reserve(x.length());
    stat.reserve(x.length());
    for (const auto& f : x) {
        auto u = dec.trend_part(f);
        stat.push_back(f - u);
        trend.push_back(std::move(u));
    }
    return {FunctionSeries(std::move(trend)), FunctionSeries(std::move(stat))};
}

inline std::pair<FunctionSeries, FunctionSeries> split_path(const Decomposition& dec, const SamplePath& path) {
    return split_path(dec, path.series);
}

/// Orthonormal basis of Ker(rho* - I). This is the weak-unit-root set W_X when
/// the process takes values in a dense subspace of H.
inline std::vector<GridFunction> weak_unit_root_space(const OperatorSpec& rho, double tol = exact_unit_tol) {
    return eigenspace(adjoint(rho), {1.0, 0.0}, tol);
}

struct EligiblePair {
    double lambda1;
    double lambda2;
    std::size_t intersection_dim;
};

struct AR2UnitRootReport {
    std::vector<EligiblePair> eligible_pairs;
    std::size_t total_trends = 0;
    /// (1) both operators compact, (2) 1 in sigma(rho1) + sigma(rho2),
    /// (3) some eligible pair has Ker(rho1* - l1) and Ker(rho2* - l2) intersecting.
    std::array<bool, 3> conditions_met{false, false, false};
};

namespace detail {

inline std::vector<double> distinct_real_eigenvalues(const OperatorSpec& rho, double tol) {
    std::vector<double> out;
    for (const auto& l : spectrum(rho)) {
        if (std::abs(l.imag()) > tol || l == 0.0) continue;
        const bool seen = std::any_of(out.begin(), out.end(), [&](double x) { return std::abs(x - l.real()) <= tol; });
        if (!seen) out.push_back(l.real());
    }
    return out;
}

/// Number of principal angles with cosine >= 1 - 1e-8.
inline std::size_t intersection_dim(const std::vector<GridFunction>& u, const std::vector<GridFunction>& w) {
    if (u.empty() || w.empty()) return 0;
    Eigen::MatrixXd g(static_cast<Eigen::Index>(u.size()), static_cast<Eigen::Index>(w.size()));
    for (std::size_t i = 0; i < u.size(); ++i)
        for (std::size_t j = 0; j < w.size(); ++j)
            g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = inner_product(u[i], w[j]);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(g);
    std::size_t count = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) >= 1.0 - 1e-8) ++count;
    return count;
}

}  // namespace detail

inline AR2UnitRootReport ar2_unit_root_check(const FARModel& model, double tol = exact_unit_tol) {
    if (model.order() != 2) throw InvalidArgument("ar2_unit_root_check: model must be of order 2");
    const auto adj1 = adjoint(model.rho1());
    const auto adj2 = adjoint(*model.rho2());

    AR2UnitRootReport rep;
    rep.conditions_met[0] = true;  // every supported operator is finite-rank
    for (double l1 : detail::distinct_real_eigenvalues(model.rho1(), tol)) {
        for (double l2 : detail::distinct_real_eigenvalues(*model.rho2(), tol)) {
            if (std::abs(l1 + l2 - 1.0) > tol) continue;
            rep.conditions_met[1] = true;
            const auto k1 = eigenspace(adj1, {l1, 0.0}, tol);
            const auto k2 = eigenspace(adj2, {l2, 0.0}, tol);
            const auto dim = detail::intersection_dim(k1, k2);
            rep.eligible_pairs.push_back({l1, l2, dim});
            rep.total_trends += dim;
            if (dim > 0) rep.conditions_met[2] = true;
        }
    }
    return rep;
}

}  // namespace funroot
