#pragma once

// Compact (finite-rank) autoregression operators on the discretized L2([0,1]).
//
// Every supported operator factors as  rho(v) = sum_i c_i(v) f_i  with a finite
// range basis {f_i} and linear coordinate functionals c_i. The matrix
// A_ij = c_i(f_j) carries the whole nonzero spectrum, so eigenvalues,
// eigenspaces and Fredholm determinants are computed on A.

#include <cmath>
#include <complex>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "funroot/error.hpp"
#include "funroot/funcspace.hpp"
#include "funroot/linalg.hpp"

namespace funroot {

/// Integral operator with kernel K(s,t) = sum_i a_i(s) b_i(t).
class SeparableKernelOp {
public:
    SeparableKernelOp(std::vector<GridFunction> a, std::vector<GridFunction> b) : a_(std::move(a)), b_(std::move(b)) {
        if (a_.empty() || a_.size() != b_.size())
            throw InvalidArgument("separable kernel needs equally many (>= 1) range and integration factors");
        for (const auto& f : a_) require_same_domain(a_.front().domain(), f.domain(), "SeparableKernelOp");
        for (const auto& f : b_) require_same_domain(a_.front().domain(), f.domain(), "SeparableKernelOp");
    }

    const std::vector<GridFunction>& a() const noexcept { return a_; }
    const std::vector<GridFunction>& b() const noexcept { return b_; }
    std::size_t rank() const noexcept { return a_.size(); }
    const DomainPtr& domain() const noexcept { return a_.front().domain(); }

private:
    std::vector<GridFunction> a_;
    std::vector<GridFunction> b_;
};

/// rho = sum_i lambda_i <phi_i, .> phi_i with orthonormal phi_i.
class SpectralOp {
public:
    SpectralOp(std::vector<double> eigenvalues, std::vector<GridFunction> eigenfunctions)
        : eigenvalues_(std::move(eigenvalues)), eigenfunctions_(std::move(eigenfunctions)) {
        if (eigenvalues_.empty() || eigenvalues_.size() != eigenfunctions_.size())
            throw InvalidArgument("spectral operator needs equally many (>= 1) eigenvalues and eigenfunctions");
        for (double l : eigenvalues_)
            if (!std::isfinite(l)) throw InvalidArgument("spectral operator eigenvalues must be finite");
        for (std::size_t i = 0; i < eigenfunctions_.size(); ++i) {
            require_same_domain(eigenfunctions_.front().domain(), eigenfunctions_[i].domain(), "SpectralOp");
            for (std::size_t j = 0; j <= i; ++j) {
                const double g = inner_product(eigenfunctions_[i], eigenfunctions_[j]);
                if (std::abs(g - (i == j ? 1.0 : 0.0)) > 1e-8)
                    throw InvalidArgument("spectral operator eigenfunctions are not orthonormal");
            }
        }
    }

    const std::vector<double>& eigenvalues() const noexcept { return eigenvalues_; }
    const std::vector<GridFunction>& eigenfunctions() const noexcept { return eigenfunctions_; }
    const DomainPtr& domain() const noexcept { return eigenfunctions_.front().domain(); }

private:
    std::vector<double> eigenvalues_;
    std::vector<GridFunction> eigenfunctions_;
};

/// rho(v)(t) = exp(-theta t) v(1). The grid must end at t = 1.
class PointEvalExpOp {
public:
    PointEvalExpOp(double theta, DomainPtr domain) : theta_(theta), domain_(std::move(domain)) {
        if (!std::isfinite(theta_) || theta_ < 0.0) throw InvalidArgument("theta must be finite and >= 0");
        if (!domain_ || domain_->nodes().back() != 1.0)
            throw InvalidArgument("point-evaluation operator needs a grid whose last node is 1");
    }

    double theta() const noexcept { return theta_; }
    const DomainPtr& domain() const noexcept { return domain_; }
    GridFunction profile() const {
        return GridFunction::sample(domain_, [&](double t) { return std::exp(-theta_ * t); });
    }

private:
    double theta_;
    DomainPtr domain_;
};

using OperatorSpec = std::variant<SeparableKernelOp, SpectralOp, PointEvalExpOp>;

enum class ReductionKind { companion, diagonal, scalar };

inline const char* to_string(ReductionKind k) {
    switch (k) {
        case ReductionKind::companion: return "companion";
        case ReductionKind::diagonal: return "diagonal";
        case ReductionKind::scalar: return "scalar";
    }
    return "?";
}

struct MatrixReduction {
    Eigen::MatrixXd matrix;
    std::vector<GridFunction> range_basis;
    ReductionKind kind;
};

inline const DomainPtr& domain_of(const OperatorSpec& rho) {
    return std::visit([](const auto& op) -> const DomainPtr& { return op.domain(); }, rho);
}

inline const char* kind_name(const OperatorSpec& rho) {
    struct V {
        const char* operator()(const SeparableKernelOp&) const { return "separable"; }
        const char* operator()(const SpectralOp&) const { return "spectral"; }
        const char* operator()(const PointEvalExpOp&) const { return "pointexp"; }
    };
    return std::visit(V{}, rho);
}

/// Functions spanning the range of rho.
inline std::vector<GridFunction> range_basis(const OperatorSpec& rho) {
    struct V {
        std::vector<GridFunction> operator()(const SeparableKernelOp& op) const { return op.a(); }
        std::vector<GridFunction> operator()(const SpectralOp& op) const { return op.eigenfunctions(); }
        std::vector<GridFunction> operator()(const PointEvalExpOp& op) const { return {op.profile()}; }
    };
    return std::visit(V{}, rho);
}

/// Coefficients of rho(v) on range_basis(rho).
inline Eigen::VectorXd coordinates(const OperatorSpec& rho, const GridFunction& v) {
    require_same_domain(domain_of(rho), v.domain(), "operator");
    struct V {
        const GridFunction& v;
        Eigen::VectorXd operator()(const SeparableKernelOp& op) const {
            Eigen::VectorXd c(static_cast<Eigen::Index>(op.rank()));
            for (std::size_t i = 0; i < op.rank(); ++i) c[static_cast<Eigen::Index>(i)] = inner_product(op.b()[i], v);
            return c;
        }
        Eigen::VectorXd operator()(const SpectralOp& op) const {
            const auto m = op.eigenvalues().size();
            Eigen::VectorXd c(static_cast<Eigen::Index>(m));
            for (std::size_t i = 0; i < m; ++i)
                c[static_cast<Eigen::Index>(i)] = op.eigenvalues()[i] * inner_product(op.eigenfunctions()[i], v);
            return c;
        }
        Eigen::VectorXd operator()(const PointEvalExpOp&) const { return Eigen::VectorXd::Constant(1, v.last()); }
    };
    return std::visit(V{v}, rho);
}

// A function object rather than a function: OperatorSpec is a std::variant, so
// an unqualified apply(rho, v) would otherwise also find std::apply via ADL.
inline constexpr struct ApplyFn {
    GridFunction operator()(const OperatorSpec& rho, const GridFunction& v) const {
        const auto basis = range_basis(rho);
        return linear_combination(coordinates(rho, v), basis);
    }
} apply{};

/// The adjoint as an operator of the same family. Point evaluation has no
/// adjoint inside the grid-function space.
inline OperatorSpec adjoint(const OperatorSpec& rho) {
    struct V {
        OperatorSpec operator()(const SeparableKernelOp& op) const { return SeparableKernelOp(op.b(), op.a()); }
        OperatorSpec operator()(const SpectralOp& op) const { return op; }
        OperatorSpec operator()(const PointEvalExpOp&) const {
            throw UnsupportedAdjoint("the adjoint of a point-evaluation operator is not a grid-function operator");
        }
    };
    return std::visit(V{}, rho);
}

inline GridFunction adjoint_apply(const OperatorSpec& rho, const GridFunction& v) { return funroot::apply(adjoint(rho), v); }

inline MatrixReduction matrix_reduction(const OperatorSpec& rho) {
    struct V {
        MatrixReduction operator()(const SeparableKernelOp& op) const {
            const auto n = static_cast<Eigen::Index>(op.rank());
            Eigen::MatrixXd a(n, n);
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j < n; ++j)
                    a(i, j) = inner_product(op.b()[static_cast<std::size_t>(i)], op.a()[static_cast<std::size_t>(j)]);
            return {std::move(a), op.a(), ReductionKind::companion};
        }
        MatrixReduction operator()(const SpectralOp& op) const {
            Eigen::VectorXd l = Eigen::Map<const Eigen::VectorXd>(op.eigenvalues().data(),
                                                                  static_cast<Eigen::Index>(op.eigenvalues().size()));
            return {l.asDiagonal(), op.eigenfunctions(), ReductionKind::diagonal};
        }
        MatrixReduction operator()(const PointEvalExpOp& op) const {
            return {Eigen::MatrixXd::Constant(1, 1, std::exp(-op.theta())), {op.profile()}, ReductionKind::scalar};
        }
    };
    return std::visit(V{}, rho);
}

/// Nonzero spectrum through the matrix reduction (the eigenvalue 0 of
/// infinite multiplicity is not listed; zeros of the reduction itself are).
inline std::vector<std::complex<double>> spectrum(const OperatorSpec& rho) {
    const auto red = matrix_reduction(rho);
    if (red.kind != ReductionKind::companion) {
        std::vector<std::complex<double>> ev;
        for (Eigen::Index i = 0; i < red.matrix.rows(); ++i) ev.emplace_back(red.matrix(i, i), 0.0);
        linalg::sort_spectrum(ev);
        return ev;
    }
    return linalg::eigenvalues(red.matrix);
}

inline double spectral_radius(const OperatorSpec& rho) {
    double r = 0.0;
    for (const auto& l : spectrum(rho)) r = std::max(r, std::abs(l));
    return r;
}

/// p(z) = prod_n (1 - lambda_n z).
inline std::complex<double> fredholm_determinant(const OperatorSpec& rho, std::complex<double> z) {
    std::complex<double> p{1.0, 0.0};
    for (const auto& l : spectrum(rho)) p *= 1.0 - l * z;
    return p;
}

/// Orthonormal basis of the eigenspace of rho at lambda. For non-real lambda
/// the real invariant subspace of the pair (lambda, conj lambda) is returned.
/// Empty when lambda is not an eigenvalue within tol.
inline std::vector<GridFunction> eigenspace(const OperatorSpec& rho, std::complex<double> lambda, double tol = 1e-8) {
    if (!(tol > 0.0)) throw InvalidArgument("eigenspace: tol must be > 0");
    const auto red = matrix_reduction(rho);
    const Eigen::Index n = red.matrix.rows();
    const double threshold = tol * std::max(1.0, linalg::spectral_norm(red.matrix));

    std::vector<Eigen::VectorXd> coeffs;
    if (std::abs(lambda.imag()) <= tol) {
        const Eigen::MatrixXd shifted = red.matrix - lambda.real() * Eigen::MatrixXd::Identity(n, n);
        const Eigen::MatrixXd ns = linalg::null_space(shifted, threshold);
        for (Eigen::Index j = 0; j < ns.cols(); ++j) coeffs.emplace_back(ns.col(j));
    } else {
        const Eigen::MatrixXcd shifted =
            red.matrix.cast<std::complex<double>>() - lambda * Eigen::MatrixXcd::Identity(n, n);
        const Eigen::MatrixXcd ns = linalg::null_space(shifted, threshold);
        for (Eigen::Index j = 0; j < ns.cols(); ++j) {
            coeffs.emplace_back(ns.col(j).real());
            coeffs.emplace_back(ns.col(j).imag());
        }
    }

    std::vector<GridFunction> funcs;
    for (const auto& c : coeffs) funcs.push_back(linear_combination(c, red.range_basis));
    return orthonormalize(funcs);
}

}  // namespace funroot
