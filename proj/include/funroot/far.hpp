#pragma once

// Functional AR(1)/AR(2) processes: Gaussian noise in a finite orthonormal
// system, path simulation, the truncated moving-average form and the
// stationarity check.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "funroot/error.hpp"
#include "funroot/funcspace.hpp"
#include "funroot/linalg.hpp"
#include "funroot/operators.hpp"
#include "funroot/rng.hpp"

namespace funroot {

class NoiseSpec {
public:
    NoiseSpec(std::vector<GridFunction> basis, std::vector<double> std_devs, std::uint64_t seed)
        : basis_(std::move(basis)), std_devs_(std::move(std_devs)), seed_(seed) {
        if (basis_.empty() || basis_.size() != std_devs_.size())
            throw InvalidArgument("noise needs equally many (>= 1) directions and standard deviations");
        for (double s : std_devs_)
            if (!(s >= 0.0) || !std::isfinite(s)) throw InvalidArgument("noise standard deviations must be finite and >= 0");
        for (std::size_t i = 0; i < basis_.size(); ++i) {
            require_same_domain(basis_.front().domain(), basis_[i].domain(), "NoiseSpec");
            for (std::size_t j = 0; j <= i; ++j)
                if (std::abs(inner_product(basis_[i], basis_[j]) - (i == j ? 1.0 : 0.0)) > 1e-8)
                    throw InvalidArgument("noise directions are not orthonormal");
        }
    }

    const std::vector<GridFunction>& basis() const noexcept { return basis_; }
    const std::vector<double>& std_devs() const noexcept { return std_devs_; }
    std::uint64_t seed() const noexcept { return seed_; }
    const DomainPtr& domain() const noexcept { return basis_.front().domain(); }

    NoiseSpec with_seed(std::uint64_t seed) const { return {basis_, std_devs_, seed}; }
    NoiseSpec scaled(double c) const {
        auto s = std_devs_;
        for (auto& v : s) v *= c;
        return {basis_, std::move(s), seed_};
    }

private:
    std::vector<GridFunction> basis_;
    std::vector<double> std_devs_;
    std::uint64_t seed_;
};

class FARModel {
public:
    static FARModel ar1(OperatorSpec rho, NoiseSpec noise) { return FARModel(std::move(rho), std::nullopt, std::move(noise)); }
    static FARModel ar2(OperatorSpec rho1, OperatorSpec rho2, NoiseSpec noise) {
        return FARModel(std::move(rho1), std::move(rho2), std::move(noise));
    }

    int order() const noexcept { return rho2_ ? 2 : 1; }
    const OperatorSpec& rho1() const noexcept { return rho1_; }
    const std::optional<OperatorSpec>& rho2() const noexcept { return rho2_; }
    const NoiseSpec& noise() const noexcept { return noise_; }
    const DomainPtr& domain() const noexcept { return domain_of(rho1_); }

    FARModel with_noise(NoiseSpec noise) const { return FARModel(rho1_, rho2_, std::move(noise)); }

private:
    FARModel(OperatorSpec rho1, std::optional<OperatorSpec> rho2, NoiseSpec noise)
        : rho1_(std::move(rho1)), rho2_(std::move(rho2)), noise_(std::move(noise)) {
        require_same_domain(domain_of(rho1_), noise_.domain(), "FARModel");
        if (rho2_) require_same_domain(domain_of(rho1_), domain_of(*rho2_), "FARModel");
    }

    OperatorSpec rho1_;
    std::optional<OperatorSpec> rho2_;
    NoiseSpec noise_;
};

struct SamplePath {
    FunctionSeries series;       ///< X_1 .. X_T after burn-in
    FunctionSeries innovations;  ///< eps_1 .. eps_T aligned with `series`
    FARModel model;
    std::size_t burn_in;
    std::string generator;
};

namespace detail {

inline Eigen::MatrixXd basis_matrix(std::span<const GridFunction> fs) {
    Eigen::MatrixXd m(fs.front().values().size(), static_cast<Eigen::Index>(fs.size()));
    for (std::size_t i = 0; i < fs.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = fs[i].values();
    return m;
}

/// Fills `count` noise frames (as columns) from an already-positioned generator.
inline Eigen::MatrixXd noise_columns(const NoiseSpec& noise, std::size_t count, SplitMix64& rng) {
    const Eigen::MatrixXd basis = basis_matrix(noise.basis());
    const auto m = static_cast<Eigen::Index>(noise.basis().size());
    Eigen::MatrixXd out(basis.rows(), static_cast<Eigen::Index>(count));
    Eigen::VectorXd z(m);
    for (std::size_t n = 0; n < count; ++n) {
        for (Eigen::Index i = 0; i < m; ++i) z[i] = noise.std_devs()[static_cast<std::size_t>(i)] * rng.normal();
        out.col(static_cast<Eigen::Index>(n)) = basis * z;
    }
    return out;
}

}  // namespace detail

/// `count` i.i.d. frames sum_i sigma_i zeta_i phi_i, zeta_i ~ N(0,1), seeded by noise.seed().
inline FunctionSeries draw_noise(const NoiseSpec& noise, std::size_t count) {
    if (count == 0) throw InvalidArgument("draw_noise: count must be >= 1");
    SplitMix64 rng(noise.seed());
    return FunctionSeries::from_matrix(noise.domain(), detail::noise_columns(noise, count, rng).transpose());
}

struct StationarityReport {
    bool stationary;
    double radius;
};

/// Order 1: r(rho) < 1 - tol. Order 2: spectral radius of the block companion
/// [[M1, M2], [I, 0]] of both operators compressed to their joint range.
inline StationarityReport is_stationary(const FARModel& model, double tol = 1e-8) {
    if (model.order() == 1) {
        const double r = spectral_radius(model.rho1());
        return {r < 1.0 - tol, r};
    }
    auto joint = range_basis(model.rho1());
    for (auto& f : range_basis(*model.rho2())) joint.push_back(std::move(f));
    const auto q = orthonormalize(joint);
    const auto m = static_cast<Eigen::Index>(q.size());
    Eigen::MatrixXd m1(m, m), m2(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const auto r1 = funroot::apply(model.rho1(), q[static_cast<std::size_t>(j)]);
        const auto r2 = funroot::apply(*model.rho2(), q[static_cast<std::size_t>(j)]);
        for (Eigen::Index i = 0; i < m; ++i) {
            m1(i, j) = inner_product(q[static_cast<std::size_t>(i)], r1);
            m2(i, j) = inner_product(q[static_cast<std::size_t>(i)], r2);
        }
    }
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    companion.topLeftCorner(m, m) = m1;
    companion.topRightCorner(m, m) = m2;
    companion.bottomLeftCorner(m, m) = Eigen::MatrixXd::Identity(m, m);
    const double r = linalg::spectral_radius(companion);
    return {r < 1.0 - tol, r};
}

struct SimulateOptions {
    /// Frames discarded before the returned path. Default: 200 for stationary
    /// models, 0 when the model has a unit (or explosive) root.
    std::optional<std::size_t> burn_in;
    double stationarity_tol = 1e-8;
};

/// Runs X_n = rho1(X_{n-1}) [+ rho2(X_{n-2})] + eps_n from X_0 (= X_{-1}) = initial.
inline SamplePath simulate(const FARModel& model, std::size_t length, const std::optional<GridFunction>& initial = std::nullopt,
                           const SimulateOptions& options = {}) {
    if (length == 0) throw InvalidArgument("simulate: length must be >= 1");
    const auto& domain = model.domain();
    if (initial) require_same_domain(domain, initial->domain(), "simulate");
    const std::size_t burn_in =
        options.burn_in.value_or(is_stationary(model, options.stationarity_tol).stationary ? 200 : 0);
    const std::size_t steps = burn_in + length;

    SplitMix64 rng(model.noise().seed());
    const Eigen::MatrixXd eps = detail::noise_columns(model.noise(), steps, rng);

    const auto basis1 = range_basis(model.rho1());
    const Eigen::MatrixXd f1 = detail::basis_matrix(basis1);
    Eigen::MatrixXd f2;
    if (model.rho2()) f2 = detail::basis_matrix(range_basis(*model.rho2()));

    const Eigen::VectorXd x0 = initial ? initial->values() : Eigen::VectorXd::Zero(static_cast<Eigen::Index>(domain->size()));
    Eigen::VectorXd prev = x0, prev2 = x0;
    std::vector<GridFunction> frames, innov;
    frames.reserve(length);
    innov.reserve(length);
    for (std::size_t n = 1; n <= steps; ++n) {
        Eigen::VectorXd next = f1 * coordinates(model.rho1(), GridFunction(domain, prev));
        if (model.rho2()) next += f2 * coordinates(*model.rho2(), GridFunction(domain, prev2));
        next += eps.col(static_cast<Eigen::Index>(n - 1));
        if (!next.allFinite())
            throw DivergenceError(n, "simulate: path diverged to non-finite values at step " + std::to_string(n));
        if (n > burn_in) {
            frames.emplace_back(domain, next);
            innov.emplace_back(domain, eps.col(static_cast<Eigen::Index>(n - 1)));
        }
        prev2 = std::move(prev);
        prev = std::move(next);
    }
    return {FunctionSeries(std::move(frames)), FunctionSeries(std::move(innov)), model, burn_in, SplitMix64::algorithm};
}

/// sum_{j=0}^{J-1} rho^j(eps_{n-j}) with n the last noise frame.
inline GridFunction ma_truncation(const FARModel& model, const FunctionSeries& noise_frames, std::size_t terms) {
    if (model.order() != 1) throw InvalidArgument("ma_truncation: only defined for order-1 models");
    if (terms == 0 || terms > noise_frames.length())
        throw InvalidArgument("ma_truncation: need 1 <= J <= number of noise frames");
    require_same_domain(model.domain(), noise_frames.domain(), "ma_truncation");
    const std::size_t n = noise_frames.length() - 1;
    GridFunction sum = GridFunction::zero(model.domain());
    for (std::size_t j = 0; j < terms; ++j) {
        GridFunction term = noise_frames[n - j];
        for (std::size_t p = 0; p < j; ++p) term = funroot::apply(model.rho1(), term);
        sum = sum + term;
    }
    return sum;
}

}  // namespace funroot
