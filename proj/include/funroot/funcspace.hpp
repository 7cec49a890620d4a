#pragma once

// Discretized L2([0,1]): grids with trapezoid weights, functions sampled on
// them, and time-indexed collections of such functions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "funroot/error.hpp"

namespace funroot {

/// Quadrature grid on [0,1]. Immutable once built; shared by pointer.
class GridDomain {
public:
    /// Composite trapezoid weights on the given nodes.
    static std::shared_ptr<const GridDomain> trapezoid(std::vector<double> nodes) {
        const std::size_t n = nodes.size();
        if (n < 2) throw InvalidArgument("grid needs at least 2 nodes");
        std::vector<double> weights(n, 0.0);
        for (std::size_t k = 0; k + 1 < n; ++k) {
            const double h = nodes[k + 1] - nodes[k];
            weights[k] += 0.5 * h;
            weights[k + 1] += 0.5 * h;
        }
        return std::make_shared<const GridDomain>(std::move(nodes), std::move(weights));
    }

    /// Uniform trapezoid grid with n nodes spanning [0,1].
    static std::shared_ptr<const GridDomain> uniform(std::size_t n = 101) {
        if (n < 2) throw InvalidArgument("grid needs at least 2 nodes");
        std::vector<double> nodes(n);
        for (std::size_t k = 0; k < n; ++k) nodes[k] = static_cast<double>(k) / static_cast<double>(n - 1);
        nodes.back() = 1.0;
        return trapezoid(std::move(nodes));
    }

    GridDomain(std::vector<double> nodes, std::vector<double> weights)
        : nodes_(std::move(nodes)), weights_(std::move(weights)) {
        if (nodes_.size() < 2) throw InvalidArgument("grid needs at least 2 nodes");
        if (weights_.size() != nodes_.size()) throw InvalidArgument("grid weights and nodes differ in length");
        if (!(nodes_.front() >= 0.0) || !(nodes_.back() <= 1.0))
            throw InvalidArgument("grid nodes must lie in [0,1]");
        for (std::size_t k = 1; k < nodes_.size(); ++k)
            if (!(nodes_[k] > nodes_[k - 1])) throw InvalidArgument("grid nodes must be strictly increasing");
        for (double w : weights_)
            if (!(w > 0.0) || !std::isfinite(w)) throw InvalidArgument("quadrature weights must be positive");
    }

    const std::vector<double>& nodes() const noexcept { return nodes_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    std::size_t size() const noexcept { return nodes_.size(); }

    Eigen::Map<const Eigen::VectorXd> weight_vector() const {
        return {weights_.data(), static_cast<Eigen::Index>(weights_.size())};
    }
    Eigen::Map<const Eigen::VectorXd> node_vector() const {
        return {nodes_.data(), static_cast<Eigen::Index>(nodes_.size())};
    }

private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

using DomainPtr = std::shared_ptr<const GridDomain>;

/// Grids are compatible when they are the same object or have identical nodes.
inline bool same_domain(const DomainPtr& a, const DomainPtr& b) {
    return a == b || (a && b && a->nodes() == b->nodes());
}

inline void require_same_domain(const DomainPtr& a, const DomainPtr& b, const char* where) {
    if (!same_domain(a, b)) throw DomainMismatch(std::string(where) + ": functions live on incompatible grids");
}

/// A function on [0,1] represented by its values at the grid nodes.
class GridFunction {
public:
    GridFunction(DomainPtr domain, Eigen::VectorXd values) : domain_(std::move(domain)), values_(std::move(values)) {
        if (!domain_) throw InvalidArgument("grid function without a domain");
        if (static_cast<std::size_t>(values_.size()) != domain_->size())
            throw InvalidArgument("grid function length does not match its grid");
        if (!values_.allFinite()) throw DataError("grid function has non-finite values");
    }

    static GridFunction zero(DomainPtr domain) {
        const auto n = static_cast<Eigen::Index>(domain->size());
        return {std::move(domain), Eigen::VectorXd::Zero(n)};
    }

    static GridFunction constant(DomainPtr domain, double c) {
        const auto n = static_cast<Eigen::Index>(domain->size());
        return {std::move(domain), Eigen::VectorXd::Constant(n, c)};
    }

    /// Samples f at every node.
    template <typename F>
    static GridFunction sample(DomainPtr domain, F&& f) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(domain->size()));
        for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = f(domain->nodes()[static_cast<std::size_t>(k)]);
        return {std::move(domain), std::move(v)};
    }

    const DomainPtr& domain() const noexcept { return domain_; }
    const Eigen::VectorXd& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
    double operator[](std::size_t k) const { return values_[static_cast<Eigen::Index>(k)]; }
    /// Value at the last node (t = 1 on grids that reach the right end).
    double last() const { return values_[values_.size() - 1]; }

    GridFunction operator+(const GridFunction& o) const {
        require_same_domain(domain_, o.domain_, "add");
        return {domain_, values_ + o.values_};
    }
    GridFunction operator-(const GridFunction& o) const {
        require_same_domain(domain_, o.domain_, "subtract");
        return {domain_, values_ - o.values_};
    }
    GridFunction operator*(double c) const { return {domain_, values_ * c}; }
    friend GridFunction operator*(double c, const GridFunction& f) { return f * c; }

private:
    DomainPtr domain_;
    Eigen::VectorXd values_;
};

/// Sum_k w_k f_k g_k.
inline double inner_product(const GridFunction& f, const GridFunction& g) {
    require_same_domain(f.domain(), g.domain(), "inner_product");
    const auto w = f.domain()->weight_vector();
    return (w.array() * f.values().array() * g.values().array()).sum();
}

inline double norm(const GridFunction& f) { return std::sqrt(std::max(0.0, inner_product(f, f))); }

inline GridFunction linear_combination(std::span<const double> coeffs, std::span<const GridFunction> fs) {
    if (fs.empty() || coeffs.size() != fs.size())
        throw InvalidArgument("linear_combination: need equally many (>= 1) coefficients and functions");
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(fs.front().values().size());
    for (std::size_t i = 0; i < fs.size(); ++i) {
        require_same_domain(fs.front().domain(), fs[i].domain(), "linear_combination");
        acc += coeffs[i] * fs[i].values();
    }
    return {fs.front().domain(), std::move(acc)};
}

inline GridFunction linear_combination(const Eigen::VectorXd& coeffs, std::span<const GridFunction> fs) {
    return linear_combination(std::span<const double>(coeffs.data(), static_cast<std::size_t>(coeffs.size())), fs);
}

/// Modified Gram-Schmidt under the quadrature inner product, two passes.
/// Vectors whose remainder falls below `drop_tol` times their original norm
/// are discarded.
inline std::vector<GridFunction> orthonormalize(std::span<const GridFunction> fs, double drop_tol = 1e-10) {
    std::vector<GridFunction> out;
    for (const auto& f : fs) {
        const double original = norm(f);
        if (original == 0.0) continue;
        Eigen::VectorXd v = f.values();
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& q : out) {
                const GridFunction cur(f.domain(), v);
                v -= inner_product(q, cur) * q.values();
            }
        }
        const GridFunction rem(f.domain(), v);
        const double r = norm(rem);
        if (r <= drop_tol * original) continue;
        out.emplace_back(f.domain(), v / r);
    }
    return out;
}

/// Orthonormal trigonometric system 1, sqrt2 cos(2 pi s), sqrt2 sin(2 pi s),
/// sqrt2 cos(4 pi s), ... On uniform trapezoid grids the discrete inner
/// products are orthonormal to rounding while 2*frequency < intervals.
inline std::vector<GridFunction> fourier_basis(const DomainPtr& domain, std::size_t count) {
    std::vector<GridFunction> out;
    out.reserve(count);
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t i = 0; i < count; ++i) {
        if (i == 0) {
            out.push_back(GridFunction::constant(domain, 1.0));
            continue;
        }
        const double freq = static_cast<double>((i + 1) / 2);
        if (i % 2 == 1)
            out.push_back(GridFunction::sample(domain, [&](double s) { return std::sqrt(2.0) * std::cos(two_pi * freq * s); }));
        else
            out.push_back(GridFunction::sample(domain, [&](double s) { return std::sqrt(2.0) * std::sin(two_pi * freq * s); }));
    }
    return out;
}

/// Functions indexed by integer time, all on one grid.
class FunctionSeries {
public:
    explicit FunctionSeries(std::vector<GridFunction> frames) : frames_(std::move(frames)) {
        if (frames_.empty()) throw InvalidArgument("function series must have at least one frame");
        domain_ = frames_.front().domain();
        for (const auto& f : frames_) require_same_domain(domain_, f.domain(), "FunctionSeries");
    }

    const DomainPtr& domain() const noexcept { return domain_; }
    const std::vector<GridFunction>& frames() const noexcept { return frames_; }
    std::size_t length() const noexcept { return frames_.size(); }
    const GridFunction& operator[](std::size_t n) const { return frames_[n]; }
    auto begin() const { return frames_.begin(); }
    auto end() const { return frames_.end(); }

    /// Time x node matrix of values.
    Eigen::MatrixXd as_matrix() const {
        Eigen::MatrixXd m(static_cast<Eigen::Index>(frames_.size()), static_cast<Eigen::Index>(domain_->size()));
        for (std::size_t n = 0; n < frames_.size(); ++n) m.row(static_cast<Eigen::Index>(n)) = frames_[n].values().transpose();
        return m;
    }

    static FunctionSeries from_matrix(const DomainPtr& domain, const Eigen::MatrixXd& m) {
        std::vector<GridFunction> frames;
        frames.reserve(static_cast<std::size_t>(m.rows()));
        for (Eigen::Index n = 0; n < m.rows(); ++n) frames.emplace_back(domain, m.row(n).transpose());
        return FunctionSeries(std::move(frames));
    }

private:
    DomainPtr domain_;
    std::vector<GridFunction> frames_;
};

/// Returns (X - mean, mean) with the pointwise sample mean.
inline std::pair<FunctionSeries, GridFunction> center_series(const FunctionSeries& x) {
    if (x.length() < 2) throw InvalidArgument("center_series: need at least 2 frames");
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(x.domain()->size()));
    for (const auto& f : x) mean += f.values();
    mean /= static_cast<double>(x.length());
    std::vector<GridFunction> centered;
    centered.reserve(x.length());
    for (const auto& f : x) centered.emplace_back(x.domain(), f.values() - mean);
    return {FunctionSeries(std::move(centered)), GridFunction(x.domain(), std::move(mean))};
}

}  // namespace funroot
