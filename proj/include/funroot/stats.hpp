#pragma once

// Empirical unit-root detection for functional time series: FPCA scores,
// augmented Dickey-Fuller and Johansen trace tests.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>

#include "funroot/error.hpp"
#include "funroot/funcspace.hpp"

namespace funroot {

enum class Level { one_percent, five_percent, ten_percent };
inline constexpr std::array<Level, 3> all_levels{Level::one_percent, Level::five_percent, Level::ten_percent};

inline const char* to_string(Level l) {
    switch (l) {
        case Level::one_percent: return "1%";
        case Level::five_percent: return "5%";
        case Level::ten_percent: return "10%";
    }
    return "?";
}

inline Level parse_level(const std::string& s) {
    if (s == "1%" || s == "1" || s == "0.01") return Level::one_percent;
    if (s == "5%" || s == "5" || s == "0.05") return Level::five_percent;
    if (s == "10%" || s == "10" || s == "0.1" || s == "0.10") return Level::ten_percent;
    throw InvalidArgument("unknown significance level '" + s + "' (expected 1%, 5% or 10%)");
}

inline std::size_t level_index(Level l) { return static_cast<std::size_t>(l); }

// ---------------------------------------------------------------------------
// Functional PCA

struct FPCAResult {
    GridFunction mean;
    std::vector<GridFunction> eigenfunctions;  ///< top k, orthonormal
    std::vector<double> eigenvalues;           ///< top k, nonincreasing
    std::vector<double> all_eigenvalues;       ///< full spectrum of the covariance operator
    Eigen::MatrixXd scores;                    ///< time x k, <X_n - mean, phi_k>
};

/// Eigen-decomposition of the sample covariance operator (divisor T - 1) using
/// the symmetric form W^{1/2} C W^{1/2}; eigenfunctions are orthonormal in the
/// quadrature inner product and signed so their largest-magnitude value is positive.
inline FPCAResult fpca(const FunctionSeries& x, std::size_t k) {
    const std::size_t grid = x.domain()->size();
    if (k == 0 || k > grid) throw InvalidArgument("fpca: need 1 <= k <= grid size");
    if (x.length() < k + 1) throw InvalidArgument("fpca: series length must be >= k + 1");

    auto [centered, mean] = center_series(x);
    const Eigen::MatrixXd xc = centered.as_matrix();
    const Eigen::VectorXd sw = x.domain()->weight_vector().cwiseSqrt();
    const Eigen::MatrixXd xs = xc * sw.asDiagonal();
    const Eigen::MatrixXd m = (xs.transpose() * xs) / static_cast<double>(x.length() - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) throw NumericalError("fpca: covariance eigen-decomposition failed");
    const auto n = static_cast<Eigen::Index>(grid);

    FPCAResult out{std::move(mean), {}, {}, {}, {}};
    for (Eigen::Index i = n - 1; i >= 0; --i) out.all_eigenvalues.push_back(es.eigenvalues()(i));
    out.scores.resize(xc.rows(), static_cast<Eigen::Index>(k));
    const Eigen::VectorXd& w = x.domain()->weight_vector();
    for (std::size_t j = 0; j < k; ++j) {
        Eigen::VectorXd phi = es.eigenvectors().col(n - 1 - static_cast<Eigen::Index>(j)).cwiseQuotient(sw);
        Eigen::Index arg = 0;
        phi.cwiseAbs().maxCoeff(&arg);
        if (phi(arg) < 0.0) phi = -phi;
        out.scores.col(static_cast<Eigen::Index>(j)) = xc * w.cwiseProduct(phi);
        out.eigenvalues.push_back(out.all_eigenvalues[j]);
        out.eigenfunctions.emplace_back(x.domain(), std::move(phi));
    }
    return out;
}

/// <X_n, v> for every frame.
inline Eigen::VectorXd score_series(const FunctionSeries& x, const GridFunction& v) {
    require_same_domain(x.domain(), v.domain(), "score_series");
    Eigen::VectorXd out(static_cast<Eigen::Index>(x.length()));
    for (std::size_t n = 0; n < x.length(); ++n) out(static_cast<Eigen::Index>(n)) = inner_product(x[n], v);
    return out;
}

// ---------------------------------------------------------------------------
// Augmented Dickey-Fuller

enum class AdfSpec { none, constant, trend };

inline const char* to_string(AdfSpec s) {
    switch (s) {
        case AdfSpec::none: return "none";
        case AdfSpec::constant: return "constant";
        case AdfSpec::trend: return "trend";
    }
    return "?";
}

inline AdfSpec parse_adf_spec(const std::string& s) {
    if (s == "none" || s == "n") return AdfSpec::none;
    if (s == "constant" || s == "c") return AdfSpec::constant;
    if (s == "trend" || s == "ct") return AdfSpec::trend;
    throw InvalidArgument("unknown ADF specification '" + s + "' (expected none, constant or trend)");
}

/// Asymptotic Dickey-Fuller critical values, ordered 1%, 5%, 10%. The
/// no-deterministic row is the rounded table also used for short samples.
inline std::array<double, 3> adf_critical_values(AdfSpec spec) {
    switch (spec) {
        case AdfSpec::none: return {-2.6, -1.95, -1.61};
        case AdfSpec::constant: return {-3.43, -2.86, -2.57};
        case AdfSpec::trend: return {-3.96, -3.41, -3.12};
    }
    return {};
}

struct ADFResult {
    double tau = 0.0;          ///< t-ratio on the lagged level
    double coefficient = 0.0;  ///< estimated coefficient on y_{t-1}
    double std_error = 0.0;
    std::size_t lags = 0;
    std::size_t nobs = 0;
    AdfSpec spec = AdfSpec::none;
    std::array<double, 3> critical_values{};  ///< indexed by level_index
    std::array<bool, 3> reject_at{};

    double critical_value(Level l) const { return critical_values[level_index(l)]; }
    bool rejects(Level l) const { return reject_at[level_index(l)]; }
};

namespace detail {

/// Regression of dy_t on [deterministics, y_{t-1}, dy_{t-1..t-p}]; the returned
/// column index locates y_{t-1}.
inline std::pair<Eigen::MatrixXd, Eigen::VectorXd> adf_design(std::span<const double> y, std::size_t lags, AdfSpec spec,
                                                              Eigen::Index& level_col) {
    const std::size_t t_len = y.size();
    const std::size_t nobs = t_len - 1 - lags;
    const Eigen::Index det = spec == AdfSpec::none ? 0 : (spec == AdfSpec::constant ? 1 : 2);
    const Eigen::Index cols = det + 1 + static_cast<Eigen::Index>(lags);
    Eigen::MatrixXd x(static_cast<Eigen::Index>(nobs), cols);
    Eigen::VectorXd dy(static_cast<Eigen::Index>(nobs));
    level_col = det;
    for (std::size_t r = 0; r < nobs; ++r) {
        const std::size_t t = r + lags + 1;  // dy_t = y_t - y_{t-1}
        const auto row = static_cast<Eigen::Index>(r);
        dy(row) = y[t] - y[t - 1];
        if (det >= 1) x(row, 0) = 1.0;
        if (det == 2) x(row, 1) = static_cast<double>(t);
        x(row, det) = y[t - 1];
        for (std::size_t i = 1; i <= lags; ++i) x(row, det + static_cast<Eigen::Index>(i)) = y[t - i] - y[t - i - 1];
    }
    return {std::move(x), std::move(dy)};
}

}  // namespace detail

inline ADFResult adf_test(std::span<const double> y, std::size_t lags = 0, AdfSpec spec = AdfSpec::none) {
    if (y.size() < lags + 10) throw InvalidArgument("adf_test: series length must be >= lags + 10");
    for (double v : y)
        if (!std::isfinite(v)) throw DataError("adf_test: series has non-finite values");

    Eigen::Index level_col = 0;
    const auto [x, dy] = detail::adf_design(y, lags, spec, level_col);
    const Eigen::Index nobs = x.rows(), cols = x.cols();
    if (nobs <= cols) throw InvalidArgument("adf_test: not enough observations for the regression");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-12);
    if (qr.rank() < cols) throw SingularDesign("adf_test: regressors are perfectly collinear");
    const Eigen::VectorXd beta = qr.solve(dy);
    const Eigen::VectorXd resid = dy - x * beta;
    const double s2 = resid.squaredNorm() / static_cast<double>(nobs - cols);

    // (X^T X)^{-1} = P R^{-1} R^{-T} P^T; the diagonal entry for y_{t-1}.
    const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(cols, cols).triangularView<Eigen::Upper>();
    Eigen::VectorXd e = Eigen::VectorXd::Zero(cols);
    Eigen::Index permuted = 0;
    for (Eigen::Index i = 0; i < cols; ++i)
        if (qr.colsPermutation().indices()(i) == level_col) permuted = i;
    e(permuted) = 1.0;
    const Eigen::VectorXd z = r.transpose().triangularView<Eigen::Lower>().solve(e);
    const double var = s2 * z.squaredNorm();

    ADFResult out;
    out.coefficient = beta(level_col);
    out.std_error = std::sqrt(var);
    if (!(out.std_error > 0.0)) throw SingularDesign("adf_test: zero residual variance");
    out.tau = out.coefficient / out.std_error;
    out.lags = lags;
    out.nobs = static_cast<std::size_t>(nobs);
    out.spec = spec;
    out.critical_values = adf_critical_values(spec);
    for (std::size_t i = 0; i < 3; ++i) out.reject_at[i] = out.tau < out.critical_values[i];
    return out;
}

inline ADFResult adf_test(const Eigen::VectorXd& y, std::size_t lags = 0, AdfSpec spec = AdfSpec::none) {
    return adf_test(std::span<const double>(y.data(), static_cast<std::size_t>(y.size())), lags, spec);
}

// ---------------------------------------------------------------------------
// Ljung-Box portmanteau test

struct LjungBoxResult {
    double statistic;
    double p_value;
    std::size_t lags;
};

inline LjungBoxResult ljung_box(std::span<const double> x, std::size_t lags) {
    const std::size_t n = x.size();
    if (lags == 0 || n <= lags + 1) throw InvalidArgument("ljung_box: need 1 <= lags < length - 1");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double c0 = 0.0;
    for (double v : x) c0 += (v - mean) * (v - mean);
    if (!(c0 > 0.0)) throw DataError("ljung_box: constant series");
    double q = 0.0;
    for (std::size_t k = 1; k <= lags; ++k) {
        double ck = 0.0;
        for (std::size_t t = k; t < n; ++t) ck += (x[t] - mean) * (x[t - k] - mean);
        const double rho = ck / c0;
        q += rho * rho / static_cast<double>(n - k);
    }
    q *= static_cast<double>(n) * static_cast<double>(n + 2);
    const boost::math::chi_squared dist(static_cast<double>(lags));
    return {q, boost::math::cdf(boost::math::complement(dist, q)), lags};
}

inline LjungBoxResult ljung_box(const Eigen::VectorXd& x, std::size_t lags) {
    return ljung_box(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())), lags);
}

// ---------------------------------------------------------------------------
// Johansen trace test

enum class JohansenDet { none, constant };

inline const char* to_string(JohansenDet d) { return d == JohansenDet::none ? "none" : "constant"; }

inline JohansenDet parse_johansen_det(const std::string& s) {
    if (s == "none") return JohansenDet::none;
    if (s == "constant") return JohansenDet::constant;
    throw InvalidArgument("unknown Johansen deterministic term '" + s + "' (expected none or constant)");
}

/// Asymptotic trace critical values for p - r = 1..5, ordered 1%, 5%, 10%
/// (MacKinnon, Haug & Michelis simulations).
inline std::array<double, 3> johansen_critical_values(JohansenDet det, std::size_t p_minus_r) {
    static constexpr double none[5][3] = {{6.9406, 4.1296, 2.9762},
                                          {16.3640, 12.3212, 10.4741},
                                          {29.5147, 24.2761, 21.7781},
                                          {46.5716, 40.1749, 37.0339},
                                          {67.6367, 60.0627, 56.2839}};
    static constexpr double constant[5][3] = {{6.6349, 3.8415, 2.7055},
                                              {19.9349, 15.4943, 13.4294},
                                              {35.4628, 29.7961, 27.0669},
                                              {54.6815, 47.8545, 44.4929},
                                              {77.8202, 69.8189, 65.8202}};
    if (p_minus_r < 1 || p_minus_r > 5) throw InvalidArgument("johansen: critical values tabulated for p - r in 1..5");
    const auto& row = det == JohansenDet::none ? none[p_minus_r - 1] : constant[p_minus_r - 1];
    return {row[0], row[1], row[2]};
}

struct JohansenResult {
    std::vector<double> eigenvalues;               ///< squared canonical correlations, descending
    std::vector<double> trace_stats;               ///< indexed by hypothesized rank r = 0..p-1
    std::vector<std::array<double, 3>> critical_values;  ///< [r][level_index]
    std::size_t lags = 1;
    std::size_t nobs = 0;
    JohansenDet det = JohansenDet::none;

    /// Smallest r whose trace statistic is below its critical value, else p.
    std::size_t selected_rank(Level level) const {
        for (std::size_t r = 0; r < trace_stats.size(); ++r)
            if (trace_stats[r] < critical_values[r][level_index(level)]) return r;
        return trace_stats.size();
    }
};

namespace detail {

inline Eigen::MatrixXd residualize(const Eigen::MatrixXd& y, const Eigen::MatrixXd& z) {
    if (z.cols() == 0) return y;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(z);
    return y - z * qr.solve(y);
}

inline void require_nonsingular(const Eigen::MatrixXd& s, const char* what) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
    const double hi = es.eigenvalues().maxCoeff(), lo = es.eigenvalues().minCoeff();
    if (!(hi > 0.0) || lo <= 1e-12 * hi) throw SingularDesign(std::string("johansen: singular ") + what + " residual covariance");
}

}  // namespace detail

/// Trace test on the VECM  dy_t = Pi y_{t-1} + sum_{i<lags} G_i dy_{t-i} [+ c] + e_t,
/// where `lags` is the VAR order in levels.
inline JohansenResult johansen_trace(const Eigen::MatrixXd& y, std::size_t lags = 1, JohansenDet det = JohansenDet::none) {
    const auto p = static_cast<std::size_t>(y.cols());
    if (p < 2 || p > 5) throw InvalidArgument("johansen: need between 2 and 5 series");
    if (lags < 1) throw InvalidArgument("johansen: lags must be >= 1");
    if (static_cast<std::size_t>(y.rows()) < 20 + p * lags) throw InvalidArgument("johansen: series too short for the lag order");
    if (!y.allFinite()) throw DataError("johansen: non-finite values");

    const Eigen::Index t_len = y.rows(), k = static_cast<Eigen::Index>(lags), pp = y.cols();
    const Eigen::Index nobs = t_len - k;
    const Eigen::MatrixXd dy = y.bottomRows(t_len - 1) - y.topRows(t_len - 1);  // row t-1 holds dy_t

    Eigen::MatrixXd z0(nobs, pp), z1(nobs, pp);
    Eigen::MatrixXd z2(nobs, (k - 1) * pp + (det == JohansenDet::constant ? 1 : 0));
    for (Eigen::Index r = 0; r < nobs; ++r) {
        const Eigen::Index t = r + k;
        z0.row(r) = dy.row(t - 1);
        z1.row(r) = y.row(t - 1);
        for (Eigen::Index i = 1; i < k; ++i) z2.block(r, (i - 1) * pp, 1, pp) = dy.row(t - 1 - i);
        if (det == JohansenDet::constant) z2(r, z2.cols() - 1) = 1.0;
    }
    const Eigen::MatrixXd r0 = detail::residualize(z0, z2);
    const Eigen::MatrixXd r1 = detail::residualize(z1, z2);
    const double tn = static_cast<double>(nobs);
    const Eigen::MatrixXd s00 = r0.transpose() * r0 / tn;
    const Eigen::MatrixXd s11 = r1.transpose() * r1 / tn;
    const Eigen::MatrixXd s01 = r0.transpose() * r1 / tn;
    detail::require_nonsingular(s00, "difference");
    detail::require_nonsingular(s11, "level");

    // Eigenvalues of S11^{-1} S10 S00^{-1} S01 via the symmetric form L^{-1} S10 S00^{-1} S01 L^{-T}.
    const Eigen::LLT<Eigen::MatrixXd> l11(s11);
    const Eigen::MatrixXd mid = s01.transpose() * s00.ldlt().solve(s01);
    const Eigen::MatrixXd linv_mid = l11.matrixL().solve(mid);
    const Eigen::MatrixXd sym = l11.matrixL().solve(linv_mid.transpose()).transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (sym + sym.transpose()), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("johansen: eigenvalue problem failed");

    JohansenResult out;
    out.lags = lags;
    out.nobs = static_cast<std::size_t>(nobs);
    out.det = det;
    for (Eigen::Index i = pp - 1; i >= 0; --i) out.eigenvalues.push_back(std::clamp(es.eigenvalues()(i), 0.0, 1.0 - 1e-15));
    for (std::size_t r = 0; r < p; ++r) {
        double s = 0.0;
        for (std::size_t i = r; i < p; ++i) s += std::log1p(-out.eigenvalues[i]);
        out.trace_stats.push_back(-tn * s);
        out.critical_values.push_back(johansen_critical_values(det, p - r));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Detection pipeline: FPCA -> ADF per score -> Johansen on the non-rejecting scores

struct DetectOptions {
    /// Level of the per-component ADF decisions. At 5% the second component of
    /// a two-trend plane is rejected too often (it is the minimum-variance
    /// direction inside the plane and looks mean-reverting).
    Level level = Level::one_percent;
    /// FPCA scores are mean-centered, so the constant regression matches their null distribution.
    AdfSpec adf_spec = AdfSpec::constant;
    std::size_t adf_lags = 0;
    std::size_t johansen_lags = 1;
    JohansenDet johansen_det = JohansenDet::none;
    /// Level used for the Johansen rank decision.
    Level johansen_level = Level::one_percent;
};

struct ComponentTest {
    std::size_t index;
    double eigenvalue;
    ADFResult adf;
};

struct DetectionReport {
    FPCAResult fpca;
    std::vector<ComponentTest> components;
    std::size_t trend_dim = 0;
    std::vector<std::size_t> trend_components;
    std::optional<JohansenResult> johansen;
    std::optional<std::size_t> johansen_rank;
    DetectOptions options;
};

inline DetectionReport detect_unit_roots(const FunctionSeries& x, std::size_t k, const DetectOptions& options = {}) {
    DetectionReport rep{fpca(x, k), {}, 0, {}, std::nullopt, std::nullopt, options};
    for (std::size_t j = 0; j < k; ++j) {
        const Eigen::VectorXd s = rep.fpca.scores.col(static_cast<Eigen::Index>(j));
        auto adf = adf_test(s, options.adf_lags, options.adf_spec);
        if (!adf.rejects(options.level)) rep.trend_components.push_back(j);
        rep.components.push_back({j, rep.fpca.eigenvalues[j], std::move(adf)});
    }
    rep.trend_dim = rep.trend_components.size();
    if (rep.trend_dim >= 2 && rep.trend_dim <= 5) {
        Eigen::MatrixXd ys(rep.fpca.scores.rows(), static_cast<Eigen::Index>(rep.trend_dim));
        for (std::size_t i = 0; i < rep.trend_dim; ++i)
            ys.col(static_cast<Eigen::Index>(i)) = rep.fpca.scores.col(static_cast<Eigen::Index>(rep.trend_components[i]));
        rep.johansen = johansen_trace(ys, options.johansen_lags, options.johansen_det);
        rep.johansen_rank = rep.johansen->selected_rank(options.johansen_level);
    }
    return rep;
}

}  // namespace funroot
