#pragma once

// Small dense linear-algebra helpers shared by the operator and unit-root code.

#include <algorithm>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "funroot/error.hpp"

namespace funroot::linalg {

using cplx = std::complex<double>;

/// Descending modulus, then descending real part, then descending imaginary part.
inline void sort_spectrum(std::vector<cplx>& ev) {
    std::stable_sort(ev.begin(), ev.end(), [](const cplx& a, const cplx& b) {
        const double ma = std::abs(a), mb = std::abs(b);
        if (ma != mb) return ma > mb;
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
}

inline std::vector<cplx> eigenvalues(const Eigen::MatrixXd& a) {
    std::vector<cplx> out;
    if (a.rows() == 0) return out;
    if (!a.allFinite()) throw NumericalError("eigenvalues: matrix has non-finite entries");
    Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
    if (es.info() != Eigen::Success) throw NumericalError("eigenvalue solver did not converge");
    out.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    sort_spectrum(out);
    return out;
}

inline double spectral_radius(const Eigen::MatrixXd& a) {
    double r = 0.0;
    for (const auto& l : eigenvalues(a)) r = std::max(r, std::abs(l));
    return r;
}

inline double spectral_norm(const Eigen::MatrixXd& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    return svd.singularValues()(0);
}

/// Left and right singular vectors for the `count` smallest singular values
/// of m, together with those singular values (descending).
template <typename Matrix>
struct SmallSingular {
    Matrix left;
    Matrix right;
    Eigen::VectorXd values;
};

template <typename Matrix>
SmallSingular<Matrix> smallest_singular(const Matrix& m, Eigen::Index count) {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return {svd.matrixU().rightCols(count), svd.matrixV().rightCols(count), svd.singularValues().tail(count)};
}

/// Orthonormal basis (columns) of {x : |m x| <= threshold}, via SVD.
template <typename Matrix>
Matrix null_space(const Matrix& m, double threshold) {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > threshold) ++rank;
    return svd.matrixV().rightCols(m.cols() - rank);
}

}  // namespace funroot::linalg
