#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "funroot/operators.hpp"
#include "support/testing.hpp"

using namespace funroot;
using cd = std::complex<double>;

namespace {

const double two_pi = 2.0 * std::numbers::pi;

double max_abs_diff(const GridFunction& f, const GridFunction& g) { return (f.values() - g.values()).cwiseAbs().maxCoeff(); }

struct Fixture : ::testing::Test {
    DomainPtr d = GridDomain::uniform(101);
    GridFunction one = GridFunction::constant(d, 1.0);
    GridFunction sine = GridFunction::sample(d, [](double s) { return std::sqrt(2.0) * std::sin(two_pi * s); });
    std::mt19937_64 gen{42};
};

using Apply = Fixture;

TEST_F(Apply, Examples) {
    const OperatorSpec k = SeparableKernelOp({one}, {one});
    EXPECT_LE(max_abs_diff(apply(k, one), one), 1e-14);

    const OperatorSpec s = SpectralOp({0.5}, {sine});
    EXPECT_LE(max_abs_diff(apply(s, sine), 0.5 * sine), 1e-8);

    const OperatorSpec p = PointEvalExpOp(0.0, d);
    const auto v = GridFunction::sample(d, [](double t) { return 3.0 * t * t; });
    EXPECT_EQ(apply(p, v).values(), GridFunction::constant(d, 3.0).values());
}

TEST_F(Apply, DomainMismatch) {
    const OperatorSpec k = SeparableKernelOp({one}, {one});
    EXPECT_THROW(apply(k, GridFunction::constant(GridDomain::uniform(11), 1.0)), DomainMismatch);
    EXPECT_THROW(SeparableKernelOp({one}, {GridFunction::constant(GridDomain::uniform(11), 1.0)}), DomainMismatch);
}

TEST_F(Apply, ConstructorValidation) {
    EXPECT_THROW(SeparableKernelOp({one}, {}), InvalidArgument);
    EXPECT_THROW(SpectralOp({1.0, 0.5}, {one, one}), InvalidArgument);
    EXPECT_THROW(PointEvalExpOp(-0.1, d), InvalidArgument);
    EXPECT_THROW(PointEvalExpOp(0.5, GridDomain::trapezoid({0.0, 0.5, 0.9})), InvalidArgument);
}

TEST_F(Apply, MatchesReductionMatrix) {
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t r = 1 + static_cast<std::size_t>(trial % 6);
        std::vector<GridFunction> a, b;
        for (std::size_t i = 0; i < r; ++i) {
            a.push_back(testkit::random_function(d, gen));
            b.push_back(testkit::random_function(d, gen));
        }
        const OperatorSpec rho = SeparableKernelOp(a, b);
        const auto red = matrix_reduction(rho);
        Eigen::VectorXd v(static_cast<Eigen::Index>(r));
        std::normal_distribution<double> nd;
        for (auto& x : v) x = nd(gen);
        const auto f = linear_combination(v, red.range_basis);
        const Eigen::VectorXd c = coordinates(rho, f);
        EXPECT_LE((c - red.matrix * v).cwiseAbs().maxCoeff(), 1e-10 * std::max(1.0, c.cwiseAbs().maxCoeff()));
    }
}

using Adjoint = Fixture;

TEST_F(Adjoint, Examples) {
    const auto a1 = testkit::random_function(d, gen);
    const auto b1 = testkit::random_function(d, gen);
    const OperatorSpec k = SeparableKernelOp({a1}, {b1});
    EXPECT_LE(max_abs_diff(adjoint_apply(k, a1), inner_product(a1, a1) * b1), 1e-10);

    const auto fb = fourier_basis(d, 3);
    const OperatorSpec s = SpectralOp({0.9, -0.3, 0.2}, fb);
    const auto v = testkit::random_function(d, gen);
    EXPECT_LE(max_abs_diff(adjoint_apply(s, v), apply(s, v)), 1e-12);

    EXPECT_THROW(adjoint_apply(OperatorSpec(PointEvalExpOp(1.0, d)), v), UnsupportedAdjoint);
}

TEST_F(Adjoint, DefiningIdentity) {
    const auto fb = fourier_basis(d, 4);
    const OperatorSpec spectral = SpectralOp({1.0, 0.7, -0.4, 0.1}, fb);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<GridFunction> a, b;
        for (int i = 0; i < 3; ++i) {
            a.push_back(testkit::random_function(d, gen));
            b.push_back(testkit::random_function(d, gen));
        }
        const OperatorSpec sep = SeparableKernelOp(a, b);
        const auto u = testkit::random_function(d, gen);
        const auto v = testkit::random_function(d, gen);
        for (const auto* rho : {&sep, &spectral}) {
            const double lhs = inner_product(apply(*rho, u), v);
            const double rhs = inner_product(u, adjoint_apply(*rho, v));
            EXPECT_NEAR(lhs, rhs, 1e-10 * std::max(1.0, std::abs(lhs)));
        }
    }
}

using Reduction = Fixture;

TEST_F(Reduction, Examples) {
    const auto r1 = matrix_reduction(SeparableKernelOp({one}, {one}));
    ASSERT_EQ(r1.matrix.rows(), 1);
    EXPECT_NEAR(r1.matrix(0, 0), 1.0, 1e-15);
    EXPECT_EQ(r1.kind, ReductionKind::companion);

    const auto [e1, e2] = testkit::fibonacci_directions(d);
    const double alpha = 0.3;
    const auto r2 = matrix_reduction(testkit::fibonacci_operator(alpha, e1, e2));
    Eigen::Matrix2d expected;
    expected << alpha, alpha, alpha, 0.0;
    EXPECT_LE((r2.matrix - expected).cwiseAbs().maxCoeff(), 1e-12);

    const auto r3 = matrix_reduction(PointEvalExpOp(std::log(2.0), d));
    EXPECT_NEAR(r3.matrix(0, 0), 0.5, 1e-15);
    EXPECT_EQ(r3.kind, ReductionKind::scalar);
    EXPECT_EQ(r3.range_basis.size(), 1u);

    const auto r4 = matrix_reduction(SpectralOp({0.9, 0.5}, fourier_basis(d, 2)));
    EXPECT_EQ(r4.kind, ReductionKind::diagonal);
    EXPECT_EQ(r4.matrix(0, 1), 0.0);
    EXPECT_EQ(r4.matrix(1, 1), 0.5);
}

using Spectrum = Fixture;

TEST_F(Spectrum, Examples) {
    const auto [e1, e2] = testkit::fibonacci_directions(d);
    const double alpha = testkit::golden_alpha;
    const auto sp = spectrum(testkit::fibonacci_operator(alpha, e1, e2));
    const auto [hi, lo] = testkit::fibonacci_roots(alpha);
    ASSERT_EQ(sp.size(), 2u);
    EXPECT_NEAR(sp[0].real(), hi, 1e-9);
    EXPECT_NEAR(sp[1].real(), lo, 1e-9);
    EXPECT_NEAR(hi, 1.0, 1e-12);
    EXPECT_NEAR(lo, -(3.0 - std::sqrt(5.0)) / 2.0, 1e-12);

    const auto fb = fourier_basis(d, 3);
    const auto sd = spectrum(SpectralOp({0.9, 0.5, 0.1}, fb));
    EXPECT_EQ(sd, (std::vector<cd>{0.9, 0.5, 0.1}));

    EXPECT_EQ(spectrum(PointEvalExpOp(0.0, d)), std::vector<cd>{1.0});
}

TEST_F(Spectrum, SortedByModulusThenRealPart) {
    const auto fb = fourier_basis(d, 4);
    const auto sp = spectrum(SpectralOp({0.1, -0.5, 0.5, 0.2}, fb));
    EXPECT_EQ(sp, (std::vector<cd>{0.5, -0.5, 0.2, 0.1}));
}

TEST_F(Spectrum, ComplexPairsKept) {
    Eigen::Matrix2d rot;
    rot << 0.0, -0.5, 0.5, 0.0;
    const auto sp = spectrum(testkit::kernel_with_matrix(rot, d, gen));
    ASSERT_EQ(sp.size(), 2u);
    EXPECT_NEAR(std::abs(sp[0].imag()), 0.5, 1e-10);
    EXPECT_NEAR(sp[0].real(), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(sp[0] - std::conj(sp[1])), 0.0, 1e-10);
}

TEST_F(Spectrum, SpectralRadiusExamples) {
    const auto [e1, e2] = testkit::fibonacci_directions(d);
    EXPECT_NEAR(spectral_radius(testkit::fibonacci_operator(0.3, e1, e2)), 0.3 * (1.0 + std::sqrt(5.0)) / 2.0, 1e-9);
    EXPECT_NEAR(spectral_radius(testkit::fibonacci_operator(testkit::golden_alpha, e1, e2)), 1.0, 1e-9);
    EXPECT_EQ(spectral_radius(SpectralOp({-0.7, 0.2}, fourier_basis(d, 2))), 0.7);
}

TEST_F(Spectrum, InvariantUnderPairReordering) {
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<GridFunction> a, b;
        for (int i = 0; i < 5; ++i) {
            a.push_back(testkit::random_function(d, gen));
            b.push_back(testkit::random_function(d, gen));
        }
        std::vector<std::size_t> perm{0, 1, 2, 3, 4};
        std::shuffle(perm.begin(), perm.end(), gen);
        std::vector<GridFunction> pa, pb;
        for (auto i : perm) {
            pa.push_back(a[i]);
            pb.push_back(b[i]);
        }
        const auto s1 = spectrum(SeparableKernelOp(a, b));
        const auto s2 = spectrum(SeparableKernelOp(pa, pb));
        ASSERT_EQ(s1.size(), s2.size());
        // multiset match: every eigenvalue of s1 has a partner in s2
        std::vector<bool> used(s2.size(), false);
        for (const auto& l : s1) {
            std::size_t best = s2.size();
            double dist = 1e300;
            for (std::size_t j = 0; j < s2.size(); ++j)
                if (!used[j] && std::abs(l - s2[j]) < dist) {
                    dist = std::abs(l - s2[j]);
                    best = j;
                }
            used[best] = true;
            EXPECT_LE(dist, 1e-8 * std::max(1.0, std::abs(l)));
        }
    }
}

using Fredholm = Fixture;

TEST_F(Fredholm, Examples) {
    const auto [e1, e2] = testkit::fibonacci_directions(d);
    EXPECT_EQ(fredholm_determinant(testkit::fibonacci_operator(0.3, e1, e2), 0.0), cd(1.0));
    EXPECT_EQ(fredholm_determinant(SpectralOp({0.5}, {sine}), 2.0), cd(0.0));
}

TEST_F(Fredholm, MatchesDenseDeterminant) {
    std::uniform_real_distribution<double> ud(-2.0, 2.0);
    std::vector<GridFunction> a, b;
    for (int i = 0; i < 4; ++i) {
        a.push_back(testkit::random_function(d, gen));
        b.push_back(testkit::random_function(d, gen));
    }
    const OperatorSpec rho = SeparableKernelOp(a, b);
    const auto red = matrix_reduction(rho);
    for (int k = 0; k < 20; ++k) {
        const cd z(ud(gen), ud(gen));
        const cd ref = testkit::det_i_minus_za(red.matrix, z);
        EXPECT_LE(std::abs(fredholm_determinant(rho, z) - ref), 1e-10 * std::abs(ref));
    }
}

TEST_F(Fredholm, VanishesAtReciprocalEigenvalues) {
    const auto fb = fourier_basis(d, 3);
    const std::vector<OperatorSpec> ops{
        SpectralOp({0.9, -0.5, 0.25}, fb), PointEvalExpOp(0.5, d), testkit::fibonacci_operator(0.3, fb[0], fb[1])};
    for (const auto& rho : ops)
        for (const auto& l : spectrum(rho)) EXPECT_LE(std::abs(fredholm_determinant(rho, 1.0 / l)), 1e-8);
}

using Eigenspace = Fixture;

TEST_F(Eigenspace, Examples) {
    const auto [e1, e2] = testkit::fibonacci_directions(d);
    const OperatorSpec fib = testkit::fibonacci_operator(testkit::golden_alpha, e1, e2);
    const auto u = eigenspace(fib, 1.0);
    ASSERT_EQ(u.size(), 1u);
    const double s = inner_product(u[0], e1) < 0 ? -1.0 : 1.0;
    EXPECT_NEAR(s * inner_product(u[0], e1), 0.8506, 5e-4);
    EXPECT_NEAR(s * inner_product(u[0], e2), 0.5257, 5e-4);

    const auto fb = fourier_basis(d, 3);
    const OperatorSpec sp = SpectralOp({1.0, 1.0, 0.5}, fb);
    const auto two = eigenspace(sp, 1.0);
    ASSERT_EQ(two.size(), 2u);
    for (const auto& f : two) {
        // lies in span{phi1, phi2}
        const double in = std::hypot(inner_product(f, fb[0]), inner_product(f, fb[1]));
        EXPECT_NEAR(in, 1.0, 1e-10);
    }

    EXPECT_TRUE(eigenspace(fib, 0.99, 1e-6).empty());
    EXPECT_THROW(eigenspace(fib, 1.0, 0.0), InvalidArgument);
}

TEST_F(Eigenspace, SpectralEigenRelation) {
    const auto fb = fourier_basis(d, 5);
    const std::vector<double> lambdas{0.95, 0.6, -0.3, 0.6, 0.05};
    const OperatorSpec rho = SpectralOp(lambdas, fb);
    for (double l : lambdas)
        for (const auto& f : eigenspace(rho, l)) EXPECT_LE(norm(apply(rho, f) - l * f), 1e-8);
}

TEST_F(Eigenspace, ComplexPairGivesRealInvariantPlane) {
    Eigen::Matrix3d m;
    m << 0.0, -0.5, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.2;
    const OperatorSpec rho = testkit::kernel_with_matrix(m, d, gen);
    const auto sp = spectrum(rho);
    const auto plane = eigenspace(rho, sp[0]);
    ASSERT_EQ(plane.size(), 2u);
    // invariance: rho(f) stays in the plane
    for (const auto& f : plane) {
        const auto g = apply(rho, f);
        const auto proj = inner_product(g, plane[0]) * plane[0] + inner_product(g, plane[1]) * plane[1];
        EXPECT_LE(norm(g - proj), 1e-8);
    }
}

}  // namespace
