#include <doctest.h>

#include <cmath>
#include <random>

#include "dig/linode.hpp"
#include "support/ode_oracle.hpp"
#include "support/test_nets.hpp"

using namespace dig;

namespace {

double rel_diff(const Matrix& a, const Matrix& b) {
    return (a - b).norm() / std::max(b.norm(), 1e-300);
}

} // namespace

TEST_CASE("expm: zero matrix gives the identity") {
    const Matrix a = Matrix::Zero(2, 2);
    CHECK(rel_diff(expm(a, 5.0), Matrix::Identity(2, 2)) < 1e-15);
}

TEST_CASE("expm: diagonal case") {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = 1.0;
    a(1, 1) = -2.0;
    const Matrix e = expm(a, 1.0);
    CHECK(e(0, 0) == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
    CHECK(e(1, 1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    CHECK(std::abs(e(0, 1)) < 1e-15);
    CHECK(std::abs(e(1, 0)) < 1e-15);
}

TEST_CASE("expm: matches the brute-force integrator on the two-site system") {
    // dx1/dt = (s-m) x1, dx2/dt = m x1 + x2 with s=-2, m=1
    Matrix a(2, 2);
    a << -3.0, 0.0, 1.0, 1.0;
    const Matrix e = expm(a, 1.0);
    for (int j = 0; j < 2; ++j) {
        const Vector col = oracle::integrate_linear(a, Vector::Unit(2, j), 1.0, 1e-13);
        CHECK((e.col(j) - col).norm() < 1e-9 * std::max(1.0, col.norm()));
    }
}

TEST_CASE("expm: semigroup property on random Metzler matrices") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> td(0.0, 5.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + trial % 5;
        const Matrix a = testnets::random_metzler(rng, n);
        const double t1 = td(rng), t2 = td(rng);
        CHECK(rel_diff(expm(a, t1) * expm(a, t2), expm(a, t1 + t2)) < 1e-9);
    }
}

TEST_CASE("expm: positivity and non-vanishing on random Metzler systems") {
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> td(0.0, 10.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + trial % 5;
        const Matrix a = testnets::random_metzler(rng, n);
        const Vector x0 = testnets::random_nonneg(rng, n);
        const Vector x = expm(a, td(rng)) * x0;
        CHECK(x.minCoeff() >= -1e-12);
        if (x0.norm() > 0.0) CHECK(x.norm() > 0.0);
    }
}

TEST_CASE("expm: comparison of Metzler flows") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> td(0.0, 4.0), bump(0.0, 0.5), coin(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + trial % 4;
        const Matrix m = testnets::random_metzler(rng, n);
        Matrix nmat = m;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (coin(rng) < 0.5) nmat(i, j) += bump(rng);
        const Vector x0 = testnets::random_nonneg(rng, n);
        const Vector y0 = x0 + testnets::random_nonneg(rng, n);
        const double t = td(rng);
        const Vector x = expm(m, t) * x0;
        const Vector y = expm(nmat, t) * y0;
        CHECK((x - y).maxCoeff() <= 1e-10);
    }
}

TEST_CASE("expm: accurate at the norm-100 scale") {
    // symmetric 2x2 with known spectrum: [[a,b],[b,a]] has eigenvalues
    // a +- b with eigenvectors (1,1) and (1,-1)
    for (const double a : {-50.0, 50.0}) {
        Matrix mat(2, 2);
        mat << a, 2.0, 2.0, a;
        const Matrix e = expm(mat, 1.0);
        const double plus = std::exp(a + 2.0), minus = std::exp(a - 2.0);
        Matrix want(2, 2);
        want << 0.5 * (plus + minus), 0.5 * (plus - minus), 0.5 * (plus - minus),
            0.5 * (plus + minus);
        CHECK(rel_diff(e, want) < 1e-12);
    }
}

TEST_CASE("expm: rejects non-finite input") {
    Matrix a(1, 1);
    a(0, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(expm(a, 1.0), ValidationError);
    a(0, 0) = 1.0;
    CHECK_THROWS_AS(expm(a, std::numeric_limits<double>::quiet_NaN()), ValidationError);
}

TEST_CASE("propagate: empty schedule is the identity") {
    Vector x0(2);
    x0 << 1.0, 1.0;
    CHECK(propagate(std::vector<Segment>{}, x0) == x0);
}

TEST_CASE("propagate: decoupled single segment") {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = 1.0;
    a(1, 1) = -1.0;
    Vector x0(2);
    x0 << 1.0, 1.0;
    const Vector x = propagate({{2.0, a}}, x0);
    CHECK(x(0) == doctest::Approx(std::exp(2.0)).epsilon(1e-13));
    CHECK(x(1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-13));
}

TEST_CASE("propagate: birds winter segment matches the integrator") {
    Matrix a(2, 2);
    a << -3.0, 0.0, 1.0, 1.0; // s=-2, m=1, r=1
    Vector x0(2);
    x0 << 1.0, 0.0;
    const Vector got = propagate({{5.0, a}}, x0);
    const Vector want = oracle::integrate_linear(a, x0, 5.0, 1e-12);
    CHECK((got - want).norm() <= 1e-8 * want.norm());
}

TEST_CASE("propagate: random switched systems agree with the integrator") {
    std::mt19937 rng(14);
    std::uniform_real_distribution<double> dur(0.0, 2.0);
    std::uniform_int_distribution<int> segs(1, 4), nd(1, 5);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = nd(rng);
        std::vector<Segment> schedule;
        for (int s = segs(rng); s > 0; --s)
            schedule.push_back({dur(rng), testnets::random_metzler(rng, n)});
        const Vector x0 = testnets::random_nonneg(rng, n);
        const Vector got = propagate(schedule, x0);
        const Vector want = oracle::integrate_schedule(schedule, x0, 1e-11);
        CHECK((got - want).norm() <= 1e-7 * std::max(want.norm(), 1e-30));
    }
}

TEST_CASE("propagate: validation errors") {
    Matrix a = Matrix::Zero(2, 2);
    Vector x0 = Vector::Ones(3);
    CHECK_THROWS_AS(propagate({{1.0, a}}, x0), ValidationError);
    Vector x2 = Vector::Ones(2);
    CHECK_THROWS_AS(propagate({{-1.0, a}}, x2), ValidationError);
    Matrix bad = a;
    bad(0, 1) = -0.5;
    CHECK_THROWS_AS(propagate({{1.0, bad}}, x2), ValidationError);
    Vector neg(2);
    neg << 1.0, -1.0;
    CHECK_THROWS_AS(propagate({{1.0, a}}, neg), ValidationError);
}

TEST_CASE("spectral_radius: identity") {
    const SpectralResult r = spectral_radius(Matrix::Identity(3, 3));
    CHECK(r.rho == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("spectral_radius: symmetric 2x2 with known eigenvalues") {
    Matrix m(2, 2);
    m << 2.0, 1.0, 1.0, 2.0;
    const SpectralResult r = spectral_radius(m);
    CHECK(r.rho == doctest::Approx(3.0).epsilon(1e-10));
    // witness should be the Perron vector (1,1)/sqrt(2)
    CHECK(r.witness(0) == doctest::Approx(r.witness(1)).epsilon(1e-8));
    CHECK((m * r.witness - r.rho * r.witness).norm() < 1e-8);
}

TEST_CASE("spectral_radius: birds monodromy approximation at large m") {
    // M = e^{5 A2} e^{5 A1}, s=-2, m=10, T=10; rho ~= m^2 e^T/(1+m-s)^2
    const double s = -2.0, m = 10.0, T = 10.0;
    Matrix a1(2, 2), a2(2, 2);
    a1 << s - m, 0.0, m, 1.0;
    a2 << 1.0, m, 0.0, s - m;
    const Matrix mono = expm(a2, T / 2) * expm(a1, T / 2);
    const SpectralResult r = spectral_radius(mono.cwiseMax(0.0));
    const double approx = m * m * std::exp(T) / ((1.0 + m - s) * (1.0 + m - s));
    CHECK(std::abs(r.rho / approx - 1.0) < 0.01);
}

TEST_CASE("spectral_radius: rejects negative entries") {
    Matrix m(2, 2);
    m << 1.0, -0.1, 0.0, 1.0;
    CHECK_THROWS_AS(spectral_radius(m), ValidationError);
}

TEST_CASE("spectral_radius: defective dominant eigenvalue fails with an estimate") {
    Matrix m(2, 2);
    m << 1.0, 1.0, 0.0, 1.0;
    try {
        spectral_radius(m);
        FAIL("expected NumericFailure");
    } catch (const NumericFailure& e) {
        CHECK(e.last_estimate() == doctest::Approx(1.0).epsilon(0.01));
    }
}

TEST_CASE("spectral_radius: opt-in regularization resolves the defective case") {
    Matrix m(2, 2);
    m << 1.0, 1.0, 0.0, 1.0;
    SpectralOptions opts;
    opts.regularization = 1e-6; // perturbs rho by O(sqrt(eps))
    const SpectralResult r = spectral_radius(m, opts);
    CHECK(r.rho == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("spectral_radius: complex subdominant pair converges fast") {
    // permutation-like matrix: eigenvalues 1, -1/2 +- ...; the shift must
    // separate the circle
    Matrix m(3, 3);
    m << 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0;
    const SpectralResult r = spectral_radius(m);
    CHECK(r.rho == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(r.iterations < 200);
}

TEST_CASE("scalar_linear_solution: constants and pure exponential") {
    const auto zero = [](double) { return 0.0; };
    CHECK(scalar_linear_solution(0.0, zero, 3.0, 7.0) == doctest::Approx(7.0).epsilon(1e-14));
    CHECK(scalar_linear_solution(1.0, zero, 1.0, 1.0) ==
          doctest::Approx(std::exp(1.0)).epsilon(1e-13));
}

TEST_CASE("scalar_linear_solution: forced case against hand integration") {
    // a=-1, b=e^s, x0=0, t=1 -> (e - 1/e)/2
    const double got = scalar_linear_solution(-1.0, [](double s) { return std::exp(s); }, 1.0, 0.0);
    const double want = 0.5 * (std::exp(1.0) - std::exp(-1.0));
    CHECK(got == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("scalar_linear_solution: stays relative at large magnitudes") {
    // a=-1, b=e^{2s}, t=50: e^{-50} integral_0^50 e^{3s} ds = (e^{100}-e^{-50})/3
    const double got =
        scalar_linear_solution(-1.0, [](double s) { return std::exp(2.0 * s); }, 50.0, 0.0);
    const double want = (std::exp(100.0) - std::exp(-50.0)) / 3.0;
    CHECK(got == doctest::Approx(want).epsilon(1e-10));
    // decaying window: a=3, b=e^{-5s}, t=40 -> e^{120} (1-e^{-320})/8
    const double got2 =
        scalar_linear_solution(3.0, [](double s) { return std::exp(-5.0 * s); }, 40.0, 0.0);
    const double want2 = std::exp(120.0) / 8.0;
    CHECK(got2 == doctest::Approx(want2).epsilon(1e-10));
}
