#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mesocov/analysis.hpp"
#include "mesocov/spectral.hpp"

using namespace mesocov;

namespace {
constexpr double PI = 3.14159265358979323846;

HermitianMatrix real_matrix(const Eigen::MatrixXd& m) {
    HermitianMatrix H;
    H.beta = 1;
    H.re = m;
    return H;
}
} // namespace

TEST_CASE("eigendecomposition on matrices with known spectra") {
    EigenSample z = eigen_decompose(real_matrix(Eigen::MatrixXd::Zero(3, 3)));
    for (double l : z.eigenvalues) CHECK(l == 0.0);

    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = -1.0;
    EigenSample e = eigen_decompose(real_matrix(d));
    CHECK(e.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(e.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-14));

    Eigen::MatrixXd o = Eigen::MatrixXd::Zero(2, 2);
    o(0, 1) = o(1, 0) = 1.0;
    EigenSample f = eigen_decompose(real_matrix(o));
    CHECK(f.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(f.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("eigenvector residuals and trace identity on a random sample") {
    EnsembleSpec spec = EnsembleSpec::goe(50);
    RngStream r(314, 0);
    HermitianMatrix H = sample_wigner(spec, r);
    Eigen::MatrixXcd V;
    EigenSample e = eigen_decompose_with_vectors(H, V);
    double hnorm = H.re.norm();
    double sum = 0.0;
    for (int i = 0; i < 50; ++i) {
        Eigen::VectorXcd v = V.col(i);
        double res = (H.re * v.real() - e.eigenvalues[i] * v.real()).norm() +
                     (H.re * v.imag() - e.eigenvalues[i] * v.imag()).norm();
        CHECK(res <= 1e-10 * hnorm);
        CHECK(std::abs(v.norm() - 1.0) <= 1e-12);
        sum += e.eigenvalues[i];
    }
    CHECK(std::abs(sum - H.trace()) <= 1e-8 * 50);

    EnsembleSpec gue = EnsembleSpec::gue(30);
    RngStream r2(314, 1);
    HermitianMatrix G = sample_wigner(gue, r2);
    EigenSample eg = eigen_decompose(G);
    double sg = 0.0;
    for (double l : eg.eigenvalues) sg += l;
    CHECK(std::abs(sg - G.trace()) <= 1e-8 * 30);
}

TEST_CASE("empirical Stieltjes powers on hand-set spectra") {
    EigenSample two;
    two.eigenvalues = {0.0, 0.0};
    cdouble zi{0.0, 1.0};
    CHECK(std::abs(empirical_stieltjes_power(two, zi, 1) - cdouble{0.0, 1.0}) <
          1e-14);
    // (lambda - i)^{-2} = (-i)^{-2} = -1
    CHECK(std::abs(empirical_stieltjes_power(two, zi, 2) - cdouble{-1.0, 0.0}) <
          1e-14);

    EigenSample pm;
    pm.eigenvalues = {-1.0, 1.0};
    CHECK(std::abs(empirical_stieltjes_power(pm, cdouble{0.0, 2.0}, 1) -
                   cdouble{0.0, 0.4}) < 1e-14);

    // reflection: G(conj z) = conj G(z)
    cdouble z{0.3, 0.7};
    CHECK(std::abs(empirical_stieltjes_power(pm, std::conj(z), 1) -
                   std::conj(empirical_stieltjes_power(pm, z, 1))) < 1e-14);
}

TEST_CASE("semicircle Stieltjes transform") {
    // m(i) solves m^2 + i m + 1 = 0 with Im m > 0: m = i (sqrt(5)-1)/2
    cdouble mi = msc_stieltjes(cdouble{0.0, 1.0});
    CHECK(mi.real() == doctest::Approx(0.0));
    CHECK(mi.imag() == doctest::Approx(0.6180339887498949).epsilon(1e-12));

    // boundary values approach (-x + i kappa)/2 from the upper half plane
    for (double x : {-1.5, -0.3, 0.0, 0.8, 1.9}) {
        cdouble m = msc_stieltjes(cdouble{x, 1e-9});
        double kap = std::sqrt(4.0 - x * x);
        CHECK(std::abs(m - cdouble{-x / 2, kap / 2}) < 1e-4);
    }

    // self-consistency and |m| <= 1 over a grid
    RngStream r(11, 0);
    for (int i = 0; i < 500; ++i) {
        cdouble z{6.0 * (r.u01() - 0.5), 3.0 * r.u01() + 1e-3};
        cdouble m = msc_stieltjes(z);
        CHECK(std::abs(m * m + z * m + 1.0) <= 1e-12);
        CHECK(std::abs(m) <= 1.0 + 1e-12);
        CHECK(m.imag() > 0.0);
    }
}

TEST_CASE("square root branch") {
    CHECK(std::abs(sqrt_zsq_minus4(cdouble{0.0, 1.0}) -
                   cdouble{0.0, std::sqrt(5.0)}) < 1e-14);
    CHECK(std::abs(sqrt_zsq_minus4(cdouble{3.0, 0.0}) -
                   cdouble{std::sqrt(5.0), 0.0}) < 1e-14);
    // just above the cut the value is +i kappa on both sides of zero
    for (double x : {-1.0, 1.0}) {
        cdouble v = sqrt_zsq_minus4(cdouble{x, 1e-10});
        CHECK(std::abs(v - cdouble{0.0, std::sqrt(3.0)}) < 1e-4);
    }
}

TEST_CASE("semicircle density, CDF and quantiles") {
    Semicircle s0 = semicircle(0.0);
    CHECK(s0.rho == doctest::Approx(1.0 / PI).epsilon(1e-14));
    CHECK(s0.kappa == doctest::Approx(2.0).epsilon(1e-14));
    Semicircle s2 = semicircle(2.0);
    CHECK(s2.rho == 0.0);
    CHECK(s2.kappa == 0.0);
    Semicircle s1 = semicircle(1.0);
    CHECK(s1.rho == doctest::Approx(std::sqrt(3.0) / (2 * PI)).epsilon(1e-14));
    CHECK(s1.kappa == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));

    CHECK(semicircle_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(semicircle_cdf(2.0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(semicircle_cdf(-2.0) == doctest::Approx(0.0).epsilon(1e-13));

    CHECK(quantile(50, 100) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(quantile(100, 100) == doctest::Approx(2.0).epsilon(1e-9));
    for (int k : {1, 7, 31, 63, 99}) {
        double g = quantile(k, 100);
        CHECK(std::abs(semicircle_cdf(g) - k / 100.0) <= 1e-9);
    }
}

TEST_CASE("sine kernels") {
    SineKernel k0 = sine_kernel(0.0);
    CHECK(k0.s == doctest::Approx(1.0));
    CHECK(k0.Y1 == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(k0.Y2 == doctest::Approx(-1.0).epsilon(1e-14));

    SineKernel k1 = sine_kernel(1.0);
    CHECK(std::abs(k1.s) < 1e-14);
    CHECK(std::abs(k1.Y2) < 1e-14);

    SineKernel k50 = sine_kernel(50.0);
    double want = -1.0 / (PI * PI * 2500.0) + 1.5 / (std::pow(PI, 4) * 6.25e6);
    CHECK(k50.Y1_avg_asym == doctest::Approx(want).epsilon(1e-12));

    // Y2 is even in u; Y1 takes the separation magnitude (one-sided tail)
    CHECK(sine_kernel(-3.3).Y2 == doctest::Approx(sine_kernel(3.3).Y2));
    // pointwise, Y1 agrees with the averaged asymptote up to oscillatory
    // O(u^-3) terms
    CHECK(std::abs(sine_kernel(200.0).Y1 - sine_kernel(200.0).Y1_avg_asym) <
          10.0 / std::pow(PI * 200.0, 3));
}

TEST_CASE("averaged Green function tracks the semicircle transform") {
    EnsembleSpec spec = EnsembleSpec::goe(400);
    cdouble z{0.0, 0.05};
    cdouble acc = 0;
    const int n = 50;
    for (int i = 0; i < n; ++i) {
        RngStream r(2718, i);
        EigenSample e = eigen_decompose(sample_wigner(spec, r));
        acc += empirical_stieltjes_power(e, z, 1);
    }
    acc /= n;
    // local-law scale 1/(N eta) = 0.05; allow a generous constant
    CHECK(std::abs(acc - msc_stieltjes(z)) <= 5.0 / (400 * 0.05));
    CHECK(std::abs(acc - msc_stieltjes(z)) <= 0.02); // observed much tighter
}

TEST_CASE("linear statistic on hand-set spectra") {
    SpectralWindow w;
    w.E = 0.0;
    w.omega = 0.1;
    w.eta = 0.02;
    w.M = 1.0;
    auto f = [](double x) { return 1.0 / (1.0 + x * x); };

    EigenSample far;
    far.eigenvalues = {5.0, 7.0}; // far outside the window
    CHECK(std::abs(linear_statistic(far, w, f, +1)) < 1e-10);

    // a single eigenvalue at the window center gives f(0)/eta
    EigenSample one;
    one.eigenvalues = {w.E + w.omega / w.rho()};
    CHECK(linear_statistic(one, w, f, +1) ==
          doctest::Approx(1.0 / w.eta).epsilon(1e-12));
    // the sign flips which window is centered
    EigenSample neg;
    neg.eigenvalues = {w.E - w.omega / w.rho()};
    CHECK(linear_statistic(neg, w, f, -1) ==
          doctest::Approx(1.0 / w.eta).epsilon(1e-12));
}

TEST_CASE("linear statistic mean matches the density integral") {
    SpectralWindow w;
    w.E = 0.0;
    w.omega = 0.1;
    w.eta = 0.02;
    Bump f(1.0);
    const int N = 400, n = 100;
    double acc = 0.0;
    EnsembleSpec spec = EnsembleSpec::goe(N);
    for (int i = 0; i < n; ++i) {
        RngStream r(17, i);
        acc += linear_statistic(eigen_decompose(sample_wigner(spec, r)), w,
                                [&](double x) { return f(x); }, +1);
    }
    acc /= n;
    double rho = w.rho();
    // integrate only over the (narrow) support of the scaled test function
    double lo = w.E + (w.omega - w.eta * f.support_radius()) / rho;
    double hi = w.E + (w.omega + w.eta * f.support_radius()) / rho;
    double expected = quad1d(
        [&](double x) {
            return N * semicircle(x).rho *
                   f(((x - w.E) * rho - w.omega) / w.eta) / w.eta;
        },
        lo, hi, 1e-10);
    CHECK(acc == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("window exponents, validation and JSON round trip") {
    SpectralWindow w;
    w.E = 0.3;
    w.omega = 0.05;
    w.eta = 0.1;
    w.M = 2.0;
    CHECK(w.alpha_exp(100) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(w.beta_exp(100) == doctest::Approx(-std::log(0.05) / std::log(100.0))
                                 .epsilon(1e-12));
    CHECK(w.kappa() == doctest::Approx(std::sqrt(4.0 - 0.09)).epsilon(1e-14));
    CHECK(w.rho() == doctest::Approx(std::sqrt(4.0 - 0.09) / (2 * PI))
                         .epsilon(1e-14));
    CHECK(w.z1() == cdouble{0.3 - 0.025, 0.1});
    CHECK(w.z2() == cdouble{0.3 + 0.025, 0.1});
    CHECK_NOTHROW(w.validate(100));

    SpectralWindow bad = w;
    bad.eta = 0.0;
    CHECK_THROWS_AS(bad.validate(100), std::invalid_argument);
    bad = w;
    bad.E = 2.5; // outside the bulk
    CHECK_THROWS_AS(bad.validate(100), std::invalid_argument);

    nlohmann::json j = w;
    SpectralWindow t = j.get<SpectralWindow>();
    CHECK(t.E == w.E);
    CHECK(t.omega == w.omega);
    CHECK(t.eta == w.eta);
    CHECK(t.M == w.M);
}
