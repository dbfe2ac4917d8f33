#include "mesocov/selftest.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <sstream>

#include "mesocov/analysis.hpp"
#include "mesocov/ensemble.hpp"
#include "mesocov/formal.hpp"
#include "mesocov/mc.hpp"
#include "mesocov/rng.hpp"
#include "mesocov/spectral.hpp"
#include "mesocov/theory.hpp"

namespace mesocov {

namespace {
constexpr double PI = 3.14159265358979323846264338327950288;

struct Suite {
    std::vector<SelfTestResult> results;
    const SelfTestReporter& report;

    explicit Suite(const SelfTestReporter& r) : report(r) {}

    void check(const std::string& name, bool ok, const std::string& detail) {
        SelfTestResult r{name, ok, detail};
        if (report) report(r);
        results.push_back(std::move(r));
    }
    // numeric check: pass iff err <= tol
    void check_err(const std::string& name, double err, double tol) {
        std::ostringstream d;
        d << "max_err=" << err << " tol=" << tol;
        check(name, std::isfinite(err) && err <= tol, d.str());
    }
};

// ---------------------------------------------------------------- rng

void t_philox_vectors(Suite& s) {
    // published 10-round test vectors for the philox4x32 bijection
    struct V { uint32_t ctr[4], key[2], out[4]; };
    const V vs[] = {
        {{0, 0, 0, 0}, {0, 0},
         {0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}},
        {{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
         {0xffffffffu, 0xffffffffu},
         {0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}},
        {{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
         {0xa4093822u, 0x299f31d0u},
         {0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}},
    };
    bool ok = true;
    for (const V& v : vs) {
        uint32_t c[4] = {v.ctr[0], v.ctr[1], v.ctr[2], v.ctr[3]};
        Philox4x32::rounds10(c, v.key);
        for (int i = 0; i < 4; ++i) ok = ok && c[i] == v.out[i];
    }
    s.check("philox_known_answer", ok, ok ? "3 vectors" : "vector mismatch");
}

void t_stream_independence(Suite& s) {
    // identical reconstruction of a stream, and distinct streams differ
    RngStream a(42, 7), b(42, 7), c(42, 8);
    bool same = true, diff = false;
    for (int i = 0; i < 64; ++i) {
        uint64_t x = a.next_u64();
        same = same && x == b.next_u64();
        diff = diff || x != c.next_u64();
    }
    s.check("rng_stream_determinism", same && diff,
            same ? (diff ? "ok" : "streams collide") : "replay mismatch");
}

// ---------------------------------------------------------------- spectral

void t_msc_equation(Suite& s) {
    RngStream r(1, 0);
    double err = 0, sign_err = 0;
    for (int k = 0; k < 1000; ++k) {
        double re = -5 + 10 * r.u01();
        double im = (r.u01() < 0.5 ? -1 : 1) * (1e-3 + 4 * r.u01());
        cdouble z{re, im};
        cdouble m = msc_stieltjes(z);
        err = std::max(err, std::abs(m * m + z * m + 1.0));
        if (m.imag() * z.imag() <= 0) sign_err += 1;
    }
    s.check_err("stieltjes_selfconsistency", err, 1e-12);
    s.check("stieltjes_halfplane", sign_err == 0,
            "Im m(z) Im z > 0 violations: " + std::to_string((int)sign_err));
}

void t_stieltjes_sq_identity(Suite& s) {
    // normalized trace of G^2 equals m'(z) = -m(z)/s(z)
    RngStream r(2, 0);
    double err = 0;
    for (int k = 0; k < 200; ++k) {
        cdouble z{-3 + 6 * r.u01(), 0.01 + 2 * r.u01()};
        cdouble lhs = expected_stieltjes_sq(z);
        cdouble rhs = -msc_stieltjes(z) / sqrt_zsq_minus4(z);
        err = std::max(err, std::abs(lhs - rhs));
    }
    s.check_err("stieltjes_sq_is_m_prime", err, 1e-12);
}

void t_quantile_inverse(Suite& s) {
    double err = 0;
    const int N = 1000;
    for (int k : {1, 7, 100, 333, 500, 667, 900, 993, 999})
        err = std::max(err, std::abs(semicircle_cdf(quantile(k, N)) - double(k) / N));
    s.check_err("semicircle_quantile_inverse", err, 1e-9);
}

void t_sine_kernel_limits(Suite& s) {
    SineKernel k0 = sine_kernel(0.0);
    double err = std::abs(k0.s - 1.0) + std::abs(k0.Y1 + 1.0) + std::abs(k0.Y2 + 1.0);
    SineKernel ks = sine_kernel(1e-7);
    err = std::max(err, std::abs(ks.Y1 + 1.0));
    s.check_err("sine_kernel_origin", err, 1e-6);
}

void t_y1_window_average(Suite& s) {
    // the 1/u^2, 1/u^4 tail describes Y1 only after smoothing out the
    // sin(2 pi u) oscillation: compare window averages of both sides
    double worst_rel_tol = 0;
    for (double U : {20.0, 50.0, 100.0}) {
        auto avg_Y1 = quad1d([](double u) { return sine_kernel(u).Y1; },
                             U - 5, U + 5, 1e-10) / 10.0;
        auto avg_as = quad1d([](double u) { return sine_kernel(u).Y1_avg_asym; },
                             U - 5, U + 5, 1e-10) / 10.0;
        double tol = 10.0 * std::pow(U, -6.0);
        worst_rel_tol = std::max(worst_rel_tol, std::abs(avg_Y1 - avg_as) / tol);
    }
    s.check_err("sine_kernel_tail_window_avg", worst_rel_tol, 1.0);
}

// ---------------------------------------------------------------- theory

void t_boundary_identities(Suite& s) {
    // real-axis limits of the complex-side f-functions reproduce the real-side
    // g-functions:  g_i = 2 Re f_{conj}(x1+i0, x2-i0) - 2 Re f_{nonconj}(x1+i0, x2+i0)
    RngStream r(3, 0);
    double e1 = 0, e2 = 0, e3 = 0, e4 = 0, ef1 = 0;
    int done = 0;
    while (done < 50) {
        double x1 = -1.8 + 3.6 * r.u01();
        double x2 = -1.8 + 3.6 * r.u01();
        if (std::abs(x1 - x2) < 0.05) continue;
        ++done;
        GRecord g = g_functions(x1, x2);
        auto at = [&](double eps) {
            FRecord fc = f_functions({x1, eps}, {x2, -eps});
            FRecord fn = f_functions({x1, eps}, {x2, eps});
            return std::array<double, 5>{
                2 * fc.f2.real() - 2 * fn.f5.real(),
                2 * fc.f3.real() - 2 * fn.f6.real(),
                2 * fc.f4.real() - 2 * fn.f7.real(),
                // g4 pairs m1 m2 / (s1 s2) across the two pairings
                2 * (msc_stieltjes({x1, eps}) * msc_stieltjes({x2, -eps}) /
                     (sqrt_zsq_minus4({x1, eps}) * sqrt_zsq_minus4({x2, -eps})))
                        .real() -
                    2 * (msc_stieltjes({x1, eps}) * msc_stieltjes({x2, eps}) /
                         (sqrt_zsq_minus4({x1, eps}) * sqrt_zsq_minus4({x2, eps})))
                            .real(),
                fc.f1.real(), // should vanish: f1 boundary value is imaginary
            };
        };
        const double eps = 1e-7;
        auto v1 = at(eps), v2 = at(eps / 2);
        auto rich = [&](int i) { return 2 * v2[i] - v1[i]; };
        auto rel = [](double got, double want) {
            return std::abs(got - want) / std::max(1.0, std::abs(want));
        };
        e1 = std::max(e1, rel(rich(0), g.g1));
        e2 = std::max(e2, rel(rich(1), g.g2));
        e3 = std::max(e3, rel(rich(2), g.g3));
        e4 = std::max(e4, rel(rich(3), g.g4));
        ef1 = std::max(ef1, std::abs(rich(4)));
    }
    s.check_err("boundary_identity_g1", e1, 1e-5);
    s.check_err("boundary_identity_g2", e2, 1e-5);
    s.check_err("boundary_identity_g3", e3, 1e-5);
    s.check_err("boundary_identity_g4", e4, 1e-5);
    s.check_err("boundary_f1_imaginary", ef1, 1e-5);
}

void t_upsilon_symmetry(Suite& s) {
    SpectralWindow w{0.3, 0.1, 0.01, 1.0};
    CumulantSums sums = cumulant_sums(EnsembleSpec::goe(500));
    double err = 0;
    for (auto [u, v] : {std::pair{40.0, -40.0}, {55.0, -35.0}, {30.0, -60.0}}) {
        double a = upsilon(w, u, v, sums, 1, 500).value;
        double b = upsilon(w, v, u, sums, 1, 500).value;
        err = std::max(err, std::abs(a - b) / std::abs(a));
    }
    s.check_err("upsilon_exchange_symmetry", err, 1e-13);
}

void t_upsilon_beta_ratio(Suite& s) {
    // with all cumulant corrections zero (gaussian entries), the class-2
    // kernel is half the class-1 kernel after removing the 1/(u-v)^4 term
    SpectralWindow w{0.0, 0.1, 0.01, 1.0};
    CumulantSums zero{};
    double err = 0;
    for (auto [u, v] : {std::pair{40.0, -40.0}, {70.0, -20.0}}) {
        double y1 = upsilon(w, u, v, zero, 1, 700).value;
        double y2 = upsilon(w, u, v, zero, 2, 700).value;
        double d = u - v;
        double want = 0.5 * (y1 - 1.5 / (std::pow(PI, 4) * std::pow(d, 4)));
        err = std::max(err, std::abs(y2 - want) / std::abs(y2));
    }
    s.check_err("upsilon_class_ratio", err, 1e-12);
}

void t_cauchy_reconstruction(Suite& s) {
    RngStream r(4, 0);
    double err = 0;
    for (int t = 0; t < 12; ++t) {
        double M = 0.8 + 0.7 * r.u01();
        Bump f(M);
        double lambda = -0.9 * M + 1.8 * M * r.u01();
        double a = 0.3 + 0.7 * r.u01();
        // k <= 4: the (k+1)-th bump derivative grows superexponentially in k,
        // and for larger k the exact identity drowns in round-off
        int k = 2 + static_cast<int>(3 * r.u01());
        double got = cauchy_reconstruct(f, lambda, a, k);
        err = std::max(err, std::abs(got - f(lambda)));
    }
    s.check_err("cauchy_reconstruction", err, 1e-6);
}

void t_cross_representation(Suite& s) {
    // the normalized-coordinate kernel integral and the complex-boundary
    // assembly at eps = eta must agree to O((eta/omega)^2)
    SpectralWindow w{0.0, 0.1, 0.002, 1.0};
    const int N = 400;
    EnsembleSpec spec = EnsembleSpec::goe(N);
    CumulantSums sums = cumulant_sums(spec);
    Bump f(1.0), g(1.0);
    double a = predicted_linstat_cov(w, f, g, sums, 1, N);
    double b = predicted_linstat_cov_complex_repr(w, f, g, sums, 1, N);
    double rel = std::abs(a - b) / std::abs(a);
    s.check_err("linstat_cov_cross_representation", rel, 1e-3);
}

void t_quadrature_basics(Suite& s) {
    double e = std::abs(quad1d([](double x) { return x * x; }, 0, 1) - 1.0 / 3);
    e = std::max(e, std::abs(quad1d([](double x) { return std::sin(x); }, 0, 2 * PI)));
    e = std::max(e, std::abs(quad2d([](double x, double y) { return x * y; },
                                    0, 1, 0, 2) - 1.0));
    Bump b1(1.0);
    e = std::max(e, std::abs(quad1d([&](double x) { return b1(x); }, -1, 1) - 1.0));
    s.check_err("quadrature_basics", e, 1e-9);
}

// ---------------------------------------------------------------- formal

void t_formal_example(Suite& s) {
    const std::string text =
        "N^{a+1} E[u(A,3)] E[u(B*,4)] "
        "E[e(A,2,i1,i2) e(B,2,i3,i3) e(A,2,i2,i4)] "
        "E[e(A,1,i6,i1) e(B,1,i5,i6) au(A,7)]";
    FormalMonomial P = parse_monomial(text);
    NuCounters nu = nu_counters(P);
    bool counters = nu.nu1 == 5 && nu.nu2 == 9 && nu.nu3 == 2 && nu.nu4 == 1 &&
                    nu.nu5 == 2 && nu.nu6 == 3;
    std::ostringstream d;
    d << "nu=(" << nu.nu1 << "," << nu.nu2 << "," << nu.nu3 << "," << nu.nu4
      << "," << nu.nu5 << "," << nu.nu6 << ")";
    s.check("formal_example_counters", counters, d.str());

    ExponentReport r = exponents(P, 0.5, 0.5);
    double err = std::abs(r.b0 - 6.25) + std::abs(r.b1 - 3.75) +
                 std::abs(r.b + 3.5) + std::abs(r.bstar - 2.25);
    s.check_err("formal_example_exponents", err, 1e-14);

    // round trip through the printer
    FormalMonomial Q = parse_monomial(print_monomial(P));
    s.check("formal_print_parse_roundtrip",
            print_monomial(Q) == print_monomial(P), print_monomial(P));
}

void t_formal_pair_of_traces(Suite& s) {
    // P = N^0 E[<G><F>]: b0 = 2a-2 and bstar = 2b-2
    FormalMonomial P = parse_monomial("N^0 E[au(G,1) au(F,1)]");
    double err = 0;
    for (double a : {0.3, 0.5, 0.9}) {
        for (double b : {0.0, 0.25}) {
            if (b > a) continue;
            ExponentReport r = exponents(P, a, b);
            err = std::max(err, std::abs(r.b0 - (2 * a - 2)));
            err = std::max(err, std::abs(r.bstar - (2 * b - 2)));
        }
    }
    s.check_err("formal_trace_pair_exponents", err, 1e-14);
}

void t_formal_b0_dominates(Suite& s) {
    // b0 >= b and b0 >= bstar whenever 0 <= beta <= alpha < 1
    RngStream r(5, 0);
    int bad = 0;
    for (int t = 0; t < 1000; ++t) {
        // random monomial: a few atoms with random kinds/powers/indices
        std::ostringstream m;
        m << "N^0 E[";
        int n = 1 + static_cast<int>(5 * r.u01());
        for (int j = 0; j < n; ++j) {
            if (j) m << " ";
            double pick = r.u01();
            int pw = 1 + static_cast<int>(4 * r.u01());
            if (pick < 0.3)
                m << "u(G," << pw << ")";
            else if (pick < 0.55)
                m << "au(G," << pw << ")";
            else
                m << "e(G," << pw << ",i" << 1 + (int)(4 * r.u01()) << ",i"
                  << 1 + (int)(4 * r.u01()) << ")";
        }
        m << "]";
        FormalMonomial P = parse_monomial(m.str());
        double alpha = 0.99 * r.u01();
        double beta_exp = alpha * r.u01();
        ExponentReport rep = exponents(P, alpha, beta_exp);
        if (rep.b0 < rep.b - 1e-12 || rep.b0 < rep.bstar - 1e-12) ++bad;
    }
    s.check("formal_b0_dominates", bad == 0,
            "violations: " + std::to_string(bad) + "/1000");
}

// ---------------------------------------------------------------- mc

void t_mc_determinism(Suite& s) {
    ExperimentConfig cfg;
    cfg.spec = EnsembleSpec::goe(30);
    cfg.window = SpectralWindow{0.0, 0.1, 0.05, 1.0};
    cfg.n_samples = 800;
    cfg.batch_count = 20;
    cfg.master_seed = 11;
    cfg.observables = {Observable::mean_stieltjes, Observable::green_cov_conjugate};
    cfg.threads = 1;
    auto a = run_experiment(cfg);
    cfg.threads = 2;
    auto b = run_experiment(cfg);
    bool ok = true;
    for (Observable o : cfg.observables) {
        ok = ok && a.at(o).mean == b.at(o).mean && a.at(o).stderr_ == b.at(o).stderr_;
    }
    s.check("mc_thread_count_invariance", ok,
            ok ? "bit-identical across 1 vs 2 workers" : "reduction depends on threads");
}

void t_gustavsson_formula(Suite& s) {
    double err = std::abs(gustavsson_prediction(1000, 450, 550) - 1.0 / 3);
    s.check_err("gustavsson_prediction_value", err, 1e-14);
}

} // namespace

std::vector<SelfTestResult> run_selftests(const SelfTestReporter& report) {
    Suite s(report);
    t_philox_vectors(s);
    t_stream_independence(s);
    t_msc_equation(s);
    t_stieltjes_sq_identity(s);
    t_quantile_inverse(s);
    t_sine_kernel_limits(s);
    t_y1_window_average(s);
    t_boundary_identities(s);
    t_upsilon_symmetry(s);
    t_upsilon_beta_ratio(s);
    t_cauchy_reconstruction(s);
    t_quadrature_basics(s);
    t_formal_example(s);
    t_formal_pair_of_traces(s);
    t_formal_b0_dominates(s);
    t_mc_determinism(s);
    t_gustavsson_formula(s);
    t_cross_representation(s);
    return s.results;
}

bool all_passed(const std::vector<SelfTestResult>& results) {
    for (const auto& r : results)
        if (!r.pass) return false;
    return true;
}

} // namespace mesocov
