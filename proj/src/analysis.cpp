#include "mesocov/analysis.hpp"

#include <cmath>

namespace mesocov {

namespace {
constexpr double PI = 3.14159265358979323846264338327950288;

// Gauss-Kronrod 7-15 nodes/weights on [-1,1] (symmetric; nonnegative half)
const double XGK[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
const double WGK[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
const double WG[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

void gk15(const std::function<double(double)>& fn, double a, double b,
          double& result, double& err, double* resabs = nullptr) {
    const double c = 0.5 * (a + b);
    const double hl = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = fn(c - hl * XGK[i]);
        fv[14 - i] = fn(c + hl * XGK[i]);
    }
    fv[7] = fn(c);
    double resk = WGK[7] * fv[7];
    double resg = WG[3] * fv[7];
    double resa = WGK[7] * std::abs(fv[7]);
    for (int i = 0; i < 7; ++i) {
        resk += WGK[i] * (fv[i] + fv[14 - i]);
        resa += WGK[i] * (std::abs(fv[i]) + std::abs(fv[14 - i]));
    }
    for (int i = 0; i < 3; ++i) resg += WG[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    result = resk * hl;
    err = std::abs((resk - resg) * hl);
    if (resabs) *resabs = resa * std::abs(hl);
}

double quad1d_rec(const std::function<double(double)>& fn, double a, double b,
                  double tol, int depth, int max_depth, double& achieved) {
    double r, e;
    gk15(fn, a, b, r, e);
    if (e <= tol || depth >= max_depth) {
        achieved = std::max(achieved, e <= tol ? 0.0 : e);
        return r;
    }
    double mid = 0.5 * (a + b);
    return quad1d_rec(fn, a, mid, tol / 2, depth + 1, max_depth, achieved) +
           quad1d_rec(fn, mid, b, tol / 2, depth + 1, max_depth, achieved);
}
} // namespace

double quad1d(const std::function<double(double)>& fn, double a, double b,
              double tol, int max_depth) {
    double r0, e0, resabs = 0;
    gk15(fn, a, b, r0, e0, &resabs);
    // relative tolerance against the integral's own magnitude, so that
    // small-valued kernels are still resolved. When the integral is small
    // through cancellation, demand accuracy relative to the absolute mass
    // instead -- resolving a cancelling integral to a relative precision
    // below round-off of its L1 mass is not achievable.
    double scale = std::max({std::abs(r0), 1e-2 * resabs, 1e-12});
    double achieved = 0.0;
    double r = quad1d_rec(fn, a, b, tol * scale, 0, max_depth, achieved);
    if (achieved > 10 * tol * std::max(std::abs(r), scale))
        throw QuadratureError("quad1d: subdivision limit exceeded", achieved);
    return r;
}

double quad2d(const std::function<double(double, double)>& fn,
              double ax, double bx, double ay, double by,
              double tol, int max_depth) {
    // outer adaptive rule over x of inner adaptive rule over y
    auto inner = [&](double x) {
        return quad1d([&](double y) { return fn(x, y); }, ay, by, tol / 4,
                      max_depth);
    };
    return quad1d(inner, ax, bx, tol, max_depth);
}

// ---------------------------------------------------------------------------

Bump::Bump(double M) : M_(M), c_(1.0) {
    if (!(M > 0)) throw std::invalid_argument("bump: M must be positive");
    P_.push_back({1.0}); // P_0 = 1
    // normalize: Int f = 1
    double raw = quad1d([this](double x) { return value(x); }, -M_, M_, 1e-13);
    c_ = 1.0 / raw;
}

double Bump::value(double x) const {
    double t = x / M_;
    if (std::abs(t) >= 1.0) return 0.0;
    return c_ * std::exp(-1.0 / (1.0 - t * t));
}

const std::vector<double>& Bump::poly(int j) const {
    // P_{j+1} = P_j'(1-t^2)^2 + 4 j t (1-t^2) P_j - 2 t P_j,
    // where f^(j) in t equals u(t) P_j(t) / (1-t^2)^{2j}
    while (static_cast<int>(P_.size()) <= j) {
        const std::vector<double>& P = P_.back();
        int jj = static_cast<int>(P_.size()) - 1;
        int n = static_cast<int>(P.size()); // degree n-1
        std::vector<double> out(n + 3, 0.0);
        for (int i = 0; i < n; ++i) {
            double ci = P[i];
            // P'(t) * (1 - t^2)^2 = P' - 2 P' t^2 + P' t^4
            if (i >= 1) {
                double di = ci * i; // derivative coefficient at degree i-1
                out[i - 1] += di;
                out[i + 1] -= 2 * di;
                if (i + 3 < static_cast<int>(out.size())) out[i + 3] += di;
                else { out.resize(i + 4, 0.0); out[i + 3] += di; }
            }
            // 4 j t (1 - t^2) P = 4 j (t - t^3) P
            out[i + 1] += 4.0 * jj * ci;
            if (i + 3 >= static_cast<int>(out.size())) out.resize(i + 4, 0.0);
            out[i + 3] -= 4.0 * jj * ci;
            // -2 t P
            out[i + 1] -= 2.0 * ci;
        }
        while (out.size() > 1 && out.back() == 0.0) out.pop_back();
        P_.push_back(std::move(out));
    }
    return P_[static_cast<size_t>(j)];
}

double Bump::deriv(int j, double x) const {
    if (j < 0) throw std::invalid_argument("bump: negative derivative order");
    if (j == 0) return value(x);
    double t = x / M_;
    if (std::abs(t) >= 1.0) return 0.0;
    const std::vector<double>& P = poly(j);
    double p = 0.0;
    for (int i = static_cast<int>(P.size()) - 1; i >= 0; --i) p = p * t + P[i];
    double om = 1.0 - t * t;
    double u = std::exp(-1.0 / om);
    // chain rule for the x -> t = x/M scaling
    return c_ * u * p / std::pow(om, 2 * j) / std::pow(M_, j);
}

std::complex<double> almost_analytic(const Bump& f, int k, double x, double y) {
    if (k < 0 || k > 12)
        throw std::invalid_argument("almost_analytic: k must be in [0, 12]");
    std::complex<double> iy{0.0, y};
    std::complex<double> acc = f.value(x);
    std::complex<double> pw = 1.0;
    double fact = 1.0;
    for (int j = 1; j <= k; ++j) {
        pw *= iy;
        fact *= j;
        acc += pw * f.deriv(j, x) / fact;
    }
    return acc;
}

double cauchy_reconstruct(const Bump& f, double lambda, double a, int k) {
    if (!(a > 0)) throw std::invalid_argument("cauchy_reconstruct: a must be positive");
    const double M = f.support_radius();
    const double L = M + 1.0; // f-tilde vanishes for |x| > M
    const double lo = std::min(-L, lambda - 1.0);
    const double hi = std::max(L, lambda + 1.0);

    // contour: boundary of the strip |Im z| <= a, counterclockwise.
    // bottom line (y = -a) left to right, top line (y = +a) right to left:
    //   (i/2pi) Contour = (i/2pi) Int [h(x - ia) - h(x + ia)] dx
    auto hline = [&](double x, double y) {
        std::complex<double> z{x, y};
        return almost_analytic(f, k, x, y) / (lambda - z);
    };
    double contour_re = quad1d(
        [&](double x) {
            std::complex<double> d = hline(x, -a) - hline(x, a);
            return (std::complex<double>{0.0, 1.0} * d).real();
        },
        lo, hi, 1e-9) / (2 * PI);

    // area term: dbar f~ = (1/2) (iy)^k f^(k+1)(x) / k!. The integrand is
    // bounded near z = lambda (the y^k factor beats the 1/(lambda-z) pole for
    // k >= 1) but kinked along x = lambda and y = 0; splitting the box along
    // those lines puts the singular point on quadrant corners, which the
    // interior-node quadrature never evaluates.
    double factk = 1.0;
    for (int j = 2; j <= k; ++j) factk *= j;
    auto area = [&](double x, double y) {
        std::complex<double> iy{0.0, y};
        std::complex<double> dbar = 0.5 * std::pow(iy, k) * f.deriv(k + 1, x) / factk;
        std::complex<double> z{x, y};
        return (dbar / (lambda - z)).real();
    };
    std::vector<double> xcuts{-M, M};
    if (lambda > -M && lambda < M) xcuts.insert(xcuts.begin() + 1, lambda);
    double area_re = 0.0;
    for (size_t i = 0; i + 1 < xcuts.size(); ++i) {
        area_re += quad2d(area, xcuts[i], xcuts[i + 1], -a, 0.0, 1e-8);
        area_re += quad2d(area, xcuts[i], xcuts[i + 1], 0.0, a, 1e-8);
    }
    area_re /= PI;

    return contour_re + area_re;
}

double predicted_linstat_cov(const SpectralWindow& w, const Bump& f,
                             const Bump& g, const CumulantSums& sums,
                             int beta, int N) {
    if (w.M * w.eta > w.omega)
        throw std::invalid_argument(
            "predicted_linstat_cov: overlapping supports (need M*eta <= omega)");
    const double Nw = N * w.omega;
    const double Ne = N * w.eta;
    const double Mf = f.support_radius();
    const double Mg = g.support_radius();
    // normalized coordinates u = N omega + N eta s, v = -N omega + N eta t:
    // the 1/(N eta) test-function prefactors cancel against du dv, keeping
    // the integrand at the scale of Upsilon itself
    auto kern = [&](double s, double t) {
        double u = Nw + Ne * s;
        double v = -Nw + Ne * t;
        return upsilon(w, u, v, sums, beta, N).value * f(s) * g(t);
    };
    return quad2d(kern, -Mf, Mf, -Mg, Mg, 1e-6);
}

double predicted_linstat_cov_complex_repr(const SpectralWindow& w,
                                          const Bump& f, const Bump& g,
                                          const CumulantSums& sums,
                                          int beta, int N) {
    const double eps = w.eta;
    const double rho = w.rho();
    // energy-space coordinates x = center + (eta/rho) * s with s in [-M, M];
    // the 1/eta prefactors of f_eta, g_eta cancel against dx1 dx2 up to a
    // residual 1/rho^2
    const double cf = w.E + w.omega / rho;
    const double cg = w.E - w.omega / rho;
    const double sc = w.eta / rho;
    auto kern = [&](double s, double t) {
        double x1 = cf + sc * s;
        double x2 = cg + sc * t;
        cdouble z1{x1, eps};
        cdouble conj_cov = cov_green_conjugate_at(z1, cdouble{x2, -eps},
                                                  0.5 * (x1 + x2), sums, beta, N)
                               .total();
        cdouble nonconj_cov =
            cov_green_nonconjugate_at(z1, cdouble{x2, eps}, sums, beta, N).total();
        double bracket = 2.0 * conj_cov.real() - 2.0 * nonconj_cov.real();
        return f(s) * g(t) * bracket / (4 * PI * PI);
    };
    const double Mf = f.support_radius();
    const double Mg = g.support_radius();
    return quad2d(kern, -Mf, Mf, -Mg, Mg, 1e-6) / (rho * rho);
}

SmoothFn induced_profile(const SpectralWindow& w, const Bump& f, int sign) {
    const double rho = w.rho();
    const double off = sign > 0 ? w.omega : -w.omega;
    SmoothFn out;
    out.f = [&f, w, rho, off](double x) {
        return f(((x - w.E) * rho - off) / w.eta) / w.eta;
    };
    out.df = [&f, w, rho, off](double x) {
        return f.deriv(1, ((x - w.E) * rho - off) / w.eta) * rho / (w.eta * w.eta);
    };
    return out;
}

} // namespace mesocov
