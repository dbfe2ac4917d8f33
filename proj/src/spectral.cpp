#include "mesocov/spectral.hpp"

#include <algorithm>
#include <cmath>

#include <gsl/gsl_sf_expint.h>
#include <lapacke.h>

namespace mesocov {

namespace {
constexpr double PI = 3.14159265358979323846264338327950288;
} // namespace

EigenSample eigen_decompose(const HermitianMatrix& H, int64_t sample_index) {
    const int N = H.n();
    EigenSample out;
    out.sample_index = sample_index;
    out.eigenvalues.resize(static_cast<size_t>(N));
    lapack_int info;
    if (H.beta == 1) {
        Eigen::MatrixXd A = H.re; // dsyevd destroys its input
        info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', N, A.data(), N,
                              out.eigenvalues.data());
    } else {
        Eigen::MatrixXcd A = H.cx;
        info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', N,
                              reinterpret_cast<lapack_complex_double*>(A.data()),
                              N, out.eigenvalues.data());
    }
    if (info != 0)
        throw SolverError(sample_index,
                          "eigensolver failed (info=" + std::to_string(info) + ")");
    // LAPACK returns ascending order already; keep the guarantee explicit
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
    return out;
}

EigenSample eigen_decompose_with_vectors(const HermitianMatrix& H,
                                         Eigen::MatrixXcd& vectors,
                                         int64_t sample_index) {
    const int N = H.n();
    EigenSample out;
    out.sample_index = sample_index;
    out.eigenvalues.resize(static_cast<size_t>(N));
    lapack_int info;
    if (H.beta == 1) {
        Eigen::MatrixXd A = H.re;
        info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', N, A.data(), N,
                              out.eigenvalues.data());
        vectors = A.cast<std::complex<double>>();
    } else {
        Eigen::MatrixXcd A = H.cx;
        info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', N,
                              reinterpret_cast<lapack_complex_double*>(A.data()),
                              N, out.eigenvalues.data());
        vectors = A;
    }
    if (info != 0)
        throw SolverError(sample_index,
                          "eigensolver failed (info=" + std::to_string(info) + ")");
    return out;
}

cdouble empirical_stieltjes_power(const EigenSample& eigs, cdouble z, int m) {
    if (z.imag() == 0.0) throw std::invalid_argument("empirical_stieltjes_power: Im z = 0");
    cdouble acc = 0;
    for (double lam : eigs.eigenvalues) {
        cdouble d = 1.0 / (lam - z);
        cdouble p = d;
        for (int k = 1; k < m; ++k) p *= d;
        acc += p;
    }
    return acc / static_cast<double>(eigs.eigenvalues.size());
}

double SpectralWindow::kappa() const { return std::sqrt(std::max(0.0, 4.0 - E * E)); }
double SpectralWindow::rho() const { return kappa() / (2 * PI); }
double SpectralWindow::alpha_exp(int N) const { return -std::log(eta) / std::log(double(N)); }
double SpectralWindow::beta_exp(int N) const { return -std::log(omega) / std::log(double(N)); }

void SpectralWindow::validate(int N) const {
    if (!(std::abs(E) < 2.0)) throw std::invalid_argument("window: |E| must be < 2");
    if (!(eta > 0) || !(omega > 0) || !(M >= 1))
        throw std::invalid_argument("window: need eta > 0, omega > 0, M >= 1");
    if (N > 0 && eta < 1.0 / N)
        throw std::invalid_argument("window: eta below 1/N (sub-microscopic)");
}

void to_json(nlohmann::json& j, const SpectralWindow& w) {
    j = nlohmann::json{{"E", w.E}, {"omega", w.omega}, {"eta", w.eta}, {"M", w.M}};
}

void from_json(const nlohmann::json& j, SpectralWindow& w) {
    w.E = j.at("E").get<double>();
    w.omega = j.at("omega").get<double>();
    w.eta = j.at("eta").get<double>();
    if (j.contains("M")) w.M = j.at("M").get<double>();
}

double linear_statistic(const EigenSample& eigs, const SpectralWindow& w,
                        const std::function<double(double)>& f, int sign) {
    const double rho = w.rho();
    const double off = sign > 0 ? w.omega : -w.omega;
    double acc = 0;
    for (double lam : eigs.eigenvalues) {
        double arg = ((lam - w.E) * rho - off) / w.eta;
        if (std::abs(arg) < w.M) acc += f(arg);
    }
    return acc / w.eta;
}

cdouble sqrt_zsq_minus4(cdouble z) {
    // z*sqrt(1-4/z^2): principal root; ~ z at infinity, +i*kappa on the
    // upper edge of [-2,2] for either sign of Re z
    return z * std::sqrt(1.0 - 4.0 / (z * z));
}

cdouble msc_stieltjes(cdouble z) {
    return (-z + sqrt_zsq_minus4(z)) / 2.0;
}

Semicircle semicircle(double E) {
    Semicircle s;
    s.kappa = std::sqrt(std::max(0.0, 4.0 - E * E));
    s.rho = s.kappa / (2 * PI);
    return s;
}

double semicircle_cdf(double g) {
    if (g <= -2.0) return 0.0;
    if (g >= 2.0) return 1.0;
    return 0.5 + (g * std::sqrt(4.0 - g * g) + 4.0 * std::asin(g / 2.0)) / (4.0 * PI);
}

double quantile(int k, int N) {
    if (k < 1 || k > N) throw std::invalid_argument("quantile: need 1 <= k <= N");
    const double target = static_cast<double>(k) / N;
    double lo = -2.0, hi = 2.0;
    // bisection: CDF is strictly increasing on (-2,2)
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        double mid = 0.5 * (lo + hi);
        if (semicircle_cdf(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

SineKernel sine_kernel(double u) {
    SineKernel k;
    const double pu = PI * u;
    if (u == 0.0) {
        k.s = 1.0;
        k.Y2 = -1.0;
        k.Y1 = -1.0; // s'(0) = 0, tail term drops
        k.Y1_avg_asym = 0.0; // expansion not meaningful at u=0
        return k;
    }
    k.s = std::sin(pu) / pu;
    k.Y2 = -k.s * k.s;
    // s'(u) = (cos(pi u) - s(u)) / u
    double sp = (std::cos(pu) - k.s) / u;
    // Int_u^inf s(v) dv = (pi/2 - Si(pi u)) / pi
    double tail = (PI / 2 - gsl_sf_Si(pu)) / PI;
    k.Y1 = -sp * tail - k.s * k.s;
    double u2 = u * u;
    k.Y1_avg_asym = -1.0 / (PI * PI * u2) + 1.5 / (PI * PI * PI * PI * u2 * u2);
    return k;
}

} // namespace mesocov
