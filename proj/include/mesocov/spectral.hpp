#pragma once
// Eigendecomposition and per-sample spectral observables, plus the semicircle
// reference quantities (Stieltjes transform, quantiles) and the sine kernels.
//
// Branch convention: sqrt(z^2-4) is computed as z*sqrt(1-4/z^2) under the
// principal square root, so the boundary value from the upper half plane is
// +i*kappa_x for every x in (-2,2). This is the branch every closed-form
// formula actually uses (it keeps Im m(z) > 0 for Im z > 0 on both sides of
// the spectrum).

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "mesocov/ensemble.hpp"

namespace mesocov {

using cdouble = std::complex<double>;

struct EigenSample {
    std::vector<double> eigenvalues; // sorted ascending
    int64_t sample_index = -1;
};

struct SolverError : std::runtime_error {
    int64_t sample_index;
    SolverError(int64_t idx, const std::string& what)
        : std::runtime_error(what), sample_index(idx) {}
};

// Full spectrum, eigenvalues only (LAPACK dsyevd / zheevd).
EigenSample eigen_decompose(const HermitianMatrix& H, int64_t sample_index = -1);
// Variant that also returns the eigenvector matrix (columns), used only for
// residual spot checks; costs noticeably more.
EigenSample eigen_decompose_with_vectors(const HermitianMatrix& H,
                                         Eigen::MatrixXcd& vectors,
                                         int64_t sample_index = -1);

// (1/N) sum_i (lambda_i - z)^{-m}; m=1 is the empirical Stieltjes transform
cdouble empirical_stieltjes_power(const EigenSample& eigs, cdouble z, int m);

// Mesoscopic window: reference energy E, separation omega, resolution eta.
// The paired spectral parameters sit symmetrically about E, so omega is the
// full distance E2 - E1:  z1 = E - omega/2 + i eta,  z2 = E + omega/2 + i eta.
struct SpectralWindow {
    double E = 0.0;
    double omega = 0.1;
    double eta = 0.01;
    double M = 1.0;   // test-function support radius

    cdouble z1() const { return {E - omega / 2, eta}; }
    cdouble z2() const { return {E + omega / 2, eta}; }
    cdouble zc() const { return {E, eta}; } // single-point observables
    double kappa() const;
    double rho() const;
    double alpha_exp(int N) const;  // -log_N eta
    double beta_exp(int N) const;   // -log_N omega
    void validate(int N) const;     // theorem hypotheses (soft: throws on nonsense only)
};

void to_json(nlohmann::json& j, const SpectralWindow& w);
void from_json(const nlohmann::json& j, SpectralWindow& w);

// sum_i (1/eta) f(((lambda_i - E) rho_E -/+ omega)/eta); sign +1 places the
// window at E + omega/rho_E, sign -1 at E - omega/rho_E.
double linear_statistic(const EigenSample& eigs, const SpectralWindow& w,
                        const std::function<double(double)>& f, int sign);

// semicircle Stieltjes transform: root of m^2 + z m + 1 = 0 with Im m Im z > 0
cdouble msc_stieltjes(cdouble z);
cdouble sqrt_zsq_minus4(cdouble z);

struct Semicircle { double rho = 0, kappa = 0; };
Semicircle semicircle(double E);

// semicircle CDF F(g) = 1/2 + (g sqrt(4-g^2) + 4 asin(g/2)) / (4 pi)
double semicircle_cdf(double g);
// gamma_k with k/N = F(gamma_k), to 1e-10
double quantile(int k, int N);

struct SineKernel {
    double s = 0;            // sin(pi u)/(pi u)
    double Y1 = 0;           // -s'(u) * Int_u^inf s - s(u)^2
    double Y2 = 0;           // -s(u)^2
    double Y1_avg_asym = 0;  // -1/(pi^2 u^2) + 3/(2 pi^4 u^4)
};
SineKernel sine_kernel(double u);

} // namespace mesocov
