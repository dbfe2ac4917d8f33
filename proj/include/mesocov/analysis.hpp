#pragma once
// Quadrature, smooth compactly supported test functions, the almost-analytic
// extension / Cauchy reconstruction identity, and assembly of the predicted
// linear-statistics covariance integral.

#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "mesocov/theory.hpp"

namespace mesocov {

// adaptive Gauss-Kronrod (G7/K15); |error| <= tol * max(1, |result|)
double quad1d(const std::function<double(double)>& fn, double a, double b,
              double tol = 1e-10, int max_depth = 40);
// iterated 1-D rules over an axis-aligned box
double quad2d(const std::function<double(double, double)>& fn,
              double ax, double bx, double ay, double by,
              double tol = 1e-8, int max_depth = 30);

struct QuadratureError : std::runtime_error {
    double achieved;
    QuadratureError(const std::string& what, double ach)
        : std::runtime_error(what), achieved(ach) {}
};

// normalized flat bump  f(x) = c * exp(-1/(1-(x/M)^2)) on |x| < M, else 0.
// Derivatives of any order via the exact rational-coefficient recurrence
//   d/dt [P_j(t) u(t) / (1-t^2)^{2j}]  with u = exp(-1/(1-t^2)).
class Bump {
public:
    explicit Bump(double M);

    double operator()(double x) const { return value(x); }
    double value(double x) const;
    double deriv(int j, double x) const; // j = 0 gives value
    double support_radius() const { return M_; }
    double norm_const() const { return c_; }

private:
    const std::vector<double>& poly(int j) const;

    double M_, c_;
    mutable std::vector<std::vector<double>> P_; // P_j coefficients, grown lazily
};

// f-tilde(x+iy) = f(x) + sum_{j=1}^k (iy)^j f^(j)(x)/j!   (k <= 12)
std::complex<double> almost_analytic(const Bump& f, int k, double x, double y);

// f(lambda) = (i/2pi) Contour_{dD_a} f~/(lambda-z) dz
//           + (1/pi) Area_{D_a} dbar f~/(lambda-z) d^2 z
double cauchy_reconstruct(const Bump& f, double lambda, double a, int k);

// Int Upsilon_{E,beta}(u,v) f_plus(u) g_minus(v) du dv with
// f_plus(u) = (1/(N eta)) f((u - N omega)/(N eta)) (and g at -N omega).
double predicted_linstat_cov(const SpectralWindow& w, const Bump& f,
                             const Bump& g, const CumulantSums& sums,
                             int beta, int N);

// Same integral assembled from the complex-side Green-function covariance
// formulas at boundary distance eps = eta:
//   (1/4pi^2) IntInt f_eta(x1) g_eta(x2) [2 Re Cov_conj(x1+ie, x2-ie)
//                                         - 2 Re Cov_nonconj(x1+ie, x2+ie)]
double predicted_linstat_cov_complex_repr(const SpectralWindow& w,
                                          const Bump& f, const Bump& g,
                                          const CumulantSums& sums,
                                          int beta, int N);

// macroscopic profile induced by a mesoscopic window:
// phi(x) = (1/eta) f(((x-E) rho_E -/+ omega)/eta), sign as in linear_statistic
SmoothFn induced_profile(const SpectralWindow& w, const Bump& f, int sign);

} // namespace mesocov
