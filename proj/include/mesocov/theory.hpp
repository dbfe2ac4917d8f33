#pragma once
// Closed-form predictions: the f- and g-function families, V(E), the
// Green-function covariance formulas (conjugate and non-conjugate pairing),
// the corrected means E G_bar and E G^2_bar, the rescaled two-point kernel
// Upsilon, the diagonal-variance-profile corrections, and the macroscopic
// linear-statistics variance.
//
// Every evaluator takes raw complex/real arguments; the conjugation pattern
// (z2* vs z2) is the caller's responsibility.

#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mesocov/ensemble.hpp"
#include "mesocov/spectral.hpp"

namespace mesocov {

// A prediction decomposed into named terms. total() sums every term except
// the reported error bound, which uses unit implicit constants and is never
// asserted exactly.
struct TermBreakdown {
    std::vector<std::pair<std::string, cdouble>> terms;
    double error_bound = 0.0;

    cdouble total() const;
    cdouble term(const std::string& label) const; // 0 if absent
    bool has(const std::string& label) const;
    void add(const std::string& label, cdouble v) { terms.emplace_back(label, v); }
};

void to_json(nlohmann::json& j, const TermBreakdown& t);

struct CoincidentParameter : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FRecord { cdouble f1, f2, f3, f4, f5, f6, f7; };

// f1..f4 enter the conjugate covariance (caller passes z2* as the second
// argument); f5..f7 the non-conjugate one. Throws CoincidentParameter when
// s(z1) = s(z2) (the f2 pole).
FRecord f_functions(cdouble z1, cdouble z2);

double V_of_E(double E);

// Cov(G_bar(z1), G_bar(z2*)) at arbitrary spectral parameters. E and kappa
// are the reference energy quantities entering the kappa- and V-terms.
TermBreakdown cov_green_conjugate_at(cdouble z1, cdouble z2c, double E,
                                     const CumulantSums& sums, int beta, int N);
// window convenience: z1 = E - omega/2 + i eta, z2* = conj(E + omega/2 + i eta)
TermBreakdown cov_green_conjugate(const SpectralWindow& w,
                                  const CumulantSums& sums, int beta, int N);

TermBreakdown cov_green_nonconjugate_at(cdouble z1, cdouble z2,
                                        const CumulantSums& sums, int beta, int N);
TermBreakdown cov_green_nonconjugate(const SpectralWindow& w,
                                     const CumulantSums& sums, int beta, int N);

// diagonal-variance-profile correction to the conjugate covariance
cdouble cov_green_zeta_correction(const SpectralWindow& w,
                                  const std::vector<double>& zeta_profile,
                                  int beta, int N);

// E G_bar including the 1/N correction; E G^2_bar to leading order
cdouble expected_stieltjes(const EnsembleSpec& spec, cdouble z);
cdouble expected_stieltjes_sq(cdouble z);

struct GRecord { double g1, g2, g3, g4; };
GRecord g_functions(double x1, double x2); // requires |x_i| < 2
// F_i(u,v) = g_i(x1, x2) at x = E + u/(N rho_E); arguments must stay in (-2,2)
GRecord F_functions(const SpectralWindow& w, double u, double v, int N);

struct UpsilonValue {
    double value = 0.0;
    TermBreakdown terms;
    double error_bound = 0.0;
};

UpsilonValue upsilon(const SpectralWindow& w, double u, double v,
                     const CumulantSums& sums, int beta, int N,
                     const std::vector<double>* zeta_profile = nullptr);

// smooth test function with first derivative (for the removable diagonal of
// the macroscopic variance integrand)
struct SmoothFn {
    std::function<double(double)> f;
    std::function<double(double)> df;
};

// Var of sum_i f(lambda_i) for macroscopic f on [-2,2]:
//   (1/(beta pi^2)) * (1/2) Int Int ((f(x)-f(y))/(x-y))^2 (4-xy)/(sqrt(4-x^2)sqrt(4-y^2))
//   + (sum_C4/(2 pi^2)) * (Int f(x)(2-x^2)/sqrt(4-x^2) dx)^2   [beta=1]
double lp_macroscopic_variance(const SmoothFn& f, const CumulantSums& sums,
                               int beta = 1);

} // namespace mesocov
