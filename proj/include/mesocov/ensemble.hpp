#pragma once
// Wigner ensemble description and sampling.
//
// Conventions (symmetry class beta in {1,2}):
//   * off-diagonal entries have variance 1/N; for beta=2 additionally E h^2 = 0
//   * diagonal entries are real with variance zeta_i/N; the canonical profile
//     is zeta_i = 2/beta (GOE: Var H_ii = 2/N, GUE: Var H_ii = 1/N)
// Entry families carry closed-form cumulants so every prediction that needs
// sum C4, sum C3(diag) or sum C22 can be evaluated without sampling.

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "mesocov/rng.hpp"

namespace mesocov {

enum class Family { gaussian, rademacher, two_point, uniform, phase_four };

std::string family_name(Family f);
Family family_from_name(const std::string& s);

struct EntryDistribution {
    Family family = Family::gaussian;
    double scale = 1.0;        // standard deviation of the entry
    // two_point parameters: values (a*sigma', b*sigma') with b = -p*a/(1-p),
    // rescaled so the variance is exactly scale^2.
    double p = 0.5;
    double a_over_sigma = 1.0;

    bool is_complex() const { return family == Family::phase_four; }
};

// cumulants of a real entry (centered): C2 = m2, C3 = m3, C4 = m4 - 3 m2^2
struct RealCumulants { double C2 = 0, C3 = 0, C4 = 0; };
// cumulants of a complex entry with E h = 0:
//   C11 = E|h|^2,  C22 = E|h|^4 - 2(E|h|^2)^2 - |E h^2|^2
struct ComplexCumulants { double C11 = 0, C22 = 0; };

RealCumulants entry_cumulants_real(const EntryDistribution& d);
ComplexCumulants entry_cumulants_complex(const EntryDistribution& d);

struct EnsembleSpec {
    int beta = 1;
    int N = 0;
    EntryDistribution offdiag;   // scale field ignored; forced to 1/sqrt(N)
    EntryDistribution diag;      // scale per entry is sqrt(zeta_i/N)
    std::vector<double> zeta;    // empty = canonical (zeta_i = 2/beta)

    static EnsembleSpec goe(int N);
    static EnsembleSpec gue(int N);

    bool canonical_zeta() const { return zeta.empty(); }
    double zeta_at(int i) const {
        return zeta.empty() ? 2.0 / beta : zeta[static_cast<size_t>(i)];
    }
    // throws std::invalid_argument on inconsistent parameters
    void validate() const;
};

void to_json(nlohmann::json& j, const EnsembleSpec& s);
void from_json(const nlohmann::json& j, EnsembleSpec& s);

struct CumulantSums {
    double sum_C4 = 0;       // sum over all ordered pairs (i,j), incl. i=j
    double sum_C3_diag = 0;  // sum over i of C3(H_ii)
    double sum_C22 = 0;      // beta=2 only; diagonal (real) entries use C4
};

CumulantSums cumulant_sums(const EnsembleSpec& spec);

// Exactly Hermitian matrix; `re` used for beta=1, `cx` for beta=2.
struct HermitianMatrix {
    int beta = 1;
    Eigen::MatrixXd re;
    Eigen::MatrixXcd cx;
    int n() const { return beta == 1 ? static_cast<int>(re.rows())
                                     : static_cast<int>(cx.rows()); }
    double trace() const;
};

HermitianMatrix sample_wigner(const EnsembleSpec& spec, RngStream& stream);

// standardized draw (mean 0, variance 1) from a real family
double draw_standard_real(const EntryDistribution& d, RngStream& stream);

} // namespace mesocov
