#include "mesocov/ensemble.hpp"

#include <cmath>

namespace mesocov {

std::string family_name(Family f) {
    switch (f) {
        case Family::gaussian: return "gaussian";
        case Family::rademacher: return "rademacher";
        case Family::two_point: return "two_point";
        case Family::uniform: return "uniform";
        case Family::phase_four: return "phase_four";
    }
    return "?";
}

Family family_from_name(const std::string& s) {
    if (s == "gaussian") return Family::gaussian;
    if (s == "rademacher") return Family::rademacher;
    if (s == "two_point") return Family::two_point;
    if (s == "uniform") return Family::uniform;
    if (s == "phase_four") return Family::phase_four;
    throw std::invalid_argument("unknown entry family: " + s);
}

namespace {
// two_point support values rescaled to unit variance.
// Raw values (a, b) with b = -p a/(1-p) give mean 0; dividing by the raw
// standard deviation sqrt(p a^2 + (1-p) b^2) forces variance exactly 1.
void two_point_values(const EntryDistribution& d, double& A, double& B) {
    double a = d.a_over_sigma;
    double p = d.p;
    if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("two_point: p must be in (0,1)");
    if (a == 0.0) throw std::invalid_argument("two_point: a must be nonzero");
    double b = -p * a / (1.0 - p);
    double sd = std::sqrt(p * a * a + (1.0 - p) * b * b);
    A = a / sd;
    B = b / sd;
}

// standardized (unit-variance) third and fourth cumulants per family
void shape_cumulants(const EntryDistribution& d, double& c3, double& c4) {
    switch (d.family) {
        case Family::gaussian: c3 = 0; c4 = 0; break;
        case Family::rademacher: c3 = 0; c4 = -2.0; break;   // m4 = 1
        case Family::uniform: c3 = 0; c4 = -1.2; break;      // m4 = 9/5
        case Family::two_point: {
            double A, B;
            two_point_values(d, A, B);
            double p = d.p;
            c3 = p * A * A * A + (1 - p) * B * B * B;
            c4 = p * A * A * A * A + (1 - p) * B * B * B * B - 3.0;
            break;
        }
        case Family::phase_four:
            throw std::invalid_argument("phase_four has no real cumulants");
    }
}
} // namespace

RealCumulants entry_cumulants_real(const EntryDistribution& d) {
    double c3, c4;
    shape_cumulants(d, c3, c4);
    double s2 = d.scale * d.scale;
    return {s2, c3 * d.scale * s2, c4 * s2 * s2};
}

ComplexCumulants entry_cumulants_complex(const EntryDistribution& d) {
    double s2 = d.scale * d.scale;
    switch (d.family) {
        case Family::gaussian:
            // independent re/im parts, each variance scale^2/2:
            // E|h|^4 = 2 (E|h|^2)^2, E h^2 = 0  =>  C22 = 0
            return {s2, 0.0};
        case Family::phase_four:
            // uniform on scale*{1, i, -1, -i}: E|h|^4 = scale^4, E h^2 = 0
            return {s2, -s2 * s2};
        default: {
            // a real entry viewed as complex: C22 reduces to the real C4
            RealCumulants r = entry_cumulants_real(d);
            return {r.C2, r.C4};
        }
    }
}

EnsembleSpec EnsembleSpec::goe(int N) {
    EnsembleSpec s;
    s.beta = 1;
    s.N = N;
    s.offdiag.family = Family::gaussian;
    s.diag.family = Family::gaussian;
    return s;
}

EnsembleSpec EnsembleSpec::gue(int N) {
    EnsembleSpec s = goe(N);
    s.beta = 2;
    return s;
}

void EnsembleSpec::validate() const {
    if (N < 2) throw std::invalid_argument("EnsembleSpec: N must be >= 2");
    if (beta != 1 && beta != 2) throw std::invalid_argument("EnsembleSpec: beta must be 1 or 2");
    if (beta == 1 && offdiag.is_complex())
        throw std::invalid_argument("EnsembleSpec: beta=1 requires a real off-diagonal law");
    if (beta == 2 && offdiag.family != Family::gaussian &&
        offdiag.family != Family::phase_four)
        throw std::invalid_argument(
            "EnsembleSpec: beta=2 off-diagonal law must satisfy E h^2 = 0 "
            "(gaussian or phase_four)");
    if (diag.is_complex())
        throw std::invalid_argument("EnsembleSpec: diagonal law must be real-valued");
    if (!zeta.empty()) {
        if (static_cast<int>(zeta.size()) != N)
            throw std::invalid_argument("EnsembleSpec: zeta profile length != N");
        for (double z : zeta) {
            if (!(z >= 0.0) || z > 64.0)
                throw std::invalid_argument("EnsembleSpec: zeta_i out of [0, 64]");
        }
    }
    if (offdiag.family == Family::two_point || diag.family == Family::two_point) {
        // surface parameter problems early
        const EntryDistribution& d =
            offdiag.family == Family::two_point ? offdiag : diag;
        double A, B;
        two_point_values(d, A, B);
    }
}

namespace {
nlohmann::json dist_to_json(const EntryDistribution& d) {
    nlohmann::json j{{"family", family_name(d.family)}};
    if (d.family == Family::two_point) {
        j["p"] = d.p;
        j["a_over_sigma"] = d.a_over_sigma;
    }
    return j;
}

EntryDistribution dist_from_json(const nlohmann::json& j) {
    EntryDistribution d;
    d.family = family_from_name(j.at("family").get<std::string>());
    if (d.family == Family::two_point) {
        d.p = j.at("p").get<double>();
        d.a_over_sigma = j.at("a_over_sigma").get<double>();
    }
    return d;
}
} // namespace

void to_json(nlohmann::json& j, const EnsembleSpec& s) {
    j = nlohmann::json{
        {"beta", s.beta},
        {"N", s.N},
        {"offdiag", dist_to_json(s.offdiag)},
        {"diag", dist_to_json(s.diag)},
    };
    if (s.zeta.empty())
        j["zeta"] = "canonical";
    else
        j["zeta"] = s.zeta;
}

void from_json(const nlohmann::json& j, EnsembleSpec& s) {
    s.beta = j.at("beta").get<int>();
    s.N = j.at("N").get<int>();
    if (j.contains("offdiag")) s.offdiag = dist_from_json(j.at("offdiag"));
    if (j.contains("diag")) s.diag = dist_from_json(j.at("diag"));
    s.zeta.clear();
    if (j.contains("zeta") && j.at("zeta").is_array())
        s.zeta = j.at("zeta").get<std::vector<double>>();
    s.validate();
}

CumulantSums cumulant_sums(const EnsembleSpec& spec) {
    spec.validate();
    const int N = spec.N;
    CumulantSums out;

    // off-diagonal entries all have variance 1/N
    double off_c3, off_c4, off_c22 = 0;
    if (spec.beta == 2) {
        EntryDistribution d = spec.offdiag;
        d.scale = 1.0;
        off_c22 = entry_cumulants_complex(d).C22; // shape value at sigma=1
        off_c4 = 0;
        off_c3 = 0;
    } else {
        double c3, c4;
        shape_cumulants(spec.offdiag, c3, c4);
        off_c3 = c3;
        off_c4 = c4;
    }

    double diag_c3, diag_c4;
    shape_cumulants(spec.diag, diag_c3, diag_c4);

    const double pairs = static_cast<double>(N) * (N - 1);
    const double invN2 = 1.0 / (static_cast<double>(N) * N);

    double diag_sum_c4 = 0, diag_sum_c3 = 0;
    for (int i = 0; i < N; ++i) {
        double zi = spec.zeta_at(i);
        diag_sum_c4 += diag_c4 * zi * zi * invN2;
        diag_sum_c3 += diag_c3 * std::pow(zi / N, 1.5);
    }

    if (spec.beta == 1) {
        out.sum_C4 = pairs * off_c4 * invN2 + diag_sum_c4;
    } else {
        // Sum_{i,j} C22(H_ij); real diagonal entries contribute their C4
        out.sum_C22 = pairs * off_c22 * invN2 + diag_sum_c4;
    }
    out.sum_C3_diag = diag_sum_c3;
    return out;
}

double draw_standard_real(const EntryDistribution& d, RngStream& stream) {
    switch (d.family) {
        case Family::gaussian:
            return stream.normal();
        case Family::rademacher:
            return stream.u01() <= 0.5 ? 1.0 : -1.0;
        case Family::uniform:
            return (2.0 * stream.u01() - 1.0) * 1.7320508075688772935; // sqrt(3)
        case Family::two_point: {
            double A, B;
            two_point_values(d, A, B);
            return stream.u01() <= d.p ? A : B;
        }
        case Family::phase_four:
            throw std::invalid_argument("phase_four is not a real family");
    }
    return 0.0;
}

namespace {
std::complex<double> draw_standard_complex(const EntryDistribution& d, RngStream& stream) {
    switch (d.family) {
        case Family::gaussian: {
            // independent re/im, each variance 1/2
            const double inv_sqrt2 = 0.70710678118654752440;
            return {stream.normal() * inv_sqrt2, stream.normal() * inv_sqrt2};
        }
        case Family::phase_four: {
            double u = stream.u01();
            if (u <= 0.25) return {1, 0};
            if (u <= 0.50) return {0, 1};
            if (u <= 0.75) return {-1, 0};
            return {0, -1};
        }
        default: // real family reused as complex with E h^2 != 0 is invalid off-diagonal
            throw std::invalid_argument(
                "beta=2 off-diagonal law must satisfy E h^2 = 0 (gaussian or phase_four)");
    }
}
} // namespace

double HermitianMatrix::trace() const {
    if (beta == 1) return re.trace();
    return cx.trace().real();
}

HermitianMatrix sample_wigner(const EnsembleSpec& spec, RngStream& stream) {
    spec.validate();
    const int N = spec.N;
    const double off_scale = 1.0 / std::sqrt(static_cast<double>(N));

    HermitianMatrix H;
    H.beta = spec.beta;
    if (spec.beta == 1) {
        H.re.resize(N, N);
        for (int i = 0; i < N; ++i) {
            double di = std::sqrt(spec.zeta_at(i) / N);
            H.re(i, i) = di * draw_standard_real(spec.diag, stream);
            for (int j = i + 1; j < N; ++j) {
                double v = off_scale * draw_standard_real(spec.offdiag, stream);
                H.re(i, j) = v;
                H.re(j, i) = v;
            }
        }
    } else {
        H.cx.resize(N, N);
        for (int i = 0; i < N; ++i) {
            double di = std::sqrt(spec.zeta_at(i) / N);
            H.cx(i, i) = di * draw_standard_real(spec.diag, stream);
            for (int j = i + 1; j < N; ++j) {
                std::complex<double> v = off_scale * draw_standard_complex(spec.offdiag, stream);
                H.cx(i, j) = v;
                H.cx(j, i) = std::conj(v);
            }
        }
    }
    return H;
}

} // namespace mesocov
