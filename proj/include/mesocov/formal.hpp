#pragma once
// Formal Green-function monomials and the power-counting calculus.
//
// DSL grammar (one monomial per line):
//   MONOMIAL := "N^" POWER { "E[" ATOM+ "]" }+
//   POWER    := REAL | "{" raw text "}"        (symbolic powers kept verbatim)
//   ATOM     := "u(" LABEL "," INT ")"                 normalized trace G^m
//             | "au(" LABEL "," INT ")"                centered <G^m>
//             | "e(" LABEL "," INT "," IDX "," IDX ")" matrix entry (A^m)_xy
//   LABEL    := letter, optionally followed by "*"  (G, G*, F, F*, A, B*, ...)
//   IDX      := "i" INT
//
// The nu-counters follow the worked-example accounting: nu5/nu6 count index
// symbols by their occurrences inside entry atoms only.

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace mesocov {

enum class AtomKind { Underline, AngleUnderline, Entry };

struct Atom {
    AtomKind kind;
    std::string label;
    int m = 1;
    std::string x, y; // entry indices, empty otherwise
};

struct FormalMonomial {
    std::string t_text;      // power of N as written
    double t_value = 0.0;    // numeric value when parseable, else NaN
    bool t_numeric = true;
    std::vector<std::vector<Atom>> factors; // expectation factors
};

struct ParseError : std::runtime_error {
    int line, col;
    std::string expected;
    ParseError(int line_, int col_, const std::string& expected_,
               const std::string& got);
};

FormalMonomial parse_monomial(const std::string& text);
std::string print_monomial(const FormalMonomial& P);

struct NuCounters {
    int nu1 = 0; // sum (m-1) over underline atoms
    int nu2 = 0; // sum (m-1) over angle-underline and entry atoms
    int nu3 = 0; // underline atoms with m >= 2
    int nu4 = 0; // angle-underline atoms
    int nu5 = 0; // index symbols with an odd number of entry occurrences
    int nu6 = 0; // even-occurrence symbols with an off-diagonal occurrence
};

NuCounters nu_counters(const FormalMonomial& P);

struct ExponentReport {
    NuCounters nu;
    double b0 = 0, b1 = 0, b = 0, bstar = 0;
    double chi = 0, chi_tilde = 0;
};

// b0 = a(nu1+nu2) - (1-a)nu4 - (1-a)nu5/4;  b1 = a*nu2 - (1-a)nu4 - (1-a)nu5/4
// b  = -nu4 - (nu5+nu6)/2;  bstar = b*nu2 - (1-b)nu4 - nu5/2 - (1-b)nu6/2
// chi = min(a, 1-a)/2;  chi_tilde = min(a-b, a/2, (1-a)/2)
ExponentReport exponents(const FormalMonomial& P, double alpha, double beta_exp);

void to_json(nlohmann::json& j, const ExponentReport& r);

} // namespace mesocov
