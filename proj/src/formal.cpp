#include "mesocov/formal.hpp"

#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

namespace mesocov {

ParseError::ParseError(int line_, int col_, const std::string& expected_,
                       const std::string& got)
    : std::runtime_error("parse error at " + std::to_string(line_) + ":" +
                         std::to_string(col_) + ": expected " + expected_ +
                         ", got " + (got.empty() ? "end of input" : "'" + got + "'")),
      line(line_), col(col_), expected(expected_) {}

namespace {
class Cursor {
public:
    explicit Cursor(const std::string& s) : s_(s) {}

    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) advance();
    }
    bool eof() const { return pos_ >= s_.size(); }
    char peek() const { return eof() ? '\0' : s_[pos_]; }
    bool consume(const std::string& lit) {
        if (s_.compare(pos_, lit.size(), lit) == 0) {
            for (size_t i = 0; i < lit.size(); ++i) advance();
            return true;
        }
        return false;
    }
    void expect(const std::string& lit) {
        if (!consume(lit)) fail("'" + lit + "'");
    }
    [[noreturn]] void fail(const std::string& expected) const {
        std::string got;
        if (!eof()) got = s_.substr(pos_, std::min<size_t>(8, s_.size() - pos_));
        throw ParseError(1, static_cast<int>(pos_) + 1, expected, got);
    }
    int col() const { return static_cast<int>(pos_) + 1; }

    std::string take_while(bool (*pred)(char)) {
        std::string out;
        while (!eof() && pred(peek())) {
            out += peek();
            advance();
        }
        return out;
    }

private:
    void advance() { ++pos_; }
    const std::string& s_;
    size_t pos_ = 0;
};

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_num_char(char c) {
    return is_digit(c) || c == '.' || c == '-' || c == '+' || c == 'e' || c == 'E';
}

int parse_int(Cursor& c, const std::string& what) {
    std::string digits = c.take_while(is_digit);
    if (digits.empty()) c.fail(what);
    return std::stoi(digits);
}

std::string parse_label(Cursor& c) {
    if (c.eof() || !std::isalpha(static_cast<unsigned char>(c.peek())))
        c.fail("matrix label (letter, optional '*')");
    std::string label(1, c.peek());
    c.consume(label);
    if (c.peek() == '*') {
        c.consume("*");
        label += '*';
    }
    return label;
}

std::string parse_index(Cursor& c) {
    c.expect("i");
    std::string digits = c.take_while(is_digit);
    if (digits.empty()) c.fail("index symbol iK");
    return "i" + digits;
}

Atom parse_atom(Cursor& c) {
    Atom a;
    if (c.consume("au(")) {
        a.kind = AtomKind::AngleUnderline;
        a.label = parse_label(c);
        c.expect(",");
        a.m = parse_int(c, "power m");
        c.expect(")");
    } else if (c.consume("u(")) {
        a.kind = AtomKind::Underline;
        a.label = parse_label(c);
        c.expect(",");
        a.m = parse_int(c, "power m");
        c.expect(")");
    } else if (c.consume("e(")) {
        a.kind = AtomKind::Entry;
        a.label = parse_label(c);
        c.expect(",");
        a.m = parse_int(c, "power m");
        c.expect(",");
        a.x = parse_index(c);
        c.expect(",");
        a.y = parse_index(c);
        c.expect(")");
    } else {
        c.fail("atom u(...), au(...) or e(...)");
    }
    if (a.m < 1) c.fail("power m >= 1");
    return a;
}
} // namespace

FormalMonomial parse_monomial(const std::string& text) {
    Cursor c(text);
    FormalMonomial P;
    c.skip_ws();
    c.expect("N^");
    if (c.peek() == '{') {
        c.consume("{");
        std::string raw;
        while (!c.eof() && c.peek() != '}') {
            raw += c.peek();
            c.consume(std::string(1, c.peek()));
        }
        c.expect("}");
        P.t_text = raw;
        P.t_numeric = false;
        P.t_value = std::nan("");
    } else {
        std::string num = c.take_while(is_num_char);
        if (num.empty()) c.fail("numeric power or {expr}");
        try {
            size_t used = 0;
            P.t_value = std::stod(num, &used);
            if (used != num.size()) c.fail("numeric power");
        } catch (const std::exception&) {
            c.fail("numeric power");
        }
        P.t_text = num;
        P.t_numeric = true;
    }
    c.skip_ws();
    while (c.consume("E[")) {
        std::vector<Atom> factor;
        c.skip_ws();
        while (c.peek() != ']') {
            factor.push_back(parse_atom(c));
            c.skip_ws();
        }
        c.expect("]");
        if (factor.empty()) c.fail("at least one atom in E[...]");
        P.factors.push_back(std::move(factor));
        c.skip_ws();
    }
    if (P.factors.empty()) c.fail("'E['");
    if (!c.eof()) c.fail("'E[' or end of line");
    return P;
}

std::string print_monomial(const FormalMonomial& P) {
    std::ostringstream out;
    out << "N^";
    if (P.t_numeric)
        out << P.t_text;
    else
        out << "{" << P.t_text << "}";
    for (const auto& factor : P.factors) {
        out << " E[";
        bool first = true;
        for (const Atom& a : factor) {
            if (!first) out << " ";
            first = false;
            switch (a.kind) {
                case AtomKind::Underline:
                    out << "u(" << a.label << "," << a.m << ")";
                    break;
                case AtomKind::AngleUnderline:
                    out << "au(" << a.label << "," << a.m << ")";
                    break;
                case AtomKind::Entry:
                    out << "e(" << a.label << "," << a.m << "," << a.x << ","
                        << a.y << ")";
                    break;
            }
        }
        out << "]";
    }
    return out.str();
}

NuCounters nu_counters(const FormalMonomial& P) {
    NuCounters nu;
    // occurrence count and off-diagonal flag per index symbol (entry atoms only)
    std::map<std::string, std::pair<int, bool>> idx;
    for (const auto& factor : P.factors) {
        for (const Atom& a : factor) {
            switch (a.kind) {
                case AtomKind::Underline:
                    nu.nu1 += a.m - 1;
                    if (a.m >= 2) ++nu.nu3;
                    break;
                case AtomKind::AngleUnderline:
                    nu.nu2 += a.m - 1;
                    ++nu.nu4;
                    break;
                case AtomKind::Entry: {
                    nu.nu2 += a.m - 1;
                    bool offdiag = a.x != a.y;
                    auto& ex = idx[a.x];
                    ++ex.first;
                    ex.second = ex.second || offdiag;
                    auto& ey = idx[a.y];
                    ++ey.first;
                    ey.second = ey.second || offdiag;
                    break;
                }
            }
        }
    }
    for (const auto& [name, rec] : idx) {
        if (rec.first % 2 == 1)
            ++nu.nu5;
        else if (rec.second)
            ++nu.nu6;
    }
    return nu;
}

ExponentReport exponents(const FormalMonomial& P, double alpha, double beta_exp) {
    if (!(0.0 <= beta_exp && beta_exp <= alpha && alpha < 1.0))
        throw std::invalid_argument("exponents: need 0 <= beta_exp <= alpha < 1");
    ExponentReport r;
    r.nu = nu_counters(P);
    const double n1 = r.nu.nu1, n2 = r.nu.nu2, n4 = r.nu.nu4, n5 = r.nu.nu5,
                 n6 = r.nu.nu6;
    r.b0 = alpha * (n1 + n2) - (1 - alpha) * n4 - (1 - alpha) * n5 / 4;
    r.b1 = alpha * n2 - (1 - alpha) * n4 - (1 - alpha) * n5 / 4;
    r.b = -n4 - (n5 + n6) / 2;
    r.bstar = beta_exp * n2 - (1 - beta_exp) * n4 - n5 / 2 - (1 - beta_exp) * n6 / 2;
    r.chi = std::min(alpha, 1 - alpha) / 2;
    r.chi_tilde = std::min({alpha - beta_exp, alpha / 2, (1 - alpha) / 2});
    return r;
}

void to_json(nlohmann::json& j, const ExponentReport& r) {
    j = nlohmann::json{
        {"nu", {r.nu.nu1, r.nu.nu2, r.nu.nu3, r.nu.nu4, r.nu.nu5, r.nu.nu6}},
        {"b0", r.b0},
        {"b1", r.b1},
        {"b", r.b},
        {"bstar", r.bstar},
        {"chi", r.chi},
        {"chi_tilde", r.chi_tilde},
    };
}

} // namespace mesocov
