#include "toricsym/errors.hpp"
#include "toricsym/polynomial.hpp"

#include <algorithm>
#include <cctype>

namespace toricsym {

namespace {

class Parser {
public:
    Parser(const std::string& text, const std::vector<std::string>& vars, const std::vector<ComplexAlias>& aliases)
        : s_(text), vars_(vars), aliases_(aliases) {}

    PolynomialExpr run() {
        PolynomialExpr e = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

private:
    const std::string& s_;
    const std::vector<std::string>& vars_;
    const std::vector<ComplexAlias>& aliases_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw error("SyntaxError", "at position " + std::to_string(pos_) + ": " + what);
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    PolynomialExpr expr() {
        PolynomialExpr acc = term();
        while (true) {
            if (accept('+')) acc = acc + term();
            else if (accept('-')) acc = acc - term();
            else return acc;
        }
    }

    PolynomialExpr term() {
        PolynomialExpr acc = unary();
        while (true) {
            if (accept('*')) {
                acc = acc * unary();
            } else if (accept('/')) {
                size_t at = pos_;
                PolynomialExpr d = unary();
                GaussQ c;
                if (!d.constant_value(c)) {
                    pos_ = at;
                    fail("division by a non-constant expression");
                }
                if (c.is_zero()) {
                    pos_ = at;
                    fail("division by zero");
                }
                mpq_class n = c.re * c.re + c.im * c.im;
                acc = acc.scaled(GaussQ(c.re / n, -c.im / n));
            } else {
                return acc;
            }
        }
    }

    PolynomialExpr unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return power();
    }

    PolynomialExpr power() {
        PolynomialExpr base = primary();
        if (!accept('^')) return base;
        size_t at = pos_;
        PolynomialExpr e = unary();
        GaussQ c;
        if (!e.constant_value(c) || c.im != 0 || c.re.get_den() != 1 || c.re < 0 || c.re > 10000) {
            pos_ = at;
            throw error("NonIntegerExponent", "at position " + std::to_string(at));
        }
        return base.pow(static_cast<int>(c.re.get_num().get_si()));
    }

    PolynomialExpr number() {
        size_t start = pos_;
        mpz_class mant = 0;
        long frac_digits = 0;
        bool any = false;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            mant = mant * 10 + (s_[pos_++] - '0');
            any = true;
        }
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                mant = mant * 10 + (s_[pos_++] - '0');
                ++frac_digits;
                any = true;
            }
        }
        if (!any) {
            pos_ = start;
            fail("malformed number");
        }
        long exp10 = -frac_digits;
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            size_t save = pos_++;
            int sign = 1;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) sign = s_[pos_++] == '-' ? -1 : 1;
            if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                pos_ = save;
                fail("malformed exponent");
            }
            long e = 0;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                e = e * 10 + (s_[pos_++] - '0');
                if (e > 100000) fail("exponent out of range");
            }
            exp10 += sign * e;
        }
        mpz_class p10;
        mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exp10)));
        mpq_class v = exp10 >= 0 ? mpq_class(mant * p10) : mpq_class(mant, p10);
        v.canonicalize();
        return PolynomialExpr::constant(vars_, GaussQ(v));
    }

    PolynomialExpr primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (c == '(') {
            ++pos_;
            PolynomialExpr e = expr();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            std::string name = s_.substr(start, pos_ - start);
            skip();
            bool call = pos_ < s_.size() && s_[pos_] == '(';
            if (call && (name == "re" || name == "im" || name == "abs2" || name == "conj")) {
                ++pos_;
                PolynomialExpr a = expr();
                if (!accept(')')) fail("expected ')'");
                if (name == "re") return a.real_part();
                if (name == "im") return a.imag_part();
                if (name == "conj") return a.conj();
                return a * a.conj();
            }
            if (std::find(vars_.begin(), vars_.end(), name) != vars_.end())
                return PolynomialExpr::variable(vars_, name);
            for (auto& al : aliases_)
                if (al.name == name)
                    return PolynomialExpr::variable(vars_, al.re) +
                           PolynomialExpr::variable(vars_, al.im).scaled(GaussQ(0, 1));
            if (name == "i") return PolynomialExpr::constant(vars_, GaussQ(0, 1));
            pos_ = start;
            throw error("UnknownVariable", "'" + name + "' at position " + std::to_string(start));
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }
};

}  // namespace

PolynomialExpr parse_hamiltonian(const std::string& text, const std::vector<std::string>& vars,
                                 const std::vector<ComplexAlias>& aliases) {
    for (auto& al : aliases)
        if (std::find(vars.begin(), vars.end(), al.re) == vars.end() ||
            std::find(vars.begin(), vars.end(), al.im) == vars.end())
            throw error("UnknownVariable", "alias " + al.name + " refers to undeclared coordinates");
    return Parser(text, vars, aliases).run();
}

}  // namespace toricsym
