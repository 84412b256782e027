#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace toricsym {

using cd = std::complex<double>;
using Monomial = std::vector<std::uint16_t>;

// Exact Gaussian rational re + i im.
struct GaussQ {
    mpq_class re{0}, im{0};
    GaussQ() = default;
    GaussQ(mpq_class r, mpq_class i = 0) : re(std::move(r)), im(std::move(i)) {
        re.canonicalize();
        im.canonicalize();
    }
    bool is_zero() const { return re == 0 && im == 0; }
    cd to_cd() const { return {re.get_d(), im.get_d()}; }
    GaussQ operator*(const GaussQ& o) const { return {re * o.re - im * o.im, re * o.im + im * o.re}; }
    GaussQ operator+(const GaussQ& o) const { return {re + o.re, im + o.im}; }
    GaussQ operator-() const { return {-re, -im}; }
    bool operator==(const GaussQ& o) const { return re == o.re && im == o.im; }
};

// Multivariate polynomial over named real variables with either exact Gaussian
// rational coefficients or complex double coefficients.  Mixed arithmetic falls back
// to doubles.
class PolynomialExpr {
public:
    using ExactTerms = std::map<Monomial, GaussQ>;
    using FloatTerms = std::map<Monomial, cd>;

    PolynomialExpr() = default;
    explicit PolynomialExpr(std::vector<std::string> vars) : vars_(std::move(vars)) {}

    static PolynomialExpr constant(const std::vector<std::string>& vars, const GaussQ& c);
    static PolynomialExpr constant_float(const std::vector<std::string>& vars, cd c);
    static PolynomialExpr variable(const std::vector<std::string>& vars, int index);
    static PolynomialExpr variable(const std::vector<std::string>& vars, const std::string& name);

    const std::vector<std::string>& vars() const { return vars_; }
    int nvars() const { return static_cast<int>(vars_.size()); }
    bool exact() const { return exact_; }
    const ExactTerms& exact_terms() const { return ex_; }
    const FloatTerms& float_terms() const { return fl_; }
    size_t size() const { return exact_ ? ex_.size() : fl_.size(); }
    bool is_zero() const { return size() == 0; }
    int degree() const;
    bool is_real() const;

    // Terms as complex doubles regardless of mode.
    std::vector<std::pair<Monomial, cd>> terms_cd() const;

    PolynomialExpr to_float() const;
    PolynomialExpr with_vars(const std::vector<std::string>& vars) const;

    PolynomialExpr operator+(const PolynomialExpr& o) const;
    PolynomialExpr operator-(const PolynomialExpr& o) const;
    PolynomialExpr operator*(const PolynomialExpr& o) const;
    PolynomialExpr operator-() const;
    PolynomialExpr& operator+=(const PolynomialExpr& o) { return *this = *this + o; }
    PolynomialExpr& operator-=(const PolynomialExpr& o) { return *this = *this - o; }
    PolynomialExpr& operator*=(const PolynomialExpr& o) { return *this = *this * o; }
    PolynomialExpr scaled(const GaussQ& c) const;
    PolynomialExpr scaled(cd c) const;
    PolynomialExpr pow(int k) const;

    PolynomialExpr derivative(int var) const;
    PolynomialExpr real_part() const;
    PolynomialExpr imag_part() const;
    PolynomialExpr conj() const;

    // Replace every variable by the given polynomial (all over a common variable set).
    PolynomialExpr compose(const std::vector<PolynomialExpr>& images) const;

    // Drop float coefficients with modulus below eps.
    PolynomialExpr chop(double eps) const;
    // Terms for which keep(monomial, coefficient) holds, in either mode.
    template <class Pred>
    PolynomialExpr filtered(Pred keep) const {
        PolynomialExpr p = *this;
        if (exact_) {
            for (auto it = p.ex_.begin(); it != p.ex_.end();)
                it = keep(it->first, it->second.to_cd()) ? std::next(it) : p.ex_.erase(it);
        } else {
            for (auto it = p.fl_.begin(); it != p.fl_.end();)
                it = keep(it->first, it->second) ? std::next(it) : p.fl_.erase(it);
        }
        return p;
    }

    // Is the polynomial a constant; if so return it.
    bool constant_value(GaussQ& out) const;

    cd eval(const Eigen::VectorXcd& x) const;
    double max_abs_coeff() const;

    bool operator==(const PolynomialExpr& o) const;
    bool operator!=(const PolynomialExpr& o) const { return !(*this == o); }

private:
    std::vector<std::string> vars_;
    bool exact_ = true;
    ExactTerms ex_;
    FloatTerms fl_;

    friend std::pair<PolynomialExpr, PolynomialExpr> align(const PolynomialExpr&, const PolynomialExpr&);
};

std::pair<PolynomialExpr, PolynomialExpr> align(const PolynomialExpr& a, const PolynomialExpr& b);

// Canonical text; reparses to the same term map.
std::string to_string(const PolynomialExpr& p);

// {f,g} = grad f^T W^{-T} grad g over the coordinate variables (in form order).
PolynomialExpr poisson_bracket(const PolynomialExpr& f, const PolynomialExpr& g, const Eigen::MatrixXd& form,
                               const std::vector<std::string>& coords);

// Complex alias z = x + i y.
struct ComplexAlias {
    std::string name, re, im;
};

// Parses text in the Hamiltonian grammar into a polynomial over `vars`.
PolynomialExpr parse_hamiltonian(const std::string& text, const std::vector<std::string>& vars,
                                 const std::vector<ComplexAlias>& aliases = {});

}  // namespace toricsym
