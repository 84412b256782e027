#include "toricsym/polynomial.hpp"
#include "toricsym/errors.hpp"

#include <algorithm>
#include <cstdio>

namespace toricsym {

namespace {

Monomial mono_add(const Monomial& a, const Monomial& b) {
    Monomial r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = static_cast<std::uint16_t>(a[i] + b[i]);
    return r;
}

template <class Map>
void prune(Map& m) {
    for (auto it = m.begin(); it != m.end();) {
        if constexpr (std::is_same_v<typename Map::mapped_type, GaussQ>) {
            if (it->second.is_zero()) { it = m.erase(it); continue; }
        } else {
            if (it->second == cd(0, 0)) { it = m.erase(it); continue; }
        }
        ++it;
    }
}

}  // namespace

PolynomialExpr PolynomialExpr::constant(const std::vector<std::string>& vars, const GaussQ& c) {
    PolynomialExpr p(vars);
    if (!c.is_zero()) p.ex_[Monomial(vars.size(), 0)] = c;
    return p;
}

PolynomialExpr PolynomialExpr::constant_float(const std::vector<std::string>& vars, cd c) {
    PolynomialExpr p(vars);
    p.exact_ = false;
    if (c != cd(0, 0)) p.fl_[Monomial(vars.size(), 0)] = c;
    return p;
}

PolynomialExpr PolynomialExpr::variable(const std::vector<std::string>& vars, int index) {
    PolynomialExpr p(vars);
    Monomial m(vars.size(), 0);
    m.at(index) = 1;
    p.ex_[m] = GaussQ(1);
    return p;
}

PolynomialExpr PolynomialExpr::variable(const std::vector<std::string>& vars, const std::string& name) {
    auto it = std::find(vars.begin(), vars.end(), name);
    if (it == vars.end()) throw error("UnknownVariable", name);
    return variable(vars, static_cast<int>(it - vars.begin()));
}

int PolynomialExpr::degree() const {
    int d = -1;
    auto upd = [&](const Monomial& m) {
        int s = 0;
        for (auto e : m) s += e;
        d = std::max(d, s);
    };
    if (exact_)
        for (auto& [m, c] : ex_) upd(m);
    else
        for (auto& [m, c] : fl_) upd(m);
    return d;
}

bool PolynomialExpr::is_real() const {
    if (exact_) {
        for (auto& [m, c] : ex_)
            if (c.im != 0) return false;
    } else {
        for (auto& [m, c] : fl_)
            if (c.imag() != 0) return false;
    }
    return true;
}

std::vector<std::pair<Monomial, cd>> PolynomialExpr::terms_cd() const {
    std::vector<std::pair<Monomial, cd>> out;
    if (exact_)
        for (auto& [m, c] : ex_) out.emplace_back(m, c.to_cd());
    else
        for (auto& [m, c] : fl_) out.emplace_back(m, c);
    return out;
}

PolynomialExpr PolynomialExpr::to_float() const {
    if (!exact_) return *this;
    PolynomialExpr p(vars_);
    p.exact_ = false;
    for (auto& [m, c] : ex_) p.fl_[m] = c.to_cd();
    prune(p.fl_);
    return p;
}

PolynomialExpr PolynomialExpr::with_vars(const std::vector<std::string>& vars) const {
    if (vars == vars_) return *this;
    std::vector<int> where(vars_.size());
    for (size_t i = 0; i < vars_.size(); ++i) {
        auto it = std::find(vars.begin(), vars.end(), vars_[i]);
        if (it == vars.end()) {
            bool used = false;
            for (auto& t : terms_cd())
                if (t.first[i]) used = true;
            if (used) throw error("UnknownVariable", vars_[i]);
            where[i] = -1;
        } else {
            where[i] = static_cast<int>(it - vars.begin());
        }
    }
    PolynomialExpr p(vars);
    p.exact_ = exact_;
    auto remap = [&](const Monomial& m) {
        Monomial r(vars.size(), 0);
        for (size_t i = 0; i < m.size(); ++i)
            if (where[i] >= 0) r[where[i]] = m[i];
        return r;
    };
    for (auto& [m, c] : ex_) p.ex_[remap(m)] = c;
    for (auto& [m, c] : fl_) p.fl_[remap(m)] = c;
    return p;
}

std::pair<PolynomialExpr, PolynomialExpr> align(const PolynomialExpr& a, const PolynomialExpr& b) {
    if (a.vars_ == b.vars_) return {a, b};
    std::vector<std::string> v = a.vars_;
    for (auto& s : b.vars_)
        if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
    return {a.with_vars(v), b.with_vars(v)};
}

PolynomialExpr PolynomialExpr::operator+(const PolynomialExpr& o) const {
    if (vars_ != o.vars_) {
        auto [a, b] = align(*this, o);
        return a + b;
    }
    if (exact_ && o.exact_) {
        PolynomialExpr p = *this;
        for (auto& [m, c] : o.ex_) {
            auto it = p.ex_.find(m);
            if (it == p.ex_.end()) p.ex_.emplace(m, c);
            else {
                it->second = it->second + c;
                if (it->second.is_zero()) p.ex_.erase(it);
            }
        }
        return p;
    }
    PolynomialExpr p = to_float();
    for (auto& [m, c] : o.to_float().fl_) {
        auto it = p.fl_.find(m);
        if (it == p.fl_.end()) p.fl_.emplace(m, c);
        else {
            it->second += c;
            if (it->second == cd(0, 0)) p.fl_.erase(it);
        }
    }
    return p;
}

PolynomialExpr PolynomialExpr::operator-() const {
    PolynomialExpr p = *this;
    for (auto& [m, c] : p.ex_) c = -c;
    for (auto& [m, c] : p.fl_) c = -c;
    return p;
}

PolynomialExpr PolynomialExpr::operator-(const PolynomialExpr& o) const { return *this + (-o); }

PolynomialExpr PolynomialExpr::operator*(const PolynomialExpr& o) const {
    if (vars_ != o.vars_) {
        auto [a, b] = align(*this, o);
        return a * b;
    }
    PolynomialExpr p(vars_);
    if (exact_ && o.exact_) {
        for (auto& [m1, c1] : ex_)
            for (auto& [m2, c2] : o.ex_) {
                auto& slot = p.ex_[mono_add(m1, m2)];
                slot = slot + c1 * c2;
            }
        prune(p.ex_);
        return p;
    }
    p.exact_ = false;
    auto fa = to_float(), fb = o.to_float();
    for (auto& [m1, c1] : fa.fl_)
        for (auto& [m2, c2] : fb.fl_) p.fl_[mono_add(m1, m2)] += c1 * c2;
    prune(p.fl_);
    return p;
}

PolynomialExpr PolynomialExpr::scaled(const GaussQ& c) const {
    if (!exact_) return scaled(c.to_cd());
    PolynomialExpr p(vars_);
    if (c.is_zero()) return p;
    for (auto& [m, a] : ex_) p.ex_.emplace(m, a * c);
    return p;
}

PolynomialExpr PolynomialExpr::scaled(cd c) const {
    PolynomialExpr p = to_float();
    for (auto& [m, a] : p.fl_) a *= c;
    prune(p.fl_);
    return p;
}

PolynomialExpr PolynomialExpr::pow(int k) const {
    if (k < 0) throw error("NonIntegerExponent", "negative power");
    PolynomialExpr result = exact_ ? constant(vars_, GaussQ(1)) : constant_float(vars_, 1.0);
    PolynomialExpr base = *this;
    while (k) {
        if (k & 1) result = result * base;
        k >>= 1;
        if (k) base = base * base;
    }
    return result;
}

PolynomialExpr PolynomialExpr::derivative(int var) const {
    PolynomialExpr p(vars_);
    p.exact_ = exact_;
    for (auto& [m, c] : ex_) {
        if (!m[var]) continue;
        Monomial d = m;
        d[var]--;
        p.ex_.emplace(d, c * GaussQ(mpq_class(m[var])));
    }
    for (auto& [m, c] : fl_) {
        if (!m[var]) continue;
        Monomial d = m;
        d[var]--;
        p.fl_.emplace(d, c * double(m[var]));
    }
    return p;
}

PolynomialExpr PolynomialExpr::real_part() const {
    PolynomialExpr p(vars_);
    p.exact_ = exact_;
    for (auto& [m, c] : ex_)
        if (c.re != 0) p.ex_.emplace(m, GaussQ(c.re));
    for (auto& [m, c] : fl_)
        if (c.real() != 0) p.fl_.emplace(m, cd(c.real(), 0));
    return p;
}

PolynomialExpr PolynomialExpr::imag_part() const {
    PolynomialExpr p(vars_);
    p.exact_ = exact_;
    for (auto& [m, c] : ex_)
        if (c.im != 0) p.ex_.emplace(m, GaussQ(c.im));
    for (auto& [m, c] : fl_)
        if (c.imag() != 0) p.fl_.emplace(m, cd(c.imag(), 0));
    return p;
}

PolynomialExpr PolynomialExpr::conj() const {
    PolynomialExpr p = *this;
    for (auto& [m, c] : p.ex_) c.im = -c.im;
    for (auto& [m, c] : p.fl_) c = std::conj(c);
    return p;
}

PolynomialExpr PolynomialExpr::compose(const std::vector<PolynomialExpr>& images) const {
    if (images.size() != vars_.size()) throw error("MalformedInput", "compose needs one image per variable");
    std::vector<std::string> target = images.empty() ? std::vector<std::string>{} : images[0].vars();
    std::vector<PolynomialExpr> imgs;
    for (auto& im : images) imgs.push_back(im.with_vars(target));
    std::vector<std::vector<PolynomialExpr>> powers(vars_.size());
    auto power = [&](size_t v, int e) -> const PolynomialExpr& {
        auto& pw = powers[v];
        if (pw.empty()) pw.push_back(constant(target, GaussQ(1)));
        while (static_cast<int>(pw.size()) <= e) pw.push_back(pw.back() * imgs[v]);
        return pw[e];
    };
    PolynomialExpr out(target);
    if (!exact_) out = constant_float(target, 0.0);
    for (auto& [m, c] : terms_cd()) {
        (void)c;
        PolynomialExpr t = exact_ ? constant(target, ex_.at(m)) : constant_float(target, fl_.at(m));
        for (size_t v = 0; v < m.size(); ++v)
            if (m[v]) t = t * power(v, m[v]);
        out += t;
    }
    return out;
}

PolynomialExpr PolynomialExpr::chop(double eps) const {
    if (exact_) return *this;
    PolynomialExpr p = *this;
    for (auto it = p.fl_.begin(); it != p.fl_.end();) {
        if (std::abs(it->second) < eps) it = p.fl_.erase(it);
        else ++it;
    }
    return p;
}

bool PolynomialExpr::constant_value(GaussQ& out) const {
    if (size() == 0) { out = GaussQ(0); return true; }
    if (size() > 1) return false;
    if (exact_) {
        auto& [m, c] = *ex_.begin();
        for (auto e : m)
            if (e) return false;
        out = c;
        return true;
    }
    auto& [m, c] = *fl_.begin();
    for (auto e : m)
        if (e) return false;
    out = GaussQ(mpq_class(c.real()), mpq_class(c.imag()));
    return true;
}

cd PolynomialExpr::eval(const Eigen::VectorXcd& x) const {
    cd s = 0;
    for (auto& [m, c] : terms_cd()) {
        cd t = c;
        for (size_t v = 0; v < m.size(); ++v)
            for (int k = 0; k < m[v]; ++k) t *= x(v);
        s += t;
    }
    return s;
}

double PolynomialExpr::max_abs_coeff() const {
    double m = 0;
    for (auto& [mono, c] : terms_cd()) m = std::max(m, std::abs(c));
    return m;
}

bool PolynomialExpr::operator==(const PolynomialExpr& o) const {
    if (vars_ != o.vars_) {
        auto [a, b] = align(*this, o);
        return a == b;
    }
    if (exact_ && o.exact_) return ex_ == o.ex_;
    return to_float().fl_ == o.to_float().fl_;
}

// ---- printing ---------------------------------------------------------------

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_rational(const mpq_class& q) {
    return q.get_den() == 1 ? q.get_num().get_str() : q.get_num().get_str() + "/" + q.get_den().get_str();
}

}  // namespace

std::string to_string(const PolynomialExpr& p) {
    if (p.is_zero()) return "0";
    std::string out;
    bool first = true;
    auto emit = [&](const Monomial& m, bool negative, const std::string& mag, bool mag_is_one) {
        if (first) out += negative ? "-" : "";
        else out += negative ? " - " : " + ";
        first = false;
        std::string mono;
        for (size_t v = 0; v < m.size(); ++v) {
            if (!m[v]) continue;
            if (!mono.empty()) mono += "*";
            mono += p.vars()[v];
            if (m[v] > 1) mono += "^" + std::to_string(m[v]);
        }
        if (mono.empty()) out += mag;
        else if (mag_is_one) out += mono;
        else out += mag + "*" + mono;
    };
    if (p.exact()) {
        for (auto& [m, c] : p.exact_terms()) {
            if (c.im == 0) {
                bool neg = c.re < 0;
                mpq_class a = abs(c.re);
                emit(m, neg, fmt_rational(a), a == 1);
            } else {
                emit(m, false, "(" + fmt_rational(c.re) + " + " + fmt_rational(c.im) + "*i)", false);
            }
        }
    } else {
        for (auto& [m, c] : p.float_terms()) {
            if (c.imag() == 0) {
                bool neg = std::signbit(c.real());
                double a = std::abs(c.real());
                emit(m, neg, fmt_double(a), a == 1.0);
            } else {
                emit(m, false, "(" + fmt_double(c.real()) + " + " + fmt_double(c.imag()) + "*i)", false);
            }
        }
    }
    return out;
}

// ---- Poisson bracket ------------------------------------------------------

PolynomialExpr poisson_bracket(const PolynomialExpr& f, const PolynomialExpr& g, const Eigen::MatrixXd& form,
                               const std::vector<std::string>& coords) {
    const int d = static_cast<int>(coords.size());
    if (form.rows() != d || form.cols() != d) throw error("MalformedInput", "form does not match coordinates");
    auto [fa, ga] = align(f, g);
    std::vector<std::string> vars = fa.vars();
    for (auto& c : coords)
        if (std::find(vars.begin(), vars.end(), c) == vars.end()) vars.push_back(c);
    fa = fa.with_vars(vars);
    ga = ga.with_vars(vars);
    std::vector<int> idx(d);
    for (int i = 0; i < d; ++i) idx[i] = static_cast<int>(std::find(vars.begin(), vars.end(), coords[i]) - vars.begin());
    Eigen::MatrixXd P = form.inverse().transpose();
    std::vector<PolynomialExpr> df(d), dg(d);
    for (int i = 0; i < d; ++i) {
        df[i] = fa.derivative(idx[i]);
        dg[i] = ga.derivative(idx[i]);
    }
    PolynomialExpr out(vars);
    if (!fa.exact() || !ga.exact()) out = PolynomialExpr::constant_float(vars, 0.0);
    for (int i = 0; i < d; ++i) {
        if (df[i].is_zero()) continue;
        for (int j = 0; j < d; ++j) {
            double pij = P(i, j);
            if (std::abs(pij) < 1e-15 || dg[j].is_zero()) continue;
            // Integral entries (all standard forms) stay exact integers.
            long k = std::lround(pij);
            mpq_class q = std::abs(pij - double(k)) < 1e-13 ? mpq_class(k) : mpq_class(pij);
            out += (df[i] * dg[j]).scaled(GaussQ(q));
        }
    }
    return out;
}

}  // namespace toricsym
