#include "toricsym/scaling.hpp"
#include "toricsym/errors.hpp"

#include <cmath>

namespace toricsym {

namespace {

using Vars = std::vector<std::string>;

PolynomialExpr var(const Vars& v, const std::string& name) { return PolynomialExpr::variable(v, name); }
PolynomialExpr num(const Vars& v, const mpq_class& q) { return PolynomialExpr::constant(v, GaussQ(q)); }

PolynomialExpr monomial(const Vars& v, const Monomial& m, const GaussQ& c) {
    PolynomialExpr p = PolynomialExpr::constant(v, c);
    for (size_t i = 0; i < m.size(); ++i)
        if (m[i]) p *= PolynomialExpr::variable(v, static_cast<int>(i)).pow(m[i]);
    return p;
}

// Reduces p modulo sym^k = R, R free of sym.
PolynomialExpr reduce(PolynomialExpr p, int sym, int k, const PolynomialExpr& R) {
    const Vars& v = p.vars();
    for (;;) {
        PolynomialExpr low = num(v, 0), high = num(v, 0);
        bool any = false;
        for (auto& [m, c] : p.exact_terms()) {
            if (m[sym] >= k) {
                Monomial q = m;
                q[sym] -= k;
                high += monomial(v, q, c);
                any = true;
            } else {
                low += monomial(v, m, c);
            }
        }
        if (!any) return p;
        p = low + high * R;
    }
}

PolynomialExpr re_power(const Vars& v, int s) {
    return parse_hamiltonian("re(z^" + std::to_string(s) + ")", v, {{"z", "x", "y"}});
}

PolynomialExpr abs2(const Vars& v) { return var(v, "x") * var(v, "x") + var(v, "y") * var(v, "y"); }

// f with b~ and the |z|^4 coefficient supplied as polynomials over v.
PolynomialExpr family(const Vars& v, int s, int sign, const PolynomialExpr& bt, const PolynomialExpr& a) {
    auto x = var(v, "x"), y = var(v, "y");
    if (s == 1) return x * x + y.pow(3) + bt * y;
    if (s == 2) return x * x + y.pow(4).scaled(GaussQ(sign)) + bt * y * y;
    if (s == 3) return re_power(v, 3) + bt * abs2(v);
    return re_power(v, s) + a * abs2(v).pow(2) + bt * abs2(v);
}

PolynomialExpr substitute(const PolynomialExpr& f, const Vars& v, const PolynomialExpr& sx, const PolynomialExpr& sy) {
    std::vector<PolynomialExpr> images;
    for (auto& name : v) {
        if (name == "x") images.push_back(sx * var(v, "x"));
        else if (name == "y") images.push_back(sy * var(v, "y"));
        else images.push_back(var(v, name));
    }
    return f.compose(images);
}

}  // namespace

PolynomialExpr parse_b1(const std::string& text) { return parse_hamiltonian(text, {"lambda"}); }

double eval_b1(const PolynomialExpr& b1, double lambda) {
    Eigen::VectorXcd x(1);
    x(0) = lambda;
    return b1.with_vars({"lambda"}).eval(x).real();
}

ScalingRecord normal_form_scaling(const ScalingInput& in) {
    const int s = in.s;
    if (s < 1) throw error("InvalidParams", "need s >= 1");
    if (in.b1.is_zero() || !in.b1.exact()) throw error("InvalidParams", "b1 must be a nonzero exact polynomial in lambda");
    if (!(eval_b1(in.b1, 0) > 0)) throw error("InvalidParams", "need b1(0) > 0");
    if (s == 2 && in.sign != 1 && in.sign != -1) throw error("InvalidParams", "sign must be +1 or -1");
    if (in.a_target && s != 4) throw error("InvalidParams", "a target only applies to s = 4");
    if (s == 4) {
        if (in.a_tilde * in.a_tilde == 1) throw error("InvalidParams", "need a^2 != 1 for s = 4");
        if (in.a_target) {
            const mpq_class& t = *in.a_target;
            if (t * t == 1) throw error("InvalidParams", "need a^2 != 1 for s = 4");
            if ((abs(in.a_tilde) > 1) != (abs(t) > 1))
                throw error("BranchUnavailable", "|a| - 1 changes sign: the fibrations have different topology");
        }
    }
    if (s >= 5 && in.a_tilde <= 0) throw error("InvalidParams", "need a > 0 for s >= 5");

    ScalingRecord r;
    r.s = s;
    const Vars v = {"x", "y", "lambda", "beta"};
    const int bi = 3;
    auto lam = var(v, "lambda"), beta = var(v, "beta");
    auto b1 = in.b1.with_vars(v);
    auto a = num(v, in.a_tilde);

    const Vars v0 = {"x", "y", "lambda"};
    r.before = family(v0, s, in.sign, var(v0, "lambda") * in.b1.with_vars(v0), num(v0, in.a_tilde));

    PolynomialExpr fhat = family(v, s, in.sign, lam * b1, a);
    PolynomialExpr identity;
    if (s >= 3) {
        r.root = s - 2;
        r.u_exp = r.v_exp = mpq_class(-1, s - 2);
        r.w_exp = mpq_class(-s, s - 2);
        // x^ = beta x', so w f^ = beta^-s f^(beta z').
        auto scaled = substitute(fhat, v, beta, beta);
        auto target = family(v, s, in.sign, lam, num(v, 0));
        identity = scaled - beta.pow(s) * target;
        if (s >= 4) {
            r.a_hat_exp = mpq_class(4 - s, s - 2);
            // beta^s a^ |z|^4 with a^ = a~ beta^(4-s)
            identity -= a * beta.pow(4) * abs2(v).pow(2);
        }
    } else {
        r.root = 4;
        r.u_exp = mpq_class(-2 - s, 4);
        r.v_exp = mpq_class(-1, 2);
        r.w_exp = mpq_class(-2 - s, 2);
        auto scaled = substitute(fhat, v, beta.pow(2 + s), beta.pow(2));
        identity = scaled - beta.pow(4 + 2 * s) * family(v, s, in.sign, lam, num(v, 0));
    }
    r.remainder2 = reduce(identity, bi, r.root, b1);
    if (s >= 4) {
        const Vars va = {"x", "y", "lambda", "a_hat"};
        r.after = family(va, s, in.sign, var(va, "lambda"), var(va, "a_hat"));
    } else {
        r.after = family(v0, s, in.sign, var(v0, "lambda"), num(v0, 0));
    }
    r.verified = r.remainder2.is_zero();

    if (s >= 5) {
        // z' = sigma z'', sigma = 1/t, sigma^(s-4) = a^ (generic symbol A).
        r.step3 = true;
        r.t_exp = mpq_class(-1, s - 4);
        const Vars w = {"x", "y", "lambda", "sigma", "A"};
        auto sg = var(w, "sigma"), A = var(w, "A"), l = var(w, "lambda");
        auto f2 = re_power(w, s) + A * abs2(w).pow(2) + l * abs2(w);
        auto f3 = re_power(w, s) + abs2(w).pow(2);
        // t^s f2(z'/t) = f3(z'') + lambda'' |z''|^2 with lambda'' = t^(s-2) lambda
        auto id3 = substitute(f2, w, sg, sg) - sg.pow(s) * f3 - l * sg.pow(2) * abs2(w);
        r.remainder3 = reduce(id3, 3, s - 4, A);
        r.verified = r.verified && r.remainder3.is_zero();
    }
    return r;
}

json scaling_to_json(const ScalingRecord& r, const PolynomialExpr& b1, double lambda0) {
    double b = eval_b1(b1, lambda0);
    auto pw = [&](const mpq_class& e) { return std::pow(b, e.get_d()); };
    json j = {{"s", r.s},
              {"b1", to_string(b1)},
              {"lambda", lambda0},
              {"u", {{"exponent", rational_to_json(r.u_exp)}, {"value", pw(r.u_exp)}}},
              {"v", {{"exponent", rational_to_json(r.v_exp)}, {"value", pw(r.v_exp)}}},
              {"w", {{"exponent", rational_to_json(r.w_exp)}, {"value", pw(r.w_exp)}}},
              {"before", to_string(r.before)},
              {"after", to_string(r.after)},
              {"remainder", to_string(r.remainder2)},
              {"verified", r.verified}};
    if (r.step3) {
        j["a_hat_exponent"] = rational_to_json(r.a_hat_exp);
        j["t_exponent"] = rational_to_json(r.t_exp);
        j["remainder_step3"] = to_string(r.remainder3);
    }
    return j;
}

}  // namespace toricsym
