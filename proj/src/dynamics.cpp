#include "toricsym/dynamics.hpp"
#include "toricsym/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>

namespace toricsym {

// ---- forms ------------------------------------------------------------------

OmegaField OmegaField::constant(Mat m) {
    OmegaField w;
    w.kind = Kind::Constant;
    SymplecticSpace check(m);
    w.matrix = std::move(m);
    return w;
}

OmegaField OmegaField::parabolic(PolynomialExpr alpha, PolynomialExpr P, PolynomialExpr Q, PolynomialExpr R) {
    OmegaField w;
    w.kind = Kind::Parabolic;
    w.alpha = std::move(alpha);
    w.P = std::move(P);
    w.Q = std::move(Q);
    w.R = std::move(R);
    return w;
}

bool OmegaField::closed(const std::vector<std::string>& coords) const {
    if (is_constant()) return true;
    auto P4 = P.with_vars(coords), Q4 = Q.with_vars(coords), R4 = R.with_vars(coords);
    PolynomialExpr div = P4.derivative(2) + Q4.derivative(3) + R4.derivative(0);
    return div.to_float().chop(1e-14).is_zero();
}

namespace {

CMat parabolic_form(cd dalpha, cd P, cd Q, cd R) {
    CMat W = CMat::Zero(4, 4);
    W(0, 1) = dalpha;
    W(1, 0) = -dalpha;
    W(0, 2) = Q;
    W(2, 0) = -Q;
    W(0, 3) = -P;
    W(3, 0) = P;
    W(2, 3) = R;
    W(3, 2) = -R;
    return W;
}

}  // namespace

CMat PolynomialSystem::form_at(const CVec& x) const {
    if (omega.is_constant()) return omega.matrix.cast<cd>();
    auto a = omega.alpha.with_vars(coords);
    return parabolic_form(a.derivative(0).eval(x), omega.P.with_vars(coords).eval(x),
                          omega.Q.with_vars(coords).eval(x), omega.R.with_vars(coords).eval(x));
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    // Golub-Welsch on the Jacobi matrix of the Legendre recurrence.
    Mat J = Mat::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        double b = k / std::sqrt(4.0 * k * k - 1.0);
        J(k, k - 1) = J(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(J);
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
        nodes[i] = 0.5 * (es.eigenvalues()(i) + 1.0);
        double v = es.eigenvectors()(0, i);
        weights[i] = v * v;  // sums to 1 on [0,1]
    }
}

namespace {
// Eigen's dot() conjugates its left argument; the forms here are complex bilinear.
cd bilinear(const CVec& x, const CMat& W, const CVec& v) { return (x.transpose() * W * v)(0, 0); }
}  // namespace

cd PolynomialSystem::primitive(const CVec& x, const CVec& v) const {
    if (omega.is_constant()) return 0.5 * bilinear(x, omega.matrix.cast<cd>(), v);
    // alpha(l) dphi plus the radial homotopy primitive of the (l, x, y) part.
    static thread_local std::vector<double> gn, gw;
    if (gn.empty()) gauss_legendre(24, gn, gw);
    auto a = omega.alpha.with_vars(coords);
    cd out = a.eval(x) * v(1);
    CVec u = x;
    u(1) = 0;
    CVec vu = v;
    vu(1) = 0;
    auto P4 = omega.P.with_vars(coords), Q4 = omega.Q.with_vars(coords), R4 = omega.R.with_vars(coords);
    for (size_t k = 0; k < gn.size(); ++k) {
        CVec tu = gn[k] * u;
        CMat W = parabolic_form(0.0, P4.eval(tu), Q4.eval(tu), R4.eval(tu));
        out += gw[k] * gn[k] * bilinear(u, W, vu);
    }
    return out;
}

// ---- compiled evaluation ----------------------------------------------------

CompiledSystem::CompiledSystem(const PolynomialSystem& sys, bool with_hessians)
    : sys_(std::make_shared<const PolynomialSystem>(sys)), dim_(sys.dim()), n_(sys.n()), hess_(with_hessians) {
    // Gather every monomial once through a map, then compile against the final table.
    std::map<Monomial, int> table;
    std::vector<PolynomialExpr> vals, grads, hessians;
    for (auto& f0 : sys_->components) {
        PolynomialExpr f = f0.with_vars(sys_->coords);
        vals.push_back(f);
        for (int k = 0; k < dim_; ++k) {
            PolynomialExpr g = f.derivative(k);
            grads.push_back(g);
            if (hess_)
                for (int l = 0; l < dim_; ++l) hessians.push_back(g.derivative(l));
        }
    }
    std::vector<PolynomialExpr> om;
    if (!sys_->omega.is_constant()) {
        om.push_back(sys_->omega.alpha.with_vars(sys_->coords).derivative(0));
        om.push_back(sys_->omega.P.with_vars(sys_->coords));
        om.push_back(sys_->omega.Q.with_vars(sys_->coords));
        om.push_back(sys_->omega.R.with_vars(sys_->coords));
    } else {
        const_inv_ = sys_->omega.matrix.inverse().cast<cd>();
    }
    auto reg = [&](const std::vector<PolynomialExpr>& ps, std::vector<Sparse>& out) {
        for (auto& p : ps) {
            Sparse s;
            for (auto& [m, c] : p.terms_cd()) {
                auto [it, inserted] = table.emplace(m, static_cast<int>(monos_.size()));
                if (inserted) {
                    monos_.push_back(m);
                    for (auto e : m) maxdeg_ = std::max<int>(maxdeg_, e);
                }
                s.terms.emplace_back(it->second, c);
            }
            out.push_back(std::move(s));
        }
    };
    reg(vals, vals_);
    reg(grads, grads_);
    reg(hessians, hessians_);
    reg(om, omega_parts_);
}

std::vector<cd> CompiledSystem::eval_monos(const CVec& x) const {
    std::vector<std::vector<cd>> pw(dim_, std::vector<cd>(maxdeg_ + 1));
    for (int v = 0; v < dim_; ++v) {
        pw[v][0] = 1;
        for (int k = 1; k <= maxdeg_; ++k) pw[v][k] = pw[v][k - 1] * x(v);
    }
    std::vector<cd> mv(monos_.size());
    for (size_t i = 0; i < monos_.size(); ++i) {
        cd t = 1;
        const auto& m = monos_[i];
        for (int v = 0; v < dim_; ++v)
            if (m[v]) t *= pw[v][m[v]];
        mv[i] = t;
    }
    return mv;
}

cd CompiledSystem::apply(const Sparse& s, const std::vector<cd>& mv) {
    cd acc = 0;
    for (auto& [i, c] : s.terms) acc += c * mv[i];
    return acc;
}

CVec CompiledSystem::values(const CVec& x) const {
    auto mv = eval_monos(x);
    CVec out(n_);
    for (int i = 0; i < n_; ++i) out(i) = apply(vals_[i], mv);
    return out;
}

CMat CompiledSystem::gradients(const CVec& x) const {
    auto mv = eval_monos(x);
    CMat G(dim_, n_);
    for (int i = 0; i < n_; ++i)
        for (int k = 0; k < dim_; ++k) G(k, i) = apply(grads_[i * dim_ + k], mv);
    return G;
}

CMat CompiledSystem::form_inverse(const CVec& x) const {
    if (sys_->omega.is_constant()) return const_inv_;
    auto mv = eval_monos(x);
    CMat W = parabolic_form(apply(omega_parts_[0], mv), apply(omega_parts_[1], mv), apply(omega_parts_[2], mv),
                            apply(omega_parts_[3], mv));
    return W.inverse();
}

CMat CompiledSystem::fields(const CVec& x) const {
    auto mv = eval_monos(x);
    CMat G(dim_, n_);
    for (int i = 0; i < n_; ++i)
        for (int k = 0; k < dim_; ++k) G(k, i) = apply(grads_[i * dim_ + k], mv);
    if (sys_->omega.is_constant()) return const_inv_ * G;
    CMat W = parabolic_form(apply(omega_parts_[0], mv), apply(omega_parts_[1], mv), apply(omega_parts_[2], mv),
                            apply(omega_parts_[3], mv));
    return W.partialPivLu().solve(G);
}

CMat CompiledSystem::field_jacobian(const CVec& x, const CVec& a) const {
    if (sys_->omega.is_constant() && hess_) {
        auto mv = eval_monos(x);
        CMat Hs = CMat::Zero(dim_, dim_);
        for (int i = 0; i < n_; ++i) {
            if (a(i) == cd(0, 0)) continue;
            for (int k = 0; k < dim_; ++k)
                for (int l = 0; l < dim_; ++l) Hs(k, l) += a(i) * apply(hessians_[(i * dim_ + k) * dim_ + l], mv);
        }
        return const_inv_ * Hs;
    }
    CMat J(dim_, dim_);
    for (int l = 0; l < dim_; ++l) {
        double h = 1e-6 * std::max(1.0, std::abs(x(l)));
        CVec xp = x, xm = x;
        xp(l) += h;
        xm(l) -= h;
        J.col(l) = (fields(xp) * a - fields(xm) * a) / (2 * h);
    }
    return J;
}

// ---- integration ------------------------------------------------------------

namespace {

struct State {
    CVec x;
    CMat phi;
};

double err_norm(const CVec& e, const CVec& y0, const CVec& y1, double tol) {
    double m = 0;
    for (int i = 0; i < e.size(); ++i) {
        double sc = tol + tol * std::max(std::abs(y0(i)), std::abs(y1(i)));
        m = std::max(m, std::abs(e(i)) / sc);
    }
    return m;
}

CVec pack(const CVec& x, const CMat& phi, bool var) {
    if (!var) return x;
    CVec y(x.size() + phi.size());
    y.head(x.size()) = x;
    y.tail(phi.size()) = Eigen::Map<const CVec>(phi.data(), phi.size());
    return y;
}

}  // namespace

Trajectory integrate_flow(const CompiledSystem& cs, const CVec& a, const CVec& x0, const std::vector<double>& times,
                          const FlowOptions& opt) {
    const int d = cs.dim();
    if (x0.size() != d) throw error("MalformedInput", "initial point has wrong dimension");
    if (a.size() != cs.n()) throw error("MalformedInput", "coefficient vector has wrong length");
    const bool var = opt.variational;
    auto rhs = [&](const CVec& y) -> CVec {
        CVec x = y.head(d);
        CVec dx = cs.fields(x) * a;
        if (!var) return dx;
        CMat J = cs.field_jacobian(x, a);
        Eigen::Map<const CMat> phi(y.data() + d, d, d);
        CMat dphi = J * phi;
        CVec out(d + d * d);
        out.head(d) = dx;
        out.tail(d * d) = Eigen::Map<const CVec>(dphi.data(), d * d);
        return out;
    };
    auto energy = [&](const CVec& x) -> cd { return (cs.values(x).transpose() * a)(0, 0); };

    Trajectory tr;
    CVec y = pack(x0, CMat::Identity(d, d), var);
    double t = 0;
    const cd H0 = energy(x0);
    auto record = [&](double tt) {
        tr.t.push_back(tt);
        tr.x.push_back(y.head(d));
        if (var) tr.jacobian.push_back(Eigen::Map<const CMat>(y.data() + d, d, d));
        if (opt.check_energy) tr.energy_drift = std::max(tr.energy_drift, std::abs(energy(y.head(d)) - H0));
    };
    if (a.isZero(0)) {
        for (double tt : times) {
            t = tt;
            record(tt);
        }
        return tr;
    }

    // Dormand-Prince 5(4) tableau.
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
    (void)c2; (void)c3; (void)c4; (void)c5;

    double h = opt.initial_step;
    CVec k1 = rhs(y);
    for (double target : times) {
        const double dir = target >= t ? 1.0 : -1.0;
        while (std::abs(target - t) > 1e-15 * std::max(1.0, std::abs(target))) {
            if (++tr.steps > opt.max_steps) throw error("StepFailure", "step budget exhausted");
            if (opt.implicit_midpoint) {
                double hs = std::min(opt.midpoint_step, std::abs(target - t)) * dir;
                CVec ynew = y + hs * rhs(y);
                bool ok = false;
                for (int it = 0; it < 100; ++it) {
                    CVec next = y + hs * rhs(0.5 * (y + ynew));
                    double delta = (next - ynew).cwiseAbs().maxCoeff();
                    ynew = next;
                    if (delta <= 1e-15 * std::max(1.0, ynew.cwiseAbs().maxCoeff())) {
                        ok = true;
                        break;
                    }
                }
                if (!ok) throw error("StepFailure", "implicit midpoint iteration did not converge");
                y = ynew;
                t += hs;
                if (!y.allFinite() || y.head(d).cwiseAbs().maxCoeff() > opt.blowup)
                    throw error("StepFailure", "trajectory left the domain at t=" + std::to_string(t));
                continue;
            }
            double hs = std::min(std::abs(h), std::abs(target - t)) * dir;
            CVec k2 = rhs(y + hs * (a21 * k1));
            CVec k3 = rhs(y + hs * (a31 * k1 + a32 * k2));
            CVec k4 = rhs(y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
            CVec k5 = rhs(y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            CVec k6 = rhs(y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            CVec ynew = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            CVec k7 = rhs(ynew);
            CVec err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            double en = err_norm(err, y, ynew, opt.tol);
            if (!ynew.allFinite()) en = 1e10;
            if (en <= 1.0) {
                t += hs;
                y = ynew;
                k1 = k7;
                if (y.head(d).cwiseAbs().maxCoeff() > opt.blowup)
                    throw error("StepFailure", "trajectory escaped (|x| > " + std::to_string(opt.blowup) +
                                                   ") at t=" + std::to_string(t));
            }
            double fac = en > 0 ? 0.9 * std::pow(en, -0.2) : 5.0;
            h = std::abs(hs) * std::clamp(fac, 0.2, 5.0);
            if (en > 1.0 && h < 1e-13 * std::max(1.0, std::abs(t)))
                throw error("StepFailure", "step size underflow at t=" + std::to_string(t));
        }
        t = target;
        record(target);
    }
    if (opt.check_energy && tr.energy_drift > 100 * opt.tol * std::max(1.0, std::abs(H0)))
        throw error("ToleranceNotMet", "energy drift " + std::to_string(tr.energy_drift));
    return tr;
}

Trajectory integrate_flow(const CompiledSystem& cs, const CVec& a, const CVec& x0, double t_final,
                          const FlowOptions& opt) {
    return integrate_flow(cs, a, x0, std::vector<double>{t_final}, opt);
}

Trajectory integrate_flow(const PolynomialExpr& H, cd c, const SymplecticSpace& space,
                          const std::vector<std::string>& coords, const CVec& x0, double t_final,
                          const FlowOptions& opt) {
    PolynomialSystem sys;
    sys.coords = coords;
    sys.omega = OmegaField::constant(space.form);
    sys.components = {H};
    CompiledSystem cs(sys, opt.variational);
    CVec a(1);
    a(0) = c;
    return integrate_flow(cs, a, x0, t_final, opt);
}

CVec wrapped_difference(const PolynomialSystem& sys, const CVec& a, const CVec& b) {
    CVec d = a - b;
    for (int k : sys.periodic) {
        double re = std::remainder(d(k).real(), 2 * M_PI);
        d(k) = cd(re, d(k).imag());
    }
    return d;
}

// ---- commuting check ----------------------------------------------------------

CommutingReport verify_commuting(const PolynomialSystem& sys, int samples, unsigned seed, double threshold) {
    CommutingReport rep;
    int maxdeg = 0;
    for (auto& f : sys.components) maxdeg = std::max(maxdeg, f.degree());
    if (sys.omega.is_constant() && maxdeg <= 12) {
        rep.symbolic = true;
        for (int i = 0; i < sys.n(); ++i)
            for (int j = i + 1; j < sys.n(); ++j) {
                auto b = poisson_bracket(sys.components[i], sys.components[j], sys.omega.matrix, sys.coords);
                rep.residual = std::max(rep.residual, b.max_abs_coeff());
            }
    } else {
        CompiledSystem cs(sys, false);
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int s = 0; s < samples; ++s) {
            CVec x(sys.dim());
            for (int k = 0; k < sys.dim(); ++k) {
                auto [lo, hi] = k < static_cast<int>(sys.box.size()) ? sys.box[k] : std::pair<double, double>{-1, 1};
                x(k) = lo + (hi - lo) * u(rng);
            }
            CMat G = cs.gradients(x);
            CMat X = cs.fields(x);
            // {f_i, f_j} = df_j(X_{f_i})
            CMat B = G.transpose() * X;
            rep.residual = std::max(rep.residual, B.cwiseAbs().maxCoeff());
        }
        rep.samples = samples;
    }
    if (rep.residual > threshold)
        throw error("NotIntegrable", "bracket residual " + std::to_string(rep.residual));
    return rep;
}

std::string trajectory_csv(const PolynomialSystem& sys, const Trajectory& tr) {
    bool complex = false;
    for (auto& x : tr.x)
        if (x.imag().cwiseAbs().maxCoeff() > 0) complex = true;
    std::ostringstream os;
    os << "t";
    for (auto& c : sys.coords) {
        os << "," << c;
        if (complex) os << ",im_" << c;
    }
    os << "\n";
    char buf[64];
    for (size_t i = 0; i < tr.t.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", tr.t[i]);
        os << buf;
        for (int k = 0; k < tr.x[i].size(); ++k) {
            std::snprintf(buf, sizeof buf, ",%.17g", tr.x[i](k).real());
            os << buf;
            if (complex) {
                std::snprintf(buf, sizeof buf, ",%.17g", tr.x[i](k).imag());
                os << buf;
            }
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace toricsym
