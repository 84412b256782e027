#include "toricsym/action.hpp"
#include "toricsym/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace toricsym {

namespace {

CVec lsq(const CMat& J, const CVec& r) { return J.completeOrthogonalDecomposition().solve(r); }

double inf_norm(const CVec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// Runs a flow and turns integrator failures into the action-level error.
Trajectory flow(const CompiledSystem& cs, const CVec& a, const CVec& x0, const std::vector<double>& times,
                const FlowOptions& opt) {
    try {
        return integrate_flow(cs, a, x0, times, opt);
    } catch (const Error& e) {
        if (e.kind() == "StepFailure") throw error("IncompleteFlow", e.what());
        throw;
    }
}

double min_singular(const CMat& M) {
    Eigen::JacobiSVD<CMat> svd(M);
    auto s = svd.singularValues();
    return s.size() ? s(s.size() - 1) : 0.0;
}

}  // namespace

CVec project_to_fibre(const CompiledSystem& cs, const CVec& m, const CVec& z, int max_iter) {
    CVec x = m;
    for (int it = 0; it < max_iter; ++it) {
        CVec r = cs.values(x) - z;
        if (inf_norm(r) <= 1e-15 * std::max(1.0, inf_norm(z))) break;
        CVec dx = lsq(cs.gradients(x).transpose(), r);
        x -= dx;
        if (inf_norm(dx) <= 1e-16 * std::max(1.0, inf_norm(x))) break;
    }
    return x;
}

PeriodicOrbit find_periodic_orbit(const CompiledSystem& cs, const CVec& m_guess, const CVec& a_guess,
                                  const std::optional<CVec>& target, const OrbitOptions& opt) {
    const int d = cs.dim(), n = cs.n();
    const PolynomialSystem& sys = cs.system();
    CVec z = target ? *target : cs.values(m_guess);
    CMat grad0 = cs.gradients(m_guess);
    Eigen::JacobiSVD<CMat> svd0(grad0);
    auto sv = svd0.singularValues();
    if (sv(n - 1) <= opt.rank_tol * std::max(1.0, sv(0)))
        throw error("SingularPoint", "dF is rank deficient at the initial point");
    CMat X0 = cs.fields(m_guess);

    FlowOptions fo = opt.flow;
    fo.variational = true;
    const double T = 2 * M_PI;
    PeriodicOrbit out;
    CVec m = m_guess, a = a_guess;
    for (int it = 0; it <= opt.max_iter; ++it) {
        Trajectory tr = flow(cs, a, m, {T}, fo);
        CVec end = tr.final_point();
        CVec G = wrapped_difference(sys, end, m);
        CVec Fz = cs.values(m) - z;
        CVec gauge = X0.transpose() * (m - m_guess);
        double res = std::max({inf_norm(G), inf_norm(Fz), inf_norm(gauge)});
        out.residual_log.push_back(res);
        if (res <= opt.tol) {
            out.m1 = m;
            out.a = a;
            out.z = z;
            out.residual = res;
            out.iterations = it;
            FlowOptions plain = opt.flow;
            plain.variational = false;
            out.trajectory = flow(cs, a, m, {T}, plain);
            return out;
        }
        if (it == opt.max_iter) break;
        CMat J = CMat::Zero(2 * d + n, d + n);
        CVec r(2 * d + n);
        J.topLeftCorner(d, d) = tr.jacobian.back() - CMat::Identity(d, d);
        J.topRightCorner(d, n) = T * cs.fields(end);
        J.block(d, 0, n, d) = cs.gradients(m).transpose();
        J.block(d + n, 0, n, d) = X0.transpose();
        r << G, Fz, gauge;
        CVec step = lsq(J, r);
        m -= step.head(d);
        a -= step.tail(n);
        if (!m.allFinite() || !a.allFinite()) break;
    }
    throw error("NewtonDivergence", "closure residual " + fmt17(out.residual_log.back()) + " after " +
                                        std::to_string(out.residual_log.size() - 1) + " iterations");
}

LoopSampler curve_sampler(const LoopCurve& c) {
    return [c](int N) {
        LoopSample s;
        for (int k = 0; k < N; ++k) {
            CVec x, v;
            c(2 * M_PI * k / N, x, v);
            s.x.push_back(x);
            s.v.push_back(v);
        }
        return s;
    };
}

LoopSampler orbit_sampler(const CompiledSystem& cs, const PeriodicOrbit& orbit, const FlowOptions& opt) {
    return [&cs, orbit, opt](int N) {
        std::vector<double> times;
        for (int k = 1; k <= N; ++k) times.push_back(2 * M_PI * k / N);
        Trajectory tr = flow(cs, orbit.a, orbit.m1, times, opt);
        CVec gap = wrapped_difference(cs.system(), tr.final_point(), orbit.m1);
        if (inf_norm(gap) > 1e-8) throw error("QuadratureFailure", "loop is not closed (gap " +
                                                                      std::to_string(inf_norm(gap)) + ")");
        LoopSample s;
        s.x.push_back(orbit.m1);
        for (int k = 0; k + 1 < N; ++k) s.x.push_back(tr.x[k]);
        for (auto& x : s.x) s.v.push_back(cs.fields(x) * orbit.a);
        return s;
    };
}

OneForm primitive_form(const PolynomialSystem& sys) {
    return [&sys](const CVec& x, const CVec& v) { return sys.primitive(x, v); };
}

LoopIntegral loop_form_integral(const LoopSampler& loop, const OneForm& form, double tol, int n0, int n_max) {
    auto trapezoid = [&](int N) {
        LoopSample s = loop(N);
        cd sum = 0;
        for (int k = 0; k < N; ++k) sum += form(s.x[k], s.v[k]);
        return sum * (2 * M_PI / N);
    };
    int N = n0;
    cd prev = trapezoid(N);
    while (2 * N <= n_max) {
        cd next = trapezoid(2 * N);
        double err = std::abs(next - prev);
        N *= 2;
        if (err <= tol) return {next, err, N};
        prev = next;
    }
    throw error("QuadratureFailure", "trapezoid rule did not settle within " + std::to_string(n_max) + " points");
}

namespace {

int nearest_origin(const std::vector<CVec>& grid) {
    int best = 0;
    for (size_t k = 1; k < grid.size(); ++k)
        if (grid[k].norm() < grid[best].norm()) best = static_cast<int>(k);
    return best;
}

struct Continued {
    bool degenerate = false;
    PeriodicOrbit orbit;
    CVec point;  // fibre point when degenerate
};

Continued continue_orbit(const CompiledSystem& cs, const PeriodicOrbit& from, const CVec& z, const ActionOptions& opt) {
    Continued out;
    out.orbit = from;
    double done = 0, step = 1.0 / opt.substeps;
    const double min_step = step / std::pow(2.0, opt.max_halvings);
    const CVec z0 = from.z;
    while (done < 1.0) {
        double next = std::min(1.0, done + step);
        CVec zt = z0 + next * (z - z0);
        CVec guess = project_to_fibre(cs, out.orbit.m1, zt);
        try {
            out.orbit = find_periodic_orbit(cs, guess, out.orbit.a, zt, opt.orbit);
            done = next;
            step = std::min(step * 2, 1.0 / opt.substeps);
            continue;
        } catch (const Error& e) {
            if (e.kind() == "SingularPoint" && next == 1.0) {
                // The fibre has shrunk to an equilibrium: the loop is a point.
                CVec fz = cs.values(guess) - zt;
                double speed = inf_norm(cs.fields(guess) * out.orbit.a);
                if (inf_norm(fz) <= 1e-12 && speed <= 1e-6) {
                    out.degenerate = true;
                    out.point = guess;
                    return out;
                }
            }
            if (e.kind() != "NewtonDivergence" && e.kind() != "SingularPoint" && e.kind() != "IncompleteFlow" &&
                e.kind() != "ToleranceNotMet")
                throw;
        }
        step /= 2;
        if (step < min_step)
            throw error("ContinuationFailure", "could not continue the periodic orbit to the grid point");
    }
    return out;
}

}  // namespace

void fit_action(ActionSample& s) {
    const int n = s.z.empty() ? 0 : static_cast<int>(s.z[0].size());
    const int P = static_cast<int>(s.z.size());
    const int nq = n * (n + 1) / 2;
    const bool quad = P >= n + nq + 1;
    CMat A(P, n + (quad ? nq : 0));
    CVec b(P);
    const CVec& zb = s.z[s.base];
    for (int k = 0; k < P; ++k) {
        CVec dz = s.z[k] - zb;
        A.row(k).head(n) = dz.transpose();
        if (quad) {
            int c = n;
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) A(k, c++) = dz(i) * dz(j);
        }
        b(k) = s.I[k];
    }
    CVec coef = lsq(A, b);
    s.lambda_hat = coef.head(n);
    s.remainder = 0;
    for (int k = 0; k < P; ++k) {
        cd lin = (A.row(k).head(n) * s.lambda_hat)(0, 0);
        s.remainder = std::max(s.remainder, std::abs(s.I[k] - lin));
    }
}

ActionSample action_function(const CompiledSystem& cs, const PeriodicOrbit& seed, const std::vector<CVec>& grid,
                             const ActionOptions& opt) {
    if (grid.empty()) throw error("MalformedInput", "empty grid");
    const int P = static_cast<int>(grid.size());
    ActionSample s;
    s.z = grid;
    s.I.assign(P, 0);
    s.residual.assign(P, 0);
    s.base = nearest_origin(grid);

    std::vector<int> order(P);
    for (int k = 0; k < P; ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return (grid[i] - seed.z).norm() < (grid[j] - seed.z).norm(); });
    std::vector<PeriodicOrbit> solved;
    std::vector<bool> degenerate(P, false);
    std::vector<PeriodicOrbit> orbits(P);
    solved.push_back(seed);
    FlowOptions fo = opt.orbit.flow;
    fo.variational = false;
    const PolynomialSystem& sys = cs.system();
    for (int k : order) {
        const PeriodicOrbit* from = &solved[0];
        for (auto& o : solved)
            if ((o.z - grid[k]).norm() < (from->z - grid[k]).norm()) from = &o;
        Continued c = continue_orbit(cs, *from, grid[k], opt);
        if (c.degenerate) {
            degenerate[k] = true;
            orbits[k] = c.orbit;
            continue;
        }
        orbits[k] = c.orbit;
        s.residual[k] = c.orbit.residual;
        auto li = loop_form_integral(orbit_sampler(cs, c.orbit, fo), primitive_form(sys), opt.quad_tol);
        s.I[k] = li.value / (2 * M_PI);
        solved.push_back(c.orbit);
    }
    cd base = s.I[s.base];
    for (auto& v : s.I) v -= base;
    s.base_coeffs = orbits[s.base].a;
    fit_action(s);
    return s;
}

namespace {

struct Monodromy {
    const CompiledSystem& cs;
    const PeriodicOrbit& seed;
    const MonodromyOptions& opt;
    CMat G;

    CVec section(const CVec& z, CVec& c) const {
        const CVec& m1 = seed.m1;
        for (int it = 0; it < 100; ++it) {
            CVec m = m1 + G * c;
            CVec r = cs.values(m) - z;
            if (inf_norm(r) <= 1e-15 * std::max(1.0, inf_norm(z))) return m;
            CMat J = cs.gradients(m).transpose() * G;
            CVec dc = J.partialPivLu().solve(r);
            c -= dc;
            if (inf_norm(dc) <= 1e-16) return m1 + G * c;
        }
        CVec m = m1 + G * c;
        if (inf_norm(cs.values(m) - z) > 1e-10) throw error("SingularPoint", "transverse section lost rank");
        return m;
    }

    CVec tau(const CVec& z, const CVec& guess, CVec& c) const {
        const int n = cs.n();
        CVec m = section(z, c);
        FlowOptions fo = opt.flow;
        fo.variational = false;
        CVec target = flow(cs, seed.a, m, {2 * M_PI}, fo).final_point();
        CVec t = guess;
        for (int it = 0; it < 50; ++it) {
            CVec end = t.isZero(0) ? m : flow(cs, t, m, {1.0}, fo).final_point();
            CVec r = wrapped_difference(cs.system(), end, target);
            if (inf_norm(r) <= opt.newton_tol) return t;
            CMat J = cs.fields(end);
            if (min_singular(J) <= 1e-10) throw error("SingularPoint", "orbit directions degenerate on the section");
            CVec dt = lsq(J, r);
            t -= dt;
            if (inf_norm(dt) <= 1e-15 * std::max(1.0, inf_norm(t))) return t;
        }
        (void)n;
        throw error("NewtonDivergence", "time shift on the section did not converge");
    }
};

}  // namespace

ActionSample monodromy_action(const CompiledSystem& cs, const PeriodicOrbit& seed, const std::vector<CVec>& grid,
                              const MonodromyOptions& opt) {
    if (grid.empty()) throw error("MalformedInput", "empty grid");
    const int n = cs.n(), P = static_cast<int>(grid.size());
    Monodromy M{cs, seed, opt, cs.gradients(seed.m1)};
    if (min_singular(M.G) <= 1e-8) throw error("SingularPoint", "seed point is not regular");

    // Walks the shift from (za, ta) to zb in small steps so Newton stays on one branch.
    auto walk = [&](const CVec& za, const CVec& ta, const CVec& zb, int steps) {
        CVec t = ta, c = CVec::Zero(n);
        for (int k = 1; k <= steps; ++k) t = M.tau(za + (zb - za) * (double(k) / steps), t, c);
        return t;
    };

    ActionSample s;
    s.z = grid;
    s.I.assign(P, 0);
    s.residual.assign(P, 0);
    s.base = nearest_origin(grid);
    const CVec zb = grid[s.base];
    CVec tau_b = walk(seed.z, CVec::Zero(n), zb, 8);

    std::vector<double> gn, gw;
    gauss_legendre(opt.gauss_nodes, gn, gw);
    double curl = 0;
    for (int k = 0; k < P; ++k) {
        CVec dz = grid[k] - zb;
        cd S = 0;
        CVec t = tau_b;
        double prev = 0;
        for (size_t j = 0; j < gn.size(); ++j) {
            t = walk(zb + prev * dz, t, zb + gn[j] * dz, 2);
            prev = gn[j];
            S += gw[j] * (t.transpose() * dz)(0, 0);
        }
        CVec tk = walk(zb + prev * dz, t, grid[k], 2);
        s.I[k] = (seed.a.transpose() * dz)(0, 0) - S / (2 * M_PI);
        s.residual[k] = 0;
        if (n > 1) {
            CMat D(n, n);
            for (int i = 0; i < n; ++i) {
                CVec e = CVec::Zero(n);
                e(i) = opt.fd_step;
                CVec c = CVec::Zero(n);
                CVec tp = M.tau(grid[k] + e, tk, c);
                c.setZero();
                CVec tm = M.tau(grid[k] - e, tk, c);
                D.col(i) = (tp - tm) / (2 * opt.fd_step);
            }
            double ck = (D - D.transpose()).cwiseAbs().maxCoeff();
            s.residual[k] = ck;
            curl = std::max(curl, ck);
        }
    }
    if (curl > opt.curl_tol)
        throw error("CurlResidual", "shift functions are not closed (curl " + fmt17(curl) + ")");
    s.base_coeffs = seed.a - tau_b / (2 * M_PI);
    fit_action(s);
    return s;
}

std::string action_csv(const ActionSample& s) {
    std::ostringstream os;
    const int n = s.z.empty() ? 0 : static_cast<int>(s.z[0].size());
    bool complex = false;
    for (auto& z : s.z) complex |= z.imag().cwiseAbs().maxCoeff() > 0;
    for (auto& v : s.I) complex |= v.imag() != 0;
    for (int i = 0; i < n; ++i) os << "z" << i + 1 << (complex ? "_re,z" + std::to_string(i + 1) + "_im," : ",");
    os << (complex ? "I_re,I_im,residual\n" : "I,residual\n");
    for (size_t k = 0; k < s.z.size(); ++k) {
        for (int i = 0; i < n; ++i) {
            os << fmt17(s.z[k](i).real()) << ',';
            if (complex) os << fmt17(s.z[k](i).imag()) << ',';
        }
        os << fmt17(s.I[k].real()) << ',';
        if (complex) os << fmt17(s.I[k].imag()) << ',';
        os << fmt17(s.residual[k]) << '\n';
    }
    return os.str();
}

namespace {

json cjson(cd x) {
    if (x.imag() == 0) return x.real();
    return json{{"re", x.real()}, {"im", x.imag()}};
}

json cvec_json(const CVec& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(cjson(v(i)));
    return a;
}

}  // namespace

json action_to_json(const ActionSample& s) {
    json pts = json::array();
    for (size_t k = 0; k < s.z.size(); ++k)
        pts.push_back({{"z", cvec_json(s.z[k])}, {"I", cjson(s.I[k])}, {"residual", s.residual[k]}});
    return {{"points", pts},
            {"base", s.base},
            {"base_coeffs", cvec_json(s.base_coeffs)},
            {"lambda_hat", cvec_json(s.lambda_hat)},
            {"remainder", s.remainder}};
}

WitnessReport periodicity_witness(const CompiledSystem& cs, const CVec& m0, const LoopCurve& loop,
                                  double chart_radius, double lipschitz, double tol) {
    const int n = cs.n();
    WitnessReport w;
    // Dual coefficients c(t) with gamma'(t) = sum c_i X_i.
    auto coeffs = [&](int N, std::vector<CVec>& cs_out) {
        cs_out.clear();
        for (int k = 0; k < N; ++k) {
            CVec x, v;
            loop(2 * M_PI * k / N, x, v);
            CMat X = cs.fields(x);
            Eigen::JacobiSVD<CMat> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
            auto sv = svd.singularValues();
            if (sv(n - 1) <= 1e-8 * std::max(1.0, sv(0)))
                throw error("SingularOnLoop", "the loop meets a singular point of F");
            CVec c = svd.solve(v);
            double vn = std::max(v.norm(), 1e-300);
            w.fibre_residual = std::max(w.fibre_residual, (X * c - v).norm() / vn);
            cs_out.push_back(c);
        }
    };
    std::vector<CVec> c;
    int N = 64;
    CVec prev;
    double prev_len = 0;
    for (;; N *= 2) {
        coeffs(N, c);
        CVec sum = CVec::Zero(n);
        double len = 0;
        for (auto& ck : c) {
            sum += ck;
            len += ck.norm();
        }
        sum *= 2 * M_PI / N;
        len *= 2 * M_PI / N;
        if (prev.size() && inf_norm(sum - prev) <= 1e-10 && std::abs(len - prev_len) <= 1e-8) {
            prev = sum;
            prev_len = len;
            break;
        }
        prev = sum;
        prev_len = len;
        if (N >= (1 << 16)) throw error("QuadratureFailure", "dual-form integrals did not settle");
    }
    if (w.fibre_residual > 1e-6) throw error("LoopNotInFibre", "loop velocity leaves the span of the fields");
    for (int i = 0; i < n; ++i) w.theta.push_back(prev(i));
    w.theta1 = prev(0);
    w.length = prev_len;
    CVec m1, v1;
    loop(0.0, m1, v1);
    w.point_radius = (m1 - m0).norm();
    w.ball_radius = chart_radius * std::exp(-n * lipschitz * w.length);
    // Straight segment m0 -> m1: on the fibre and regular for u > 0.
    CVec z0 = cs.values(m0);
    w.path_regular = true;
    for (int k = 1; k <= 64 && w.path_regular; ++k) {
        CVec mu = m0 + (m1 - m0) * (k / 64.0);
        if (inf_norm(cs.values(mu) - z0) > 1e-10) w.path_regular = false;
        else if (min_singular(cs.gradients(mu)) <= 1e-12) w.path_regular = false;
    }
    if (std::abs(w.theta1) <= tol) w.verdict = "fails";
    else if (w.path_regular && w.point_radius < w.ball_radius) w.verdict = "holds";
    else w.verdict = "inconclusive";
    return w;
}

json witness_to_json(const WitnessReport& w) {
    json th = json::array();
    for (auto& t : w.theta) th.push_back(cjson(t));
    return {{"theta1", cjson(w.theta1)},
            {"theta", th},
            {"length", w.length},
            {"fibre_residual", w.fibre_residual},
            {"point_radius", w.point_radius},
            {"ball_radius", w.ball_radius},
            {"path_regular", w.path_regular},
            {"verdict", w.verdict}};
}

}  // namespace toricsym
