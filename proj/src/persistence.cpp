#include "toricsym/persistence.hpp"
#include "toricsym/errors.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <sstream>

namespace toricsym {

namespace {

std::vector<int> normal_of(const SystemDescriptor& d) {
    if (!d.normal.empty()) return d.normal;
    std::vector<int> all(d.coords.size());
    for (size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    return all;
}

bool is_periodic(const SystemDescriptor& d, int i) {
    return std::find(d.periodic.begin(), d.periodic.end(), i) != d.periodic.end();
}

double sup_on(const PolynomialExpr& p, const std::vector<CVec>& pts) {
    double s = 0;
    for (auto& x : pts) s = std::max(s, std::abs(p.eval(x)));
    return s;
}

GaussQ rat(const mpq_class& q) { return GaussQ(q); }

}  // namespace

bool constant_form(const PolynomialSystem& sys, Mat& W) {
    if (sys.omega.is_constant()) {
        W = sys.omega.matrix;
        return true;
    }
    GaussQ c;
    auto da = sys.omega.alpha.with_vars(sys.coords).derivative(0);
    if (!da.constant_value(c) || !sys.omega.P.is_zero() || !sys.omega.Q.is_zero() ||
        !sys.omega.R.constant_value(c))
        return false;
    W = sys.form_at(CVec::Zero(sys.dim())).real();
    return true;
}

std::vector<CVec> sample_points(const PolynomialSystem& sys, unsigned long seed) {
    const int dim = sys.dim();
    auto range = [&](int k) {
        return k < static_cast<int>(sys.box.size()) ? sys.box[k] : std::pair<double, double>{-1, 1};
    };
    std::vector<CVec> pts;
    if (dim == 2 && !sys.complexified) {
        auto [a0, b0] = range(0);
        auto [a1, b1] = range(1);
        for (int i = 0; i <= 40; ++i)
            for (int j = 0; j <= 40; ++j) {
                CVec x(2);
                x << a0 + (b0 - a0) * i / 40.0, a1 + (b1 - a1) * j / 40.0;
                pts.push_back(x);
            }
        return pts;
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 1);
    for (int s = 0; s < 400; ++s) {
        CVec x(dim);
        for (int k = 0; k < dim; ++k) {
            auto [lo, hi] = range(k);
            if (sys.complexified) {
                double c = (lo + hi) / 2, r = (hi - lo) / 2 * std::sqrt(u(rng)), t = 2 * M_PI * u(rng);
                x(k) = c + std::polar(r, t);
            } else {
                x(k) = lo + (hi - lo) * u(rng);
            }
        }
        pts.push_back(x);
    }
    return pts;
}

PerturbationRecipe make_recipe(const SystemDescriptor& d, double eps, unsigned long seed, bool equivariant,
                               bool with_generator, bool with_recombiner) {
    PerturbationRecipe r;
    r.eps = eps;
    r.seed = seed;
    r.equivariant = equivariant;
    std::mt19937_64 rng(seed);
    auto coef = [&] {
        int k = 0;
        while (k == 0) k = std::uniform_int_distribution<int>(-4, 4)(rng);
        return GaussQ(mpq_class(k, 4));
    };
    const auto& coords = d.coords;
    auto var = [&](int i) { return PolynomialExpr::variable(coords, i); };

    // Building blocks with their degrees.
    std::vector<std::pair<PolynomialExpr, int>> blocks;
    auto normal = normal_of(d);
    for (int i = 0; i < static_cast<int>(coords.size()); ++i) {
        if (is_periodic(d, i)) continue;
        bool is_normal = std::find(normal.begin(), normal.end(), i) != normal.end();
        if (!equivariant || !is_normal) blocks.push_back({var(i), 1});
    }
    if (equivariant)
        for (size_t j = 0; j + 1 < normal.size(); j += 2)
            blocks.push_back({var(normal[j]) * var(normal[j]) + var(normal[j + 1]) * var(normal[j + 1]), 2});

    r.generator = PolynomialExpr::constant(coords, GaussQ(0));
    if (with_generator && !blocks.empty()) {
        const int nb = static_cast<int>(blocks.size());
        // Without symmetry there is always a linear term, so the fixed point moves.
        if (!equivariant) r.generator += blocks[std::uniform_int_distribution<int>(0, nb - 1)(rng)].first.scaled(coef());
        const int terms = equivariant ? 4 : 5;
        for (int t = 0; t < terms; ++t) {
            // Random product of blocks with total degree 1..4.
            int target = std::uniform_int_distribution<int>(1, 4)(rng);
            PolynomialExpr m = PolynomialExpr::constant(coords, GaussQ(1));
            int deg = 0;
            for (int tries = 0; tries < 8 && deg < target; ++tries) {
                auto& b = blocks[std::uniform_int_distribution<int>(0, nb - 1)(rng)];
                if (deg + b.second > target) continue;
                m = m * b.first;
                deg += b.second;
            }
            if (deg == 0) continue;
            r.generator += m.scaled(coef());
        }
    }
    const int n = static_cast<int>(d.integrals.size());
    std::vector<std::string> zs;
    for (int i = 0; i < n; ++i) zs.push_back("z" + std::to_string(i + 1));
    for (int i = 0; i < n; ++i) {
        PolynomialExpr q = PolynomialExpr::constant(zs, GaussQ(0));
        if (with_recombiner)
            for (int j = 0; j < n; ++j)
                for (int k = j; k < n; ++k)
                    q += (PolynomialExpr::variable(zs, j) * PolynomialExpr::variable(zs, k)).scaled(coef());
        r.recombiner.push_back(q);
    }
    return r;
}

PerturbedSystem perturb_system(const PolynomialSystem& sys, const PerturbationRecipe& r, int min_order,
                               int max_order) {
    PerturbedSystem out;
    out.system = sys;
    if (r.eps == 0) return out;
    if (r.eps < 0) throw error("InvalidParams", "eps must be nonnegative");
    const mpq_class e = rational_approx(r.eps, 1000000000L);
    auto pts = sample_points(sys);
    const int n = sys.n();

    std::vector<PolynomialExpr> G;
    for (auto& f : sys.components) G.push_back(f.with_vars(sys.coords));
    // chi acts on the target, so chi o (F o phi) = (chi o F) o phi; composing first keeps degrees low.
    if (!r.recombiner.empty()) {
        if (static_cast<int>(r.recombiner.size()) != n) throw error("InvalidParams", "recombiner size mismatch");
        std::vector<PolynomialExpr> H;
        for (int i = 0; i < n; ++i) H.push_back(G[i] + r.recombiner[i].compose(G).scaled(rat(e)));
        G = H;
    }
    Mat W;
    bool phi = !r.generator.is_zero() && constant_form(sys, W);
    if (phi) {
        auto g = r.generator.with_vars(sys.coords);
        std::vector<double> radius(sys.dim(), 1.0);
        for (int k = 0; k < sys.dim() && k < static_cast<int>(sys.box.size()); ++k)
            radius[k] = std::max(std::abs(sys.box[k].first), std::abs(sys.box[k].second));
        // Monomials contributing less than 1e-18 on the box are dropped; their total is
        // added to the reported truncation.
        double dropped = 0;
        auto prune = [&](const PolynomialExpr& p) {
            return p.filtered([&](const Monomial& m, cd c) {
                double s = std::abs(c);
                for (size_t v = 0; v < m.size(); ++v) s *= std::pow(radius[v], m[v]);
                if (s >= 1e-18) return true;
                dropped += s;
                return false;
            });
        };
        const double cap = r.eps * r.eps / 10;
        int order = 0;
        for (int i = 0; i < n; ++i) {
            PolynomialExpr sum = G[i], term = G[i];
            int k = 1;
            double next = 0;
            for (;; ++k) {
                term = prune(poisson_bracket(g, term, W, sys.coords).scaled(rat(e / k)));
                if (k > min_order) {
                    next = sup_on(term, pts);
                    if (next <= cap) break;
                    if (k > max_order)
                        throw error("TruncationResidual", "Lie series term " + std::to_string(k) + " is " +
                                                              std::to_string(next) + " on the box");
                }
                sum += term;
            }
            order = std::max(order, k - 1);
            out.truncation = std::max(out.truncation, next);
            G[i] = sum;
        }
        out.truncation += dropped;
        out.order = order;
        out.phi_applied = true;
    }
    out.system.components = G;
    for (int i = 0; i < n; ++i) {
        auto diff = G[i] - sys.components[i].with_vars(sys.coords);
        out.closeness = std::max(out.closeness, sup_on(diff, pts));
    }
    out.K = out.closeness / r.eps;
    out.bracket_residual = verify_commuting(out.system, 300, 5).residual;
    return out;
}

PersistenceTable persistence_experiment(const SystemDescriptor& d, const CVec& seed_point, const CVec& seed_coeffs,
                                        const std::vector<CVec>& grid, const std::vector<double>& eps_list,
                                        const PersistenceOptions& opt) {
    PolynomialSystem sys = build_system(d);
    CompiledSystem cs(sys);
    auto seed = find_periodic_orbit(cs, seed_point, seed_coeffs, std::nullopt, opt.action.orbit);
    auto base = action_function(cs, seed, grid, opt.action);

    auto run = [&](double eps) {
        PersistenceRow row;
        row.eps = eps;
        auto r = make_recipe(d, eps, opt.seed, opt.equivariant, opt.with_generator, opt.with_recombiner);
        auto p = perturb_system(sys, r);
        row.order = p.order;
        row.closeness = p.closeness;
        CompiledSystem cs2(p.system);
        auto o = find_periodic_orbit(cs2, seed.m1, seed.a, std::nullopt, opt.action.orbit);
        auto A = action_function(cs2, o, grid, opt.action);
        for (size_t k = 0; k < grid.size(); ++k) row.err = std::max(row.err, std::abs(A.I[k] - base.I[k]));
        return row;
    };
    PersistenceTable t;
    t.rows.resize(eps_list.size());
    const int jobs = std::max(1, opt.jobs);
    for (size_t start = 0; start < eps_list.size(); start += jobs) {
        std::vector<std::future<PersistenceRow>> fs;
        for (size_t k = start; k < std::min(eps_list.size(), start + jobs); ++k)
            fs.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, run, eps_list[k]));
        for (size_t k = 0; k < fs.size(); ++k) t.rows[start + k] = fs[k].get();
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (auto& r : t.rows) {
        if (r.eps <= 0 || r.err <= 0) continue;
        double x = std::log(r.eps), y = std::log(r.err);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    t.slope = m >= 2 ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : 0.0;
    return t;
}

std::string persistence_csv(const PersistenceTable& t) {
    std::ostringstream os;
    os << "eps,err,slope\n";
    for (auto& r : t.rows) os << fmt17(r.eps) << ',' << fmt17(r.err) << ',' << fmt17(t.slope) << '\n';
    return os.str();
}

json persistence_to_json(const PersistenceTable& t) {
    json rows = json::array();
    for (auto& r : t.rows)
        rows.push_back({{"eps", r.eps}, {"err", r.err}, {"order", r.order}, {"closeness", r.closeness}});
    return {{"rows", rows}, {"slope", t.slope}};
}

InvarianceReport discrete_data_invariance(const SystemDescriptor& d, const PerturbationRecipe& r) {
    PolynomialSystem sys = build_system(d);
    const int dim = sys.dim();
    CVec x0 = CVec::Zero(dim);
    for (size_t i = 0; i < d.point.size() && i < static_cast<size_t>(dim); ++i) x0(i) = d.point[i];
    InvarianceReport rep;
    rep.before = classify(linearize(d, sys, x0));
    auto p = perturb_system(sys, r);
    auto idx = normal_of(d);
    const int m = static_cast<int>(idx.size());

    // sum c_l J~_l with fixed incommensurate weights
    std::vector<int> gens;
    for (size_t c = 0; c < d.integrals.size(); ++c)
        if (d.integrals[c].kind == "elliptic" || d.integrals[c].kind == "hyperbolic") gens.push_back(static_cast<int>(c));
    CVec x = x0;
    auto normal_grad = [&](const PolynomialExpr& f, const CVec& at) {
        CVec g(m);
        for (int i = 0; i < m; ++i) g(i) = f.derivative(idx[i]).eval(at);
        return g;
    };
    if (!gens.empty()) {
        PolynomialExpr f = PolynomialExpr::constant(d.coords, GaussQ(0));
        for (size_t k = 0; k < gens.size(); ++k)
            f += p.system.components[gens[k]].with_vars(d.coords).scaled(cd(1.0 / std::sqrt(2.0 + k), 0));
        std::vector<PolynomialExpr> df;
        for (int i = 0; i < m; ++i) df.push_back(f.derivative(idx[i]));
        double res = 0;
        for (int it = 0; it < 60; ++it) {
            CVec g(m);
            for (int i = 0; i < m; ++i) g(i) = df[i].eval(x);
            res = g.cwiseAbs().maxCoeff();
            if (res <= 1e-13) break;
            CMat H(m, m);
            for (int i = 0; i < m; ++i)
                for (int k = 0; k < m; ++k) H(i, k) = df[i].derivative(idx[k]).eval(x);
            CVec step = H.completeOrthogonalDecomposition().solve(g);
            for (int i = 0; i < m; ++i) x(idx[i]) -= step(i);
            if (step.cwiseAbs().maxCoeff() <= 1e-16) break;
        }
        if (!(res <= 1e-10)) throw error("FixedPointNotFound", "critical point residual " + std::to_string(res));
    } else {
        for (auto& f : p.system.components) {
            double g = normal_grad(f.with_vars(d.coords), x).cwiseAbs().maxCoeff();
            if (g > 1e-8) throw error("FixedPointNotFound", "the perturbation moves the orbit off the normal origin");
        }
    }
    rep.point = x;
    rep.displacement = wrapped_difference(sys, x, x0).norm();
    rep.after = classify(linearize(d, p.system, x));
    rep.williamson_before = williamson_string(rep.before);
    rep.williamson_after = williamson_string(rep.after);
    rep.same = rep.williamson_before == rep.williamson_after && canonical_model(rep.before) == canonical_model(rep.after);
    return rep;
}

json invariance_to_json(const InvarianceReport& r) {
    return {{"same", r.same},
            {"displacement", r.displacement},
            {"williamson_before", r.williamson_before},
            {"williamson_after", r.williamson_after},
            {"before", report_to_json(r.before)},
            {"after", report_to_json(r.after)}};
}

}  // namespace toricsym
