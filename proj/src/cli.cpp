#include "toricsym/cli.hpp"

#include "toricsym/errors.hpp"
#include "toricsym/persistence.hpp"
#include "toricsym/report.hpp"
#include "toricsym/scaling.hpp"
#include "toricsym/symplectic.hpp"
#include "toricsym/zoo.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace toricsym {

namespace {

struct ModelArgs {
    std::string input, zoo_name;
    std::string s, l, p, q, a, sign, eps;
    std::vector<std::string> extra;  // k=v

    void add(CLI::App* c, bool with_input, bool with_zoo = true, bool with_eps = true) {
        if (with_input) c->add_option("input", input, "system descriptor (JSON)");
        if (with_zoo) c->add_option("--zoo", zoo_name, "zoo model name");
        c->add_option("--s", s);
        c->add_option("--l", l);
        c->add_option("--p", p);
        c->add_option("--q", q);
        c->add_option("--a", a);
        c->add_option("--sign", sign);
        if (with_eps) c->add_option("--eps", eps, "focus-focus deformation");
        c->add_option("--param", extra, "extra zoo parameter k=v");
    }

    json params() const {
        json j = json::object();
        auto put = [&](const char* k, const std::string& v) {
            if (v.empty()) return;
            try {
                j[k] = json::parse(v);
            } catch (const json::exception&) {
                throw error("InvalidParams", std::string("parameter '") + k + "' is not a number: " + v);
            }
        };
        put("s", s);
        put("l", l);
        put("p", p);
        put("q", q);
        put("a", a);
        put("sign", sign);
        put("eps", eps);
        for (auto& kv : extra) {
            auto at = kv.find('=');
            if (at == std::string::npos) throw error("InvalidParams", "expected k=v, got '" + kv + "'");
            put(kv.substr(0, at).c_str(), kv.substr(at + 1));
        }
        return j;
    }

    ZooEntry entry() const {
        if (zoo_name.empty()) throw error("InvalidParams", "--zoo is required");
        return zoo(zoo_name, params());
    }

    SystemDescriptor descriptor() const {
        if (!input.empty() && !zoo_name.empty()) throw error("InvalidParams", "give either a file or --zoo");
        if (!input.empty()) return load_descriptor(input);
        return entry().system;
    }
};

struct GridArg {
    double lo = 0, hi = 0;
    int count = 0;
};

GridArg parse_grid(const std::string& text) {
    GridArg g;
    char c1 = 0, c2 = 0;
    std::istringstream is(text);
    if (!(is >> g.lo >> c1 >> g.hi >> c2 >> g.count) || c1 != ':' || c2 != ':' || g.count < 1 || !is.eof())
        throw error("InvalidParams", "grid must be lo:hi:N, got '" + text + "'");
    return g;
}

mpq_class parse_rational(const std::string& text, const char* what) {
    mpq_class q;
    if (q.set_str(text, 10) != 0) throw error("InvalidParams", std::string(what) + " must be a rational p/q, got '" + text + "'");
    q.canonicalize();
    return q;
}

void emit(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

struct Seeded {
    ZooEntry entry;
    PolynomialSystem sys;
    std::unique_ptr<CompiledSystem> cs;
    ZooSeed seed;
    std::vector<CVec> grid;
};

Seeded seeded(const ModelArgs& m, int seed_index, const std::string& grid_text) {
    Seeded s{m.entry(), {}, nullptr, {}, {}};
    if (s.entry.seeds.empty()) throw error("InvalidParams", "model '" + s.entry.name + "' has no periodic seed");
    if (seed_index < 0 || seed_index >= static_cast<int>(s.entry.seeds.size()))
        throw error("InvalidParams", "seed index out of range");
    s.seed = s.entry.seeds[seed_index];
    s.sys = build_system(s.entry.system);
    s.cs = std::make_unique<CompiledSystem>(s.sys);
    GridArg g{s.seed.lo, s.seed.hi, s.seed.count};
    if (!grid_text.empty()) g = parse_grid(grid_text);
    s.grid = seed_grid(s.seed, s.cs->values(s.seed.point), g.lo, g.hi, g.count);
    return s;
}

std::string cstr(cd x) {
    if (x.imag() == 0) return fmt17(x.real());
    return fmt17(x.real()) + (x.imag() < 0 ? "-" : "+") + fmt17(std::abs(x.imag())) + "i";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"toricsym: singular orbits, resonances and action functions of integrable systems"};
    app.require_subcommand(1);
    std::string format;

    // classify
    auto* c_classify = app.add_subcommand("classify", "Williamson type and resonances at the expansion point");
    ModelArgs m_classify;
    m_classify.add(c_classify, true);
    long conj_seed = -1;
    bool quotient = false;
    c_classify->add_option("--conjugate-seed", conj_seed, "classify after a random symplectic change of basis");
    c_classify->add_flag("--quotient-cycles", quotient, "identify twisting rows up to cycles of the elliptic lattice");
    c_classify->add_option("--format", format)->check(CLI::IsMember({"json", "csv", "table"}));

    // action
    auto* c_action = app.add_subcommand("action", "action functions along a momentum grid");
    ModelArgs m_action;
    m_action.add(c_action, false);
    int seed_index = 0;
    std::string grid_text, method = "loop";
    double tol = default_tol(), quad_tol = 1e-8, curl_tol = 1e-5;
    int substeps = 32, gauss = 10;
    c_action->add_option("--seed-index", seed_index, "which periodic seed of the model");
    c_action->add_option("--grid", grid_text, "lo:hi:N along the seed axis");
    c_action->add_option("--method", method)->check(CLI::IsMember({"loop", "monodromy", "both"}));
    c_action->add_option("--tol", tol, "orbit closure tolerance (TORICSYM_TOL)");
    c_action->add_option("--quad-tol", quad_tol, "loop quadrature tolerance");
    c_action->add_option("--substeps", substeps, "continuation steps between grid points");
    c_action->add_option("--gauss-nodes", gauss, "Gauss-Legendre nodes for the monodromy integral");
    c_action->add_option("--curl-tol", curl_tol);
    c_action->add_option("--format", format)->check(CLI::IsMember({"json", "csv", "table"}));

    // persist
    auto* c_persist = app.add_subcommand("persist", "action error under small integrable perturbations");
    ModelArgs m_persist;
    m_persist.add(c_persist, false, true, false);
    std::vector<double> eps_list;
    unsigned long seed = 1;
    int jobs = 1;
    bool equivariant = false, invariance = false, no_generator = false, no_recombiner = false;
    c_persist->add_option("--eps", eps_list, "comma separated perturbation sizes")->delimiter(',');
    c_persist->add_option("--seed", seed, "recipe seed");
    c_persist->add_option("--jobs", jobs, "concurrent perturbation sizes");
    c_persist->add_option("--seed-index", seed_index);
    c_persist->add_option("--grid", grid_text);
    c_persist->add_option("--tol", tol);
    c_persist->add_flag("--equivariant", equivariant, "build the generator from invariants of the normal planes");
    c_persist->add_flag("--no-generator", no_generator);
    c_persist->add_flag("--no-recombiner", no_recombiner);
    c_persist->add_flag("--invariance", invariance, "compare discrete data at the perturbed fixed point instead");
    c_persist->add_option("--format", format)->check(CLI::IsMember({"json", "csv", "table"}));

    // witness
    auto* c_witness = app.add_subcommand("witness", "loop integrals of the dual forms on a singular fibre");
    ModelArgs m_witness;
    m_witness.add(c_witness, false);
    double chart = -1, lip = -1, wtol = 1e-8;
    c_witness->add_option("--chart-radius", chart);
    c_witness->add_option("--lipschitz", lip);
    c_witness->add_option("--tol", wtol);
    c_witness->add_option("--format", format)->check(CLI::IsMember({"json", "csv", "table"}));

    // zoo
    auto* c_zoo = app.add_subcommand("zoo", "built-in models");
    c_zoo->require_subcommand(1);
    auto* c_list = c_zoo->add_subcommand("list", "model names");
    auto* c_emit = c_zoo->add_subcommand("emit", "system descriptor of a model");
    ModelArgs m_emit;
    c_emit->add_option("name", m_emit.zoo_name)->required();
    m_emit.add(c_emit, false, false);
    c_list->add_option("--format", format)->check(CLI::IsMember({"json", "csv", "table"}));

    // scale
    auto* c_scale = app.add_subcommand("scale", "scalings to the parabolic normal form");
    int s = 5, sign = 1;
    std::string b1 = "1", a_text = "1", a_target;
    double lambda0 = 0;
    c_scale->add_option("--s", s);
    c_scale->add_option("--b1", b1, "b1(lambda), positive at 0");
    c_scale->add_option("--a", a_text, "coefficient of |z|^4 (rational)");
    c_scale->add_option("--a-target", a_target, "s = 4: requested coefficient");
    c_scale->add_option("--sign", sign);
    c_scale->add_option("--lambda", lambda0, "where to evaluate the scalings");
    c_scale->add_option("--format", format)->check(CLI::IsMember({"json", "csv", "table"}));

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (c_classify->parsed()) {
            SystemDescriptor d = m_classify.descriptor();
            std::string name = d.name.empty() ? "system" : d.name;
            LinearData data = linearize(d);
            ClassificationReport rep = classify(data);
            if (conj_seed >= 0) {
                std::mt19937_64 rng(static_cast<unsigned long>(conj_seed));
                Mat P = random_symplectic(data.space.n(), rng);
                ClassificationReport rc = classify(conjugate(data, P));
                if (!(canonical_model(rc, quotient) == canonical_model(rep, quotient)) ||
                    williamson_string(rc) != williamson_string(rep))
                    throw error("ConjugationMismatch", "canonical data changed under a symplectic change of basis");
                rep = rc;
            }
            if (format == "json") {
                json j = report_to_json(rep, quotient);
                j["case"] = name;
                j["params"] = d.params;
                if (conj_seed >= 0) j["conjugate_seed"] = conj_seed;
                emit(out, j);
            } else if (format == "csv") {
                out << report_csv(name, rep, quotient);
            } else {
                out << report_table(name, rep, quotient);
            }
            return 0;
        }

        if (c_action->parsed()) {
            auto sd = seeded(m_action, seed_index, grid_text);
            OrbitOptions oo;
            oo.tol = tol;
            auto orbit = find_periodic_orbit(*sd.cs, sd.seed.point, sd.seed.coeffs, std::nullopt, oo);
            ActionOptions ao;
            ao.orbit = oo;
            ao.quad_tol = quad_tol;
            ao.substeps = substeps;
            MonodromyOptions mo;
            mo.gauss_nodes = gauss;
            mo.curl_tol = curl_tol;
            std::optional<ActionSample> L, M;
            if (method != "monodromy") L = action_function(*sd.cs, orbit, sd.grid, ao);
            if (method != "loop") M = monodromy_action(*sd.cs, orbit, sd.grid, mo);
            double diff = 0;
            if (L && M)
                for (size_t k = 0; k < L->I.size(); ++k) diff = std::max(diff, std::abs(L->I[k] - M->I[k]));
            if (format == "json") {
                json j = {{"model", sd.entry.name}, {"params", sd.entry.params}, {"seed", sd.seed.label}};
                if (L) j["loop"] = action_to_json(*L);
                if (M) j["monodromy"] = action_to_json(*M);
                if (L && M) j["max_difference"] = diff;
                emit(out, j);
            } else if (L && M) {
                out << "z,I_loop,I_monodromy\n";
                for (size_t k = 0; k < L->I.size(); ++k)
                    out << cstr(sd.grid[k](sd.seed.axis)) << ',' << cstr(L->I[k]) << ',' << cstr(M->I[k]) << '\n';
                if (format == "table") out << "max difference " << fmt17(diff) << '\n';
            } else {
                out << action_csv(L ? *L : *M);
            }
            return 0;
        }

        if (c_persist->parsed()) {
            ZooEntry e = m_persist.entry();
            if (invariance) {
                double eps = eps_list.empty() ? 1e-3 : eps_list.front();
                auto r = make_recipe(e.system, eps, seed, equivariant, !no_generator, !no_recombiner);
                auto rep = discrete_data_invariance(e.system, r);
                if (format == "json") {
                    emit(out, invariance_to_json(rep));
                } else {
                    out << "same,displacement,williamson_before,williamson_after\n"
                        << (rep.same ? "true" : "false") << ',' << fmt17(rep.displacement) << ','
                        << rep.williamson_before << ',' << rep.williamson_after << '\n';
                }
                return rep.same ? 0 : 1;
            }
            if (eps_list.empty()) eps_list = {1e-2, 5e-3, 2.5e-3, 1.25e-3};
            auto sd = seeded(m_persist, seed_index, grid_text);
            PersistenceOptions po;
            po.seed = seed;
            po.jobs = jobs;
            po.equivariant = equivariant;
            po.with_generator = !no_generator;
            po.with_recombiner = !no_recombiner;
            po.action.orbit.tol = tol;
            auto t = persistence_experiment(sd.entry.system, sd.seed.point, sd.seed.coeffs, sd.grid, eps_list, po);
            if (format == "json") emit(out, persistence_to_json(t));
            else out << persistence_csv(t);
            return 0;
        }

        if (c_witness->parsed()) {
            ZooEntry e = m_witness.entry();
            if (!e.has_witness) throw error("InvalidParams", "model '" + e.name + "' has no witness loop");
            auto sys = build_system(e.system);
            CompiledSystem cs(sys);
            auto w = periodicity_witness(cs, e.witness.singular_point, e.witness.loop,
                                         chart > 0 ? chart : e.witness.chart_radius,
                                         lip > 0 ? lip : e.witness.lipschitz, wtol);
            if (format == "json" || format.empty()) {
                json j = witness_to_json(w);
                j["model"] = e.name;
                j["params"] = e.params;
                emit(out, j);
            } else {
                out << "model,theta1,length,path_regular,verdict\n"
                    << e.name << ',' << cstr(w.theta1) << ',' << fmt17(w.length) << ','
                    << (w.path_regular ? "true" : "false") << ',' << w.verdict << '\n';
            }
            return 0;
        }

        if (c_list->parsed()) {
            if (format == "json") {
                json j = json::array();
                for (auto& n : zoo_names()) j.push_back({{"name", n}, {"summary", zoo(n).summary}});
                emit(out, j);
            } else {
                for (auto& n : zoo_names()) out << n << "  " << zoo(n).summary << '\n';
            }
            return 0;
        }
        if (c_emit->parsed()) {
            emit(out, descriptor_to_json(m_emit.entry().system));
            return 0;
        }

        if (c_scale->parsed()) {
            ScalingInput in;
            in.s = s;
            in.b1 = parse_b1(b1);
            in.a_tilde = parse_rational(a_text, "--a");
            in.sign = sign;
            if (!a_target.empty()) in.a_target = parse_rational(a_target, "--a-target");
            auto r = normal_form_scaling(in);
            json j = scaling_to_json(r, in.b1, lambda0);
            if (format == "json" || format.empty()) {
                emit(out, j);
            } else {
                out << "s,u,v,w,verified\n"
                    << s << ',' << fmt17(j["u"]["value"].get<double>()) << ',' << fmt17(j["v"]["value"].get<double>())
                    << ',' << fmt17(j["w"]["value"].get<double>()) << ',' << (r.verified ? "true" : "false") << '\n';
            }
            return r.verified ? 0 : 1;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.is_classification() ? 2 : 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace toricsym
