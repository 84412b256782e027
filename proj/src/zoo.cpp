#include "toricsym/zoo.hpp"
#include "toricsym/errors.hpp"

#include <cmath>
#include <numeric>
#include <set>

namespace toricsym {

namespace {

using cd = std::complex<double>;

Error invalid(const std::string& msg) { return error("InvalidParams", msg); }

class Params {
public:
    Params(const json& given, const json& defaults) : p_(defaults) {
        if (!given.is_object()) throw invalid("params must be an object");
        for (auto& [k, v] : given.items()) {
            if (!defaults.contains(k)) throw invalid("unknown parameter '" + k + "'");
            if (!v.is_number()) throw invalid("parameter '" + k + "' must be a number");
            p_[k] = v;
        }
    }
    long integer(const std::string& k) const {
        const auto& v = p_.at(k);
        if (!v.is_number_integer()) {
            double d = v.get<double>();
            if (d != std::floor(d)) throw invalid("parameter '" + k + "' must be an integer");
            return static_cast<long>(d);
        }
        return v.get<long>();
    }
    double real(const std::string& k) const { return p_.at(k).get<double>(); }
    const json& all() const { return p_; }

private:
    json p_;
};

std::string num(double x) {
    if (x == std::floor(x) && std::fabs(x) < 1e15) return "(" + std::to_string(static_cast<long>(x)) + ")";
    return "(" + fmt17(x) + ")";
}

void check_resonance(long s, long l, long min_s) {
    if (s < min_s) throw invalid("need s >= " + std::to_string(min_s));
    if (l < 0 || l >= s) throw invalid("need 0 <= l < s");
    if (std::gcd(s, l) != 1) throw invalid("need gcd(s, l) = 1");
}

long sign_param(const Params& p) {
    long sg = p.integer("sign");
    if (sg != 1 && sg != -1) throw invalid("sign must be +1 or -1");
    return sg;
}

GammaSpec rotation(std::vector<mpq_class> q, int order) {
    GammaSpec g;
    g.order = order;
    const int m = static_cast<int>(q.size());
    g.matrix = Mat::Zero(2 * m, 2 * m);
    for (int j = 0; j < m; ++j) {
        double t = 2 * M_PI * q[j].get_d();
        g.matrix(2 * j, 2 * j) = g.matrix(2 * j + 1, 2 * j + 1) = std::cos(t);
        g.matrix(2 * j + 1, 2 * j) = std::sin(t);
        g.matrix(2 * j, 2 * j + 1) = -std::sin(t);
    }
    g.rotations = std::move(q);
    return g;
}

CVec cvec(std::initializer_list<cd> v) {
    CVec out(v.size());
    int i = 0;
    for (auto x : v) out(i++) = x;
    return out;
}

std::vector<std::pair<double, double>> boxes(const std::vector<std::string>& coords, double half) {
    std::vector<std::pair<double, double>> b;
    for (auto& c : coords) {
        if (c.rfind("phi", 0) == 0) b.emplace_back(-M_PI, M_PI);
        else if (c[0] == 'l') b.emplace_back(-0.1, 0.1);
        else b.emplace_back(-half, half);
    }
    return b;
}

std::string rat(long a, long b) { return to_string(mpq_class(a, b)); }

// Orbit models on D^1 x S^1 x D^{2k}: coords (l, phi, normal...).
SystemDescriptor orbit_system(std::vector<std::string> normal, std::vector<ComplexAlias> aliases) {
    SystemDescriptor d;
    d.coords = {"l", "phi"};
    for (auto& c : normal) d.coords.push_back(c);
    d.aliases = std::move(aliases);
    for (size_t i = 2; i < d.coords.size(); ++i) d.normal.push_back(static_cast<int>(i));
    d.point.assign(d.coords.size(), 0.0);
    d.periodic = {1};
    d.rank = 1;
    d.box = boxes(d.coords, 0.5);
    return d;
}

SystemDescriptor rank0_system(std::vector<std::string> coords) {
    SystemDescriptor d;
    d.coords = std::move(coords);
    d.point.assign(d.coords.size(), 0.0);
    d.box = boxes(d.coords, 1.0);
    return d;
}

Mat holomorphic_form() {
    Mat w = Mat::Zero(4, 4);
    w(0, 2) = 1;
    w(2, 0) = -1;
    w(1, 3) = -1;
    w(3, 1) = 1;
    return w;
}

ZooEntry parabolic_resonance(const json& given) {
    Params p(given, {{"s", 5}, {"l", 2}});
    long s = p.integer("s"), l = p.integer("l");
    check_resonance(s, l, 5);
    ZooEntry e;
    e.summary = "parabolic orbit with resonance l/s";
    e.params = p.all();
    auto& d = e.system;
    d = orbit_system({"x", "y"}, {{"z", "x", "y"}});
    d.omega = "parabolic";
    d.integrals = {{"re(z^" + std::to_string(s) + ") + abs2(z)^2 + l*abs2(z)", "none"}, {"l", "orbit"}};
    d.gamma = {rotation({mpq_class(l, s)}, static_cast<int>(s))};
    e.has_expected = true;
    e.expected = {2, 1, 0, 0, 1, 0, 0, "no", "no", rat(l, s)};
    e.seeds = {{"I", cvec({0, 0, 0.3, 0}), cvec({0, 1}), 1, -0.1, 0.1, 21}};
    return e;
}

ZooEntry parabolic_alpha(const json& given) {
    Params p(given, {{"s", 5}, {"l", 1}});
    long s = p.integer("s"), l = p.integer("l");
    check_resonance(s, l, 5);
    ZooEntry e = parabolic_resonance({{"s", s}, {"l", l}});
    e.summary = "parabolic orbit with alpha(l) = l + l^2";
    e.params = p.all();
    e.system.alpha = "l + l^2";
    return e;
}

ZooEntry hopf_resonance(const json& given) {
    Params p(given, {{"p", 1}, {"q", 2}, {"a", 1}});
    long pp = p.integer("p"), q = p.integer("q");
    if (!(0 < pp && pp < q)) throw invalid("need 0 < p < q");
    if (std::gcd(pp, q) != 1) throw invalid("need gcd(p, q) = 1");
    if (3 * pp == q) throw invalid("need p/q != 1/3");
    ZooEntry e;
    e.summary = "integrable Hamiltonian Hopf bifurcation with resonance p:q";
    e.params = p.all();
    auto& d = e.system;
    d = orbit_system({"x1", "y1", "x2", "y2"}, {{"z1", "x1", "y1"}, {"z2", "x2", "y2"}});
    // z1^q conj(z2)^p is the monomial invariant under the flow of J.
    d.integrals = {{"re(z1^" + std::to_string(q) + " * conj(z2)^" + std::to_string(pp) + ") + " + num(p.real("a")) +
                        "*abs2(z2)^2 + l*abs2(z2)",
                    "none"},
                   {"l", "orbit"},
                   {std::to_string(pp) + "*abs2(z1)/2 + " + std::to_string(q) + "*abs2(z2)/2", "elliptic"}};
    d.gamma = {rotation({0, 0}, 1)};
    e.has_expected = true;
    e.expected = {3, 1, 1, 0, 2, 0, 0, "(" + std::to_string(pp) + ":" + std::to_string(q) + ")", "no", "(0,0)"};
    return e;
}

ZooEntry normally_elliptic(const json& given) {
    Params p(given, {{"s", 5}, {"l", 2}, {"sign", 1}});
    long s = p.integer("s"), l = p.integer("l"), sg = sign_param(p);
    check_resonance(s, l, 5);
    ZooEntry e;
    e.summary = "normally-elliptic parabolic orbit with resonance l/s";
    e.params = p.all();
    auto& d = e.system;
    d = orbit_system({"x1", "y1", "x2", "y2"}, {{"z1", "x1", "y1"}, {"z2", "x2", "y2"}});
    std::string J = "abs2(z1)/2";
    d.integrals = {{"re(z2^" + std::to_string(s) + ") + abs2(z2)^2 + (l " + (sg > 0 ? "+ " : "- ") + J +
                        ")*abs2(z2)",
                    "none"},
                   {"l", "orbit"},
                   {J, "elliptic"}};
    d.gamma = {rotation({0, mpq_class(l, s)}, static_cast<int>(s))};
    e.has_expected = true;
    e.expected_inferred = sg < 0;
    e.expected = {3, 1, 1, 0, 2, 0, 0, "(0:1)", "no", "(" + rat(l, s) + ",0)"};
    return e;
}

ZooEntry swallowtail(const json& given) {
    Params p(given, {{"l", 2}});
    long l = p.integer("l");
    if (l < 1 || l >= 5) throw invalid("need 1 <= l < 5");
    ZooEntry e;
    e.summary = "Hamiltonian swallow-tail bifurcation with resonance l/5";
    e.params = p.all();
    auto& d = e.system;
    d.coords = {"l1", "phi1", "l2", "phi2", "x", "y"};
    d.aliases = {{"z", "x", "y"}};
    d.normal = {4, 5};
    d.point.assign(6, 0.0);
    d.periodic = {1, 3};
    d.rank = 2;
    d.box = boxes(d.coords, 0.5);
    d.integrals = {{"re(z^5) + abs2(z)^3 + l2*abs2(z)^2 + l1*abs2(z)", "none"}, {"l1", "orbit"}, {"l2", "orbit"}};
    d.gamma = {rotation({mpq_class(l, 5)}, 5), rotation({0}, 1)};
    e.has_expected = true;
    e.expected = {3, 2, 0, 0, 1, 0, 0, "no", "no", rat(l, 5) + "; 0"};
    return e;
}

ZooEntry hyperbolic_hopf(const json& given) {
    Params p(given, json::object());
    ZooEntry e;
    e.summary = "hyperbolic integrable Hamiltonian Hopf bifurcation";
    e.params = p.all();
    auto& d = e.system;
    d = orbit_system({"x1", "y1", "x2", "y2"}, {});
    d.integrals = {{"x1*y2 + (x2*y1)^2 + l*x2*y1", "none"}, {"l", "orbit"}, {"x1*y1 + x2*y2", "hyperbolic"}};
    d.gamma = {rotation({0, 0}, 1)};
    e.has_expected = true;
    e.expected = {3, 1, 0, 1, 0, 2, 0, "no", "(1:1)", "(0,0)"};
    return e;
}

ZooEntry normally_hyperbolic(const json& given) {
    Params p(given, {{"s", 5}, {"l", 2}, {"sign", 1}});
    long s = p.integer("s"), l = p.integer("l"), sg = sign_param(p);
    check_resonance(s, l, 5);
    ZooEntry e;
    e.summary = "normally-hyperbolic parabolic orbit with resonance l/s";
    e.params = p.all();
    auto& d = e.system;
    d = orbit_system({"x1", "y1", "x2", "y2"}, {{"z1", "x1", "y1"}, {"z2", "x2", "y2"}});
    d.integrals = {{"re(z2^" + std::to_string(s) + ") + abs2(z2)^2 + (l " + (sg > 0 ? "+ " : "- ") +
                        "x1*y1)*abs2(z2)",
                    "none"},
                   {"l", "orbit"},
                   {"x1*y1", "hyperbolic"}};
    d.gamma = {rotation({0, mpq_class(l, s)}, static_cast<int>(s))};
    e.has_expected = true;
    e.expected_inferred = sg < 0;
    e.expected = {3, 1, 0, 1, 1, 1, 0, "no", "1", "(" + rat(l, s) + ",0)"};
    return e;
}

ZooEntry elliptic_basic(const json& given) {
    Params p(given, json::object());
    ZooEntry e;
    e.summary = "elliptic nondegenerate rank-0 point";
    e.params = p.all();
    e.system = rank0_system({"p", "q"});
    e.system.integrals = {{"(p^2 + q^2)/2", "elliptic"}};
    e.has_expected = true;
    e.expected = {1, 0, 1, 0, 1, 0, 0, "1", "no", "none"};
    e.homologically_symmetric = true;
    e.seeds = {{"f1", cvec({std::sqrt(0.2), 0}), cvec({1}), 0, 0.0, 0.2, 21}};
    return e;
}

ZooEntry hyperbolic_basic(const json& given) {
    Params p(given, json::object());
    ZooEntry e;
    e.summary = "hyperbolic nondegenerate rank-0 point";
    e.params = p.all();
    e.system = rank0_system({"p", "q"});
    e.system.integrals = {{"p*q", "hyperbolic"}};
    e.has_expected = true;
    e.expected = {1, 0, 0, 1, 0, 1, 0, "no", "1", "none"};
    e.homologically_symmetric = true;
    e.seeds = {{"i*f1", cvec({0.5, 0.2}), cvec({cd(0, 1)}), 0, 0.0, 0.2, 21}};
    return e;
}

ZooEntry focus_focus(const json& given) {
    Params p(given, {{"eps", 0.1}});
    double eps = p.real("eps");
    if (!(eps > 0)) throw invalid("need eps > 0");
    ZooEntry e;
    e.summary = "focus-focus nondegenerate rank-0 point";
    e.params = p.all();
    e.system = rank0_system({"p1", "q1", "p2", "q2"});
    e.system.integrals = {{"p1*q2 - p2*q1", "elliptic"}, {"p1*q1 + p2*q2", "hyperbolic"}};
    e.has_expected = true;
    e.expected = {2, 0, 1, 1, 0, 0, 1, "(1:-1)", "(1:1)", "none"};
    e.homologically_symmetric = true;
    CVec m1 = cvec({eps, 0, 0, 0});
    e.seeds = {{"f1", m1, cvec({1, 0}), 0, -0.01, 0.01, 11}, {"i*f2", m1, cvec({0, cd(0, 1)}), 1, -0.01, 0.01, 11}};
    e.has_witness = true;
    e.witness.singular_point = CVec::Zero(4);
    e.witness.loop = [eps](double t, CVec& x, CVec& v) {
        x = cvec({eps * std::cos(t), 0, -eps * std::sin(t), 0});
        v = cvec({-eps * std::sin(t), 0, -eps * std::cos(t), 0});
    };
    return e;
}

ZooEntry anharmonic(const json& given) {
    Params p(given, json::object());
    ZooEntry e;
    e.summary = "anharmonic oscillator";
    e.params = p.all();
    e.system = rank0_system({"p", "q"});
    e.system.integrals = {{"(p^2 + q^2)/2 + q^4", "elliptic"}};
    e.has_expected = true;
    e.expected = {1, 0, 1, 0, 1, 0, 0, "1", "no", "none"};
    e.seeds = {{"f1", cvec({std::sqrt(0.2), 0}), cvec({1}), 0, 0.0, 0.2, 21}};
    return e;
}

ZooEntry h_plus_h2(const json& given) {
    Params p(given, json::object());
    ZooEntry e;
    e.summary = "f = h + h^2 with h the harmonic oscillator";
    e.params = p.all();
    e.system = rank0_system({"p", "q"});
    e.system.integrals = {{"(p^2 + q^2)/2 + ((p^2 + q^2)/2)^2", "elliptic"}};
    e.has_expected = true;
    e.expected = {1, 0, 1, 0, 1, 0, 0, "1", "no", "none"};
    // h = 0.1 at the seed, so the 2pi-periodic generator is f / 1.2.
    e.seeds = {{"f1", cvec({std::sqrt(0.2), 0}), cvec({1 / 1.2}), 0, 0.05, 0.2, 16}};
    return e;
}

ZooEntry cusp_negative(const json& given) {
    Params p(given, json::object());
    ZooEntry e;
    e.summary = "cusp fibre with exact dual forms (no circle action)";
    e.params = p.all();
    auto& d = e.system;
    d = rank0_system({"x1", "y1", "x2", "y2"});
    d.aliases = {{"z", "x1", "y1"}, {"w", "x2", "y2"}};
    d.omega = "matrix";
    d.omega_matrix = holomorphic_form();
    d.integrals = {{"re(z^2 + w^3)", "none"}, {"im(z^2 + w^3)", "none"}};
    e.negative_witness = true;
    e.incomplete_flow = true;
    e.has_witness = true;
    e.witness.singular_point = CVec::Zero(4);
    // v = e^{it}, (z, w) = (v^3, -v^2).
    e.witness.loop = [](double t, CVec& x, CVec& v) {
        x = cvec({std::cos(3 * t), std::sin(3 * t), -std::cos(2 * t), -std::sin(2 * t)});
        v = cvec({-3 * std::sin(3 * t), 3 * std::cos(3 * t), 2 * std::sin(2 * t), -2 * std::cos(2 * t)});
    };
    return e;
}

ZooEntry hyperelliptic(const json& given) {
    Params p(given, {{"a1", -3}, {"a2", -2}, {"a3", -1}});
    double a1 = p.real("a1"), a2 = p.real("a2"), a3 = p.real("a3");
    if (!(a1 < a2 && a2 < a3 && a3 < 0)) throw invalid("need a1 < a2 < a3 < 0");
    ZooEntry e;
    e.summary = "hyperelliptic fibre with a periodic orbit away from the singular point";
    e.params = p.all();
    auto& d = e.system;
    d = rank0_system({"x1", "y1", "x2", "y2"});
    d.aliases = {{"z", "x1", "y1"}, {"w", "x2", "y2"}};
    d.omega = "matrix";
    d.omega_matrix = holomorphic_form();
    std::string P = "(w - " + num(a1) + ")*(w - " + num(a2) + ")*(w - " + num(a3) + ")*w^2";
    d.integrals = {{"re(z^2 + " + P + ")", "none"}, {"im(z^2 + " + P + ")", "none"}};
    e.incomplete_flow = true;
    e.has_witness = true;
    e.witness.singular_point = CVec::Zero(4);
    // Real loop through w in [a2, a3]: w = c + h cos t, z = h sin t sqrt(g(w)), g = (w - a1) w^2.
    double c = (a2 + a3) / 2, h = (a3 - a2) / 2;
    e.witness.loop = [=](double t, CVec& x, CVec& v) {
        double w = c + h * std::cos(t), dw = -h * std::sin(t);
        double g = (w - a1) * w * w, dg = w * w + 2 * (w - a1) * w;
        double sg = std::sqrt(g);
        double z = h * std::sin(t) * sg;
        double dz = h * std::cos(t) * sg + h * std::sin(t) * dg * dw / (2 * sg);
        x = cvec({z, 0, w, 0});
        v = cvec({dz, 0, dw, 0});
    };
    return e;
}

struct Builder {
    const char* name;
    ZooEntry (*make)(const json&);
};

const std::vector<Builder>& registry() {
    static const std::vector<Builder> r = {
        {"parabolic-resonance", parabolic_resonance},
        {"hopf-resonance", hopf_resonance},
        {"normally-elliptic", normally_elliptic},
        {"swallowtail", swallowtail},
        {"hyperbolic-hopf", hyperbolic_hopf},
        {"normally-hyperbolic", normally_hyperbolic},
        {"elliptic-basic", elliptic_basic},
        {"hyperbolic-basic", hyperbolic_basic},
        {"focus-focus", focus_focus},
        {"anharmonic", anharmonic},
        {"h-plus-h2", h_plus_h2},
        {"parabolic-alpha", parabolic_alpha},
        {"cusp-negative", cusp_negative},
        {"hyperelliptic", hyperelliptic},
    };
    return r;
}

}  // namespace

std::vector<std::string> zoo_names() {
    std::vector<std::string> out;
    for (auto& b : registry()) out.push_back(b.name);
    return out;
}

ZooEntry zoo(const std::string& name, const json& params) {
    for (auto& b : registry()) {
        if (name != b.name) continue;
        ZooEntry e = b.make(params.is_null() ? json::object() : params);
        e.name = name;
        e.system.name = name;
        e.system.params = e.params;
        if (e.homologically_symmetric) e.system.flags["homologically_symmetric"] = true;
        if (e.incomplete_flow) e.system.flags["incomplete_flow"] = true;
        if (e.negative_witness) e.system.flags["negative_witness"] = true;
        return e;
    }
    throw error("UnknownModel", "no zoo entry named '" + name + "'");
}

std::vector<CVec> seed_grid(const ZooSeed& seed, const CVec& z0, double lo, double hi, int count) {
    if (count < 1) throw invalid("grid needs at least one point");
    std::vector<CVec> out;
    for (int k = 0; k < count; ++k) {
        CVec z = z0;
        z(seed.axis) = count == 1 ? lo : lo + (hi - lo) * k / (count - 1);
        out.push_back(z);
    }
    return out;
}

}  // namespace toricsym
