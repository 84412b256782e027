#include "toricsym/io.hpp"
#include "toricsym/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace toricsym {

namespace {

Error schema(const std::string& msg) { return error("SchemaError", msg); }

int coord_index(const SystemDescriptor& d, const json& v, const std::string& field) {
    if (v.is_number_integer()) {
        int i = v.get<int>();
        if (i < 0 || i >= static_cast<int>(d.coords.size())) throw schema(field + ": index out of range");
        return i;
    }
    if (!v.is_string()) throw schema(field + ": expected coordinate name or index");
    auto s = v.get<std::string>();
    for (size_t i = 0; i < d.coords.size(); ++i)
        if (d.coords[i] == s) return static_cast<int>(i);
    throw schema(field + ": unknown coordinate '" + s + "'");
}

Mat rotation_blocks(const std::vector<mpq_class>& q) {
    const int m = static_cast<int>(q.size());
    Mat M = Mat::Zero(2 * m, 2 * m);
    for (int j = 0; j < m; ++j) {
        double t = 2 * M_PI * q[j].get_d();
        M(2 * j, 2 * j) = M(2 * j + 1, 2 * j + 1) = std::cos(t);
        M(2 * j + 1, 2 * j) = std::sin(t);
        M(2 * j, 2 * j + 1) = -std::sin(t);
    }
    return M;
}

std::vector<int> normal_indices(const SystemDescriptor& d) {
    if (!d.normal.empty()) return d.normal;
    std::vector<int> all(d.coords.size());
    for (size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    return all;
}

}  // namespace

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

json rational_to_json(const mpq_class& q) {
    return json{{"num", std::stol(q.get_num().get_str())}, {"den", std::stol(q.get_den().get_str())}};
}

mpq_class rational_from_json(const json& j) {
    if (j.is_number_integer()) return mpq_class(j.get<long>());
    if (j.is_object() && j.contains("num") && j.contains("den") && j["num"].is_number_integer() &&
        j["den"].is_number_integer()) {
        long den = j["den"].get<long>();
        if (den == 0) throw schema("rational with zero denominator");
        mpq_class q(j["num"].get<long>(), den);
        q.canonicalize();
        return q;
    }
    throw schema("expected a rational {\"num\", \"den\"}");
}

json matrix_to_json(const Mat& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(row);
    }
    return rows;
}

Mat matrix_from_json(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty()) throw schema(field + ": expected a nonempty array of rows");
    const size_t n = j.size();
    Mat m(n, n);
    for (size_t i = 0; i < n; ++i) {
        if (!j[i].is_array() || j[i].size() != n) throw schema(field + ": matrix must be square");
        for (size_t k = 0; k < n; ++k) {
            if (!j[i][k].is_number()) throw schema(field + ": entries must be numbers");
            m(i, k) = j[i][k].get<double>();
        }
    }
    return m;
}

PolynomialSystem build_system(const SystemDescriptor& d) {
    PolynomialSystem s;
    s.coords = d.coords;
    const int dim = static_cast<int>(d.coords.size());
    if (d.omega == "standard") {
        s.omega = OmegaField::constant(standard_form(dim / 2));
    } else if (d.omega == "matrix") {
        s.omega = OmegaField::constant(d.omega_matrix);
    } else {
        auto p = [&](const std::string& t) { return parse_hamiltonian(t, d.coords, d.aliases); };
        s.omega = OmegaField::parabolic(p(d.alpha), p(d.P), p(d.Q), p(d.R));
        if (!s.omega.closed(d.coords)) throw error("SchemaError", "parabolic form is not closed");
    }
    for (auto& in : d.integrals) s.components.push_back(parse_hamiltonian(in.expr, d.coords, d.aliases));
    s.periodic = d.periodic;
    s.box = d.box;
    auto it = d.flags.find("complexified");
    s.complexified = it != d.flags.end() && it->second;
    return s;
}

LinearData linearize(const SystemDescriptor& d) {
    PolynomialSystem sys = build_system(d);
    const int dim = sys.dim();
    CVec x0 = CVec::Zero(dim);
    for (size_t i = 0; i < d.point.size() && i < static_cast<size_t>(dim); ++i) x0(i) = d.point[i];
    return linearize(d, sys, x0);
}

LinearData linearize(const SystemDescriptor& d, const PolynomialSystem& sys, const CVec& x0) {
    auto idx = normal_indices(d);
    const int m = static_cast<int>(idx.size());
    Mat W = sys.form_at(x0).real();
    Mat Wn(m, m);
    for (int i = 0; i < m; ++i)
        for (int k = 0; k < m; ++k) Wn(i, k) = W(idx[i], idx[k]);
    LinearData out{SymplecticSpace(Wn)};
    out.n_total = static_cast<int>(d.integrals.size());
    out.rank = d.rank;
    for (size_t c = 0; c < d.integrals.size(); ++c) {
        const auto& kind = d.integrals[c].kind;
        if (kind != "elliptic" && kind != "hyperbolic") continue;
        auto f = sys.components[c].with_vars(d.coords);
        Mat Q(m, m);
        for (int i = 0; i < m; ++i) {
            auto fi = f.derivative(idx[i]);
            for (int k = 0; k < m; ++k) Q(i, k) = fi.derivative(idx[k]).eval(x0).real();
        }
        out.hamiltonians.push_back(
            {Q, kind == "elliptic" ? GeneratorKind::Elliptic : GeneratorKind::Hyperbolic});
    }
    for (auto& g : d.gamma) {
        if (g.matrix.rows() != m) throw error("SchemaError", "gamma matrix does not act on the normal space");
        out.action.generators.push_back(g.matrix);
        out.action.orders.push_back(g.order);
    }
    return out;
}

bool gamma_invariant(const SystemDescriptor& d) {
    auto idx = normal_indices(d);
    PolynomialSystem sys = build_system(d);
    // Pass to z, zbar on each normal plane: x = (Z + W)/2, y = (Z - W)/(2i).
    std::vector<std::string> vars = d.coords;
    std::vector<PolynomialExpr> images;
    for (size_t i = 0; i < d.coords.size(); ++i) images.push_back(PolynomialExpr::variable(vars, static_cast<int>(i)));
    const size_t planes = idx.size() / 2;
    for (size_t j = 0; j < planes; ++j) {
        int xi = idx[2 * j], yi = idx[2 * j + 1];
        auto Z = PolynomialExpr::variable(vars, xi), Wb = PolynomialExpr::variable(vars, yi);
        images[xi] = (Z + Wb).scaled(GaussQ(mpq_class(1, 2)));
        images[yi] = (Z - Wb).scaled(GaussQ(0, mpq_class(-1, 2)));
    }
    for (auto& g : d.gamma) {
        if (g.rotations.empty()) continue;
        for (auto& f0 : sys.components) {
            auto f = f0.with_vars(vars).compose(images);
            if (!f.exact()) return false;
            for (auto& [mono, c] : f.exact_terms()) {
                mpq_class phase = 0;
                for (size_t j = 0; j < planes; ++j) {
                    int a = mono[idx[2 * j]], b = mono[idx[2 * j + 1]];
                    phase += g.rotations[j] * (a - b);
                }
                if (mod1(phase) != 0) return false;
            }
        }
    }
    return true;
}

json descriptor_to_json(const SystemDescriptor& d) {
    json j;
    j["name"] = d.name;
    j["params"] = d.params;
    j["dim"] = d.coords.size();
    j["coords"] = d.coords;
    json al = json::array();
    for (auto& a : d.aliases) al.push_back({{"name", a.name}, {"re", a.re}, {"im", a.im}});
    j["aliases"] = al;
    if (d.omega == "standard") j["omega"] = "standard";
    else if (d.omega == "matrix") j["omega"] = matrix_to_json(d.omega_matrix);
    else j["omega"] = {{"parabolic", {{"alpha", d.alpha}, {"P", d.P}, {"Q", d.Q}, {"R", d.R}}}};
    json ints = json::array();
    for (auto& in : d.integrals) ints.push_back({{"expr", in.expr}, {"kind", in.kind}});
    j["integrals"] = ints;
    json normal = json::array();
    for (int i : d.normal) normal.push_back(d.coords[i]);
    j["normal"] = normal;
    j["point"] = d.point;
    json gam = json::array();
    for (auto& g : d.gamma) {
        json e{{"order", g.order}};
        if (!g.rotations.empty()) {
            json r = json::array();
            for (auto& q : g.rotations) r.push_back(rational_to_json(q));
            e["rotations"] = r;
        } else {
            e["matrix"] = matrix_to_json(g.matrix);
        }
        gam.push_back(e);
    }
    j["gamma"] = gam;
    j["rank"] = d.rank;
    json per = json::array();
    for (int i : d.periodic) per.push_back(d.coords[i]);
    j["periodic"] = per;
    json box = json::array();
    for (auto& [lo, hi] : d.box) box.push_back({lo, hi});
    j["box"] = box;
    j["flags"] = d.flags;
    return j;
}

SystemDescriptor descriptor_from_json(const json& j) {
    if (!j.is_object()) throw schema("descriptor must be an object");
    SystemDescriptor d;
    if (j.contains("name")) {
        if (!j["name"].is_string()) throw schema("name: expected string");
        d.name = j["name"];
    }
    if (j.contains("params")) {
        if (!j["params"].is_object()) throw schema("params: expected object");
        d.params = j["params"];
    }
    if (!j.contains("coords") || !j["coords"].is_array()) throw schema("coords: required array of names");
    for (auto& c : j["coords"]) {
        if (!c.is_string()) throw schema("coords: names must be strings");
        d.coords.push_back(c);
    }
    if (d.coords.empty() || d.coords.size() % 2) throw schema("coords: need an even positive count");
    if (j.contains("dim") && (!j["dim"].is_number_integer() || j["dim"].get<size_t>() != d.coords.size()))
        throw schema("dim: does not match coords");
    if (j.contains("aliases")) {
        if (!j["aliases"].is_array()) throw schema("aliases: expected array");
        for (auto& a : j["aliases"]) {
            if (!a.is_object() || !a.contains("name") || !a.contains("re") || !a.contains("im"))
                throw schema("aliases: entries need name, re, im");
            d.aliases.push_back({a["name"], a["re"], a["im"]});
            coord_index(d, a["re"], "aliases");
            coord_index(d, a["im"], "aliases");
        }
    }
    if (j.contains("omega")) {
        const auto& w = j["omega"];
        if (w.is_string()) {
            if (w != "standard") throw schema("omega: unknown form '" + w.get<std::string>() + "'");
        } else if (w.is_array()) {
            d.omega = "matrix";
            d.omega_matrix = matrix_from_json(w, "omega");
            if (d.omega_matrix.rows() != static_cast<int>(d.coords.size())) throw schema("omega: wrong size");
        } else if (w.is_object() && w.contains("parabolic")) {
            if (d.coords.size() != 4) throw schema("omega: the parabolic form needs coords (l, phi, x, y)");
            d.omega = "parabolic";
            const auto& p = w["parabolic"];
            for (auto [key, dst] : {std::pair{"alpha", &d.alpha}, {"P", &d.P}, {"Q", &d.Q}, {"R", &d.R}})
                if (p.contains(key)) {
                    if (!p[key].is_string()) throw schema(std::string("omega.parabolic.") + key + ": expected text");
                    *dst = p[key];
                }
        } else {
            throw schema("omega: expected \"standard\", a matrix or {\"parabolic\": ...}");
        }
    }
    if (!j.contains("integrals") || !j["integrals"].is_array()) throw schema("integrals: required array");
    for (auto& in : j["integrals"]) {
        IntegralSpec s;
        if (in.is_string()) {
            s.expr = in;
        } else if (in.is_object() && in.contains("expr") && in["expr"].is_string()) {
            s.expr = in["expr"];
            if (in.contains("kind")) {
                if (!in["kind"].is_string()) throw schema("integrals.kind: expected string");
                s.kind = in["kind"];
            }
        } else {
            throw schema("integrals: entries need expr");
        }
        if (s.kind != "elliptic" && s.kind != "hyperbolic" && s.kind != "orbit" && s.kind != "none")
            throw schema("integrals.kind: must be elliptic, hyperbolic, orbit or none");
        d.integrals.push_back(s);
    }
    if (j.contains("normal")) {
        if (!j["normal"].is_array()) throw schema("normal: expected array");
        for (auto& v : j["normal"]) d.normal.push_back(coord_index(d, v, "normal"));
        if (d.normal.size() % 2) throw schema("normal: need an even count");
    }
    if (j.contains("point")) {
        if (!j["point"].is_array()) throw schema("point: expected array");
        for (auto& v : j["point"]) {
            if (!v.is_number()) throw schema("point: entries must be numbers");
            d.point.push_back(v.get<double>());
        }
        if (!d.point.empty() && d.point.size() != d.coords.size()) throw schema("point: wrong length");
    }
    const int m = d.normal.empty() ? static_cast<int>(d.coords.size()) : static_cast<int>(d.normal.size());
    if (j.contains("gamma")) {
        if (!j["gamma"].is_array()) throw schema("gamma: expected array");
        for (auto& g : j["gamma"]) {
            GammaSpec gs;
            if (!g.is_object() || !g.contains("order") || !g["order"].is_number_integer())
                throw schema("gamma: entries need an integer order");
            gs.order = g["order"];
            if (gs.order < 1) throw schema("gamma.order: must be positive");
            if (g.contains("rotations")) {
                if (!g["rotations"].is_array() || static_cast<int>(g["rotations"].size()) * 2 != m)
                    throw schema("gamma.rotations: one rational per normal plane");
                for (auto& q : g["rotations"]) gs.rotations.push_back(rational_from_json(q));
                gs.matrix = rotation_blocks(gs.rotations);
            } else if (g.contains("matrix")) {
                gs.matrix = matrix_from_json(g["matrix"], "gamma.matrix");
                if (gs.matrix.rows() != m) throw schema("gamma.matrix: must act on the normal space");
            } else {
                throw schema("gamma: entries need rotations or matrix");
            }
            d.gamma.push_back(gs);
        }
    }
    if (j.contains("rank")) {
        if (!j["rank"].is_number_integer() || j["rank"].get<int>() < 0) throw schema("rank: expected integer >= 0");
        d.rank = j["rank"];
    }
    if (j.contains("periodic")) {
        if (!j["periodic"].is_array()) throw schema("periodic: expected array");
        for (auto& v : j["periodic"]) d.periodic.push_back(coord_index(d, v, "periodic"));
    }
    if (j.contains("box")) {
        if (!j["box"].is_array()) throw schema("box: expected array of [lo, hi]");
        for (auto& b : j["box"]) {
            if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number())
                throw schema("box: entries must be [lo, hi]");
            d.box.emplace_back(b[0].get<double>(), b[1].get<double>());
        }
        if (!d.box.empty() && d.box.size() != d.coords.size()) throw schema("box: one interval per coordinate");
    }
    if (j.contains("flags")) {
        if (!j["flags"].is_object()) throw schema("flags: expected object");
        for (auto& [k, v] : j["flags"].items()) {
            if (!v.is_boolean()) throw schema("flags." + k + ": expected boolean");
            d.flags[k] = v;
        }
    }
    // Parse everything once so that unknown variables surface here.
    build_system(d);
    return d;
}

SystemDescriptor load_descriptor(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("IOError", "cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw schema(std::string("invalid JSON: ") + e.what());
    }
    return descriptor_from_json(j);
}

namespace {

std::string vec_str(const std::vector<mpz_class>& v, const char* sep) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i].get_str();
    return s;
}

std::string rows_summary(const IntMatrix& rows) {
    if (rows.empty()) return "no";
    std::string out;
    for (size_t k = 0; k < rows.size(); ++k) {
        if (k) out += "; ";
        out += rows[k].size() == 1 ? vec_str(rows[k], ":") : "(" + vec_str(rows[k], ":") + ")";
    }
    return out;
}

json int_matrix_json(const IntMatrix& m) {
    json out = json::array();
    for (auto& row : m) {
        json r = json::array();
        for (auto& x : row) r.push_back(std::stol(x.get_str()));
        out.push_back(r);
    }
    return out;
}

const char* kind_name(UnitType t) {
    switch (t) {
        case UnitType::Focus: return "focus";
        case UnitType::Elliptic: return "elliptic";
        case UnitType::Hyperbolic: return "hyperbolic";
        default: return "trivial";
    }
}

}  // namespace

std::string elliptic_summary(const CanonicalModel& m) { return rows_summary(m.elliptic); }
std::string hyperbolic_summary(const CanonicalModel& m) { return rows_summary(m.hyperbolic); }

std::string twisting_summary(const CanonicalModel& m) {
    if (m.twisting.empty()) return "none";
    std::string out;
    for (size_t a = 0; a < m.twisting.size(); ++a) {
        if (a) out += "; ";
        const auto& row = m.twisting[a];
        if (row.size() == 1) {
            out += to_string(row[0]);
            continue;
        }
        out += "(";
        for (size_t j = 0; j < row.size(); ++j) out += (j ? "," : "") + to_string(row[j]);
        out += ")";
    }
    return out;
}

json report_to_json(const ClassificationReport& r, bool quotient_cycles) {
    CanonicalModel cm = canonical_model(r, quotient_cycles);
    json j;
    j["n"] = r.n_total;
    j["r"] = r.r;
    j["kappa_e"] = r.kappa_e();
    j["kappa_h"] = r.kappa_h();
    j["williamson"] = {r.k_e, r.k_h, r.k_f};
    j["p_matrix"] = r.p_matrix;
    json tw = json::array();
    for (auto& row : r.twisting) {
        json a = json::array();
        for (auto& q : row) a.push_back(rational_to_json(q));
        tw.push_back(a);
    }
    j["twisting"] = tw;
    j["orders"] = r.orders;
    json units = json::array();
    for (auto& u : r.units) units.push_back({{"type", kind_name(u.type)}, {"first_plane", u.first_plane}});
    j["units"] = units;
    j["basis"] = matrix_to_json(r.basis);
    j["spectral_residual"] = r.spectral_residual;
    json ctw = json::array();
    for (auto& row : cm.twisting) {
        json a = json::array();
        for (auto& q : row) a.push_back(rational_to_json(q));
        ctw.push_back(a);
    }
    j["canonical"] = {{"elliptic", int_matrix_json(cm.elliptic)},
                      {"hyperbolic", int_matrix_json(cm.hyperbolic)},
                      {"twisting", ctw},
                      {"quotient_cycles", quotient_cycles}};
    j["summary"] = {{"elliptic", elliptic_summary(cm)},
                    {"hyperbolic", hyperbolic_summary(cm)},
                    {"twisting", twisting_summary(cm)}};
    return j;
}

std::string report_table(const std::string& name, const ClassificationReport& r, bool quotient_cycles) {
    CanonicalModel cm = canonical_model(r, quotient_cycles);
    std::ostringstream os;
    const int w = std::max<int>(10, static_cast<int>(name.size()));
    char buf[512];
    std::snprintf(buf, sizeof buf, "%-*s  n  r  kappa_e  kappa_h  williamson  elliptic  hyperbolic  twisting\n", w, "case");
    os << buf;
    std::snprintf(buf, sizeof buf, "%-*s  %d  %d  %7d  %7d  %-10s  %-8s  %-10s  %s\n", w, name.c_str(), r.n_total, r.r,
                  r.kappa_e(), r.kappa_h(), williamson_string(r).c_str(), elliptic_summary(cm).c_str(),
                  hyperbolic_summary(cm).c_str(), twisting_summary(cm).c_str());
    os << buf;
    return os.str();
}

std::string report_csv(const std::string& name, const ClassificationReport& r, bool quotient_cycles) {
    CanonicalModel cm = canonical_model(r, quotient_cycles);
    std::ostringstream os;
    os << "case,n,r,kappa_e,kappa_h,k_e,k_h,k_f,elliptic,hyperbolic,twisting\n";
    os << name << ',' << r.n_total << ',' << r.r << ',' << r.kappa_e() << ',' << r.kappa_h() << ',' << r.k_e << ','
       << r.k_h << ',' << r.k_f << ",\"" << elliptic_summary(cm) << "\",\"" << hyperbolic_summary(cm) << "\",\""
       << twisting_summary(cm) << "\"\n";
    return os.str();
}

}  // namespace toricsym
