#pragma once

#include "toricsym/classifier.hpp"
#include "toricsym/dynamics.hpp"
#include "toricsym/resonance.hpp"

#include "json.hpp"

#include <map>
#include <string>
#include <vector>

namespace toricsym {

using json = nlohmann::json;

// Role of an integral in the linearization: a torus generator fixing the orbit
// (elliptic or hyperbolic kind), a generator of the locally free part ("orbit"),
// or an ordinary first integral ("none").
struct IntegralSpec {
    std::string expr;
    std::string kind = "none";
};

struct GammaSpec {
    Mat matrix;                       // acts on the normal coordinates
    int order = 1;
    std::vector<mpq_class> rotations;  // per normal plane, when the generator is a rotation
};

struct SystemDescriptor {
    std::string name;
    json params = json::object();
    std::vector<std::string> coords;
    std::vector<ComplexAlias> aliases;
    std::string omega = "standard";  // standard | matrix | parabolic
    Mat omega_matrix;
    std::string alpha = "l", P = "0", Q = "0", R = "1";
    std::vector<IntegralSpec> integrals;
    std::vector<int> normal;     // indices of the normal coordinates; empty means all
    std::vector<double> point;   // expansion point; empty means the origin
    std::vector<GammaSpec> gamma;
    int rank = 0;
    std::vector<int> periodic;
    std::vector<std::pair<double, double>> box;
    std::map<std::string, bool> flags;
};

PolynomialSystem build_system(const SystemDescriptor& d);

// Hessians of the generator integrals and the twisting generators at the expansion
// point, restricted to the normal coordinates.
LinearData linearize(const SystemDescriptor& d);
// Same data for an already built (possibly perturbed) system at the point x0.
LinearData linearize(const SystemDescriptor& d, const PolynomialSystem& sys, const CVec& x0);

// Exact invariance of every integral under the rotation generators of gamma.
bool gamma_invariant(const SystemDescriptor& d);

json descriptor_to_json(const SystemDescriptor& d);
// Validates the schema; throws SchemaError naming the offending field.
SystemDescriptor descriptor_from_json(const json& j);
SystemDescriptor load_descriptor(const std::string& path);

json rational_to_json(const mpq_class& q);
mpq_class rational_from_json(const json& j);
json matrix_to_json(const Mat& m);
Mat matrix_from_json(const json& j, const std::string& field);

// Shortest round-trip decimal (17 significant digits).
std::string fmt17(double x);

json report_to_json(const ClassificationReport& r, bool quotient_cycles = false);
std::string report_table(const std::string& name, const ClassificationReport& r, bool quotient_cycles = false);
std::string report_csv(const std::string& name, const ClassificationReport& r, bool quotient_cycles = false);

// Resonance summaries in the projective notation used by the tables: "(p:q)", "1", "no".
std::string elliptic_summary(const CanonicalModel& m);
std::string hyperbolic_summary(const CanonicalModel& m);
std::string twisting_summary(const CanonicalModel& m);

}  // namespace toricsym
