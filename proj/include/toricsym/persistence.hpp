#pragma once

#include "toricsym/action.hpp"
#include "toricsym/io.hpp"

#include <string>
#include <vector>

namespace toricsym {

// F~ = chi o (F o phi): phi the time-eps flow of X_g, chi(z) = z + eps * quadratic(z).
struct PerturbationRecipe {
    double eps = 0;
    unsigned long seed = 1;
    PolynomialExpr generator;                // g over the phase coordinates (unit scale)
    std::vector<PolynomialExpr> recombiner;  // quadratic parts of chi over z1..zn (unit scale)
    bool equivariant = false;                // g built from invariants of the normal planes
};

// Random recipe: g of degree <= 4 (linear terms included unless equivariant), chi with
// random quadratic coefficients.  Coefficients are exact small rationals.
PerturbationRecipe make_recipe(const SystemDescriptor& d, double eps, unsigned long seed, bool equivariant = false,
                               bool with_generator = true, bool with_recombiner = true);

struct PerturbedSystem {
    PolynomialSystem system;
    int order = 0;             // Lie-series truncation order
    double truncation = 0;     // sup of the first omitted term on the sample set
    double closeness = 0;      // sup |F~ - F| on the sample set
    double K = 0;              // closeness / eps
    bool phi_applied = false;  // false when the form is not constant (phi = Id)
    double bracket_residual = 0;
};

// Sample set for sup norms: the box (a complex polydisc of the same radii when the system
// is complexified), 41 points per axis for dim 2, random points otherwise.
std::vector<CVec> sample_points(const PolynomialSystem& sys, unsigned long seed = 7);

PerturbedSystem perturb_system(const PolynomialSystem& sys, const PerturbationRecipe& r, int min_order = 6,
                               int max_order = 12);

// Constant form matrix of a system, also for parabolic forms that happen to be constant.
bool constant_form(const PolynomialSystem& sys, Mat& W);

struct PersistenceRow {
    double eps = 0, err = 0;
    int order = 0;
    double closeness = 0;
};

struct PersistenceTable {
    std::vector<PersistenceRow> rows;
    double slope = 0;  // least-squares slope of log err against log eps (eps > 0 rows)
};

struct PersistenceOptions {
    unsigned long seed = 1;
    bool equivariant = false;
    bool with_generator = true, with_recombiner = true;
    ActionOptions action;
    int jobs = 1;  // eps values run concurrently
};

PersistenceTable persistence_experiment(const SystemDescriptor& d, const CVec& seed_point, const CVec& seed_coeffs,
                                        const std::vector<CVec>& grid, const std::vector<double>& eps_list,
                                        const PersistenceOptions& opt = {});

std::string persistence_csv(const PersistenceTable& t);
json persistence_to_json(const PersistenceTable& t);

struct InvarianceReport {
    bool same = false;
    double displacement = 0;
    CVec point;  // perturbed fixed point
    ClassificationReport before, after;
    std::string williamson_before, williamson_after;
};

// Locates the perturbed fixed point (Newton on the normal gradient of sum c_l J~_l over
// the generator integrals), linearizes there and compares canonical data exactly.
InvarianceReport discrete_data_invariance(const SystemDescriptor& d, const PerturbationRecipe& r);

json invariance_to_json(const InvarianceReport& r);

}  // namespace toricsym
