#pragma once

#include "toricsym/report.hpp"

namespace toricsym {

// Row Hermite normal form of the lattice spanned by the rows (positive pivots,
// entries above pivots reduced into [0, pivot)).  Zero rows are dropped.
IntMatrix hermite_normal_form(IntMatrix rows);

// Integer basis of {x in Z^m : A x = 0}.
IntMatrix integer_kernel(const IntMatrix& A, int m);

// Canonical representative of the rows up to nondegenerate integer recombination:
// HNF of the saturated lattice (Q-span intersected with Z^m).
IntMatrix canonicalize_elliptic(const IntMatrix& vectors);
IntMatrix canonicalize_hyperbolic(const IntMatrix& vectors);

// Each residue row a is shifted by sum_l ext_l n_l / N_a over all n mod N_a and the
// lexicographically smallest vector in [0,1)^m is returned.
std::vector<RatVector> canonicalize_twisting(const std::vector<RatVector>& residues,
                                             const IntMatrix& extended_elliptic,
                                             const std::vector<int>& orders);

// Optional quotient by a change of basic cycles: the whole subgroup generated by the
// residue rows, each element canonicalized with N = lcm(N_a), sorted.
std::vector<RatVector> canonicalize_twisting_group(const std::vector<RatVector>& residues,
                                                   const IntMatrix& extended_elliptic,
                                                   const std::vector<int>& orders);

struct CanonicalModel {
    int n_total = 0, r = 0, k_e = 0, k_h = 0, k_f = 0;
    IntMatrix elliptic;
    IntMatrix hyperbolic;
    std::vector<RatVector> twisting;
    bool operator==(const CanonicalModel& o) const;
};

// Canonical data minimized over the normal-form symmetries (unit permutations within
// each type, hyperbolic sign flips, focus plane swaps).
CanonicalModel canonical_model(const ClassificationReport& report, bool quotient_cycles = false);

bool models_equivalent(const ClassificationReport& a, const ClassificationReport& b,
                       bool quotient_cycles = false);

mpq_class mod1(const mpq_class& q);

}  // namespace toricsym
