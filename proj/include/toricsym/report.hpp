#pragma once

#include "toricsym/symplectic.hpp"

#include <gmpxx.h>

#include <string>
#include <vector>

namespace toricsym {

using IntMatrix = std::vector<std::vector<mpz_class>>;
using RatVector = std::vector<mpq_class>;

enum class UnitType { Focus, Elliptic, Hyperbolic, Trivial };

// One normal-form unit of the assembled basis: a focus unit spans two planes.
struct NormalUnit {
    UnitType type;
    int first_plane;
};

struct ClassificationReport {
    int n_total = 0;  // metadata: total number of degrees of freedom
    int r = 0;        // metadata: rank of the orbit
    int k_e = 0, k_h = 0, k_f = 0;
    std::vector<GeneratorKind> kinds;                 // per generator l
    std::vector<std::vector<long>> p_matrix;          // rows h_j, columns l
    std::vector<RatVector> twisting;                  // per generator a, one entry per plane
    std::vector<int> orders;                          // N_a
    Mat basis;                                        // S, columns (x1,y1,...)
    double spectral_residual = 0;
    std::vector<NormalUnit> units;

    int planes() const { return static_cast<int>(basis.cols() / 2); }
    int kappa_e() const;
    int kappa_h() const;

    // Elliptic resonance vectors (one per elliptic generator), length 2k_f+k_e.
    IntMatrix elliptic_vectors() const;
    // Hyperbolic resonance vectors, length 2k_f+k_h.
    IntMatrix hyperbolic_vectors() const;
    // Elliptic vectors spread over all planes (zeros on hyperbolic and trivial planes).
    IntMatrix extended_elliptic() const;
};

std::string to_string(const mpq_class& q);
std::string williamson_string(const ClassificationReport& r);

}  // namespace toricsym
