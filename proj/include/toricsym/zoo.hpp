#pragma once

#include "toricsym/action.hpp"
#include "toricsym/io.hpp"

#include <functional>
#include <string>
#include <vector>

namespace toricsym {

// Classification row expected from the tables, in the summary notation of io.hpp.
struct ZooExpected {
    int n = 0, r = 0, kappa_e = 0, kappa_h = 0;
    int k_e = 0, k_h = 0, k_f = 0;
    std::string elliptic = "no", hyperbolic = "no", twisting = "none";
};

// Regular point and coefficient vector of a 2pi-periodic orbit, plus the default
// momentum grid (one axis varied, the others held at F(point)).
struct ZooSeed {
    std::string label;
    CVec point;
    CVec coeffs;
    int axis = 0;
    double lo = 0, hi = 0;
    int count = 0;
};

struct ZooWitness {
    CVec singular_point;
    LoopCurve loop;
    double chart_radius = 1, lipschitz = 1;
};

struct ZooEntry {
    std::string name;
    std::string summary;
    json params = json::object();
    SystemDescriptor system;
    bool has_expected = false;
    bool expected_inferred = false;  // row not stated in the tables (sign variants)
    ZooExpected expected;
    bool homologically_symmetric = false, incomplete_flow = false, negative_witness = false;
    std::vector<ZooSeed> seeds;
    bool has_witness = false;
    ZooWitness witness;
};

std::vector<std::string> zoo_names();

// Builds an entry; params override the defaults.  Throws InvalidParams naming the
// violated constraint, UnknownModel for an unknown name.
ZooEntry zoo(const std::string& name, const json& params = json::object());

// Grid along the seed axis: count points in [lo, hi], other components fixed.
std::vector<CVec> seed_grid(const ZooSeed& seed, const CVec& z0, double lo, double hi, int count);

}  // namespace toricsym
