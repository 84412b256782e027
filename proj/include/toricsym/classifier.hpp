#pragma once

#include "toricsym/report.hpp"
#include "toricsym/symplectic.hpp"

#include <gmpxx.h>

#include <vector>

namespace toricsym {

// Linearized data at a point of the orbit: generators J_l (by their Hessians) and the
// twisting group generators M_a acting on the normal space.
struct LinearData {
    SymplecticSpace space;
    std::vector<QuadraticHamiltonian> hamiltonians;
    FiniteSymplecticAction action;
    int n_total = 0;  // degrees of freedom of the whole system; defaults to space.n()
    int rank = 0;

    explicit LinearData(SymplecticSpace sp) : space(std::move(sp)) {}
};

struct JointBlock {
    Mat basis;                             // orthonormal columns spanning V_s
    std::vector<long> elliptic_spectrum;   // |lambda_ls| / i for elliptic generators, else 0
    std::vector<long> hyperbolic_spectrum; // |lambda_ls| for hyperbolic generators, else 0
    std::vector<mpq_class> rotation;       // q_as in [0, 1/2]
};

struct RefinedBlock {
    int parent = 0;
    Mat basis;
    UnitType type = UnitType::Trivial;
    std::vector<int> eps;  // per generator a in M_s (others 0)
    std::vector<int> eta;  // per generator l in I_s or H_s (others 0)
    int anchor_a = -1, anchor_l = -1, anchor_h = -1;
};

struct Decomposition {
    std::vector<Mat> A;  // Hamiltonian operators
    std::vector<JointBlock> blocks;
    double residual = 0;  // worst rounding residual of the spectral data
};

Decomposition joint_block_decomposition(const LinearData& data, double tol = 1e-8);

std::vector<RefinedBlock> refine_blocks(const Decomposition& dec, const LinearData& data, double tol = 1e-8);

ClassificationReport build_normal_basis(const std::vector<RefinedBlock>& refined, const Decomposition& dec,
                                        const LinearData& data);

ClassificationReport classify(const LinearData& data);

// Hessian of the l-th generator and matrix of the a-th twisting generator in the
// normal basis claimed by a report.
Mat normal_form_hessian(const ClassificationReport& rep, int l);
Mat normal_form_rotation(const ClassificationReport& rep, int a);

// Conjugate every operator of the data by a symplectic P (Q -> P^T Q P, M -> P^-1 M P,
// form -> P^T form P).
LinearData conjugate(const LinearData& data, const Mat& P);

// Best rational approximation with denominator at most max_den (continued fractions).
mpq_class rational_approx(double x, long max_den);

}  // namespace toricsym
