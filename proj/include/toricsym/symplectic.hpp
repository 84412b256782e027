#pragma once

#include <Eigen/Dense>

#include <random>

namespace toricsym {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

// Default tolerance for structural identities; TORICSYM_TOL overrides it.
double default_tol();

// Block-diagonal form with n blocks [[0,1],[-1,0]], coordinates (x1,y1,...,xn,yn).
Mat standard_form(int n);

struct SymplecticSpace {
    Mat form;

    SymplecticSpace() = default;
    explicit SymplecticSpace(Mat w, double tol = -1);
    static SymplecticSpace standard(int n) { return SymplecticSpace(standard_form(n)); }

    int dim() const { return static_cast<int>(form.rows()); }
    int n() const { return dim() / 2; }
    double omega(const Vec& u, const Vec& v) const { return u.dot(form * v); }
};

enum class GeneratorKind { Elliptic, Hyperbolic };

struct QuadraticHamiltonian {
    Mat Q;
    GeneratorKind kind = GeneratorKind::Elliptic;
};

struct FiniteSymplecticAction {
    std::vector<Mat> generators;
    std::vector<int> orders;
};

// A = W^{-1} Q, so that Omega(A x, .) = -d(x^T Q x / 2).
Mat hamiltonian_operator(const Mat& Q, const SymplecticSpace& space, double tol = -1);

// Columns spanning {v : Omega(v, w) = 0 for all columns w}.  With split set the
// subspace must be symplectic.
Mat symplectic_complement(const Mat& W, const SymplecticSpace& space, bool split = false,
                          double tol = -1);

// Returns S = [e1 f1 e2 f2 ...] (interleaved) with S^T Omega S = standard form.
Mat symplectic_gram_schmidt(const Mat& vectors, const SymplecticSpace& space, double tol = -1);

// Orthonormal basis of the numerical null space (columns).
Mat null_space(const Mat& X, double tol);

// exp of a random Hamiltonian matrix W^{-1} Q with ||Q|| ~ scale.
Mat random_symplectic(int n, std::mt19937_64& rng, double scale = 0.3);

double max_abs(const Mat& M);

}  // namespace toricsym
