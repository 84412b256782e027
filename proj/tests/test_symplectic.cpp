#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "toricsym/errors.hpp"
#include "toricsym/symplectic.hpp"

#include <complex>

using namespace toricsym;

namespace {

Mat random_matrix(int r, int c, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    Mat M(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) M(i, j) = nd(rng);
    return M;
}

}  // namespace

TEST_CASE("standard form layout") {
    Mat W = standard_form(2);
    CHECK(W(0, 1) == 1);
    CHECK(W(1, 0) == -1);
    CHECK(W(2, 3) == 1);
    CHECK(W(0, 2) == 0);
    CHECK_NOTHROW(SymplecticSpace(W));
}

TEST_CASE("rejects degenerate or non-antisymmetric forms") {
    Mat Z = Mat::Zero(2, 2);
    CHECK_THROWS_AS(SymplecticSpace{Z}, Error);
    Mat S = Mat::Identity(2, 2);
    CHECK_THROWS_AS(SymplecticSpace{S}, Error);
}

TEST_CASE("harmonic oscillator operator") {
    auto sp = SymplecticSpace::standard(1);
    Mat A = hamiltonian_operator(Mat::Identity(2, 2), sp);
    Mat expect(2, 2);
    expect << 0, -1, 1, 0;
    CHECK(max_abs(A - expect) == 0);
    Eigen::EigenSolver<Mat> es(A);
    for (int i = 0; i < 2; ++i) {
        CHECK(std::abs(es.eigenvalues()(i).real()) < 1e-14);
        CHECK(std::abs(std::abs(es.eigenvalues()(i).imag()) - 1) < 1e-14);
    }
}

TEST_CASE("saddle operator has eigenvalues +-1") {
    auto sp = SymplecticSpace::standard(1);
    Mat Q(2, 2);
    Q << 0, 1, 1, 0;
    Mat A = hamiltonian_operator(Q, sp);
    Eigen::EigenSolver<Mat> es(A);
    std::vector<double> ev{es.eigenvalues()(0).real(), es.eigenvalues()(1).real()};
    std::sort(ev.begin(), ev.end());
    CHECK(ev[0] == doctest::Approx(-1));
    CHECK(ev[1] == doctest::Approx(1));
}

TEST_CASE("zero Hamiltonian gives zero operator") {
    auto sp = SymplecticSpace::standard(2);
    CHECK(max_abs(hamiltonian_operator(Mat::Zero(4, 4), sp)) == 0);
}

TEST_CASE("non-symmetric Q is rejected") {
    auto sp = SymplecticSpace::standard(1);
    Mat Q(2, 2);
    Q << 1, 2, 0, 1;
    try {
        hamiltonian_operator(Q, sp);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.kind() == "NonSymmetricInput");
    }
}

TEST_CASE("operators are infinitesimally symplectic and linear in Q") {
    std::mt19937_64 rng(11);
    for (int n = 1; n <= 4; ++n) {
        Mat P = random_symplectic(n, rng);
        SymplecticSpace sp(P.transpose() * standard_form(n) * P);
        Mat Q1 = random_matrix(2 * n, 2 * n, rng);
        Q1 = (Q1 + Q1.transpose()).eval();
        Mat Q2 = random_matrix(2 * n, 2 * n, rng);
        Q2 = (Q2 + Q2.transpose()).eval();
        Mat A1 = hamiltonian_operator(Q1, sp), A2 = hamiltonian_operator(Q2, sp);
        Mat A12 = hamiltonian_operator(Q1 + Q2, sp);
        CHECK(max_abs(A12 - A1 - A2) <= 1e-12 * std::max(1.0, max_abs(A12)));
        CHECK(max_abs(A1.transpose() * sp.form + sp.form * A1) < 1e-10);
        for (int k = 0; k < 100; ++k) {
            Vec u = random_matrix(2 * n, 1, rng), v = random_matrix(2 * n, 1, rng);
            CHECK(std::abs(sp.omega(A1 * u, v) + sp.omega(u, A1 * v)) < 1e-10);
        }
        // Omega(A x, v) = -dH(v) = -x^T Q v
        Vec x = random_matrix(2 * n, 1, rng), v = random_matrix(2 * n, 1, rng);
        CHECK(sp.omega(A1 * x, v) == doctest::Approx(-x.dot(Q1 * v)).epsilon(1e-10));
    }
}

TEST_CASE("complement of a coordinate plane") {
    auto sp = SymplecticSpace::standard(2);
    Mat W(4, 2);
    W << 1, 0, 0, 1, 0, 0, 0, 0;
    Mat C = symplectic_complement(W, sp, true);
    REQUIRE(C.cols() == 2);
    CHECK(max_abs(C.topRows(2)) < 1e-12);
    CHECK(max_abs(W.transpose() * sp.form * C) < 1e-12);
}

TEST_CASE("complement of the whole space is empty") {
    auto sp = SymplecticSpace::standard(2);
    CHECK(symplectic_complement(Mat::Identity(4, 4), sp).cols() == 0);
}

TEST_CASE("complement of a random symplectic plane in R6") {
    std::mt19937_64 rng(5);
    auto sp = SymplecticSpace::standard(3);
    for (int trial = 0; trial < 20; ++trial) {
        Mat W = random_matrix(6, 2, rng);
        Mat C = symplectic_complement(W, sp, true);
        REQUIRE(C.cols() == 4);
        // Brute-force pairing check of every column pair.
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 4; ++j) CHECK(std::abs(sp.omega(W.col(i), C.col(j))) < 1e-10);
    }
}

TEST_CASE("isotropic subspace cannot be split off") {
    auto sp = SymplecticSpace::standard(2);
    Mat W(4, 2);
    W << 1, 0, 0, 0, 0, 1, 0, 0;  // x1, x2: Lagrangian
    try {
        symplectic_complement(W, sp, true);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.kind() == "DegenerateSubspace");
    }
}

TEST_CASE("Gram-Schmidt on the standard basis is the identity") {
    auto sp = SymplecticSpace::standard(1);
    Mat S = symplectic_gram_schmidt(Mat::Identity(2, 2), sp);
    CHECK(max_abs(S - Mat::Identity(2, 2)) < 1e-14);
}

TEST_CASE("Gram-Schmidt on (e1+f1, f1)") {
    auto sp = SymplecticSpace::standard(1);
    Mat V(2, 2);
    V << 1, 0, 1, 1;
    Mat S = symplectic_gram_schmidt(V, sp);
    CHECK(max_abs(S.transpose() * sp.form * S - standard_form(1)) < 1e-12);
}

TEST_CASE("Gram-Schmidt property over random inputs and forms") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 1 + trial % 4;
        Mat P = random_symplectic(n, rng);
        SymplecticSpace sp(P.transpose() * standard_form(n) * P);
        Mat V = random_matrix(2 * n, 2 * n, rng);
        Mat S = symplectic_gram_schmidt(V, sp);
        CHECK(max_abs(S.transpose() * sp.form * S - standard_form(n)) <= 1e-10);
    }
}

TEST_CASE("Gram-Schmidt rejects a Lagrangian span") {
    auto sp = SymplecticSpace::standard(2);
    Mat W(4, 2);
    W << 1, 0, 0, 0, 0, 1, 0, 0;
    CHECK_THROWS_AS(symplectic_gram_schmidt(W, sp), Error);
}

TEST_CASE("random symplectic matrices preserve the form") {
    std::mt19937_64 rng(3);
    for (int n = 1; n <= 4; ++n) {
        Mat P = random_symplectic(n, rng);
        CHECK(max_abs(P.transpose() * standard_form(n) * P - standard_form(n)) < 1e-12);
    }
}
