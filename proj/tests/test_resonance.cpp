#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "toricsym/errors.hpp"
#include "toricsym/resonance.hpp"

#include <random>

using namespace toricsym;

namespace {

IntMatrix M(std::initializer_list<std::initializer_list<long>> rows) {
    IntMatrix out;
    for (auto& r : rows) {
        std::vector<mpz_class> v;
        for (long x : r) v.emplace_back(x);
        out.push_back(v);
    }
    return out;
}

// ---- independent oracle: brute-force search for the canonical basis -----------

int qrank(const std::vector<std::vector<mpq_class>>& rows, std::vector<int>* pivots = nullptr) {
    auto a = rows;
    int r = 0;
    const int m = a.empty() ? 0 : static_cast<int>(a[0].size());
    for (int c = 0; c < m && r < static_cast<int>(a.size()); ++c) {
        int p = -1;
        for (int i = r; i < static_cast<int>(a.size()); ++i)
            if (a[i][c] != 0) { p = i; break; }
        if (p < 0) continue;
        std::swap(a[r], a[p]);
        for (int i = 0; i < static_cast<int>(a.size()); ++i) {
            if (i == r || a[i][c] == 0) continue;
            mpq_class f = a[i][c] / a[r][c];
            for (int t = 0; t < m; ++t) a[i][t] -= f * a[r][t];
        }
        if (pivots) pivots->push_back(c);
        ++r;
    }
    return r;
}

IntMatrix oracle_canonical(const IntMatrix& A, int box) {
    const int k = static_cast<int>(A.size());
    const int m = static_cast<int>(A[0].size());
    std::vector<std::vector<mpq_class>> qa;
    for (auto& r : A) {
        std::vector<mpq_class> v;
        for (auto& x : r) v.emplace_back(x);
        qa.push_back(v);
    }
    std::vector<int> piv;
    REQUIRE(qrank(qa, &piv) == k);
    std::vector<std::vector<long>> lattice;
    std::vector<long> v(m, -box);
    while (true) {
        auto q = qa;
        std::vector<mpq_class> vq;
        for (long x : v) vq.emplace_back(x);
        q.push_back(vq);
        if (qrank(q) == k) lattice.push_back(v);
        int i = 0;
        while (i < m && ++v[i] > box) v[i++] = -box;
        if (i == m) break;
    }
    std::vector<std::vector<long>> h(k);
    for (int i = k - 1; i >= 0; --i) {
        std::vector<long> best;
        for (auto& w : lattice) {
            bool ok = w[piv[i]] > 0;
            for (int j = 0; j < i && ok; ++j) ok = w[piv[j]] == 0;
            for (int j = i + 1; j < k && ok; ++j) ok = w[piv[j]] >= 0 && w[piv[j]] < h[j][piv[j]];
            if (ok && (best.empty() || w[piv[i]] < best[piv[i]])) best = w;
        }
        REQUIRE(!best.empty());
        h[i] = best;
    }
    IntMatrix out;
    for (auto& r : h) {
        std::vector<mpz_class> z;
        for (long x : r) z.emplace_back(x);
        out.push_back(z);
    }
    return out;
}

mpq_class Q(long a, long b) {
    mpq_class q(a, b);
    q.canonicalize();
    return q;
}

}  // namespace

TEST_CASE("single row is divided by its content") {
    CHECK(canonicalize_elliptic(M({{2, 4}})) == M({{1, 2}}));
    CHECK(canonicalize_hyperbolic(M({{3, 3}})) == M({{1, 1}}));
    CHECK(canonicalize_hyperbolic(M({{1, 1}})) == M({{1, 1}}));
    CHECK(canonicalize_elliptic(M({{-2, -4}})) == M({{1, 2}}));
}

TEST_CASE("identity rows are fixed") {
    CHECK(canonicalize_elliptic(M({{1, 0}, {0, 1}})) == M({{1, 0}, {0, 1}}));
}

TEST_CASE("two-row case matches the brute-force oracle") {
    IntMatrix A = M({{2, 3}, {4, 5}});
    CHECK(canonicalize_elliptic(A) == oracle_canonical(A, 6));
}

TEST_CASE("random small matrices match the oracle") {
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<long> d(-3, 3);
    int checked = 0;
    while (checked < 40) {
        int m = 2 + checked % 2;
        int k = 1 + checked % m;
        IntMatrix A(k, std::vector<mpz_class>(m));
        for (auto& r : A)
            for (auto& x : r) x = d(rng);
        if (static_cast<int>(hermite_normal_form(A).size()) < k) continue;
        CHECK(canonicalize_hyperbolic(A) == oracle_canonical(A, m == 2 ? 6 : 9));
        ++checked;
    }
}

TEST_CASE("rank deficient input is rejected") {
    try {
        canonicalize_elliptic(M({{1, 2}, {2, 4}}));
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.kind() == "RankDeficient");
    }
}

TEST_CASE("canonical form is idempotent and constant on unimodular orbits") {
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<long> d(-4, 4);
    for (int trial = 0; trial < 100; ++trial) {
        IntMatrix A(2, std::vector<mpz_class>(3));
        for (auto& r : A)
            for (auto& x : r) x = d(rng);
        if (hermite_normal_form(A).size() < 2) continue;
        IntMatrix C = canonicalize_elliptic(A);
        CHECK(canonicalize_elliptic(C) == C);
        // Mix rows by a random unimodular matrix and by a nondegenerate integer one.
        long t = d(rng);
        IntMatrix U = {{A[0][0] + t * A[1][0], A[0][1] + t * A[1][1], A[0][2] + t * A[1][2]}, A[1]};
        std::swap(U[0], U[1]);
        CHECK(canonicalize_elliptic(U) == C);
        IntMatrix N = {{2 * A[0][0] + A[1][0], 2 * A[0][1] + A[1][1], 2 * A[0][2] + A[1][2]},
                       {3 * A[1][0], 3 * A[1][1], 3 * A[1][2]}};
        CHECK(canonicalize_elliptic(N) == C);
    }
}

TEST_CASE("integer kernel") {
    IntMatrix K = integer_kernel(M({{1, 1, 1}}), 3);
    CHECK(K.size() == 2);
    for (auto& v : K) CHECK(v[0] + v[1] + v[2] == 0);
}

TEST_CASE("twisting shift by the elliptic lattice") {
    std::vector<RatVector> res = {{Q(1, 3), Q(2, 3)}};
    auto c = canonicalize_twisting(res, M({{1, 0}}), {3});
    REQUIRE(c.size() == 1);
    CHECK(c[0] == RatVector{Q(0, 1), Q(2, 3)});
}

TEST_CASE("zero residues stay zero") {
    std::vector<RatVector> res = {{Q(0, 1), Q(0, 1)}};
    CHECK(canonicalize_twisting(res, M({{1, 2}}), {1})[0] == RatVector{0, 0});
    CHECK(canonicalize_twisting(res, {}, {4})[0] == RatVector{0, 0});
}

TEST_CASE("residues are reduced mod 1") {
    std::vector<RatVector> res = {{Q(7, 5), Q(-1, 5)}};
    CHECK(canonicalize_twisting(res, {}, {5})[0] == RatVector{Q(2, 5), Q(4, 5)});
}

TEST_CASE("twisting canonical form is constant on shift orbits") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        int N = 2 + trial % 6;
        std::uniform_int_distribution<long> d(0, N - 1), e(-2, 2);
        RatVector q = {Q(d(rng), N), Q(d(rng), N), Q(d(rng), N)};
        IntMatrix ext = {{e(rng), e(rng), 0}};
        auto c = canonicalize_twisting({q}, ext, {N});
        long n = d(rng);
        RatVector shifted(3);
        for (int j = 0; j < 3; ++j) shifted[j] = mod1(q[j] + mpq_class(ext[0][j] * n, N));
        CHECK(canonicalize_twisting({shifted}, ext, {N}) == c);
        CHECK(canonicalize_twisting(c, ext, {N}) == c);
    }
}

TEST_CASE("cycle quotient is off by default and coarser when on") {
    // Two generators with residues 1/5 and 2/5: different as rows, same subgroup.
    std::vector<RatVector> a = {{Q(1, 5)}}, b = {{Q(2, 5)}};
    CHECK(canonicalize_twisting(a, {}, {5}) != canonicalize_twisting(b, {}, {5}));
    CHECK(canonicalize_twisting_group(a, {}, {5}) == canonicalize_twisting_group(b, {}, {5}));
}

namespace {

ClassificationReport one_plane(const mpq_class& q, int N) {
    ClassificationReport r;
    r.n_total = 2;
    r.r = 1;
    r.k_e = 1;
    r.p_matrix = {{}};
    r.twisting = {{q}};
    r.orders = {N};
    r.basis = Mat::Identity(2, 2);
    return r;
}

}  // namespace

TEST_CASE("model equivalence") {
    auto a = one_plane(Q(1, 5), 5), b = one_plane(Q(2, 5), 5);
    CHECK(models_equivalent(a, a));
    CHECK_FALSE(models_equivalent(a, b));
    CHECK(models_equivalent(b, b));
}

TEST_CASE("equivalence ignores plane order within a type") {
    ClassificationReport r;
    r.n_total = 2;
    r.k_e = 2;
    r.kinds = {GeneratorKind::Elliptic};
    r.p_matrix = {{1}, {2}};
    r.twisting = {{Q(1, 5), Q(0, 1)}};
    r.orders = {5};
    r.basis = Mat::Identity(4, 4);
    ClassificationReport s = r;
    s.p_matrix = {{2}, {1}};
    s.twisting = {{Q(0, 1), Q(1, 5)}};
    CHECK(models_equivalent(r, s));
    // (1/5, 0) cannot be moved to (0, 1/5) by multiples of (1, 2)/5.
    s.twisting = {{Q(1, 5), Q(0, 1)}};
    CHECK_FALSE(models_equivalent(r, s));
}

TEST_CASE("equivalence is an equivalence relation on samples") {
    std::vector<ClassificationReport> rs;
    for (int l = 1; l < 5; ++l) rs.push_back(one_plane(Q(l, 5), 5));
    rs.push_back(one_plane(Q(1, 5), 5));
    for (auto& a : rs) {
        CHECK(models_equivalent(a, a));
        for (auto& b : rs) {
            CHECK(models_equivalent(a, b) == models_equivalent(b, a));
            for (auto& c : rs)
                if (models_equivalent(a, b) && models_equivalent(b, c)) CHECK(models_equivalent(a, c));
        }
    }
}
