#include "toricsym/resonance.hpp"
#include "toricsym/errors.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

namespace toricsym {

// ---- report helpers -------------------------------------------------------

int ClassificationReport::kappa_e() const {
    return static_cast<int>(std::count(kinds.begin(), kinds.end(), GeneratorKind::Elliptic));
}

int ClassificationReport::kappa_h() const {
    return static_cast<int>(std::count(kinds.begin(), kinds.end(), GeneratorKind::Hyperbolic));
}

IntMatrix ClassificationReport::elliptic_vectors() const {
    IntMatrix out;
    for (size_t l = 0; l < kinds.size(); ++l) {
        if (kinds[l] != GeneratorKind::Elliptic) continue;
        std::vector<mpz_class> v;
        for (int j = 0; j < k_f; ++j) {
            v.emplace_back(p_matrix[2 * j][l]);
            v.emplace_back(-p_matrix[2 * j][l]);
        }
        for (int j = 0; j < k_e; ++j) v.emplace_back(p_matrix[2 * k_f + j][l]);
        out.push_back(std::move(v));
    }
    return out;
}

IntMatrix ClassificationReport::hyperbolic_vectors() const {
    IntMatrix out;
    for (size_t l = 0; l < kinds.size(); ++l) {
        if (kinds[l] != GeneratorKind::Hyperbolic) continue;
        std::vector<mpz_class> v;
        for (int j = 0; j < k_f; ++j) {
            v.emplace_back(p_matrix[2 * j + 1][l]);
            v.emplace_back(p_matrix[2 * j + 1][l]);
        }
        for (int j = 0; j < k_h; ++j) v.emplace_back(p_matrix[2 * k_f + k_e + j][l]);
        out.push_back(std::move(v));
    }
    return out;
}

IntMatrix ClassificationReport::extended_elliptic() const {
    IntMatrix out;
    const int m = planes();
    for (size_t l = 0; l < kinds.size(); ++l) {
        if (kinds[l] != GeneratorKind::Elliptic) continue;
        std::vector<mpz_class> v(m, 0);
        for (int j = 0; j < k_f; ++j) {
            v[2 * j] = p_matrix[2 * j][l];
            v[2 * j + 1] = -p_matrix[2 * j][l];
        }
        for (int j = 0; j < k_e; ++j) v[2 * k_f + j] = p_matrix[2 * k_f + j][l];
        out.push_back(std::move(v));
    }
    return out;
}

std::string to_string(const mpq_class& q) {
    return q.get_den() == 1 ? q.get_num().get_str() : q.get_str();
}

std::string williamson_string(const ClassificationReport& r) {
    return "(" + std::to_string(r.k_e) + "," + std::to_string(r.k_h) + "," + std::to_string(r.k_f) + ")";
}

// ---- integer lattices -----------------------------------------------------

namespace {

// Unimodular row reduction on the first `pivot_cols` columns.  Rows whose leading
// block vanishes end up at the bottom.  Returns the number of pivot rows.
int echelon(IntMatrix& rows, int pivot_cols) {
    int i = 0;
    const int nr = static_cast<int>(rows.size());
    for (int c = 0; c < pivot_cols && i < nr; ++c) {
        while (true) {
            int best = -1;
            for (int k = i; k < nr; ++k)
                if (rows[k][c] != 0 && (best < 0 || abs(rows[k][c]) < abs(rows[best][c]))) best = k;
            if (best < 0) break;
            std::swap(rows[i], rows[best]);
            bool done = true;
            for (int k = i + 1; k < nr; ++k) {
                if (rows[k][c] == 0) continue;
                mpz_class q;
                mpz_fdiv_q(q.get_mpz_t(), rows[k][c].get_mpz_t(), rows[i][c].get_mpz_t());
                for (size_t t = 0; t < rows[k].size(); ++t) rows[k][t] -= q * rows[i][t];
                if (rows[k][c] != 0) done = false;
            }
            if (done) break;
        }
        if (rows[i][c] == 0) continue;
        if (rows[i][c] < 0)
            for (auto& x : rows[i]) x = -x;
        for (int k = 0; k < i; ++k) {
            mpz_class q;
            mpz_fdiv_q(q.get_mpz_t(), rows[k][c].get_mpz_t(), rows[i][c].get_mpz_t());
            if (q != 0)
                for (size_t t = 0; t < rows[k].size(); ++t) rows[k][t] -= q * rows[i][t];
        }
        ++i;
    }
    return i;
}

size_t width(const IntMatrix& M) { return M.empty() ? 0 : M[0].size(); }

}  // namespace

IntMatrix hermite_normal_form(IntMatrix rows) {
    int rank = echelon(rows, static_cast<int>(width(rows)));
    rows.resize(rank);
    return rows;
}

IntMatrix integer_kernel(const IntMatrix& A, int m) {
    const int k = static_cast<int>(A.size());
    IntMatrix aug(m, std::vector<mpz_class>(k + m, 0));
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < k; ++j) aug[i][j] = A[j][i];
        aug[i][k + i] = 1;
    }
    int rank = echelon(aug, k);
    IntMatrix ker;
    for (int i = rank; i < m; ++i) ker.emplace_back(aug[i].begin() + k, aug[i].end());
    return ker;
}

namespace {

IntMatrix saturated_hnf(const IntMatrix& vectors) {
    if (vectors.empty()) return {};
    const int m = static_cast<int>(width(vectors));
    for (auto& v : vectors)
        if (static_cast<int>(v.size()) != m) throw error("RankDeficient", "ragged resonance matrix");
    if (static_cast<int>(hermite_normal_form(vectors).size()) < static_cast<int>(vectors.size()))
        throw error("RankDeficient", "resonance vectors are linearly dependent");
    IntMatrix ker = integer_kernel(vectors, m);
    IntMatrix sat = integer_kernel(ker, m);
    return hermite_normal_form(sat);
}

}  // namespace

IntMatrix canonicalize_elliptic(const IntMatrix& vectors) { return saturated_hnf(vectors); }
IntMatrix canonicalize_hyperbolic(const IntMatrix& vectors) { return saturated_hnf(vectors); }

mpq_class mod1(const mpq_class& q) {
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    mpq_class r = q - mpq_class(f);
    r.canonicalize();
    return r;
}

namespace {

RatVector min_shift(const RatVector& q, const IntMatrix& ext, int N) {
    const size_t m = q.size();
    const size_t kappa = ext.size();
    RatVector best;
    std::vector<int> n(kappa, 0);
    while (true) {
        RatVector cand(m);
        for (size_t j = 0; j < m; ++j) {
            mpq_class s = q[j];
            for (size_t l = 0; l < kappa; ++l)
                if (n[l]) s += mpq_class(ext[l][j] * n[l], N);
            cand[j] = mod1(s);
        }
        if (best.empty() || cand < best) best = std::move(cand);
        size_t l = 0;
        while (l < kappa && ++n[l] == N) n[l++] = 0;
        if (l == kappa) break;
    }
    if (m == 0) return {};
    return best;
}

}  // namespace

std::vector<RatVector> canonicalize_twisting(const std::vector<RatVector>& residues,
                                             const IntMatrix& ext, const std::vector<int>& orders) {
    if (residues.size() != orders.size()) throw error("MalformedInput", "one order per residue row");
    std::vector<RatVector> out;
    for (size_t a = 0; a < residues.size(); ++a) {
        if (orders[a] <= 0) throw error("MalformedInput", "orders must be positive");
        for (auto& v : ext)
            if (v.size() != residues[a].size()) throw error("MalformedInput", "length mismatch");
        out.push_back(min_shift(residues[a], ext, orders[a]));
    }
    return out;
}

std::vector<RatVector> canonicalize_twisting_group(const std::vector<RatVector>& residues,
                                                   const IntMatrix& ext, const std::vector<int>& orders) {
    int L = 1;
    for (int N : orders) L = std::lcm(L, N);
    std::set<RatVector> elems;
    const size_t r = residues.size();
    const size_t m = r ? residues[0].size() : 0;
    std::vector<int> c(r, 0);
    while (true) {
        RatVector g(m, 0);
        for (size_t a = 0; a < r; ++a)
            for (size_t j = 0; j < m; ++j) g[j] += residues[a][j] * c[a];
        for (auto& x : g) x = mod1(x);
        elems.insert(min_shift(g, ext, L));
        size_t a = 0;
        while (a < r && ++c[a] == orders[a]) c[a++] = 0;
        if (a == r) break;
    }
    return {elems.begin(), elems.end()};
}

// ---- model comparison -----------------------------------------------------

bool CanonicalModel::operator==(const CanonicalModel& o) const {
    return n_total == o.n_total && r == o.r && k_e == o.k_e && k_h == o.k_h && k_f == o.k_f &&
           elliptic == o.elliptic && hyperbolic == o.hyperbolic && twisting == o.twisting;
}

namespace {

struct Variant {
    std::vector<std::vector<long>> p;  // rows h_j
    std::vector<RatVector> tw;         // per generator, per plane
};

// Integers ordered 0, 1, -1, 2, -2, ... so that sign choices prefer positive entries.
bool less_entries(const IntMatrix& a, const IntMatrix& b) {
    auto key = [](const mpz_class& x) { return std::make_pair(mpz_class(abs(x)), x < 0); };
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), [&](const auto& r, const auto& s) {
        return std::lexicographical_compare(r.begin(), r.end(), s.begin(), s.end(),
                                            [&](const mpz_class& x, const mpz_class& y) { return key(x) < key(y); });
    });
}

bool less_model(const CanonicalModel& a, const CanonicalModel& b) {
    if (a.elliptic != b.elliptic) return less_entries(a.elliptic, b.elliptic);
    if (a.hyperbolic != b.hyperbolic) return less_entries(a.hyperbolic, b.hyperbolic);
    return a.twisting < b.twisting;
}

}  // namespace

CanonicalModel canonical_model(const ClassificationReport& rep, bool quotient_cycles) {
    const int kf = rep.k_f, ke = rep.k_e, kh = rep.k_h;
    const int m = rep.planes();
    const int kt = m - 2 * kf - ke - kh;
    std::vector<int> pf(kf), pe(ke), ph(kh), pt(kt);
    std::iota(pf.begin(), pf.end(), 0);
    std::iota(pe.begin(), pe.end(), 0);
    std::iota(ph.begin(), ph.end(), 0);
    std::iota(pt.begin(), pt.end(), 0);

    CanonicalModel best;
    bool have = false;
    auto evaluate = [&](unsigned flipmask, unsigned swapmask) {
        ClassificationReport v = rep;
        const int base_e = 2 * kf, base_h = 2 * kf + ke, base_t = 2 * kf + ke + kh;
        for (int j = 0; j < kf; ++j) {
            int s = pf[j];
            v.p_matrix[2 * j] = rep.p_matrix[2 * s];
            v.p_matrix[2 * j + 1] = rep.p_matrix[2 * s + 1];
            bool swap = (swapmask >> j) & 1;
            bool flip = (flipmask >> (kh + j)) & 1;
            if (swap)
                for (auto& x : v.p_matrix[2 * j]) x = -x;
            if (flip)
                for (auto& x : v.p_matrix[2 * j + 1]) x = -x;
            for (size_t a = 0; a < rep.twisting.size(); ++a) {
                v.twisting[a][2 * j] = rep.twisting[a][2 * s + (swap ? 1 : 0)];
                v.twisting[a][2 * j + 1] = rep.twisting[a][2 * s + (swap ? 0 : 1)];
            }
        }
        for (int j = 0; j < ke; ++j) {
            v.p_matrix[base_e + j] = rep.p_matrix[base_e + pe[j]];
            for (size_t a = 0; a < rep.twisting.size(); ++a)
                v.twisting[a][base_e + j] = rep.twisting[a][base_e + pe[j]];
        }
        for (int j = 0; j < kh; ++j) {
            v.p_matrix[base_h + j] = rep.p_matrix[base_h + ph[j]];
            if ((flipmask >> j) & 1)
                for (auto& x : v.p_matrix[base_h + j]) x = -x;
            for (size_t a = 0; a < rep.twisting.size(); ++a)
                v.twisting[a][base_h + j] = rep.twisting[a][base_h + ph[j]];
        }
        for (int j = 0; j < kt; ++j)
            for (size_t a = 0; a < rep.twisting.size(); ++a)
                v.twisting[a][base_t + j] = rep.twisting[a][base_t + pt[j]];

        CanonicalModel c;
        c.n_total = rep.n_total;
        c.r = rep.r;
        c.k_e = ke;
        c.k_h = kh;
        c.k_f = kf;
        c.elliptic = canonicalize_elliptic(v.elliptic_vectors());
        c.hyperbolic = canonicalize_hyperbolic(v.hyperbolic_vectors());
        c.twisting = quotient_cycles ? canonicalize_twisting_group(v.twisting, v.extended_elliptic(), v.orders)
                                     : canonicalize_twisting(v.twisting, v.extended_elliptic(), v.orders);
        if (!have || less_model(c, best)) {
            best = std::move(c);
            have = true;
        }
    };

    do {
        do {
            do {
                do {
                    for (unsigned flip = 0; flip < (1u << (kh + kf)); ++flip)
                        for (unsigned sw = 0; sw < (1u << kf); ++sw) evaluate(flip, sw);
                } while (std::next_permutation(pt.begin(), pt.end()));
            } while (std::next_permutation(ph.begin(), ph.end()));
        } while (std::next_permutation(pe.begin(), pe.end()));
    } while (std::next_permutation(pf.begin(), pf.end()));
    return best;
}

bool models_equivalent(const ClassificationReport& a, const ClassificationReport& b, bool quotient_cycles) {
    if (a.n_total != b.n_total || a.r != b.r || a.k_e != b.k_e || a.k_h != b.k_h || a.k_f != b.k_f ||
        a.planes() != b.planes())
        return false;
    return canonical_model(a, quotient_cycles) == canonical_model(b, quotient_cycles);
}

}  // namespace toricsym
