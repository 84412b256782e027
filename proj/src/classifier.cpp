#include "toricsym/classifier.hpp"
#include "toricsym/errors.hpp"
#include "toricsym/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>

namespace toricsym {

namespace {

using cd = std::complex<double>;

constexpr double kSpectralTol = 1e-6;

double rel(const Mat& X) { return std::max(1.0, max_abs(X)); }

// Orthonormal basis of the column range of a projector (singular values ~1 or ~0).
Mat projector_range(const Mat& P) {
    Eigen::JacobiSVD<Mat> svd(P, Eigen::ComputeFullU);
    int k = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > 0.5) ++k;
    return svd.matrixU().leftCols(k);
}

Mat orthonormalize(const Mat& X) {
    if (X.cols() == 0) return X;
    Eigen::HouseholderQR<Mat> qr(X);
    return qr.householderQ() * Mat::Identity(X.rows(), X.cols());
}

struct Label {
    long k = 0;       // integer spectrum for A
    mpq_class q = 0;  // rotation number for M
    bool operator<(const Label& o) const { return k != o.k ? k < o.k : q < o.q; }
};

// Splits the orthonormal block B by the real spectral classes of X|B.
std::vector<std::pair<Label, Mat>> split_block(const Mat& B, const Mat& X, int mode, int order, double& residual) {
    // mode 0: elliptic A, 1: hyperbolic A, 2: finite-order M
    const int d = static_cast<int>(B.cols());
    Mat XB = B.transpose() * X * B;
    Eigen::EigenSolver<Mat> es(XB);
    if (es.info() != Eigen::Success) throw error("NonSemisimple", "eigensolver failed");
    std::vector<Label> labels(d);
    for (int i = 0; i < d; ++i) {
        cd lam = es.eigenvalues()(i);
        Label lb;
        if (mode == 0) {
            lb.k = std::lround(std::abs(lam.imag()));
            double res = std::max(std::abs(lam.real()), std::abs(std::abs(lam.imag()) - lb.k));
            residual = std::max(residual, res);
            if (res > kSpectralTol)
                throw error("NonResonantSpectrum", "eigenvalue " + std::to_string(lam.real()) + "+" +
                                                       std::to_string(lam.imag()) + "i is not in iZ");
        } else if (mode == 1) {
            lb.k = std::lround(std::abs(lam.real()));
            double res = std::max(std::abs(lam.imag()), std::abs(std::abs(lam.real()) - lb.k));
            residual = std::max(residual, res);
            if (res > kSpectralTol)
                throw error("NonResonantSpectrum", "eigenvalue " + std::to_string(lam.real()) + "+" +
                                                       std::to_string(lam.imag()) + "i is not in Z");
        } else {
            double theta = std::abs(std::arg(lam)) / (2 * M_PI);
            lb.q = rational_approx(theta, order);
            double res = std::max(std::abs(std::abs(lam) - 1.0), std::abs(theta - lb.q.get_d()));
            residual = std::max(residual, res);
            if (res > kSpectralTol)
                throw error("NotFiniteOrder", "multiplier is not a root of unity of order " + std::to_string(order));
        }
        labels[i] = lb;
    }
    std::map<Label, std::vector<int>> classes;
    for (int i = 0; i < d; ++i) classes[labels[i]].push_back(i);
    std::vector<std::pair<Label, Mat>> out;
    int total = 0;
    for (auto& [lb, idx] : classes) {
        const int c = static_cast<int>(idx.size());
        Mat R(d, 2 * c);
        for (int j = 0; j < c; ++j) {
            CVec v = es.eigenvectors().col(idx[j]);
            R.col(2 * j) = v.real();
            R.col(2 * j + 1) = v.imag();
        }
        Eigen::JacobiSVD<Mat> svd(R, Eigen::ComputeFullU);
        const auto& s = svd.singularValues();
        if (s(c - 1) <= 1e-6 * s(0)) throw error("NonSemisimple", "eigenvectors do not span the spectral class");
        Mat U = svd.matrixU().leftCols(c);
        Mat XU = XB * U;
        if (max_abs(XU - U * (U.transpose() * XU)) > 1e-7 * rel(XB))
            throw error("NonSemisimple", "spectral class is not invariant");
        out.emplace_back(lb, B * U);
        total += c;
    }
    if (total != d) throw error("NonSemisimple", "spectral classes do not fill the block");
    return out;
}

Mat symmetric_part(const Mat& X) { return 0.5 * (X + X.transpose()); }

long round_checked(double x, double& residual) {
    long k = std::lround(x);
    residual = std::max(residual, std::abs(x - k));
    return k;
}

// Coordinates of w in the symplectic plane basis (bx, by) with Omega(bx, by) = 1.
std::pair<double, double> plane_coords(const Mat& W, const Vec& w, const Vec& bx, const Vec& by) {
    return {w.dot(W * by), bx.dot(W * w)};
}

struct Unit {
    UnitType type;
    std::vector<Vec> cols;                  // 2 or 4 columns, (x, y) per plane
    std::vector<std::vector<long>> p_rows;  // 2 rows for focus units, 1 otherwise
    std::vector<std::vector<mpq_class>> twist;  // per plane, per generator a
};

int type_rank(UnitType t) { return static_cast<int>(t); }

bool unit_less(const Unit& a, const Unit& b) {
    if (a.type != b.type) return type_rank(a.type) < type_rank(b.type);
    if (a.p_rows != b.p_rows) return a.p_rows < b.p_rows;
    return a.twist < b.twist;
}

}  // namespace

mpq_class rational_approx(double x, long max_den) {
    if (max_den < 1) max_den = 1;
    double fl = std::floor(x);
    double frac = x - fl;
    // Convergents h/k of the continued fraction of frac.
    long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    long best_h = 0, best_k = 1;
    double r = frac;
    for (int it = 0; it < 64; ++it) {
        long a = static_cast<long>(std::floor(r));
        long h2 = a * h1 + h0, k2 = a * k1 + k0;
        if (k2 > max_den) break;
        best_h = h2;
        best_k = k2;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        double f = r - a;
        if (f < 1e-12) break;
        r = 1.0 / f;
    }
    // The rounding-up neighbour of the first step.
    if (std::abs(frac - 1.0) < std::abs(frac - static_cast<double>(best_h) / best_k)) {
        best_h = 1;
        best_k = 1;
    }
    mpq_class q(best_h, best_k);
    q.canonicalize();
    return q + mpq_class(static_cast<long>(fl));
}

Decomposition joint_block_decomposition(const LinearData& data, double tol) {
    const auto& sp = data.space;
    const int dim = sp.dim();
    Decomposition dec;
    for (auto& h : data.hamiltonians) {
        if (h.Q.rows() != dim || h.Q.cols() != dim) throw error("MalformedInput", "Hamiltonian matrix has wrong size");
        dec.A.push_back(hamiltonian_operator(h.Q, sp));
    }
    const auto& Ms = data.action.generators;
    if (data.action.orders.size() != Ms.size()) throw error("MalformedInput", "one order per twisting generator");
    for (size_t a = 0; a < Ms.size(); ++a) {
        const Mat& M = Ms[a];
        if (M.rows() != dim || M.cols() != dim) throw error("MalformedInput", "twisting matrix has wrong size");
        if (max_abs(M.transpose() * sp.form * M - sp.form) > tol * rel(M) * rel(M))
            throw error("NonSymplectic", "twisting generator " + std::to_string(a) + " does not preserve the form");
        int N = data.action.orders[a];
        if (N < 1) throw error("MalformedInput", "orders must be positive");
        Mat P = Mat::Identity(dim, dim);
        for (int k = 0; k < N; ++k) P = P * M;
        if (max_abs(P - Mat::Identity(dim, dim)) > 1e-6)
            throw error("NotFiniteOrder", "M^" + std::to_string(N) + " != Id for generator " + std::to_string(a));
    }
    std::vector<const Mat*> ops;
    for (auto& A : dec.A) ops.push_back(&A);
    for (auto& M : Ms) ops.push_back(&M);
    for (size_t i = 0; i < ops.size(); ++i)
        for (size_t j = i + 1; j < ops.size(); ++j) {
            Mat C = (*ops[i]) * (*ops[j]) - (*ops[j]) * (*ops[i]);
            if (max_abs(C) > tol * rel(*ops[i]) * rel(*ops[j]))
                throw error("NonCommuting", "operators " + std::to_string(i) + " and " + std::to_string(j) +
                                                " do not commute (" + std::to_string(max_abs(C)) + ")");
        }

    const int L = static_cast<int>(dec.A.size());
    const int R = static_cast<int>(Ms.size());
    dec.blocks.push_back(JointBlock{Mat::Identity(dim, dim), std::vector<long>(L, 0), std::vector<long>(L, 0),
                                    std::vector<mpq_class>(R, 0)});
    for (int op = 0; op < L + R; ++op) {
        std::vector<JointBlock> next;
        for (auto& b : dec.blocks) {
            int mode = op < L ? (data.hamiltonians[op].kind == GeneratorKind::Elliptic ? 0 : 1) : 2;
            const Mat& X = op < L ? dec.A[op] : Ms[op - L];
            int order = op < L ? 0 : data.action.orders[op - L];
            for (auto& [lb, basis] : split_block(b.basis, X, mode, order, dec.residual)) {
                JointBlock nb = b;
                nb.basis = basis;
                if (mode == 0) nb.elliptic_spectrum[op] = lb.k;
                else if (mode == 1) nb.hyperbolic_spectrum[op] = lb.k;
                else nb.rotation[op - L] = lb.q;
                next.push_back(std::move(nb));
            }
        }
        dec.blocks = std::move(next);
    }
    for (auto& b : dec.blocks) {
        Mat Wb = b.basis.transpose() * sp.form * b.basis;
        Eigen::JacobiSVD<Mat> svd(Wb);
        if (svd.singularValues().minCoeff() < 1e-8 * rel(sp.form))
            throw error("DegenerateSubspace", "joint invariant block is not symplectic");
    }
    return dec;
}

namespace {

struct BlockOps {
    std::vector<int> Ms, Is, Hs;
    Mat E, H;  // ambient matrices, meaningful on the block
};

BlockOps block_ops(const JointBlock& b, const Decomposition& dec, const LinearData& data) {
    BlockOps o;
    const int dim = data.space.dim();
    for (size_t a = 0; a < b.rotation.size(); ++a)
        if (b.rotation[a] != 0 && b.rotation[a] != mpq_class(1, 2)) o.Ms.push_back(static_cast<int>(a));
    for (size_t l = 0; l < dec.A.size(); ++l) {
        if (data.hamiltonians[l].kind == GeneratorKind::Elliptic && b.elliptic_spectrum[l] != 0)
            o.Is.push_back(static_cast<int>(l));
        if (data.hamiltonians[l].kind == GeneratorKind::Hyperbolic && b.hyperbolic_spectrum[l] != 0)
            o.Hs.push_back(static_cast<int>(l));
    }
    auto L_op = [&](int a) {
        double th = 2 * M_PI * b.rotation[a].get_d();
        return Mat((data.action.generators[a] - std::cos(th) * Mat::Identity(dim, dim)) / std::sin(th));
    };
    if (!o.Ms.empty()) o.E = L_op(o.Ms[0]);
    else if (!o.Is.empty()) o.E = dec.A[o.Is[0]] / static_cast<double>(b.elliptic_spectrum[o.Is[0]]);
    if (!o.Hs.empty()) o.H = dec.A[o.Hs[0]] / static_cast<double>(b.hyperbolic_spectrum[o.Hs[0]]);
    return o;
}

}  // namespace

std::vector<RefinedBlock> refine_blocks(const Decomposition& dec, const LinearData& data, double tol) {
    const int dim = data.space.dim();
    const int L = static_cast<int>(dec.A.size());
    const int R = static_cast<int>(data.action.generators.size());
    std::vector<RefinedBlock> out;
    for (size_t s = 0; s < dec.blocks.size(); ++s) {
        const JointBlock& b = dec.blocks[s];
        BlockOps o = block_ops(b, dec, data);
        struct Inv {
            Mat T;
            int index;
            bool is_a;
            int sign;  // recorded sign = sign * eigenvalue
        };
        std::vector<Inv> invs;
        auto L_op = [&](int a) {
            double th = 2 * M_PI * b.rotation[a].get_d();
            return Mat((data.action.generators[a] - std::cos(th) * Mat::Identity(dim, dim)) / std::sin(th));
        };
        for (int a : o.Ms) invs.push_back({o.E * L_op(a), a, true, -1});
        for (int l : o.Is) invs.push_back({o.E * dec.A[l] / static_cast<double>(b.elliptic_spectrum[l]), l, false, -1});
        for (int l : o.Hs)
            invs.push_back({o.H * dec.A[l] / static_cast<double>(b.hyperbolic_spectrum[l]), l, false, 1});

        const Mat& B = b.basis;
        const int d = static_cast<int>(B.cols());
        struct Sub {
            Mat U;  // in block coordinates
            std::vector<int> eps, eta;
        };
        std::vector<Sub> subs{{Mat::Identity(d, d), std::vector<int>(R, 0), std::vector<int>(L, 0)}};
        for (auto& inv : invs) {
            Mat TB = B.transpose() * inv.T * B;
            if (max_abs(TB * TB - Mat::Identity(d, d)) > tol * rel(TB) * rel(TB))
                throw error("InvolutionDefect", "involution squares to " + std::to_string(max_abs(TB * TB)) +
                                                    " away from the identity");
            std::vector<Sub> next;
            for (auto& sub : subs) {
                Mat TU = sub.U.transpose() * TB * sub.U;
                const int k = static_cast<int>(sub.U.cols());
                for (int ev : {1, -1}) {
                    Mat P = 0.5 * (Mat::Identity(k, k) + ev * TU);
                    Mat Y = projector_range(P);
                    if (Y.cols() == 0) continue;
                    Sub ns = sub;
                    ns.U = orthonormalize(sub.U * Y);
                    int sign = inv.sign * ev;
                    if (inv.is_a) ns.eps[inv.index] = sign;
                    else ns.eta[inv.index] = sign;
                    next.push_back(std::move(ns));
                }
            }
            int total = 0;
            for (auto& ns : next) total += static_cast<int>(ns.U.cols());
            if (total != d) throw error("InvolutionDefect", "involution eigenspaces do not fill the block");
            subs = std::move(next);
        }
        for (auto& sub : subs) {
            RefinedBlock rb;
            rb.parent = static_cast<int>(s);
            rb.basis = B * sub.U;
            rb.eps = sub.eps;
            rb.eta = sub.eta;
            bool ell = !o.Ms.empty() || !o.Is.empty();
            bool hyp = !o.Hs.empty();
            rb.type = ell && hyp ? UnitType::Focus : ell ? UnitType::Elliptic : hyp ? UnitType::Hyperbolic
                                                                                 : UnitType::Trivial;
            rb.anchor_a = o.Ms.empty() ? -1 : o.Ms[0];
            rb.anchor_l = o.Ms.empty() && !o.Is.empty() ? o.Is[0] : -1;
            rb.anchor_h = o.Hs.empty() ? -1 : o.Hs[0];
            out.push_back(std::move(rb));
        }
    }
    return out;
}

ClassificationReport build_normal_basis(const std::vector<RefinedBlock>& refined, const Decomposition& dec,
                                        const LinearData& data) {
    const Mat& W = data.space.form;
    const int dim = data.space.dim();
    const int L = static_cast<int>(dec.A.size());
    const int R = static_cast<int>(data.action.generators.size());
    double residual = dec.residual;

    auto twist_of = [&](const Vec& bx, const Vec& by) {
        std::vector<mpq_class> q(R);
        for (int a = 0; a < R; ++a) {
            auto [c, s] = plane_coords(W, data.action.generators[a] * bx, bx, by);
            double th = std::atan2(s, c) / (2 * M_PI);
            if (th < 0) th += 1;
            mpq_class r = mod1(rational_approx(th, data.action.orders[a]));
            double diff = std::abs(th - r.get_d());
            residual = std::max(residual, std::min(diff, 1 - diff));
            q[a] = r;
        }
        return q;
    };
    auto Qv = [&](int l, const Vec& u, const Vec& v) { return u.dot(data.hamiltonians[l].Q * v); };
    auto is_ell = [&](int l) { return data.hamiltonians[l].kind == GeneratorKind::Elliptic; };

    std::vector<Unit> units;
    for (auto& rb : refined) {
        const JointBlock& jb = dec.blocks[rb.parent];
        BlockOps o = block_ops(jb, dec, data);
        const Mat& U = rb.basis;
        if (rb.type == UnitType::Elliptic) {
            Mat Rm = U;
            while (Rm.cols() > 0) {
                Mat G = symmetric_part(Rm.transpose() * W * o.E * Rm);
                Eigen::SelfAdjointEigenSolver<Mat> es(G);
                int pick = 0;
                for (int i = 1; i < G.rows(); ++i)
                    if (std::abs(es.eigenvalues()(i)) > std::abs(es.eigenvalues()(pick))) pick = i;
                Vec v = Rm * es.eigenvectors().col(pick);
                double g = v.dot(W * o.E * v);
                if (std::abs(g) < 1e-12) throw error("AssemblyDefect", "elliptic block has a null pairing");
                double eh = g > 0 ? 1.0 : -1.0;
                Vec e = v / std::sqrt(std::abs(g));
                Vec f = eh * (o.E * e);
                Unit u{UnitType::Elliptic, {e, f}, {}, {}};
                std::vector<long> row(L, 0);
                for (int l = 0; l < L; ++l)
                    if (is_ell(l)) row[l] = round_checked(Qv(l, e, e), residual);
                u.p_rows.push_back(row);
                u.twist.push_back(twist_of(e, f));
                units.push_back(std::move(u));
                Mat C(2, Rm.cols());
                C.row(0) = (e.transpose() * W * Rm);
                C.row(1) = (f.transpose() * W * Rm);
                Mat N = null_space(C, 1e-9);
                Rm = orthonormalize(Rm * N);
            }
        } else if (rb.type == UnitType::Hyperbolic || rb.type == UnitType::Focus) {
            const int d = static_cast<int>(U.cols());
            Mat HU = U.transpose() * o.H * U;
            Mat Vp = U * projector_range(0.5 * (Mat::Identity(d, d) - HU));  // ker(H + I)
            Mat Vm = U * projector_range(0.5 * (Mat::Identity(d, d) + HU));  // ker(H - I)
            if (Vp.cols() != d / 2 || Vm.cols() != d / 2)
                throw error("AssemblyDefect", "hyperbolic eigenspaces are not Lagrangian halves");
            Mat Es(dim, d / 2);
            if (rb.type == UnitType::Hyperbolic) {
                Es = Vp;
            } else {
                Mat Rm = Vp;
                int c = 0;
                while (Rm.cols() > 0) {
                    Vec v = Rm.col(0);
                    Vec w = o.E * v;
                    Es.col(c++) = v;
                    Es.col(c++) = w;
                    Mat C(2, Rm.cols());
                    C.row(0) = v.transpose() * Rm + (o.E * v).transpose() * (o.E * Rm);
                    C.row(1) = w.transpose() * Rm + (o.E * w).transpose() * (o.E * Rm);
                    Mat N = null_space(C, 1e-9);
                    Rm = orthonormalize(Rm * N);
                }
            }
            Mat G = Es.transpose() * W * Vm;
            Mat Fs = Vm * G.inverse();
            if (rb.type == UnitType::Hyperbolic) {
                for (int j = 0; j < d / 2; ++j) {
                    Vec e = Es.col(j), f = Fs.col(j);
                    for (int l = 0; l < L; ++l) {
                        if (is_ell(l)) continue;
                        double c = Qv(l, e, f);
                        if (std::abs(c) < 0.5) continue;
                        if (c < 0) {
                            Vec t = e;
                            e = f;
                            f = -t;
                        }
                        break;
                    }
                    Unit u{UnitType::Hyperbolic, {e, f}, {}, {}};
                    std::vector<long> row(L, 0);
                    for (int l = 0; l < L; ++l)
                        if (!is_ell(l)) row[l] = round_checked(Qv(l, e, f), residual);
                    u.p_rows.push_back(row);
                    u.twist.push_back(twist_of(e, f));
                    units.push_back(std::move(u));
                }
            } else {
                const double s2 = std::sqrt(0.5);
                for (int j = 0; j < d / 4; ++j) {
                    Vec e1 = Es.col(2 * j), e2 = Es.col(2 * j + 1), f1 = Fs.col(2 * j), f2 = Fs.col(2 * j + 1);
                    Vec b1 = s2 * (e1 - f2), b2 = s2 * (e2 + f1), b3 = s2 * (e1 + f2), b4 = s2 * (f1 - e2);
                    for (int l = 0; l < L; ++l) {
                        if (!is_ell(l)) continue;
                        double c = Qv(l, b1, b1);
                        if (std::abs(c) < 0.5) continue;
                        if (c < 0) {
                            std::swap(b1, b3);
                            std::swap(b2, b4);
                        }
                        break;
                    }
                    for (int l = 0; l < L; ++l) {
                        if (is_ell(l)) continue;
                        double c = Qv(l, b1, b4);
                        if (std::abs(c) < 0.5) continue;
                        if (c < 0) {
                            b3 = -b3;
                            b4 = -b4;
                        }
                        break;
                    }
                    Unit u{UnitType::Focus, {b1, b2, b3, b4}, {}, {}};
                    std::vector<long> re(L, 0), rh(L, 0);
                    for (int l = 0; l < L; ++l) {
                        if (is_ell(l)) re[l] = round_checked(Qv(l, b1, b1), residual);
                        else rh[l] = round_checked(Qv(l, b1, b4), residual);
                    }
                    u.p_rows = {re, rh};
                    u.twist.push_back(twist_of(b1, b2));
                    u.twist.push_back(twist_of(b3, b4));
                    units.push_back(std::move(u));
                }
            }
        } else {
            Mat S = symplectic_gram_schmidt(U, data.space);
            for (int j = 0; j < S.cols() / 2; ++j) {
                Vec e = S.col(2 * j), f = S.col(2 * j + 1);
                Unit u{UnitType::Trivial, {e, f}, {}, {}};
                u.twist.push_back(twist_of(e, f));
                units.push_back(std::move(u));
            }
        }
    }
    std::stable_sort(units.begin(), units.end(), unit_less);

    ClassificationReport rep;
    rep.n_total = data.n_total > 0 ? data.n_total : data.space.n();
    rep.r = data.rank;
    for (auto& h : data.hamiltonians) rep.kinds.push_back(h.kind);
    rep.orders = data.action.orders;
    rep.twisting.assign(R, {});
    rep.basis = Mat(dim, dim);
    int col = 0;
    for (auto& u : units) {
        if (u.type == UnitType::Focus) ++rep.k_f;
        if (u.type == UnitType::Elliptic) ++rep.k_e;
        if (u.type == UnitType::Hyperbolic) ++rep.k_h;
        rep.units.push_back(NormalUnit{u.type, col / 2});
        for (auto& c : u.cols) rep.basis.col(col++) = c;
        for (auto& row : u.p_rows) rep.p_matrix.push_back(row);
        for (auto& plane : u.twist)
            for (int a = 0; a < R; ++a) rep.twisting[a].push_back(plane[a]);
    }
    rep.spectral_residual = residual;
    if (residual > kSpectralTol)
        throw error("AssemblyDefect", "normal-form coefficients are not integral (residual " +
                                          std::to_string(residual) + ")");

    // Post-assembly invariants.
    const Mat& S = rep.basis;
    double sc = rel(S) * rel(S);
    if (max_abs(S.transpose() * W * S - standard_form(dim / 2)) > 1e-10 * sc)
        throw error("AssemblyDefect", "basis is not symplectic");
    for (int l = 0; l < L; ++l) {
        Mat D = S.transpose() * data.hamiltonians[l].Q * S - normal_form_hessian(rep, l);
        if (max_abs(D) > 1e-8 * sc * rel(data.hamiltonians[l].Q))
            throw error("AssemblyDefect", "Hessian of generator " + std::to_string(l) + " is off its normal form");
    }
    Eigen::PartialPivLU<Mat> lu(S);
    for (int a = 0; a < R; ++a) {
        Mat D = lu.solve(data.action.generators[a] * S) - normal_form_rotation(rep, a);
        if (max_abs(D) > 1e-8 * sc) throw error("AssemblyDefect", "twisting generator is off its rotation form");
    }
    return rep;
}

Mat normal_form_hessian(const ClassificationReport& rep, int l) {
    const int dim = 2 * rep.planes();
    Mat D = Mat::Zero(dim, dim);
    int row = 0;
    for (auto& u : rep.units) {
        const int x = 2 * u.first_plane;
        if (u.type == UnitType::Focus) {
            double pe = static_cast<double>(rep.p_matrix[row][l]);
            double ph = static_cast<double>(rep.p_matrix[row + 1][l]);
            D(x, x) = D(x + 1, x + 1) = pe;
            D(x + 2, x + 2) = D(x + 3, x + 3) = -pe;
            D(x, x + 3) = D(x + 3, x) = ph;
            D(x + 2, x + 1) = D(x + 1, x + 2) = ph;
            row += 2;
        } else if (u.type == UnitType::Elliptic) {
            D(x, x) = D(x + 1, x + 1) = static_cast<double>(rep.p_matrix[row][l]);
            ++row;
        } else if (u.type == UnitType::Hyperbolic) {
            D(x, x + 1) = D(x + 1, x) = static_cast<double>(rep.p_matrix[row][l]);
            ++row;
        }
    }
    return D;
}

Mat normal_form_rotation(const ClassificationReport& rep, int a) {
    const int m = rep.planes();
    Mat D = Mat::Zero(2 * m, 2 * m);
    for (int j = 0; j < m; ++j) {
        double th = 2 * M_PI * rep.twisting[a][j].get_d();
        D(2 * j, 2 * j) = D(2 * j + 1, 2 * j + 1) = std::cos(th);
        D(2 * j + 1, 2 * j) = std::sin(th);
        D(2 * j, 2 * j + 1) = -std::sin(th);
    }
    return D;
}

ClassificationReport classify(const LinearData& data) {
    Decomposition dec = joint_block_decomposition(data);
    auto refined = refine_blocks(dec, data);
    return build_normal_basis(refined, dec, data);
}

LinearData conjugate(const LinearData& data, const Mat& P) {
    LinearData out(SymplecticSpace(P.transpose() * data.space.form * P));
    out.n_total = data.n_total;
    out.rank = data.rank;
    for (auto& h : data.hamiltonians) out.hamiltonians.push_back({P.transpose() * h.Q * P, h.kind});
    Eigen::PartialPivLU<Mat> lu(P);
    for (auto& M : data.action.generators) out.action.generators.push_back(lu.solve(M * P));
    out.action.orders = data.action.orders;
    return out;
}

}  // namespace toricsym
