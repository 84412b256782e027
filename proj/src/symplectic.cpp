#include "toricsym/symplectic.hpp"
#include "toricsym/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cstdlib>
#include <string>

namespace toricsym {

double default_tol() {
    static const double tol = [] {
        if (const char* s = std::getenv("TORICSYM_TOL")) {
            char* end = nullptr;
            double v = std::strtod(s, &end);
            if (end != s && v > 0) return v;
        }
        return 1e-10;
    }();
    return tol;
}

double max_abs(const Mat& M) { return M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff(); }

Mat standard_form(int n) {
    Mat W = Mat::Zero(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) {
        W(2 * j, 2 * j + 1) = 1;
        W(2 * j + 1, 2 * j) = -1;
    }
    return W;
}

SymplecticSpace::SymplecticSpace(Mat w, double tol) : form(std::move(w)) {
    if (tol < 0) tol = default_tol();
    if (form.rows() != form.cols() || form.rows() % 2 != 0 || form.rows() == 0)
        throw error("SingularForm", "form must be a square matrix of even positive size");
    if (max_abs(form + form.transpose()) > tol)
        throw error("SingularForm", "form is not antisymmetric");
    Eigen::JacobiSVD<Mat> svd(form);
    if (svd.singularValues().minCoeff() <= tol * std::max(1.0, svd.singularValues().maxCoeff()))
        throw error("SingularForm", "form is degenerate");
}

Mat hamiltonian_operator(const Mat& Q, const SymplecticSpace& space, double tol) {
    if (tol < 0) tol = default_tol();
    if (Q.rows() != space.dim() || Q.cols() != space.dim())
        throw error("NonSymmetricInput", "Q has wrong shape");
    if (max_abs(Q - Q.transpose()) > tol)
        throw error("NonSymmetricInput", "Q is not symmetric");
    return space.form.partialPivLu().solve(Q);
}

Mat null_space(const Mat& X, double tol) {
    const int n = static_cast<int>(X.cols());
    if (X.rows() == 0) return Mat::Identity(n, n);
    Eigen::JacobiSVD<Mat> svd(X, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    double scale = std::max(1.0, s.size() ? s(0) : 0.0);
    int rank = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s(i) > tol * scale) ++rank;
    return svd.matrixV().rightCols(n - rank);
}

Mat symplectic_complement(const Mat& W, const SymplecticSpace& space, bool split, double tol) {
    if (tol < 0) tol = default_tol();
    if (W.cols() == 0) return Mat::Identity(space.dim(), space.dim());
    if (split) {
        Mat G = W.transpose() * space.form * W;
        Eigen::JacobiSVD<Mat> svd(G);
        double cond_floor = tol * std::max(1.0, W.squaredNorm());
        if (G.rows() % 2 != 0 || svd.singularValues().minCoeff() <= cond_floor)
            throw error("DegenerateSubspace", "restriction of the form is singular");
    }
    // v is in the complement iff W^T Omega v = 0.
    Mat C = null_space(W.transpose() * space.form, std::sqrt(tol));
    return C;
}

Mat symplectic_gram_schmidt(const Mat& vectors, const SymplecticSpace& space, double tol) {
    if (tol < 0) tol = default_tol();
    const Mat& Wf = space.form;
    std::vector<Vec> pool;
    for (int i = 0; i < vectors.cols(); ++i) pool.push_back(vectors.col(i));
    std::vector<Vec> es, fs;
    while (!pool.empty()) {
        // Pick the pair with the largest pairing; this keeps the division well conditioned.
        double best = 0;
        int bi = -1, bj = -1;
        for (size_t i = 0; i < pool.size(); ++i)
            for (size_t j = i + 1; j < pool.size(); ++j) {
                double w = std::abs(pool[i].dot(Wf * pool[j])) / (pool[i].norm() * pool[j].norm() + 1e-300);
                if (w > best) { best = w; bi = int(i); bj = int(j); }
            }
        if (bi < 0 || best <= std::sqrt(tol)) {
            bool all_small = true;
            for (auto& v : pool)
                if (v.norm() > std::sqrt(tol)) all_small = false;
            if (all_small && pool.size() % 2 == 0) break;
            throw error("DegenerateSubspace", "span of the input is not symplectic");
        }
        Vec e = pool[bi], f = pool[bj];
        double w = e.dot(Wf * f);
        double scale = std::sqrt(std::abs(w));
        e /= scale;
        f /= (w > 0 ? scale : -scale);
        // Two passes of re-orthogonalization against the accumulated pairs.
        for (int pass = 0; pass < 2; ++pass)
            for (size_t k = 0; k < es.size(); ++k) {
                e += -e.dot(Wf * fs[k]) * es[k] + e.dot(Wf * es[k]) * fs[k];
                f += -f.dot(Wf * fs[k]) * es[k] + f.dot(Wf * es[k]) * fs[k];
            }
        double wn = e.dot(Wf * f);
        e /= std::sqrt(std::abs(wn));
        f /= (wn > 0 ? std::sqrt(wn) : -std::sqrt(-wn));
        std::vector<Vec> rest;
        for (size_t k = 0; k < pool.size(); ++k) {
            if (int(k) == bi || int(k) == bj) continue;
            Vec v = pool[k];
            v += -v.dot(Wf * f) * e + v.dot(Wf * e) * f;
            rest.push_back(v);
        }
        pool = std::move(rest);
        es.push_back(e);
        fs.push_back(f);
    }
    Mat S(space.dim(), 2 * es.size());
    for (size_t k = 0; k < es.size(); ++k) {
        S.col(2 * k) = es[k];
        S.col(2 * k + 1) = fs[k];
    }
    return S;
}

Mat random_symplectic(int n, std::mt19937_64& rng, double scale) {
    std::normal_distribution<double> nd(0.0, scale);
    Mat Q(2 * n, 2 * n);
    for (int i = 0; i < 2 * n; ++i)
        for (int j = 0; j < 2 * n; ++j) Q(i, j) = nd(rng);
    Q = (Q + Q.transpose()).eval() / 2;
    Mat A = standard_form(n).inverse() * Q;
    return A.exp();
}

}  // namespace toricsym
