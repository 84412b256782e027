#pragma once

#include "toricsym/polynomial.hpp"
#include "toricsym/symplectic.hpp"

#include <memory>
#include <optional>

namespace toricsym {

// Either a constant form or the parabolic-model form
//   alpha'(l) dl^dphi + R dx^dy + dl^(Q dx - P dy)
// on coordinates (l, phi, x, y) with P, Q, R polynomials in (l, x, y).
struct OmegaField {
    enum class Kind { Constant, Parabolic };
    Kind kind = Kind::Constant;
    Mat matrix;
    PolynomialExpr alpha, P, Q, R;

    static OmegaField constant(Mat m);
    static OmegaField parabolic(PolynomialExpr alpha, PolynomialExpr P, PolynomialExpr Q, PolynomialExpr R);

    bool is_constant() const { return kind == Kind::Constant; }
    // Symbolic closedness: dP/dx + dQ/dy + dR/dl == 0 for the parabolic family.
    bool closed(const std::vector<std::string>& coords) const;
};

struct PolynomialSystem {
    std::vector<std::string> coords;  // phase-space variables, in form order
    OmegaField omega;
    std::vector<PolynomialExpr> components;
    std::vector<int> periodic;        // coordinates living on R / 2 pi Z
    std::vector<std::pair<double, double>> box;  // sampling domain per coordinate
    bool complexified = false;

    int dim() const { return static_cast<int>(coords.size()); }
    int n() const { return static_cast<int>(components.size()); }
    // Form matrix at a (possibly complex) point.
    CMat form_at(const CVec& x) const;
    // Primitive one-form evaluated on (x, v).
    cd primitive(const CVec& x, const CVec& v) const;
};

// Fast evaluation of gradients and Hessians of all components.
class CompiledSystem {
public:
    explicit CompiledSystem(const PolynomialSystem& sys, bool with_hessians = true);

    const PolynomialSystem& system() const { return *sys_; }
    int dim() const { return dim_; }
    int n() const { return n_; }

    CVec values(const CVec& x) const;
    // Columns are the gradients of the components.
    CMat gradients(const CVec& x) const;
    // Columns are the Hamiltonian vector fields X_{f_i}.
    CMat fields(const CVec& x) const;
    // Derivative of the field of sum a_i f_i.
    CMat field_jacobian(const CVec& x, const CVec& a) const;
    CMat form_inverse(const CVec& x) const;

private:
    struct Sparse {
        std::vector<std::pair<int, cd>> terms;  // (monomial index, coefficient)
    };
    std::shared_ptr<const PolynomialSystem> sys_;
    int dim_ = 0, n_ = 0;
    bool hess_ = false;
    std::vector<Monomial> monos_;
    std::vector<Sparse> vals_, grads_, hessians_;  // grads: i*dim+k; hessians: (i*dim+k)*dim+l
    std::vector<Sparse> omega_parts_;               // alpha', P, Q, R for the parabolic form
    CMat const_inv_;
    int maxdeg_ = 0;

    std::vector<cd> eval_monos(const CVec& x) const;
    static cd apply(const Sparse& s, const std::vector<cd>& mv);
};

struct FlowOptions {
    double tol = 1e-12;
    double initial_step = 1e-2;
    long max_steps = 2000000;
    double blowup = 1e8;
    bool variational = false;        // also propagate the Jacobian of the flow
    bool implicit_midpoint = false;  // fixed-step symplectic scheme instead of DOPRI5
    double midpoint_step = 1e-3;
    bool check_energy = true;
};

struct Trajectory {
    std::vector<double> t;
    std::vector<CVec> x;
    std::vector<CMat> jacobian;  // filled when variational
    double energy_drift = 0;
    long steps = 0;
    const CVec& final_point() const { return x.back(); }
};

// Flow of the field of sum_i a_i f_i (complex coefficients allowed) from x0, reporting
// the state at each requested output time (monotone, same sign).
Trajectory integrate_flow(const CompiledSystem& cs, const CVec& a, const CVec& x0,
                          const std::vector<double>& times, const FlowOptions& opt = {});
Trajectory integrate_flow(const CompiledSystem& cs, const CVec& a, const CVec& x0, double t_final,
                          const FlowOptions& opt = {});

// Single Hamiltonian H (times the complex factor c) on a constant form.
Trajectory integrate_flow(const PolynomialExpr& H, cd c, const SymplecticSpace& space,
                          const std::vector<std::string>& coords, const CVec& x0, double t_final,
                          const FlowOptions& opt = {});

// Difference a - b with periodic coordinates wrapped into (-pi, pi].
CVec wrapped_difference(const PolynomialSystem& sys, const CVec& a, const CVec& b);

struct CommutingReport {
    double residual = 0;
    bool symbolic = false;
    int samples = 0;
};

// Pairwise brackets: symbolic when the form is constant and degrees are <= 12,
// otherwise sampled in the domain box.  Throws NotIntegrable above 1e-8.
CommutingReport verify_commuting(const PolynomialSystem& sys, int samples = 1000, unsigned seed = 1,
                                 double threshold = 1e-8);

// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Trajectory CSV: t, then real (and imaginary when complex) parts of each coordinate.
std::string trajectory_csv(const PolynomialSystem& sys, const Trajectory& tr);

}  // namespace toricsym
