#pragma once

#include "toricsym/dynamics.hpp"
#include "toricsym/io.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace toricsym {

struct OrbitOptions {
    double tol = 1e-10;  // closure + fibre residual at convergence
    int max_iter = 50;
    double rank_tol = 1e-8;
    FlowOptions flow;
};

// 2pi-periodic trajectory of the field of sum a_i f_i through m1.
struct PeriodicOrbit {
    CVec m1, a, z;  // z = F(m1)
    double residual = 0;
    int iterations = 0;
    std::vector<double> residual_log;
    Trajectory trajectory;
};

// Gauss-Newton on (m, a): closure after time 2pi, F(m) = z, and m - m_guess transverse
// to the orbit directions.  z defaults to F(m_guess).
PeriodicOrbit find_periodic_orbit(const CompiledSystem& cs, const CVec& m_guess, const CVec& a_guess,
                                  const std::optional<CVec>& z = std::nullopt, const OrbitOptions& opt = {});

// Newton projection of m onto the fibre F = z (minimum-norm steps).
CVec project_to_fibre(const CompiledSystem& cs, const CVec& m, const CVec& z, int max_iter = 200);

// Closed curve t in [0, 2pi) -> (x, dx/dt).
using LoopCurve = std::function<void(double, CVec&, CVec&)>;
struct LoopSample {
    std::vector<CVec> x, v;
};
// Samples at t_k = 2 pi k / N.
using LoopSampler = std::function<LoopSample(int)>;
using OneForm = std::function<cd(const CVec&, const CVec&)>;

LoopSampler curve_sampler(const LoopCurve& c);
LoopSampler orbit_sampler(const CompiledSystem& cs, const PeriodicOrbit& orbit, const FlowOptions& opt = {});
OneForm primitive_form(const PolynomialSystem& sys);

struct LoopIntegral {
    cd value;
    double error = 0;
    int points = 0;
};

// Trapezoid rule on N and 2N points, doubling until the two agree within tol.
LoopIntegral loop_form_integral(const LoopSampler& loop, const OneForm& form, double tol = 1e-8, int n0 = 32,
                                int n_max = 1 << 14);

struct ActionSample {
    std::vector<CVec> z;
    std::vector<cd> I;
    std::vector<double> residual;
    int base = 0;           // grid index where I = 0
    CVec base_coeffs;       // periodic coefficient vector at (or nearest to) the base point
    CVec lambda_hat;        // fitted linear coefficients
    double remainder = 0;   // max |I - lambda_hat . (z - z_base)|
};

struct ActionOptions {
    OrbitOptions orbit;
    int substeps = 32;       // continuation steps per move between grid points
    int max_halvings = 10;
    double quad_tol = 1e-8;
};

// Continues the seed orbit over the grid and evaluates (1/2pi) times the loop integral
// of the primitive; the grid point nearest the origin is the base point.
ActionSample action_function(const CompiledSystem& cs, const PeriodicOrbit& seed, const std::vector<CVec>& grid,
                             const ActionOptions& opt = {});

struct MonodromyOptions {
    FlowOptions flow;
    int gauss_nodes = 10;
    double curl_tol = 1e-5;
    double fd_step = 1e-4;
    double newton_tol = 1e-11;
};

// Shift tau(z) with phi^tau_F(m(z)) = phi^{2pi}_{a.F}(m(z)) on a transverse section,
// generating function S by straight-line integration of tau, I = a.(z - z_base) - S/2pi.
ActionSample monodromy_action(const CompiledSystem& cs, const PeriodicOrbit& seed, const std::vector<CVec>& grid,
                              const MonodromyOptions& opt = {});

// Least-squares fit I ~ lambda . d + quadratic(d), d = z - z_base.
void fit_action(ActionSample& s);

std::string action_csv(const ActionSample& s);
json action_to_json(const ActionSample& s);

struct WitnessReport {
    cd theta1;                    // loop integral of the first dual form
    std::vector<cd> theta;        // all of them
    double length = 0;            // flat length of the loop
    double fibre_residual = 0;    // worst |gamma' - sum c_i X_i| / |gamma'|
    double point_radius = 0;      // |m1 - m0|
    double ball_radius = 0;       // r exp(-n c length)
    bool path_regular = false;    // segment m0 -> m1 stays in the regular part of the fibre
    std::string verdict;          // holds | fails | inconclusive
};

WitnessReport periodicity_witness(const CompiledSystem& cs, const CVec& m0, const LoopCurve& loop,
                                  double chart_radius = 1, double lipschitz = 1, double tol = 1e-8);

json witness_to_json(const WitnessReport& w);

}  // namespace toricsym
