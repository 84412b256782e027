#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "toricsym/dynamics.hpp"
#include "toricsym/errors.hpp"

#include <random>

using namespace toricsym;

namespace {

PolynomialSystem make(const std::vector<std::string>& coords, const std::vector<std::string>& texts,
                      const std::vector<ComplexAlias>& al = {}) {
    PolynomialSystem s;
    s.coords = coords;
    s.omega = OmegaField::constant(standard_form(static_cast<int>(coords.size()) / 2));
    for (auto& t : texts) s.components.push_back(parse_hamiltonian(t, coords, al));
    return s;
}

CVec point(std::initializer_list<cd> v) {
    CVec x(v.size());
    int i = 0;
    for (auto c : v) x(i++) = c;
    return x;
}

// re(dz ^ dw) = dx1 ^ dx2 - dy1 ^ dy2 in the order (x1, y1, x2, y2).
Mat holomorphic_form() {
    Mat W = Mat::Zero(4, 4);
    W(0, 2) = 1;
    W(2, 0) = -1;
    W(1, 3) = -1;
    W(3, 1) = 1;
    return W;
}

}  // namespace

TEST_CASE("oscillator closes after 2 pi") {
    auto sp = SymplecticSpace::standard(1);
    auto H = parse_hamiltonian("(x^2 + y^2)/2", {"x", "y"});
    auto tr = integrate_flow(H, 1.0, sp, {"x", "y"}, point({1, 0}), 2 * M_PI);
    CHECK((tr.final_point() - point({1, 0})).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(tr.energy_drift < 1e-10);
}

TEST_CASE("oscillator rotates counter-clockwise") {
    auto sp = SymplecticSpace::standard(1);
    auto H = parse_hamiltonian("(x^2 + y^2)/2", {"x", "y"});
    auto tr = integrate_flow(H, 1.0, sp, {"x", "y"}, point({1, 0}), M_PI / 2);
    CHECK(std::abs(tr.final_point()(0)) < 1e-9);
    CHECK(tr.final_point()(1).real() == doctest::Approx(1.0));
}

TEST_CASE("zero Hamiltonian gives a constant trajectory") {
    auto sp = SymplecticSpace::standard(1);
    auto H = parse_hamiltonian("0", {"x", "y"});
    auto x0 = point({0.3, -2});
    auto tr = integrate_flow(H, 1.0, sp, {"x", "y"}, x0, 5.0);
    CHECK((tr.final_point() - x0).cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("hyperbolic model under i f closes in imaginary time") {
    auto sys = make({"x", "y"}, {"x*y"});
    CompiledSystem cs(sys);
    const double eps = 0.1;
    CVec a(1);
    a(0) = cd(0, 1);
    FlowOptions opt;
    std::vector<double> times;
    for (int k = 1; k <= 8; ++k) times.push_back(2 * M_PI * k / 8);
    auto tr = integrate_flow(cs, a, point({eps, 0}), times, opt);
    for (size_t k = 0; k < times.size(); ++k) {
        CVec expect = point({eps * std::exp(cd(0, -times[k])), 0});
        CHECK((tr.x[k] - expect).cwiseAbs().maxCoeff() < 1e-9);
    }
    CHECK((tr.final_point() - point({eps, 0})).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("flows are reversible") {
    auto sys = make({"x1", "y1", "x2", "y2"}, {"re(z^2 + w^3)", "im(z^2 + w^3)"}, {{"z", "x1", "y1"}, {"w", "x2", "y2"}});
    CompiledSystem cs(sys);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    FlowOptions opt;
    opt.tol = 1e-12;
    for (int trial = 0; trial < 10; ++trial) {
        CVec x0(4), a(2);
        for (int i = 0; i < 4; ++i) x0(i) = u(rng);
        a << u(rng), u(rng);
        auto tr = integrate_flow(cs, a, x0, std::vector<double>{1.0, 0.0}, opt);
        CHECK((tr.x[1] - x0).cwiseAbs().maxCoeff() <= 10 * opt.tol);
    }
}

TEST_CASE("real Hamiltonian from a real start stays real") {
    auto sys = make({"p1", "q1", "p2", "q2"}, {"p1*q2 - p2*q1", "p1*q1 + p2*q2"});
    CompiledSystem cs(sys);
    CVec a(2);
    a << 0.7, -0.4;
    auto tr = integrate_flow(cs, a, point({0.2, 0.1, -0.3, 0.05}), 3.0);
    CHECK(tr.final_point().imag().cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("focus-focus elliptic generator is 2 pi periodic") {
    auto sys = make({"p1", "q1", "p2", "q2"}, {"p1*q2 - p2*q1", "p1*q1 + p2*q2"});
    CompiledSystem cs(sys);
    CVec a(2);
    a << 1, 0;
    auto x0 = point({0.3, 0.2, -0.1, 0.4});
    auto tr = integrate_flow(cs, a, x0, 2 * M_PI);
    CHECK((tr.final_point() - x0).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("variational equation matches finite differences") {
    auto sys = make({"x1", "y1", "x2", "y2"}, {"re(z^2 + w^3)", "im(z^2 + w^3)"}, {{"z", "x1", "y1"}, {"w", "x2", "y2"}});
    CompiledSystem cs(sys);
    CVec a(2);
    a << 0.3, 0.2;
    FlowOptions opt;
    opt.variational = true;
    opt.check_energy = false;
    auto x0 = point({0.2, -0.1, 0.3, 0.25});
    auto tr = integrate_flow(cs, a, x0, 1.0, opt);
    FlowOptions plain;
    plain.check_energy = false;
    for (int l = 0; l < 4; ++l) {
        const double h = 1e-6;
        CVec xp = x0, xm = x0;
        xp(l) += h;
        xm(l) -= h;
        CVec col = (integrate_flow(cs, a, xp, 1.0, plain).final_point() -
                    integrate_flow(cs, a, xm, 1.0, plain).final_point()) / (2 * h);
        CHECK((col - tr.jacobian.back().col(l)).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("blow-up is reported as a step failure") {
    auto sp = SymplecticSpace::standard(1);
    // -x^2 y generates x' = x^2, which leaves every bounded set before t = 1.
    auto G = parse_hamiltonian("x^2*y", {"x", "y"});
    try {
        integrate_flow(G, -1.0, sp, {"x", "y"}, point({1, 1}), 5.0);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.kind() == "StepFailure");
    }
}

TEST_CASE("implicit midpoint option") {
    auto sp = SymplecticSpace::standard(1);
    auto H = parse_hamiltonian("(x^2 + y^2)/2", {"x", "y"});
    FlowOptions opt;
    opt.implicit_midpoint = true;
    opt.midpoint_step = 1e-3;
    opt.tol = 1e-7;
    auto tr = integrate_flow(H, 1.0, sp, {"x", "y"}, point({1, 0}), 2 * M_PI, opt);
    CHECK((tr.final_point() - point({1, 0})).cwiseAbs().maxCoeff() < 1e-5);
    CHECK(tr.energy_drift < 1e-12);
}

TEST_CASE("commuting checks") {
    auto ff = make({"p1", "q1", "p2", "q2"}, {"p1*q2 - p2*q1", "p1*q1 + p2*q2"});
    auto r = verify_commuting(ff);
    CHECK(r.symbolic);
    CHECK(r.residual == 0);

    auto hyp = make({"x1", "y1", "x2", "y2"},
                    {"re(z^2 + (w+3)*(w+2)*(w+1)*w^2)", "im(z^2 + (w+3)*(w+2)*(w+1)*w^2)"},
                    {{"z", "x1", "y1"}, {"w", "x2", "y2"}});
    hyp.omega = OmegaField::constant(holomorphic_form());
    CHECK(verify_commuting(hyp).residual == 0);

    auto broken = make({"p", "q"}, {"p^2/2", "p*q + q"});
    try {
        verify_commuting(broken);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.kind() == "NotIntegrable");
    }
}

TEST_CASE("sampled commuting check") {
    auto hyp = make({"x1", "y1", "x2", "y2"}, {"re(z^2 + w^3)", "im(z^2 + w^3)"}, {{"z", "x1", "y1"}, {"w", "x2", "y2"}});
    hyp.omega = OmegaField::constant(holomorphic_form());
    // Force the sampling path through a high-degree multiple.
    hyp.components[0] = hyp.components[0].pow(7);
    auto r = verify_commuting(hyp, 1000);
    CHECK_FALSE(r.symbolic);
    CHECK(r.samples == 1000);
    CHECK(r.residual < 1e-8);
}

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
    std::vector<double> n, w;
    gauss_legendre(6, n, w);
    for (int k = 0; k <= 11; ++k) {
        double s = 0;
        for (int i = 0; i < 6; ++i) s += w[i] * std::pow(n[i], k);
        CHECK(s == doctest::Approx(1.0 / (k + 1)).epsilon(1e-13));
    }
}

TEST_CASE("trajectory CSV") {
    auto sys = make({"x", "y"}, {"(x^2 + y^2)/2"});
    CompiledSystem cs(sys);
    CVec a(1);
    a(0) = 1;
    auto tr = integrate_flow(cs, a, point({1, 0}), std::vector<double>{0.5, 1.0});
    auto csv = trajectory_csv(sys, tr);
    CHECK(csv.rfind("t,x,y\n0.5,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("parabolic form is closed when the divergence vanishes") {
    std::vector<std::string> c{"l", "phi", "x", "y"};
    auto P = parse_hamiltonian("x*y", c), Q = parse_hamiltonian("-y^2/2", c), R = parse_hamiltonian("1", c);
    auto w = OmegaField::parabolic(parse_hamiltonian("l", c), P, Q, R);
    // dP/dx + dQ/dy + dR/dl = y - y + 0
    CHECK(w.closed(c));
    auto bad = OmegaField::parabolic(parse_hamiltonian("l", c), P, parse_hamiltonian("y", c), R);
    CHECK_FALSE(bad.closed(c));
}
