#pragma once

#include "toricsym/io.hpp"
#include "toricsym/polynomial.hpp"

#include <optional>
#include <string>

namespace toricsym {

// Parabolic normal-form family with b~(lambda) = lambda b1(lambda), b1 > 0 near 0:
//   s = 1: x^2 + y^3 + b~ y          s = 2: x^2 +- y^4 + b~ y^2
//   s = 3: re(z^3) + b~ |z|^2        s >= 4: re(z^s) + a~ |z|^4 + b~ |z|^2
struct ScalingInput {
    int s = 5;
    PolynomialExpr b1;           // over {"lambda"}
    mpq_class a_tilde = 1;       // coefficient of |z|^4 (s >= 4)
    int sign = 1;                // the +- of s = 2
    std::optional<mpq_class> a_target;  // s = 4 only: requested value of a
};

// Every map is recorded as powers of a symbol beta with beta^k = b1(lambda) (second
// step) or sigma with sigma^(s-4) = a^ (third step); identities are checked exactly in
// the polynomial ring modulo these relations.
struct ScalingRecord {
    int s = 0;
    int root = 0;                    // beta^root = b1
    mpq_class u_exp, v_exp, w_exp;   // u = b1^u_exp, ...
    PolynomialExpr before;           // family in (x, y, lambda)
    PolynomialExpr after;            // family after the second step, over (x, y, lambda, beta)
    PolynomialExpr remainder2;       // reduced identity, zero when verified
    bool step3 = false;
    mpq_class a_hat_exp;             // a^ = a~ b1^a_hat_exp
    mpq_class t_exp;                 // t = a^^t_exp
    PolynomialExpr remainder3;
    bool verified = false;
};

ScalingRecord normal_form_scaling(const ScalingInput& in);

// Parses b1 from text in lambda.
PolynomialExpr parse_b1(const std::string& text);

// b1 evaluated at lambda (real).
double eval_b1(const PolynomialExpr& b1, double lambda);

json scaling_to_json(const ScalingRecord& r, const PolynomialExpr& b1, double lambda0 = 0);

}  // namespace toricsym
