#pragma once

// Real special functions used by the asymptotic formulas: error function
// family, both real Lambert-W branches, and the scalar G(y) mapping that
// governs detection delay in the critical regime.

namespace cqcd {

enum class LambertBranch {
  Principal,       // W_0, defined on [-1/e, inf), W_0(z) >= -1
  NegativeBranch,  // W_{-1}, defined on [-1/e, 0), W_{-1}(z) <= -1
};

const char* to_string(LambertBranch branch);

/// Error function. Odd to the last bit: erf(-x) == -erf(x).
double erf(double x);

/// Complementary error function 1 - erf(x), accurate in the far tail.
double erfc(double x);

/// Scaled complementary error function exp(x^2) * erfc(x).
///
/// Finite for every x > -26.6 and well conditioned for large positive x,
/// where erfc itself underflows. Evaluated by a Lentz continued fraction
/// for x >= 4 and from erfc with a split exponent otherwise.
double erfcx(double x);

/// Real Lambert W: the solution w of w * exp(w) = z on the requested branch.
///
/// Throws DomainError when z lies outside the branch domain. Inputs within a
/// couple of ulps below -1/e are treated as the branch point itself, so that
/// lambert_w(b, -std::exp(-1.0)) returns -1 for both branches.
double lambert_w(LambertBranch branch, double z);

/// Leading asymptote log(-x) - log(-log(-x)) of W_{-1}(x) as x -> 0-.
/// Defined for -1/e < x < 0; used as a seed and as an independent check.
double lambert_wm1_small_asymptote(double x);

/// u = -W_{-1}(-exp(-1 - y)) - 1 for y >= 0, i.e. the root u >= 0 of
/// u - log(1 + u) = y. Solved in log space so that neither the tiny argument
/// exp(-1 - y) nor the cancellation near the branch point costs precision.
double lambert_wm1_neg_exp_shifted(double y);

/// x - log(1 + x) for x > -1, without cancellation for small |x|.
double x_minus_log1p(double x);

/// G(y) = exp(1 + y + W) - W - y - 2 with W = W_{-1}(-exp(-1 - y)), y >= 0.
///
/// Evaluated through x = -W, where it reduces to log(x) - 1 + 1/x with
/// y = x - 1 - log(x). G(0) = 0, 0 < G(y) < y for y > 0 and G(y) ~ log(y).
double g_mapping(double y);

}  // namespace cqcd
