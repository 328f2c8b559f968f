#pragma once

// Scalar special functions used by the statistical tests. All of these are
// deterministic rational/continued-fraction evaluations with no internal
// state, so results are reproducible bit-for-bit on a given platform.

namespace rbv {

// Standard normal CDF.
double normal_cdf(double x);

// Standard normal quantile (inverse CDF), Wichura's AS 241 (PPND16).
// Accurate to ~1e-16 over p in (0,1). Throws std::domain_error outside (0,1).
double normal_quantile(double p);

// Regularized incomplete beta function I_x(a, b), a,b > 0, x in [0,1].
double incomplete_beta(double a, double b, double x);

// Survival function of the F distribution with (d1, d2) degrees of freedom,
// i.e. P(F > f). Used for Levene's test.
double f_survival(double f, double d1, double d2);

}  // namespace rbv
