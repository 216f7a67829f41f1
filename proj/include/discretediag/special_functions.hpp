#pragma once

namespace discretediag
{

/// Regularized lower incomplete gamma P(a, x).
///
/// Series expansion for x < a + 1, Lentz continued fraction for Q otherwise.
/// Throws NumericalError if neither converges within the iteration cap, and
/// DataError for a <= 0 or x < 0.
double regularized_gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double regularized_gamma_q(double a, double x);

/// Survival function of the chi-squared distribution, Q(df/2, x/2).
double chi_squared_sf(double df, double x);

namespace detail
{
inline constexpr int kMaxIterations = 500;
inline constexpr double kTolerance = 1e-15;

// Raw evaluations, valid on any domain where they converge. Exposed so the
// two branches can be checked against each other.
double gamma_p_series(double a, double x);
double gamma_q_continued_fraction(double a, double x);
} // namespace detail

} // namespace discretediag
