#include "discretediag/special_functions.hpp"

#include "discretediag/error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace discretediag
{
namespace detail
{

namespace
{
// x^a e^-x / Gamma(a), evaluated in log space.
double gamma_prefactor(double a, double x)
{
    return std::exp(a * std::log(x) - x - std::lgamma(a));
}

void check_domain(double a, double x)
{
    if (!(a > 0.0) || !std::isfinite(a))
        throw DataError("incomplete gamma: shape must be positive, got " + std::to_string(a));
    if (!(x >= 0.0))
        throw DataError("incomplete gamma: argument must be nonnegative, got " + std::to_string(x));
}
} // namespace

double gamma_p_series(double a, double x)
{
    if (x == 0.0)
        return 0.0;
    double term = 1.0 / a;
    double sum = term;
    for (int k = 1; k <= kMaxIterations; ++k)
    {
        term *= x / (a + k);
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kTolerance)
            return sum * gamma_prefactor(a, x);
    }
    throw NumericalError("incomplete gamma series did not converge (a=" + std::to_string(a)
                         + ", x=" + std::to_string(x) + ")");
}

double gamma_q_continued_fraction(double a, double x)
{
    constexpr double tiny = std::numeric_limits<double>::min() / kTolerance;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIterations; ++i)
    {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny)
            d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kTolerance)
            return h * gamma_prefactor(a, x);
    }
    throw NumericalError("incomplete gamma continued fraction did not converge (a=" + std::to_string(a)
                         + ", x=" + std::to_string(x) + ")");
}

} // namespace detail

double regularized_gamma_p(double a, double x)
{
    detail::check_domain(a, x);
    if (std::isinf(x))
        return 1.0;
    if (x < a + 1.0)
        return detail::gamma_p_series(a, x);
    return 1.0 - detail::gamma_q_continued_fraction(a, x);
}

double regularized_gamma_q(double a, double x)
{
    detail::check_domain(a, x);
    if (std::isinf(x))
        return 0.0;
    if (x < a + 1.0)
        return 1.0 - detail::gamma_p_series(a, x);
    return detail::gamma_q_continued_fraction(a, x);
}

double chi_squared_sf(double df, double x)
{
    return regularized_gamma_q(0.5 * df, 0.5 * x);
}

} // namespace discretediag
