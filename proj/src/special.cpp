#include "mcpope/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace mcpope {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;

/// Stirling correction to ln Gamma(z) beyond (z - 1/2) ln z - z + ln(2 pi) / 2.
double stirling_tail(double z)
{
    const double z2 = z * z;
    return 1.0 / (12.0 * z) - 1.0 / (360.0 * z * z2) + 1.0 / (1260.0 * z * z2 * z2);
}

/// ln Gamma(a) - ln Gamma(a + b) for large a, without cancelling two huge lgammas.
double log_gamma_ratio(double a, double b)
{
    const double s = a + b;
    return -(a - 0.5) * std::log1p(b / a) - b * std::log(s) + b + stirling_tail(a) -
           stirling_tail(s);
}

double log_beta(double a, double b)
{
    const double large = std::max(a, b);
    const double small = std::min(a, b);
    if (large >= 100.0)
        return std::lgamma(small) + log_gamma_ratio(large, small);
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

/// Continued fraction for the incomplete beta (modified Lentz).
double beta_continued_fraction(double a, double b, double x)
{
    constexpr int kMaxIterations = 200000;
    constexpr double kEpsilon = 1e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny)
        d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny)
            d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny)
            c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny)
            d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny)
            c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEpsilon)
            return h;
    }
    return h;
}

/// I_x(a, b) with y = 1 - x supplied exactly by the caller.
double incomplete_beta(double a, double b, double x, double y)
{
    if (x <= 0.0)
        return 0.0;
    if (y <= 0.0)
        return 1.0;
    const double log_x = x <= 0.5 ? std::log(x) : std::log1p(-y);
    const double log_y = y <= 0.5 ? std::log(y) : std::log1p(-x);
    const double front = std::exp(a * log_x + b * log_y - log_beta(a, b));
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, y) / b;
}

/// A point of (0, 1) held together with its complement, both to full relative precision.
struct UnitPoint {
    double x;
    double y;
};

/// x = e^s for s <= 0 and 1 - x = e^-s for s > 0: increasing in s and exact in both tails.
UnitPoint unit_point(double s)
{
    if (s <= 0.0)
        return {std::exp(s), -std::expm1(s)};
    return {-std::expm1(-s), std::exp(-s)};
}

/// Root of I_x(a, b) = target for 0 < target < 1.
UnitPoint incomplete_beta_root(double a, double b, double target)
{
    double lo = -745.0; // log of the smallest subnormal
    double hi = 745.0;
    for (int i = 0; i < 400; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi)
            break;
        const UnitPoint p = unit_point(mid);
        if (incomplete_beta(a, b, p.x, p.y) < target)
            lo = mid;
        else
            hi = mid;
    }

    UnitPoint point = unit_point(0.5 * (lo + hi));
    const UnitPoint lower = unit_point(lo);
    const UnitPoint upper = unit_point(hi);
    double residual = incomplete_beta(a, b, point.x, point.y) - target;
    const double lbeta = log_beta(a, b);
    for (int i = 0; i < 8 && residual != 0.0; ++i) {
        const double density =
            std::exp((a - 1.0) * std::log(point.x) + (b - 1.0) * std::log(point.y) - lbeta);
        const double step = residual / density;
        UnitPoint next = point;
        if (point.x <= 0.5) {
            next.x = point.x - step;
            next.y = 1.0 - next.x;
        } else {
            next.y = point.y + step;
            next.x = 1.0 - next.y;
        }
        if (!(next.x >= lower.x && next.x <= upper.x && next.x > 0.0 && next.y > 0.0))
            break;
        const double next_residual = incomplete_beta(a, b, next.x, next.y) - target;
        if (std::abs(next_residual) >= std::abs(residual))
            break;
        point = next;
        residual = next_residual;
    }
    return point;
}

} // namespace

double normal_pdf(double x)
{
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double normal_cdf(double x)
{
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_call_payoff(double x)
{
    if (x < 3.0)
        return normal_pdf(x) - x * 0.5 * std::erfc(x / std::numbers::sqrt2);
    // Mills ratio R(x) = 1/(x + T), T = 1/(x + 2/(x + 3/(x + ...))), so
    // phi(x) (1 - x R(x)) = phi(x) T / (x + T) with no cancellation.
    double t = 0.0;
    for (int n = 400; n >= 2; --n)
        t = n / (x + t);
    t = 1.0 / (x + t);
    return normal_pdf(x) * t / (x + t);
}

double incomplete_beta(double a, double b, double x)
{
    if (!(a > 0.0 && b > 0.0))
        throw std::invalid_argument("incomplete beta: a and b must be positive");
    if (!(x >= 0.0 && x <= 1.0))
        throw std::invalid_argument("incomplete beta: x must lie in [0, 1]");
    return incomplete_beta(a, b, x, 1.0 - x);
}

double inverse_incomplete_beta(double a, double b, double p)
{
    if (!(a > 0.0 && b > 0.0))
        throw std::invalid_argument("inverse incomplete beta: a and b must be positive");
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("inverse incomplete beta: p must lie in [0, 1]");
    if (p == 0.0)
        return 0.0;
    if (p == 1.0)
        return 1.0;
    if (p <= 0.5)
        return incomplete_beta_root(a, b, p).x;
    return incomplete_beta_root(b, a, 1.0 - p).y;
}

double student_t_quantile(double u, double dof)
{
    if (!(u > 0.0 && u < 1.0))
        throw std::invalid_argument("t quantile: u must lie strictly inside (0, 1)");
    if (!(dof > 0.0))
        throw std::invalid_argument("t quantile: degrees of freedom must be positive");
    if (u == 0.5)
        return 0.0;

    const double p = 2.0 * std::min(u, 1.0 - u);
    const double a = 0.5 * dof;
    const double b = 0.5;
    // t^2 = dof (1 - x) / x where I_x(dof / 2, 1 / 2) = p.
    const UnitPoint root = p <= 0.5 ? incomplete_beta_root(a, b, p)
                                    : [&] {
                                          const UnitPoint r = incomplete_beta_root(b, a, 1.0 - p);
                                          return UnitPoint{r.y, r.x};
                                      }();
    const double t2 = dof * root.y / root.x;
    const double t = std::sqrt(t2);
    return u < 0.5 ? -t : t;
}

double marginal_var_student(double mu, double sigma, double dof, double u)
{
    if (!(dof > 2.0))
        throw std::invalid_argument("marginal t VaR: degrees of freedom must exceed 2");
    if (u == 0.5)
        return mu;
    return mu + sigma * std::sqrt((dof - 2.0) / dof) * student_t_quantile(u, dof);
}

double gaussian_omega(double mu, double sigma, double b)
{
    if (!(sigma > 0.0))
        throw std::invalid_argument("gaussian omega: sigma must be positive");
    const double z = (b - mu) / sigma;
    // Numerator phi(z) + z Phi(z) - z = H(z); denominator phi(z) + z Phi(z) = H(-z).
    const double upside = normal_call_payoff(z);
    const double downside = normal_call_payoff(-z);
    if (downside == 0.0)
        return std::numeric_limits<double>::infinity();
    return upside / downside;
}

} // namespace mcpope
