#pragma once

#include <cmath>
#include <limits>

#include "tailrisk/errors.hpp"
#include "tailrisk/numerics.hpp"

namespace tailrisk {

inline constexpr double kEulerGamma = 0.5772156649015329;

namespace detail {

// Lentz continued fraction for the upper incomplete gamma function,
//   Gamma(a, x) = e^{-x} x^a / (x+1-a - 1(1-a)/(x+3-a - 2(2-a)/(...))).
// Converges for x > 0; fastest when x >= a + 1.
inline double gamma_upper_cf(double a, double x, bool& converged) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / (b == 0.0 ? tiny : b);
    double h = d;
    converged = false;
    for (int i = 1; i <= 2000; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-15) {
            converged = true;
            break;
        }
    }
    return std::exp(-x + a * std::log(x)) * h;
}

}  // namespace detail

// Upper incomplete gamma Gamma(a, x) for real a and x > 0. Continued
// fraction first; adaptive quadrature of the defining integral when the
// fraction has not converged (small x with a near or above x).
inline double gamma_upper(double a, double x) {
    if (!(x > 0.0)) throw DomainError("gamma_upper: requires x > 0");
    bool ok = false;
    double cf = detail::gamma_upper_cf(a, x, ok);
    if (ok && std::isfinite(cf)) return cf;
    // integrand decays like e^{-t}; 60 decades of decay bounds the truncation
    double upper = x + 60.0 + 10.0 * std::abs(a);
    return integrate([a](double t) { return std::pow(t, a - 1.0) * std::exp(-t); }, x,
                     upper, 1e-12);
}

// Exponential integral E1(x) = Gamma(0, x), x > 0.
inline double expint_e1(double x) { return gamma_upper(0.0, x); }

inline double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

namespace detail {

// Lentz continued fraction for the regularized incomplete beta function.
inline double betacf(double a, double b, double x) {
    const double tiny = 1e-300;
    double qab = a + b;
    double qap = a + 1.0;
    double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-15) break;
    }
    return h;
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
inline double incbeta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw DomainError("incbeta: requires a > 0 and b > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double front =
        std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
    if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::betacf(a, b, x) / a;
    return 1.0 - front * detail::betacf(b, a, 1.0 - x) / b;
}

}  // namespace tailrisk
