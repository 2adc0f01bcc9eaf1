#include "cdold/special.hpp"

#include <cmath>
#include <limits>

#include "cdold/support.hpp"

namespace cdold {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;
}  // namespace

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double norm_quantile(double u) {
    if (!(u > 0.0 && u < 1.0)) {
        if (u == 0.0) return -std::numeric_limits<double>::infinity();
        if (u == 1.0) return std::numeric_limits<double>::infinity();
        throw NumericError("norm_quantile: argument outside [0,1]");
    }

    // Acklam (2010), "An algorithm for computing the inverse normal
    // cumulative distribution function"; |relative error| < 1.15e-9 before
    // refinement.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (u < plow) {
        double q = std::sqrt(-2.0 * std::log(u));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (u <= 1.0 - plow) {
        double q = u - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - u));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // One Newton step on the CDF.
    double e = norm_cdf(x) - u;
    x -= e / norm_pdf(x);
    return x;
}

// ----------------------------------------------------------------------------
// Incomplete gamma
// ----------------------------------------------------------------------------

namespace {

// Series representation, converges fast for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw NumericError("gamma_p: series did not converge");
}

// Modified Lentz continued fraction for Q(a, x), x >= a + 1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16)
            return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw NumericError("gamma_p: continued fraction did not converge");
}

}  // namespace

double gamma_p(double a, double x) {
    if (a <= 0.0) throw NumericError("gamma_p: shape must be positive");
    if (x <= 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double gamma_p_inv(double a, double q) {
    if (!(q >= 0.0 && q < 1.0)) throw NumericError("gamma_p_inv: probability outside [0,1)");
    if (q == 0.0) return 0.0;
    // Bracket: expand upward from the mean scale until P(a, hi) > q.
    double lo = 0.0;
    double hi = a > 1.0 ? a : 1.0;
    while (gamma_p(a, hi) < q) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e8) throw NumericError("gamma_p_inv: bracket expansion failed");
    }
    for (int i = 0; i < 80; ++i) {
        double mid = 0.5 * (lo + hi);
        if (gamma_p(a, mid) < q)
            lo = mid;
        else
            hi = mid;
    }
    // Newton polish; the density a.e. positive on the bracket.
    double x = 0.5 * (lo + hi);
    for (int i = 0; i < 3; ++i) {
        double f = gamma_p(a, x) - q;
        double pdf = std::exp(-x + (a - 1.0) * std::log(x) - std::lgamma(a));
        if (pdf <= 0.0) break;
        double step = f / pdf;
        double nx = x - step;
        if (nx <= lo || nx >= hi) break;
        x = nx;
    }
    return x;
}

// ----------------------------------------------------------------------------
// Quadrature
// ----------------------------------------------------------------------------

QuadratureRule gauss_legendre(int n) {
    if (n < 1) throw NumericError("gauss_legendre: order must be >= 1");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Newton on P_n from the Tricomi initial guess.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

namespace {

double simpson(double fa, double fm, double fb, double a, double b) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

// min_depth levels are always refined before the error estimate may accept,
// so narrow features are not skipped off a handful of coarse probes.
double adaptive_step(const std::function<double(double)>& f, double a, double b, double fa,
                     double fm, double fb, double whole, double tol, int depth, int min_depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(fa, flm, fm, a, m);
    double right = simpson(fm, frm, fb, m, b);
    double delta = left + right - whole;
    if (min_depth <= 0 && std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth <= 0) throw NumericError("adaptive_simpson: tolerance not reached");
    return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, min_depth - 1) +
           adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, min_depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double abs_tol,
                        int max_depth) {
    if (a >= b) return 0.0;
    double m = 0.5 * (a + b);
    double fa = f(a), fm = f(m), fb = f(b);
    return adaptive_step(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), abs_tol, max_depth, 4);
}

}  // namespace cdold
