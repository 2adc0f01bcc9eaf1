#ifndef CDOLD_SPECIAL_HPP
#define CDOLD_SPECIAL_HPP

#include <functional>
#include <utility>
#include <vector>

namespace cdold {

double norm_pdf(double x);

// Standard normal CDF via erfc; absolute error well below 1e-12.
double norm_cdf(double x);

// Standard normal quantile: Acklam's rational approximation refined by one
// Newton step on norm_cdf.
double norm_quantile(double u);

// Regularized lower incomplete gamma P(a, x); series / continued fraction.
double gamma_p(double a, double x);

// Inverse of P(a, .): bracketed bisection polished by Newton.
double gamma_p_inv(double a, double q);

// Gauss-Legendre nodes and weights on [-1, 1].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
QuadratureRule gauss_legendre(int n);

// Recursive interval-halving Simpson with absolute tolerance.  Throws
// NumericError if the tolerance cannot be met within the depth budget.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double abs_tol,
                        int max_depth = 60);

}  // namespace cdold

#endif
