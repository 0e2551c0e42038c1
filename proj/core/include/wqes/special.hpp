#pragma once

#include <functional>
#include <stdexcept>

namespace wqes {

// Shape parameters of the two-parameter Beta weight curve. Both must be
// strictly positive.
struct BetaWeightParams {
  double a = 1.0;
  double b = 1.0;
};

// Degrees of freedom of a Student-t law. nu > 2 is required throughout so
// the unit-variance standardization sqrt((nu-2)/nu) is well defined.
struct StudentTParams {
  double nu = 10.0;
};

// log Gamma(x) for x > 0, relative error below 1e-13.
double log_gamma(double x);

// Regularized incomplete beta I_x(a,b), continued-fraction evaluation with
// 1e-12 convergence. Accurate in both tails via the symmetry
// I_x(a,b) = 1 - I_{1-x}(b,a).
double regularized_incomplete_beta(double a, double b, double x);

// Beta weight w(x;a,b) = x^(a-1) (1-x)^(b-1) Gamma(a+b) / (Gamma(a)Gamma(b)).
// Not normalized to sum to one over any grid. Endpoints use the convention
// 0^0 = 1, so w(0;1,b) = b and w(1;a,1) = a are finite.
double beta_weight(double x, const BetaWeightParams& p);

double student_t_pdf(double x, const StudentTParams& p);
double student_t_cdf(double x, const StudentTParams& p);

// Inverse CDF by bracketed bisection with Newton polish;
// student_t_cdf(result) matches p to 1e-10.
double student_t_inv_cdf(double p, const StudentTParams& p_t);

// Unit-variance standardized Student-t: Z = X * sqrt((nu-2)/nu), X ~ t_nu.
double std_t_scale(double nu);
double std_t_pdf(double x, const StudentTParams& p);
double std_t_cdf(double x, const StudentTParams& p);
double std_t_inv_cdf(double prob, const StudentTParams& p);

// E|Z| of the standardized t, by adaptive quadrature of the density.
double std_t_abs_mean(const StudentTParams& p);

struct VarEs {
  double var = 0.0;
  double es = 0.0;
};

// One-step VaR/ES of r = sigma * Z with Z unit-variance Student-t:
//   VaR = sigma t_nu^{-1}(alpha) sqrt((nu-2)/nu)
//   ES  = -sigma (g_nu(t_nu^{-1}(alpha))/alpha)
//              ((nu + t_nu^{-1}(alpha)^2)/(nu-1)) sqrt((nu-2)/nu)
VarEs student_t_var_es(double sigma, double alpha, const StudentTParams& p);

namespace detail {
// Adaptive Simpson quadrature of f over [a,b] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol);
}  // namespace detail

}  // namespace wqes
