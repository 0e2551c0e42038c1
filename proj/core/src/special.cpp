#include "wqes/special.hpp"

#include <cmath>
#include <limits>

namespace wqes {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw std::domain_error(std::string(what) + " must be finite");
}

void check_beta_params(const BetaWeightParams& p) {
  if (!(p.a > 0.0) || !(p.b > 0.0) || !std::isfinite(p.a) || !std::isfinite(p.b))
    throw std::domain_error("beta weight shapes must satisfy a > 0, b > 0");
}

void check_t_params(const StudentTParams& p) {
  if (!(p.nu > 2.0) || !std::isfinite(p.nu))
    throw std::domain_error("Student-t degrees of freedom must satisfy nu > 2");
}

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cont_frac(double a, double b, double x) {
  constexpr double kEps = 1e-12;
  constexpr double kTiny = 1e-30;
  constexpr int kMaxIter = 500;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("incomplete beta continued fraction did not converge");
}

}  // namespace

double log_gamma(double x) {
  // Lanczos approximation (g = 671/128, 14 terms), relative error ~1e-15.
  // Hand-rolled rather than std::lgamma: glibc's lgamma writes the global
  // signgam, which is not safe under concurrent callers.
  static const double kCoef[14] = {
      57.1562356658629235,     -59.5979603554754912,
      14.1360979747417471,     -0.491913816097620199,
      0.339946499848118887e-4, 0.465236289270485756e-4,
      -0.983744753048795646e-4, 0.158088703224912494e-3,
      -0.210264441724104883e-3, 0.217439618115212643e-3,
      -0.164318106536763890e-3, 0.844182239838527433e-4,
      -0.261908384015814087e-4, 0.368991826595316234e-5};
  if (!(x > 0.0)) throw std::domain_error("log_gamma requires x > 0");
  double y = x;
  double tmp = x + 5.24218750000000000;
  tmp = (x + 0.5) * std::log(tmp) - tmp;
  double ser = 0.999999999999997092;
  for (int j = 0; j < 14; ++j) ser += kCoef[j] / ++y;
  return tmp + std::log(2.5066282746310005 * ser / x);
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("incomplete beta requires a, b > 0");
  if (!(x >= 0.0) || !(x <= 1.0)) throw std::domain_error("incomplete beta requires x in [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double front = std::exp(log_gamma(a + b) - log_gamma(a) - log_gamma(b) +
                                a * std::log(x) + b * std::log1p(-x));
  // Continued fraction converges fastest for x < (a+1)/(a+b+2).
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cont_frac(a, b, x) / a;
  return 1.0 - front * beta_cont_frac(b, a, 1.0 - x) / b;
}

double beta_weight(double x, const BetaWeightParams& p) {
  check_beta_params(p);
  require_finite(x, "beta weight abscissa");
  if (x < 0.0 || x > 1.0) throw std::domain_error("beta weight abscissa must lie in [0,1]");
  const double log_norm = log_gamma(p.a + p.b) - log_gamma(p.a) - log_gamma(p.b);
  if (x == 0.0) {
    if (p.a > 1.0) return 0.0;
    if (p.a == 1.0) return std::exp(log_norm);  // 0^0 = 1
    return std::numeric_limits<double>::infinity();
  }
  if (x == 1.0) {
    if (p.b > 1.0) return 0.0;
    if (p.b == 1.0) return std::exp(log_norm);  // 0^0 = 1
    return std::numeric_limits<double>::infinity();
  }
  return std::exp(log_norm + (p.a - 1.0) * std::log(x) + (p.b - 1.0) * std::log1p(-x));
}

double student_t_pdf(double x, const StudentTParams& p) {
  check_t_params(p);
  require_finite(x, "student_t_pdf argument");
  const double nu = p.nu;
  const double log_c = log_gamma(0.5 * (nu + 1.0)) - log_gamma(0.5 * nu) -
                       0.5 * std::log(nu * kPi);
  return std::exp(log_c - 0.5 * (nu + 1.0) * std::log1p(x * x / nu));
}

double student_t_cdf(double x, const StudentTParams& p) {
  check_t_params(p);
  require_finite(x, "student_t_cdf argument");
  if (x == 0.0) return 0.5;
  const double nu = p.nu;
  const double tail = 0.5 * regularized_incomplete_beta(0.5 * nu, 0.5, nu / (nu + x * x));
  return x < 0.0 ? tail : 1.0 - tail;
}

double student_t_inv_cdf(double prob, const StudentTParams& p) {
  check_t_params(p);
  if (!(prob > 0.0) || !(prob < 1.0))
    throw std::domain_error("student_t_inv_cdf requires p in (0,1)");
  if (prob == 0.5) return 0.0;

  // Bracket the root, expanding geometrically from [-1,1].
  double lo = -1.0, hi = 1.0;
  while (student_t_cdf(lo, p) > prob) lo *= 2.0;
  while (student_t_cdf(hi, p) < prob) hi *= 2.0;

  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double f = student_t_cdf(x, p) - prob;
    if (f > 0.0) hi = x; else lo = x;
    // Newton step, falling back to bisection when it leaves the bracket.
    const double dens = student_t_pdf(x, p);
    double x_new = x;
    if (dens > 0.0) x_new = x - f / dens;
    if (!(x_new > lo) || !(x_new < hi)) x_new = 0.5 * (lo + hi);
    if (std::fabs(f) < 1e-12 && std::fabs(x_new - x) < 1e-12 * (1.0 + std::fabs(x))) {
      x = x_new;
      break;
    }
    x = x_new;
  }
  return x;
}

double std_t_scale(double nu) {
  if (!(nu > 2.0)) throw std::domain_error("standardized t requires nu > 2");
  return std::sqrt((nu - 2.0) / nu);
}

double std_t_pdf(double x, const StudentTParams& p) {
  const double s = std_t_scale(p.nu);
  return student_t_pdf(x / s, p) / s;
}

double std_t_cdf(double x, const StudentTParams& p) {
  const double s = std_t_scale(p.nu);
  return student_t_cdf(x / s, p);
}

double std_t_inv_cdf(double prob, const StudentTParams& p) {
  return std_t_scale(p.nu) * student_t_inv_cdf(prob, p);
}

double std_t_abs_mean(const StudentTParams& p) {
  check_t_params(p);
  const auto integrand = [&p](double x) { return x * std_t_pdf(x, p); };
  // Dyadic segments keep the quadrature probes inside the bulk of the mass;
  // x f(x) decays like x^{-nu}, so the tail beyond 2^13 is negligible.
  double total = detail::adaptive_simpson(integrand, 0.0, 1.0, 1e-13);
  double lo = 1.0;
  while (lo < 8192.0) {
    total += detail::adaptive_simpson(integrand, lo, 2.0 * lo, 1e-13);
    lo *= 2.0;
  }
  return 2.0 * total;
}

VarEs student_t_var_es(double sigma, double alpha, const StudentTParams& p) {
  check_t_params(p);
  if (!(sigma > 0.0)) throw std::domain_error("student_t_var_es requires sigma > 0");
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::domain_error("student_t_var_es requires alpha in (0,1)");
  const double q = student_t_inv_cdf(alpha, p);
  const double s = std_t_scale(p.nu);
  VarEs out;
  out.var = sigma * q * s;
  out.es = -sigma * (student_t_pdf(q, p) / alpha) *
           ((p.nu + q * q) / (p.nu - 1.0)) * s;
  return out;
}

namespace detail {

namespace {
double simpson_rule(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double fa,
                     double b, double fb, double m, double fm, double whole,
                     double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson_rule(a, fa, m, fm, flm);
  const double right = simpson_rule(m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}
}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = simpson_rule(a, fa, b, fb, fm);
  return adaptive_step(f, a, fa, b, fb, m, fm, whole, tol, 60);
}

}  // namespace detail

}  // namespace wqes
