#ifndef MG1_TAILS_HPP
#define MG1_TAILS_HPP

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mg1/error.hpp"

namespace mg1 {

/// Survival (x+1)^{-gamma} on [0, inf).
struct PowerTail {
  double gamma;
};

/// Integrated tail of a PowerTail: survival (x+1)^{-(gamma-1)}.
struct IntegratedTail {
  double source_gamma;
  double exponent() const { return source_gamma - 1.0; }
};

/// Light-tailed negative control, survival exp(-rate x).
struct ExponentialTail {
  double rate = 1.0;
};

inline IntegratedTail integrated_tail(const PowerTail& h) {
  if (!(h.gamma > 1.0))
    fail(Errc::GammaTooSmall, "integrated_tail: gamma must exceed 1, got " + num(h.gamma));
  return IntegratedTail{h.gamma};
}

inline double log_survival(const PowerTail& d, double x) { return -d.gamma * std::log1p(x); }
inline double log_survival(const IntegratedTail& d, double x) { return -d.exponent() * std::log1p(x); }
inline double log_survival(const ExponentialTail& d, double x) { return -d.rate * x; }

template <typename Dist>
double survival(const Dist& d, double x) {
  if (x < 0.0) fail(Errc::NegativeArgument, "survival: negative argument " + num(x));
  return std::exp(log_survival(d, x));
}

inline std::vector<double> default_class_grid() { return {1e3, 1e4, 1e5, 1e6}; }

struct ClassDiagnostics {
  std::vector<double> xs;
  std::vector<double> ratios;
  std::vector<double> log_ratios;
  double target = 1.0;
  double limit_estimate = std::numeric_limits<double>::quiet_NaN();
  bool verdict = false;
};

namespace detail {

// verdict: last ratio within tol of target and |ratio - target| non-increasing
inline void finish(ClassDiagnostics& out, double tol) {
  out.limit_estimate = out.ratios.empty() ? std::numeric_limits<double>::quiet_NaN() : out.ratios.back();
  bool ok = !out.ratios.empty();
  double prev = std::numeric_limits<double>::infinity();
  for (double r : out.ratios) {
    if (!std::isfinite(r)) {
      ok = false;
      break;
    }
    const double dev = std::abs(r - out.target);
    if (dev > prev * (1.0 + 1e-12) + 1e-15) ok = false;
    prev = dev;
  }
  out.verdict = ok && std::abs(out.limit_estimate - out.target) <= tol;
}

inline void check_grid(const std::vector<double>& xs) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0)) fail(Errc::PreconditionViolation, "class check: grid points must be positive");
    if (i > 0 && !(xs[i] > xs[i - 1])) fail(Errc::PreconditionViolation, "class check: grid must be increasing");
  }
}

}  // namespace detail

/// Ratios F(x+y)/F(x) of survival values along the grid.
template <typename Dist>
ClassDiagnostics check_long_tailed(const Dist& d, double y, const std::vector<double>& xs = default_class_grid(),
                                   double tol = 1e-2) {
  detail::check_grid(xs);
  if (y < 0.0) fail(Errc::NegativeArgument, "check_long_tailed: shift must be nonnegative");
  ClassDiagnostics out;
  out.xs = xs;
  for (double x : xs) {
    const double lr = log_survival(d, x + y) - log_survival(d, x);
    out.log_ratios.push_back(lr);
    out.ratios.push_back(std::exp(lr));
  }
  detail::finish(out, tol);
  return out;
}

/// Ratios F(x - xi x^{1-1/p})/F(x); p = 1 with xi = -y is the long-tailed check.
template <typename Dist>
ClassDiagnostics check_p_order(const Dist& d, double p, double xi, const std::vector<double>& xs = default_class_grid(),
                               double tol = 1e-2) {
  if (!(p >= 1.0)) fail(Errc::PreconditionViolation, "check_p_order: p must be at least 1");
  detail::check_grid(xs);
  ClassDiagnostics out;
  out.xs = xs;
  for (double x : xs) {
    const double shifted = x - xi * std::pow(x, 1.0 - 1.0 / p);
    if (shifted < 0.0)
      fail(Errc::GridUnderflow, "check_p_order: shifted argument negative at x = " + num(x));
    const double lr = log_survival(d, shifted) - log_survival(d, x);
    out.log_ratios.push_back(lr);
    out.ratios.push_back(std::exp(lr));
  }
  detail::finish(out, tol);
  return out;
}

/// P(Y1 + Y2 > x) / P(Y > x) for the integer discretization p_k = F(k-1) - F(k)
/// (F(-1) = 1), evaluated on the grid points not exceeding cutoff / 2.
///
/// Uses P(Y1 + Y2 > x) = F(x) + sum_{i<=x} p_i F(x - i), so every term is
/// nonnegative; all terms are formed in log space relative to F(x) so that
/// light tails do not underflow.
template <typename Dist>
ClassDiagnostics check_subexponential(const Dist& d, long cutoff, const std::vector<double>& xs = default_class_grid(),
                                      double tol = 5e-2) {
  detail::check_grid(xs);
  if (cutoff < 2) fail(Errc::CutoffTooSmall, "check_subexponential: cutoff must be at least 2");

  std::vector<long> points;
  for (double x : xs) {
    const long xi = static_cast<long>(std::floor(x));
    if (xi >= 1 && 2 * xi <= cutoff) points.push_back(xi);
  }
  if (points.empty())
    fail(Errc::CutoffTooSmall, "check_subexponential: no grid point in [1, cutoff/2]");

  const long top = points.back();
  std::vector<double> log_s(static_cast<std::size_t>(top) + 1);
  for (long k = 0; k <= top; ++k) log_s[k] = log_survival(d, static_cast<double>(k));
  std::vector<double> log_p(static_cast<std::size_t>(top) + 1);
  log_p[0] = std::log(-std::expm1(log_s[0]));
  for (long k = 1; k <= top; ++k) log_p[k] = log_s[k - 1] + std::log(-std::expm1(log_s[k] - log_s[k - 1]));

  ClassDiagnostics out;
  out.target = 2.0;
  for (long x : points) {
    if (!std::isfinite(log_s[x]))
      fail(Errc::CutoffTooSmall, "check_subexponential: survival vanishes at x = " + std::to_string(x));
    double acc = 1.0;
    for (long i = 0; i <= x; ++i) {
      if (std::isinf(log_p[i]) && log_p[i] < 0) continue;  // zero mass at i
      acc += std::exp(log_p[i] + log_s[x - i] - log_s[x]);
    }
    out.xs.push_back(static_cast<double>(x));
    out.ratios.push_back(acc);
    out.log_ratios.push_back(std::log(acc));
  }
  out.limit_estimate = out.ratios.back();
  out.verdict = std::isfinite(out.limit_estimate) && std::abs(out.limit_estimate - out.target) <= tol;
  return out;
}

}  // namespace mg1

#endif  // MG1_TAILS_HPP
