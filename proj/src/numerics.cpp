#include "codedml/numerics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "codedml/errors.hpp"

namespace codedml::numerics {

namespace {

// Solves u - log1p(u) = delta for u >= 0. Both W_{-1} and the mds fraction
// are simple functions of this root: W = -1 - u, alpha = u / (1 + u).
double lambert_tail(double delta, const Tolerance& tol) {
  if (delta <= 0.0) return 0.0;
  auto h = [delta](double u) { return u - std::log1p(u) - delta; };
  auto dh = [](double u) { return u / (1.0 + u); };
  const double log_arg = delta + 1.0;
  double hi = log_arg + 2.0 * std::log(log_arg) + 1.0;
  while (h(hi) <= 0.0) hi *= 2.0;
  return find_root_hybrid(h, dh, 0.0, hi, tol).x;
}

}  // namespace

void Tolerance::validate() const {
  if (!(abs_tol > 0.0)) throw ConfigError("tolerance: abs_tol must be positive");
  if (max_iter < 1) throw ConfigError("tolerance: max_iter must be at least 1");
}

RootResult find_root_hybrid(const std::function<double(double)>& f,
                            const std::function<double(double)>& df, double lo, double hi,
                            const Tolerance& tol) {
  tol.validate();
  const double f_lo = f(lo);
  const double f_hi = f(hi);
  if (f_lo == 0.0) return {lo, 0};
  if (f_hi == 0.0) return {hi, 0};
  if ((f_lo < 0.0) == (f_hi < 0.0)) throw DomainError("find_root_hybrid: root is not bracketed");

  // Orient so that f(neg) < 0 < f(pos).
  double neg = f_lo < 0.0 ? lo : hi;
  double pos = f_lo < 0.0 ? hi : lo;

  double x = 0.5 * (lo + hi);
  double step_old = std::abs(hi - lo);
  double step = step_old;
  double fx = f(x);
  double dfx = df(x);
  double best = x;
  double best_residual = std::abs(fx);

  for (int it = 1; it <= tol.max_iter; ++it) {
    const bool newton_leaves_bracket = ((x - pos) * dfx - fx) * ((x - neg) * dfx - fx) > 0.0;
    const bool newton_too_slow = std::abs(2.0 * fx) > std::abs(step_old * dfx);
    if (newton_leaves_bracket || newton_too_slow || dfx == 0.0) {
      step_old = step;
      step = 0.5 * (pos - neg);
      x = neg + step;
    } else {
      step_old = step;
      step = fx / dfx;
      x -= step;
    }
    if (std::abs(step) <= tol.abs_tol * std::max(std::abs(x), std::numeric_limits<double>::min())) {
      return {x, it};
    }
    fx = f(x);
    dfx = df(x);
    if (std::abs(fx) < best_residual) {
      best_residual = std::abs(fx);
      best = x;
    }
    if (fx == 0.0) return {x, it};
    if (fx < 0.0) {
      neg = x;
    } else {
      pos = x;
    }
  }
  throw IterationFailure("find_root_hybrid: no convergence in " + std::to_string(tol.max_iter) +
                             " iterations",
                         best);
}

double solve_lambda(double mu, double a, const Tolerance& tol) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("solve_lambda: mu must be positive");
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("solve_lambda: a must be positive");

  // Work in z = mu * lambda, which depends on the product b = mu * a only.
  const double b = mu * a;
  auto g = [b](double z) { return std::expm1(z - b) - z; };
  auto dg = [b](double z) { return std::exp(z - b) - 1.0; };

  double offset = 1.0;
  while (g(b + offset) <= 0.0) offset *= 2.0;
  const double z = find_root_hybrid(g, dg, b, b + offset, tol).x;
  return z / mu;
}

double lambert_w_minus1_from_log(double log_arg, const Tolerance& tol) {
  if (!std::isfinite(log_arg)) throw DomainError("lambert_w_minus1: argument must be finite");
  // log_arg marginally below 1 is rounding noise at the branch point.
  if (log_arg < 1.0 - 4.0 * std::numeric_limits<double>::epsilon()) {
    throw DomainError("lambert_w_minus1: argument below -1/e");
  }
  return -1.0 - lambert_tail(log_arg - 1.0, tol);
}

double lambert_w_minus1(double x, const Tolerance& tol) {
  constexpr double branch = -1.0 / std::numbers::e;
  if (!(x < 0.0)) throw DomainError("lambert_w_minus1: x must be negative");
  if (x < branch * (1.0 + 4.0 * std::numeric_limits<double>::epsilon())) {
    throw DomainError("lambert_w_minus1: x below -1/e");
  }
  if (x <= branch) return -1.0;
  return lambert_w_minus1_from_log(-std::log(-x), tol);
}

double mds_alpha(double mu, double a, const Tolerance& tol) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("mds_alpha: mu must be positive");
  if (!(a >= 0.0) || !std::isfinite(a)) throw DomainError("mds_alpha: a must be nonnegative");
  const double u = lambert_tail(a * mu, tol);
  return u / (1.0 + u);
}

double harmonic(std::size_t n) { return harmonic_difference(n, 0); }

double harmonic_difference(std::size_t n, std::size_t m) {
  if (m > n) throw DomainError("harmonic_difference: m must not exceed n");
  double sum = 0.0;
  for (std::size_t i = n; i > m; --i) sum += 1.0 / static_cast<double>(i);
  return sum;
}

}  // namespace codedml::numerics
