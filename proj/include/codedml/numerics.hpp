#pragma once

#include <cstddef>
#include <functional>

namespace codedml::numerics {

struct Tolerance {
  /// Convergence threshold on the step, relative to the iterate magnitude.
  double abs_tol = 1e-12;
  int max_iter = 200;

  void validate() const;
};

struct RootResult {
  double x;
  int iterations;
};

/// Safeguarded Newton on a sign-changing bracket [lo, hi]. Newton steps that
/// leave the bracket or stall fall back to bisection.
RootResult find_root_hybrid(const std::function<double(double)>& f,
                            const std::function<double(double)>& df, double lo, double hi,
                            const Tolerance& tol = {});

/// Time per row: the root lambda > a of exp(mu (lambda - a)) = mu lambda + 1.
double solve_lambda(double mu, double a, const Tolerance& tol = {});

/// Lower branch W_{-1}(x) for x in [-1/e, 0).
double lambert_w_minus1(double x, const Tolerance& tol = {});

/// W_{-1}(-exp(-log_arg)) for log_arg >= 1, without forming the exponential.
/// Accurate near the branch point where x itself has lost digits.
double lambert_w_minus1_from_log(double log_arg, const Tolerance& tol = {});

/// Optimal recovery-threshold fraction 1 + 1 / W_{-1}(-exp(-a mu - 1)).
double mds_alpha(double mu, double a, const Tolerance& tol = {});

double harmonic(std::size_t n);

/// H_n - H_m for m <= n, summed directly over the tail.
double harmonic_difference(std::size_t n, std::size_t m);

}  // namespace codedml::numerics
