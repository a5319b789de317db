#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace rrm::numerics {

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod quadrature (21-point Kronrod / 10-point Gauss pairs,
// QUADPACK error estimate, global bisection of the worst interval).

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  std::size_t max_intervals = 2000;
  // The range is first cut into this many equal panels. Useful for
  // oscillatory integrands where a single 21-point rule can alias.
  std::size_t initial_panels = 1;
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  std::size_t evaluations = 0;
  std::size_t intervals = 0;
  bool converged = false;
};

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& options = {});

// Same as integrate() but throws NumericalError (carrying the error estimate)
// when the tolerance cannot be met.
double integrate_or_throw(const std::function<double(double)>& f, double a, double b,
                          const QuadratureOptions& options = {});

// ---------------------------------------------------------------------------
// Brent's root finder on a sign-changing bracket.

struct RootResult {
  double root = 0.0;
  double f_root = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

RootResult brent_root(const std::function<double(double)>& f, double a, double b, double fa,
                      double fb, double x_tol, std::size_t max_iterations);

// ---------------------------------------------------------------------------
// Nelder-Mead simplex with box constraints (vertices are projected onto the
// box). Minimizes f.

struct SimplexOptions {
  double f_tol = 1e-11;  // relative spread of vertex values
  double x_tol = 1e-9;   // simplex diameter in parameter units
  std::size_t max_evaluations = 4000;
  double initial_step = 0.1;
};

struct SimplexResult {
  std::vector<double> x;
  double f = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                          std::vector<double> start, std::span<const double> lower,
                          std::span<const double> upper, const SimplexOptions& options = {});

// ---------------------------------------------------------------------------
// Order statistics and basic moments.

// Linear interpolation of order statistics (Hyndman-Fan type 7).
double quantile_type7(std::span<const double> sorted, double p);

// Type-7 quantile of unsorted data; partially reorders `data`.
double quantile_type7_inplace(std::span<double> data, double p);

double mean(std::span<const double> x);
// Sample standard deviation with n-1 denominator.
double stddev(std::span<const double> x);
double lag1_autocorrelation(std::span<const double> x);

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r2 = 0.0;
};

LinearFit ordinary_least_squares(std::span<const double> x, std::span<const double> y);

// Standard normal helpers backed by Boost.Math.
double normal_quantile(double p);
double normal_cdf(double x);
double normal_pdf(double x);

}  // namespace rrm::numerics
