#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace rrm {

enum class RiskMethod { Cf, Mc, Ensemble, Dh };

RiskMethod parse_risk_method(std::string_view name);  // cf | mc | ensemble | dh
std::string_view to_string(RiskMethod method);

// How the characteristic-function route turns quantiles into ES.
enum class EsRule {
  // ES = E[Y | Y <= q] from the partial expectation integral.
  TailIntegral,
  // ES = mean of the quantiles at levels j theta / n, j = 1..n.
  QuantileGrid,
};

struct RiskSpec {
  double theta = 0.05;
  int es_grid_size = 10;
  EsRule es_rule = EsRule::TailIntegral;

  void validate() const;  // throws std::invalid_argument
};

struct RiskDiagnostics {
  double quadrature_error = 0.0;  // largest error estimate over all integrals
  double root_residual = 0.0;     // largest |F(x) - level| at accepted roots
  int root_iterations = 0;
  int bracket_expansions = 0;
  bool fallback_used = false;
  std::size_t samples = 0;  // Monte-Carlo draws (daily returns)
  std::vector<std::string> warnings;
};

struct RiskPair {
  double theta = 0.0;
  double var = 0.0;
  double es = 0.0;
  RiskMethod method = RiskMethod::Cf;
  RiskDiagnostics diagnostics;
};

}  // namespace rrm
