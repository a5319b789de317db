#pragma once

#include <span>
#include <utility>
#include <vector>

#include "rrm/market_data.hpp"
#include "rrm/subordinator.hpp"

namespace rrm {

enum class StructureAggregation {
  PerDay,  // regress each day, average the H(q) curves
  Pooled,  // average m(q, delta) over days, then regress once
};

// PerDay averages log-moments estimated from a single day. With few
// increments per delta (c = 39, delta near 38) log m is biased low at large
// delta, and H(q)/q drifts below 1/2 even for Brownian paths (about 0.25 at
// q = 8). Pooled averages the moments first and stays unbiased.

struct StructureFunctionOptions {
  std::vector<double> q_grid;    // empty: 40 points equispaced in (0.25, 10]
  std::vector<int> delta_grid;   // empty: 1..38
  StructureAggregation aggregation = StructureAggregation::Pooled;
};

struct StructureFunctionReport {
  std::vector<double> q_grid;
  std::vector<int> delta_grid;
  std::vector<double> Hq;
  std::vector<double> Aq_log;
  std::vector<double> r2;
  int days_averaged = 0;
};

std::vector<double> default_q_grid();
std::vector<int> default_delta_grid();

// m(q, delta) = mean over j of |S_tau(j+delta) - S_tau(j)|^q (overlapping
// increments) on one day's subordinated log-price path.
double structure_moment(std::span<const double> path, double q, int delta);

StructureFunctionReport structure_function(const DayPanel& panel, const SubordinationSpec& spec,
                                           const StructureFunctionOptions& options = {});

// Same analysis on explicit log-price paths (one per day).
StructureFunctionReport structure_function_paths(const std::vector<std::vector<double>>& paths,
                                                 const StructureFunctionOptions& options = {});

struct LjungBoxResult {
  double statistic = 0.0;
  int lags = 0;
  double p_value = 1.0;
};

// Q = n (n + 2) sum_k rho_k^2 / (n - k), p-value from the chi-squared(lags)
// upper tail. Throws DataError for zero-variance input.
LjungBoxResult ljung_box(std::span<const double> series, int lags = 5);

struct ScalingBias {
  double biased = 0.0;  // mu / sqrt(c) + sigma alpha
  double truth = 0.0;   // mu + sigma alpha
};

ScalingBias scaling_bias(double mu, double sigma, int c, double theta);

}  // namespace rrm
