#pragma once

#include <functional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "bohmlab/grid.hpp"

namespace bohmlab {

/// Default significance level for goodness-of-fit acceptance.
inline constexpr double kSignificance = 1e-3;
/// Ensembles below this size are refused as underpowered.
inline constexpr std::size_t kMinEnsemble = 100;

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t degrees_of_freedom = 0;
  double p_value = 1.0;
};

/// Pearson chi-square of observed counts against expected probabilities.
/// Bins with zero expected probability must be empty, otherwise p = 0.
ChiSquareResult chi_square_test(std::span<const std::size_t> observed, std::span<const double> expected_probability);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Asymptotic Kolmogorov distribution tail with Stephens' small-sample correction.
double kolmogorov_p_value(double d, std::size_t n);

/// One-sample KS test against a continuous CDF.
KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Equal-probability bins over the grid cells of |psi|^2: cells are grouped in
/// flat order so each bin carries about 1/bins of the mass.
struct BornBinning {
  std::vector<std::size_t> cell_to_bin;
  std::vector<double> bin_probability;

  static BornBinning equal_probability(const GridWaveFunction& w, std::size_t bins);
  std::size_t bin_of(const Grid& grid, std::span<const double> q) const;
  std::vector<std::size_t> histogram(const Grid& grid, std::span<const Configuration> positions) const;
};

/// Piecewise-linear marginal CDF of |psi|^2 along coordinate d (uniform within cells).
std::function<double(double)> marginal_cdf(const GridWaveFunction& w, std::size_t d);

struct EquivarianceReport {
  double time = 0.0;
  std::size_t samples = 0;
  std::size_t bins = 0;
  ChiSquareResult chi_square;
  std::vector<KsResult> ks;  // one per coordinate
  double significance = kSignificance;
  bool pass = false;
};

void to_json(nlohmann::json& j, const EquivarianceReport& r);

/// Binned chi-square (sqrt(N) equal-probability bins) and per-coordinate KS
/// tests of `positions` against |w_t|^2. Passes iff every p-value is at least
/// `significance`. Throws std::invalid_argument below kMinEnsemble samples.
EquivarianceReport equivariance_test(std::span<const Configuration> positions, const GridWaveFunction& w_t, double t,
                                     double significance = kSignificance);

struct Ensemble;
/// Uses the ensemble members' configurations stamped at time t.
EquivarianceReport equivariance_test(const Ensemble& e, const GridWaveFunction& w_t, double t,
                                     double significance = kSignificance);

}  // namespace bohmlab
