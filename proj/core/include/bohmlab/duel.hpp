#pragma once

#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "bohmlab/propagator.hpp"
#include "bohmlab/trajectory.hpp"

namespace bohmlab {

struct DuelReport {
  std::vector<double> times;
  /// Total-variation distance between the Bohmian and RDMP histograms per time.
  std::vector<double> total_variation;
  double tv_threshold = 0.0;
  std::size_t bins = 0;
  bool marginals_agree = false;
  /// Continuity metrics: displacement between consecutive stamps.
  double bohm_mean_step = 0.0;
  double rdmp_mean_step = 0.0;
  double bohm_max_step = 0.0;
  double rdmp_max_step = 0.0;
};

void to_json(nlohmann::json& j, const DuelReport& r);

/// Compares a Bohmian and an RDMP ensemble stamped at the same times against
/// the frames of `history`. Histograms use sqrt(N) equal-probability bins of
/// |psi(., t)|^2; the TV threshold is sqrt(bins / N) (about twice the
/// expected TV of two independent samples of the same law).
DuelReport compare_bohm_rdmp(const WaveHistory& history, const Ensemble& bohm, const Ensemble& rdmp);

/// Monte Carlo estimate of E|X - X'| for X, X' independent draws from |psi|^2.
double iid_mean_separation(const GridWaveFunction& w, std::size_t pairs, std::uint64_t seed);

}  // namespace bohmlab
