#include "bohmlab/duel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bohmlab/sampling.hpp"
#include "bohmlab/statistics.hpp"

namespace bohmlab {

void to_json(nlohmann::json& j, const DuelReport& r) {
  j = nlohmann::json{{"times", r.times},
                     {"total_variation", r.total_variation},
                     {"tv_threshold", r.tv_threshold},
                     {"bins", r.bins},
                     {"marginals_agree", r.marginals_agree},
                     {"bohm_mean_step", r.bohm_mean_step},
                     {"rdmp_mean_step", r.rdmp_mean_step},
                     {"bohm_max_step", r.bohm_max_step},
                     {"rdmp_max_step", r.rdmp_max_step}};
}

DuelReport compare_bohm_rdmp(const WaveHistory& history, const Ensemble& bohm, const Ensemble& rdmp) {
  if (bohm.size() == 0 || rdmp.size() == 0) throw std::invalid_argument("compare_bohm_rdmp: empty ensemble");
  const auto& stamps = bohm.members.front().times;
  for (const auto& m : rdmp.members) {
    if (m.times.size() != stamps.size()) throw std::invalid_argument("compare_bohm_rdmp: time stamps differ");
  }
  DuelReport r;
  const std::size_t n = std::min(bohm.size(), rdmp.size());
  r.bins = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n)))));
  r.tv_threshold = std::sqrt(static_cast<double>(r.bins) / static_cast<double>(n));
  r.marginals_agree = true;
  for (std::size_t i = 0; i < stamps.size(); ++i) {
    const double t = stamps[i];
    const auto w = history.wave(history.frame_at(t));
    const auto binning = BornBinning::equal_probability(w, r.bins);
    const auto hb = binning.histogram(history.grid(), bohm.positions_at(i));
    const auto hr = binning.histogram(history.grid(), rdmp.positions_at(i));
    double nb = 0.0, nr = 0.0;
    for (auto c : hb) nb += static_cast<double>(c);
    for (auto c : hr) nr += static_cast<double>(c);
    double tv = 0.0;
    for (std::size_t b = 0; b < r.bins; ++b) tv += std::abs(static_cast<double>(hb[b]) / nb - static_cast<double>(hr[b]) / nr);
    tv *= 0.5;
    r.times.push_back(t);
    r.total_variation.push_back(tv);
    r.marginals_agree = r.marginals_agree && tv < r.tv_threshold;
  }
  for (const auto& m : bohm.members) {
    r.bohm_mean_step += mean_step(m);
    r.bohm_max_step = std::max(r.bohm_max_step, max_step(m));
  }
  for (const auto& m : rdmp.members) {
    r.rdmp_mean_step += mean_step(m);
    r.rdmp_max_step = std::max(r.rdmp_max_step, max_step(m));
  }
  r.bohm_mean_step /= static_cast<double>(bohm.size());
  r.rdmp_mean_step /= static_cast<double>(rdmp.size());
  return r;
}

double iid_mean_separation(const GridWaveFunction& w, std::size_t pairs, std::uint64_t seed) {
  const BornSampler sampler(w);
  Rng rng(seed);
  double s = 0.0;
  for (std::size_t i = 0; i < pairs; ++i) {
    const auto a = sampler.sample(rng);
    const auto b = sampler.sample(rng);
    double d2 = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) d2 += (a[d] - b[d]) * (a[d] - b[d]);
    s += std::sqrt(d2);
  }
  return s / static_cast<double>(pairs);
}

}  // namespace bohmlab
