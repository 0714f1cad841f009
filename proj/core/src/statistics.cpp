#include "bohmlab/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "bohmlab/trajectory.hpp"

namespace bohmlab {
namespace {

// Maps x into the marginal's support [origin - dx/2, origin + L - dx/2).
double unwrap_to_cells(const Axis& a, double x) {
  const double w = a.wrap(x);
  return w >= a.origin + a.period() - 0.5 * a.spacing ? w - a.period() : w;
}

}  // namespace

ChiSquareResult chi_square_test(std::span<const std::size_t> observed, std::span<const double> expected_probability) {
  if (observed.size() != expected_probability.size()) throw DimensionMismatch("chi_square_test: bin count mismatch");
  double n = 0.0;
  for (auto o : observed) n += static_cast<double>(o);
  ChiSquareResult r;
  std::size_t used = 0;
  for (std::size_t b = 0; b < observed.size(); ++b) {
    const double e = expected_probability[b] * n;
    const auto o = static_cast<double>(observed[b]);
    if (e <= 0.0) {
      if (o > 0.0) {
        r.statistic = std::numeric_limits<double>::infinity();
        r.degrees_of_freedom = observed.size() > 1 ? observed.size() - 1 : 1;
        r.p_value = 0.0;
        return r;
      }
      continue;
    }
    r.statistic += (o - e) * (o - e) / e;
    ++used;
  }
  r.degrees_of_freedom = used > 1 ? used - 1 : 1;
  r.p_value = boost::math::gamma_q(0.5 * static_cast<double>(r.degrees_of_freedom), 0.5 * r.statistic);
  return r;
}

double kolmogorov_p_value(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Small-lambda form of the Kolmogorov CDF converges faster here.
    const double y = std::exp(-std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda));
    const double y8 = std::pow(y, 8.0);
    const double cdf = std::sqrt(2.0 * std::numbers::pi) / lambda * y * (1.0 + y8 * (1.0 + y8 * y8 * (1.0 + y8 * y8 * y8)));
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double q = 0.0, sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    q += sign * term;
    sign = -sign;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * q, 0.0, 1.0);
}

KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_test: no samples");
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return {d, kolmogorov_p_value(d, samples.size())};
}

BornBinning BornBinning::equal_probability(const GridWaveFunction& w, std::size_t bins) {
  if (bins == 0) throw std::invalid_argument("BornBinning: need at least one bin");
  const auto masses = cell_masses(w);
  double total = 0.0;
  for (double m : masses) total += m;
  if (!(total > 0.0)) throw std::invalid_argument("BornBinning: zero wave function");
  BornBinning b;
  b.cell_to_bin.resize(masses.size());
  b.bin_probability.assign(bins, 0.0);
  double before = 0.0;
  for (std::size_t c = 0; c < masses.size(); ++c) {
    const double p = masses[c] / total;
    const double mid = before + 0.5 * p;
    const auto bin = std::min(bins - 1, static_cast<std::size_t>(mid * static_cast<double>(bins)));
    b.cell_to_bin[c] = bin;
    b.bin_probability[bin] += p;
    before += p;
  }
  return b;
}

std::size_t BornBinning::bin_of(const Grid& grid, std::span<const double> q) const {
  return cell_to_bin[grid.nearest_flat(q)];
}

std::vector<std::size_t> BornBinning::histogram(const Grid& grid, std::span<const Configuration> positions) const {
  std::vector<std::size_t> h(bin_probability.size(), 0);
  for (const auto& q : positions) ++h[bin_of(grid, q)];
  return h;
}

std::function<double(double)> marginal_cdf(const GridWaveFunction& w, std::size_t d) {
  const Grid& g = w.grid();
  const Axis a = g.axis(d);
  const auto masses = cell_masses(w);
  std::vector<double> marginal(a.points, 0.0);
  for (std::size_t f = 0; f < masses.size(); ++f) marginal[(f / g.stride(d)) % a.points] += masses[f];
  std::vector<double> cumulative(a.points + 1, 0.0);
  for (std::size_t i = 0; i < a.points; ++i) cumulative[i + 1] = cumulative[i] + marginal[i];
  const double total = cumulative.back();
  for (auto& c : cumulative) c /= total;
  return [a, cumulative = std::move(cumulative)](double x) {
    const double u = (unwrap_to_cells(a, x) - (a.origin - 0.5 * a.spacing)) / a.spacing;
    if (u <= 0.0) return 0.0;
    if (u >= static_cast<double>(a.points)) return 1.0;
    const auto i = static_cast<std::size_t>(u);
    const double frac = u - static_cast<double>(i);
    return cumulative[i] + frac * (cumulative[i + 1] - cumulative[i]);
  };
}

void to_json(nlohmann::json& j, const EquivarianceReport& r) {
  auto ks = nlohmann::json::array();
  for (const auto& k : r.ks) ks.push_back({{"statistic", k.statistic}, {"p_value", k.p_value}});
  j = nlohmann::json{{"time", r.time},
                     {"samples", r.samples},
                     {"bins", r.bins},
                     {"chi_square",
                      {{"statistic", r.chi_square.statistic},
                       {"degrees_of_freedom", r.chi_square.degrees_of_freedom},
                       {"p_value", r.chi_square.p_value}}},
                     {"ks", ks},
                     {"significance", r.significance},
                     {"pass", r.pass}};
}

EquivarianceReport equivariance_test(std::span<const Configuration> positions, const GridWaveFunction& w_t, double t,
                                     double significance) {
  if (positions.size() < kMinEnsemble) {
    throw std::invalid_argument("equivariance_test: " + std::to_string(positions.size()) +
                                " samples is underpowered (minimum " + std::to_string(kMinEnsemble) + ")");
  }
  const Grid& g = w_t.grid();
  EquivarianceReport r;
  r.time = t;
  r.samples = positions.size();
  r.significance = significance;
  r.bins = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(positions.size()))));
  const auto binning = BornBinning::equal_probability(w_t, r.bins);
  const auto counts = binning.histogram(g, positions);
  r.chi_square = chi_square_test(counts, binning.bin_probability);
  r.pass = r.chi_square.p_value >= significance;
  for (std::size_t d = 0; d < g.rank(); ++d) {
    std::vector<double> xs;
    xs.reserve(positions.size());
    for (const auto& q : positions) xs.push_back(unwrap_to_cells(g.axis(d), q[d]));
    r.ks.push_back(ks_test(std::move(xs), marginal_cdf(w_t, d)));
    r.pass = r.pass && r.ks.back().p_value >= significance;
  }
  return r;
}

EquivarianceReport equivariance_test(const Ensemble& e, const GridWaveFunction& w_t, double t, double significance) {
  std::vector<Configuration> positions;
  positions.reserve(e.size());
  for (const auto& m : e.members) {
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (std::abs(m.times[i] - t) <= 1e-9 * std::max(1.0, std::abs(t))) {
        positions.push_back(m.configurations[i]);
        break;
      }
    }
  }
  return equivariance_test(positions, w_t, t, significance);
}

}  // namespace bohmlab
