#include "bohmlab/interpolation.hpp"

#include <cmath>
#include <vector>

namespace bohmlab {

CubicStencil cubic_stencil(const Axis& axis, double x) {
  const double r = (axis.wrap(x) - axis.origin) / axis.spacing;
  double base = std::floor(r);
  double t = r - base;
  const auto n = static_cast<long long>(axis.points);
  auto i0 = static_cast<long long>(base);
  CubicStencil s;
  for (int o = 0; o < 4; ++o) {
    long long i = (i0 - 1 + o) % n;
    if (i < 0) i += n;
    s.index[static_cast<std::size_t>(o)] = static_cast<std::size_t>(i);
  }
  const double t2 = t * t, t3 = t2 * t;
  s.weight = {0.5 * (-t3 + 2.0 * t2 - t), 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0), 0.5 * (-3.0 * t3 + 4.0 * t2 + t),
              0.5 * (t3 - t2)};
  return s;
}

void interpolate_many(const Grid& grid, std::span<const std::span<const Complex>> fields,
                      std::span<const double> q, std::span<Complex> out) {
  const std::size_t rank = grid.rank();
  std::array<CubicStencil, 8> local{};
  std::vector<CubicStencil> heap;
  CubicStencil* st = local.data();
  if (rank > local.size()) {
    heap.resize(rank);
    st = heap.data();
  }
  for (std::size_t d = 0; d < rank; ++d) st[d] = cubic_stencil(grid.axis(d), q[d]);
  for (auto& o : out) o = Complex{0.0, 0.0};

  std::size_t corners = 1;
  for (std::size_t d = 0; d < rank; ++d) corners *= 4;
  for (std::size_t c = 0; c < corners; ++c) {
    std::size_t rem = c, flat = 0;
    double w = 1.0;
    for (std::size_t d = rank; d-- > 0;) {
      const std::size_t o = rem % 4;
      rem /= 4;
      flat += st[d].index[o] * grid.stride(d);
      w *= st[d].weight[o];
    }
    for (std::size_t k = 0; k < fields.size(); ++k) out[k] += w * fields[k][flat];
  }
}

Complex interpolate(const Grid& grid, std::span<const Complex> field, std::span<const double> q) {
  Complex out;
  std::span<const Complex> fields[1] = {field};
  interpolate_many(grid, fields, q, std::span<Complex>(&out, 1));
  return out;
}

}  // namespace bohmlab
