#include "bohmlab/frame_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace bohmlab {
namespace {

static_assert(std::endian::native == std::endian::little, "frame files are written in native little-endian order");

}  // namespace

std::string format_double(double x) { return fmt::format("{}", x); }

nlohmann::json frame_header(const GridWaveFunction& w, double time, const std::string& data_file) {
  nlohmann::json axes = nlohmann::json::array();
  for (const auto& a : w.grid().axes()) axes.push_back(a);
  return nlohmann::json{{"format", "bohmlab-frame"},
                        {"version", 1},
                        {"dtype", "complex128"},
                        {"layout", "row-major"},
                        {"byte_order", "little"},
                        {"axes", axes},
                        {"time", time},
                        {"data", data_file}};
}

std::vector<std::filesystem::path> write_frame(const std::filesystem::path& stem, const GridWaveFunction& w,
                                               double time) {
  auto bin = stem;
  bin += ".bin";
  auto header = stem;
  header += ".json";
  {
    std::ofstream out(bin, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + bin.string());
    static_assert(sizeof(Complex) == 2 * sizeof(double));
    out.write(reinterpret_cast<const char*>(w.amplitudes().data()),
              static_cast<std::streamsize>(w.amplitudes().size() * sizeof(Complex)));
  }
  {
    std::ofstream out(header);
    if (!out) throw std::runtime_error("cannot open " + header.string());
    out << frame_header(w, time, bin.filename().string()).dump(2) << '\n';
  }
  return {bin, header};
}

LoadedFrame read_frame(const std::filesystem::path& header) {
  std::ifstream in(header);
  if (!in) throw std::runtime_error("cannot open " + header.string());
  const auto j = nlohmann::json::parse(in);
  if (j.value("dtype", "") != "complex128" || j.value("layout", "") != "row-major") {
    throw std::runtime_error("unsupported frame format in " + header.string());
  }
  Grid grid(j.at("axes").get<std::vector<Axis>>());
  std::vector<Complex> amps(grid.size());
  const auto data = header.parent_path() / j.at("data").get<std::string>();
  std::ifstream bin(data, std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open " + data.string());
  bin.read(reinterpret_cast<char*>(amps.data()), static_cast<std::streamsize>(amps.size() * sizeof(Complex)));
  if (bin.gcount() != static_cast<std::streamsize>(amps.size() * sizeof(Complex))) {
    throw std::runtime_error("truncated frame data in " + data.string());
  }
  return {GridWaveFunction(std::move(grid), std::move(amps)), j.at("time").get<double>()};
}

void write_trajectories_csv(std::ostream& out, const Ensemble& e, std::span<const std::size_t> stamps) {
  const std::size_t rank = e.size() > 0 && !e.members.front().configurations.empty()
                               ? e.members.front().configurations.front().size()
                               : 0;
  out << "trajectory_id,t";
  for (std::size_t d = 0; d < rank; ++d) out << ",x" << (d + 1);
  out << '\n';
  auto row = [&](std::size_t id, const Trajectory& tr, std::size_t i) {
    out << id << ',' << format_double(tr.times[i]);
    for (double x : tr.configurations[i]) out << ',' << format_double(x);
    out << '\n';
  };
  for (std::size_t id = 0; id < e.size(); ++id) {
    const auto& tr = e.members[id];
    if (stamps.empty()) {
      for (std::size_t i = 0; i < tr.size(); ++i) row(id, tr, i);
    } else {
      for (auto i : stamps) {
        if (i < tr.size()) row(id, tr, i);
      }
    }
  }
}

}  // namespace bohmlab
