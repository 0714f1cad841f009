#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "bohmlab/grid.hpp"
#include "bohmlab/trajectory.hpp"

namespace bohmlab {

/// Writes `<stem>.bin` (row-major complex128, little-endian, re/im interleaved)
/// and `<stem>.json` (axes, time, layout). Returns the two file names written.
std::vector<std::filesystem::path> write_frame(const std::filesystem::path& stem, const GridWaveFunction& w,
                                               double time);

struct LoadedFrame {
  GridWaveFunction wave;
  double time = 0.0;
};

/// Reads a frame given its JSON header path.
LoadedFrame read_frame(const std::filesystem::path& header);

nlohmann::json frame_header(const GridWaveFunction& w, double time, const std::string& data_file);

/// CSV with columns trajectory_id, t, x1..xD. When `stamps` is non-empty only
/// those stamp indices are written. Numbers use shortest round-trip formatting.
void write_trajectories_csv(std::ostream& out, const Ensemble& e, std::span<const std::size_t> stamps = {});

/// Shortest round-trip decimal representation.
std::string format_double(double x);

}  // namespace bohmlab
