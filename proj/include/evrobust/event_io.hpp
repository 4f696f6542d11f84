#pragma once

#include <filesystem>
#include <string>

#include "evrobust/event.hpp"
#include "evrobust/voxel.hpp"

namespace evrobust {

// Event file format: UTF-8 text, header `EVT1 <width> <height> <t_start> <t_end>`,
// then one `t x y p` line per event (p in {1,-1}, t in microseconds).
EventStream read_events(const std::filesystem::path& path);
void write_events(const EventStream& stream, const std::filesystem::path& path);

// Voxel dump: header `VOX1 <T> <H> <W>` followed by T*H*W whitespace-separated
// decimals in (tau, y, x) row-major order. Values are written in shortest
// round-trip form, so rewriting the same grid is byte-identical.
VoxelGrid read_voxel(const std::filesystem::path& path);
void write_voxel(const VoxelGrid& grid, const std::filesystem::path& path);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

}  // namespace evrobust
