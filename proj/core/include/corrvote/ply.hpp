#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "corrvote/geometry.hpp"

namespace corrvote {

struct PlyParseError : std::runtime_error {
  PlyParseError(const std::string& msg, std::size_t line_number)
      : std::runtime_error("PLY parse error at line " + std::to_string(line_number) +
                           ": " + msg),
        line(line_number) {}
  std::size_t line;
};

enum class PlyFormat { kAscii, kBinaryLittleEndian };

// Reads ASCII or binary-little-endian PLY. Vertex properties x,y,z must be
// float32 or float64; nx,ny,nz are picked up when all three are present.
// Unknown properties and non-vertex elements (faces included) are skipped.
PointCloud read_ply(const std::string& path);

void write_ply(const std::string& path, const PointCloud& cloud,
               PlyFormat format = PlyFormat::kBinaryLittleEndian);

}  // namespace corrvote
