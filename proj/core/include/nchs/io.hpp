#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nchs/control.hpp"
#include "nchs/forward.hpp"

namespace nchs {

// Record layout (all little endian):
//   "NCHS" | u32 version | u32 nx | u32 ny | u32 field count | f64 time
//   per field: char[16] name (NUL padded) | u32 role | [u32 count if global] | f64 payload
// Payload length: nx*ny (center), (nx+1)*ny (face-x), nx*(ny+1) (face-y), count (global).
//
// A trajectory file is a meta record (globals domain, dt, counts, config_hash), then N+1
// state records (u_x, u_y, phi, pi), then N control records (v_x, v_y).

inline constexpr std::uint32_t snapshot_format_version = 1;

enum class FieldRole : std::uint32_t { center = 0, face_x = 1, face_y = 2, global = 3 };

struct FieldRecord {
  std::string name;  ///< at most 16 bytes
  FieldRole role = FieldRole::center;
  std::vector<double> data;
};

struct SnapshotRecord {
  std::uint32_t nx = 0, ny = 0;
  double time = 0.0;
  std::vector<FieldRecord> fields;

  const FieldRecord& field(const std::string& name) const;  ///< throws IoError
};

void write_record(std::ostream& out, const SnapshotRecord& rec);
/// `offset` tracks the absolute byte position for error messages and is advanced.
/// Throws IoError on a bad magic, unsupported version, shape mismatch or truncation.
SnapshotRecord read_record(std::istream& in, std::uint64_t& offset);

/// Writes to a temporary file in the target directory, then renames it over path.
void write_file_atomic(const std::string& path, const std::string& bytes);

void save_trajectory(const std::string& path, const Trajectory& traj);
Trajectory load_trajectory(const std::string& path);
std::string serialize_trajectory(const Trajectory& traj);
Trajectory deserialize_trajectory(const std::string& bytes);

/// Controls use the trajectory layout with zero states.
void save_control(const std::string& path, const ControlField& v, double dt);
ControlField load_control(const std::string& path, const Grid& grid);

}  // namespace nchs
