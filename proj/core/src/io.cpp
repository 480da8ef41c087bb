#include "nchs/io.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "nchs/error.hpp"

namespace nchs {

namespace {

constexpr char magic[4] = {'N', 'C', 'H', 'S'};
constexpr std::size_t name_bytes = 16;

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
}

template <class T>
void put(std::ostream& out, T v) {
  v = to_little(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

void get_bytes(std::istream& in, char* dst, std::size_t n, std::uint64_t& offset, const char* what) {
  in.read(dst, std::streamsize(n));
  const auto got = std::size_t(in.gcount());
  if (got != n)
    throw IoError(fmt::format("truncated file: {} ended at byte offset {} ({} of {} bytes present)", what,
                              offset + got, got, n));
  offset += n;
}

template <class T>
T get(std::istream& in, std::uint64_t& offset, const char* what) {
  T v;
  get_bytes(in, reinterpret_cast<char*>(&v), sizeof(T), offset, what);
  return to_little(v);
}

std::size_t expected_length(FieldRole role, std::uint32_t nx, std::uint32_t ny) {
  switch (role) {
    case FieldRole::center: return std::size_t(nx) * ny;
    case FieldRole::face_x: return std::size_t(nx + 1) * ny;
    case FieldRole::face_y: return std::size_t(nx) * (ny + 1);
    case FieldRole::global: return 0;
  }
  return 0;
}

FieldRecord global(const std::string& name, std::vector<double> data) {
  return {name, FieldRole::global, std::move(data)};
}

SnapshotRecord state_record(const StateSnapshot& s) {
  const Grid& g = s.phi.grid();
  SnapshotRecord r{std::uint32_t(g.nx()), std::uint32_t(g.ny()), s.t, {}};
  r.fields.push_back({"u_x", FieldRole::face_x, {s.u.xs().begin(), s.u.xs().end()}});
  r.fields.push_back({"u_y", FieldRole::face_y, {s.u.ys().begin(), s.u.ys().end()}});
  r.fields.push_back({"phi", FieldRole::center, {s.phi.values().begin(), s.phi.values().end()}});
  r.fields.push_back({"pi", FieldRole::center, {s.pi.values().begin(), s.pi.values().end()}});
  return r;
}

SnapshotRecord control_record(const VectorField& v, double t) {
  const Grid& g = v.grid();
  SnapshotRecord r{std::uint32_t(g.nx()), std::uint32_t(g.ny()), t, {}};
  r.fields.push_back({"v_x", FieldRole::face_x, {v.xs().begin(), v.xs().end()}});
  r.fields.push_back({"v_y", FieldRole::face_y, {v.ys().begin(), v.ys().end()}});
  return r;
}

SnapshotRecord meta_record(const Grid& g, double dt, std::size_t states, std::size_t controls, std::uint64_t hash) {
  SnapshotRecord r{std::uint32_t(g.nx()), std::uint32_t(g.ny()), 0.0, {}};
  r.fields.push_back(global("domain", {g.lx(), g.ly()}));
  r.fields.push_back(global("dt", {dt}));
  r.fields.push_back(global("counts", {double(states), double(controls)}));
  r.fields.push_back(global("config_hash", {std::bit_cast<double>(hash)}));
  return r;
}

void copy_into(std::span<double> dst, const FieldRecord& f) {
  if (f.data.size() != dst.size()) throw IoError("field '" + f.name + "': payload size does not match the grid");
  std::copy(f.data.begin(), f.data.end(), dst.begin());
}

struct Contents {
  Grid grid;
  double dt = 0.0;
  std::uint64_t hash = 0;
  std::vector<StateSnapshot> states;
  std::vector<VectorField> controls;
};

Contents read_all(std::istream& in) {
  std::uint64_t offset = 0;
  const SnapshotRecord meta = read_record(in, offset);
  const auto& domain = meta.field("domain").data;
  const auto& counts = meta.field("counts").data;
  if (domain.size() != 2 || counts.size() != 2 || meta.field("dt").data.size() != 1)
    throw IoError("meta record: malformed globals");
  Contents c;
  try {
    c.grid = Grid(int(meta.nx), int(meta.ny), domain[0], domain[1]);
  } catch (const Error& e) {
    throw IoError(std::string("meta record: ") + e.what());
  }
  c.dt = meta.field("dt").data[0];
  if (const auto& h = meta.field("config_hash").data; h.size() == 1) c.hash = std::bit_cast<std::uint64_t>(h[0]);
  const auto n_states = std::size_t(counts[0]), n_controls = std::size_t(counts[1]);
  auto check_dims = [&](const SnapshotRecord& r) {
    if (r.nx != meta.nx || r.ny != meta.ny) throw IoError("record grid differs from the meta record");
  };
  for (std::size_t n = 0; n < n_states; ++n) {
    const SnapshotRecord r = read_record(in, offset);
    check_dims(r);
    StateSnapshot s{r.time, VectorField(c.grid), ScalarField(c.grid), ScalarField(c.grid)};
    copy_into(s.u.xs(), r.field("u_x"));
    copy_into(s.u.ys(), r.field("u_y"));
    copy_into(s.phi.values(), r.field("phi"));
    copy_into(s.pi.values(), r.field("pi"));
    c.states.push_back(std::move(s));
  }
  for (std::size_t n = 0; n < n_controls; ++n) {
    const SnapshotRecord r = read_record(in, offset);
    check_dims(r);
    VectorField v(c.grid);
    copy_into(v.xs(), r.field("v_x"));
    copy_into(v.ys(), r.field("v_y"));
    c.controls.push_back(std::move(v));
  }
  return c;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

const FieldRecord& SnapshotRecord::field(const std::string& name) const {
  for (const auto& f : fields)
    if (f.name == name) return f;
  throw IoError("record has no field '" + name + "'");
}

void write_record(std::ostream& out, const SnapshotRecord& rec) {
  out.write(magic, 4);
  put(out, snapshot_format_version);
  put(out, rec.nx);
  put(out, rec.ny);
  put(out, std::uint32_t(rec.fields.size()));
  put(out, rec.time);
  for (const auto& f : rec.fields) {
    if (f.name.size() > name_bytes) throw IoError("field name '" + f.name + "' exceeds 16 bytes");
    char name[name_bytes] = {};
    std::memcpy(name, f.name.data(), f.name.size());
    out.write(name, name_bytes);
    put(out, std::uint32_t(f.role));
    if (f.role == FieldRole::global) {
      put(out, std::uint32_t(f.data.size()));
    } else if (f.data.size() != expected_length(f.role, rec.nx, rec.ny)) {
      throw IoError("field '" + f.name + "': payload size does not match its role");
    }
    for (double v : f.data) put(out, v);
  }
  if (!out) throw IoError("write failed");
}

SnapshotRecord read_record(std::istream& in, std::uint64_t& offset) {
  const std::uint64_t start = offset;
  char m[4];
  get_bytes(in, m, 4, offset, "record header");
  if (std::memcmp(m, magic, 4) != 0) throw IoError(fmt::format("bad magic at byte offset {}", start));
  const auto version = get<std::uint32_t>(in, offset, "record header");
  if (version != snapshot_format_version)
    throw IoError(fmt::format("unsupported format version {} at byte offset {} (expected {})", version, start,
                              snapshot_format_version));
  SnapshotRecord r;
  r.nx = get<std::uint32_t>(in, offset, "record header");
  r.ny = get<std::uint32_t>(in, offset, "record header");
  const auto count = get<std::uint32_t>(in, offset, "record header");
  r.time = get<double>(in, offset, "record header");
  for (std::uint32_t k = 0; k < count; ++k) {
    char name[name_bytes];
    get_bytes(in, name, name_bytes, offset, "field header");
    FieldRecord f;
    f.name.assign(name, strnlen(name, name_bytes));
    const auto role = get<std::uint32_t>(in, offset, "field header");
    if (role > 3) throw IoError(fmt::format("field '{}': unknown role {}", f.name, role));
    f.role = FieldRole(role);
    std::size_t len = f.role == FieldRole::global ? get<std::uint32_t>(in, offset, "field header")
                                                  : expected_length(f.role, r.nx, r.ny);
    f.data.resize(len);
    get_bytes(in, reinterpret_cast<char*>(f.data.data()), len * sizeof(double), offset, "field payload");
    for (double& v : f.data) v = to_little(v);
    r.fields.push_back(std::move(f));
  }
  return r;
}

void write_file_atomic(const std::string& path, const std::string& bytes) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) fs::create_directories(target.parent_path(), ec);
  const fs::path tmp = target.string() + fmt::format(".tmp.{}", ::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(bytes.data(), std::streamsize(bytes.size()));
    out.flush();
    if (!out) throw IoError("write to '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename temporary file onto '" + path + "'");
  }
}

std::string serialize_trajectory(const Trajectory& traj) {
  std::ostringstream out(std::ios::binary);
  write_record(out, meta_record(traj.grid, traj.dt, traj.snapshots.size(), traj.controls.size(), traj.config_hash));
  for (const auto& s : traj.snapshots) write_record(out, state_record(s));
  for (std::size_t n = 0; n < traj.controls.size(); ++n) write_record(out, control_record(traj.controls[n], n * traj.dt));
  return out.str();
}

Trajectory deserialize_trajectory(const std::string& bytes) {
  std::istringstream in(bytes, std::ios::binary);
  Contents c = read_all(in);
  if (c.states.empty() || c.states.size() != c.controls.size() + 1)
    throw IoError("trajectory file: expected N+1 states and N controls");
  Trajectory t;
  t.grid = c.grid;
  t.dt = c.dt;
  t.config_hash = c.hash;
  t.snapshots = std::move(c.states);
  t.controls = std::move(c.controls);
  return t;
}

void save_trajectory(const std::string& path, const Trajectory& traj) {
  write_file_atomic(path, serialize_trajectory(traj));
}

Trajectory load_trajectory(const std::string& path) { return deserialize_trajectory(read_file(path)); }

void save_control(const std::string& path, const ControlField& v, double dt) {
  if (v.values.empty()) throw IoError("save_control: empty control");
  const Grid& g = v.values.front().grid();
  std::ostringstream out(std::ios::binary);
  write_record(out, meta_record(g, dt, 0, v.values.size(), 0));
  for (std::size_t n = 0; n < v.values.size(); ++n) write_record(out, control_record(v.values[n], n * dt));
  write_file_atomic(path, out.str());
}

ControlField load_control(const std::string& path, const Grid& grid) {
  std::istringstream in(read_file(path), std::ios::binary);
  Contents c = read_all(in);
  if (!(c.grid == grid)) throw IoError("control file '" + path + "': grid differs from the run grid");
  ControlField v;
  v.values = std::move(c.controls);
  return v;
}

}  // namespace nchs
