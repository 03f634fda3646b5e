#include "chopt/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace chopt {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr char kMagic[6] = {'C', 'H', 'F', 'L', 'D', '1'};
constexpr std::size_t kHeaderSize = 32;

void put_u32(unsigned char* p, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) p[i] = static_cast<unsigned char>(v >> (8 * i));
}

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

void put_f64(unsigned char* p, double d) {
  const auto bits = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) p[i] = static_cast<unsigned char>(bits >> (8 * i));
}

double get_f64(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  ensure_parent(path);
  std::ofstream out(path, mode | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot open " + path.string() + " for writing");
  return out;
}

json grid_json(const Grid& g) {
  json j;
  j["dim"] = g.dim;
  if (g.dim == 1) {
    j["n"] = {g.n[0]};
    j["extents"] = {g.extents[0]};
  } else {
    j["n"] = {g.n[0], g.n[1]};
    j["extents"] = {g.extents[0], g.extents[1]};
  }
  return j;
}

Grid grid_from_json(const json& j) {
  const int dim = j.at("dim").get<int>();
  const auto n = j.at("n").get<std::vector<int>>();
  const auto e = j.at("extents").get<std::vector<double>>();
  require(static_cast<int>(n.size()) == dim && static_cast<int>(e.size()) == dim, ErrorKind::Io,
          "manifest grid has inconsistent dimensions");
  Grid g = dim == 1 ? Grid::line(n[0], e[0]) : Grid::rectangle(n[0], n[1], e[0], e[1]);
  return g;
}

std::string frame_file(const std::string& component, int k) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%05d.bin", component.c_str(), k);
  return buf;
}

template <class Row>
void write_csv(const fs::path& path, const std::string& header, const std::vector<Row>& rows) {
  auto out = open_out(path);
  out << header << '\n';
  for (const auto& r : rows) out << r << '\n';
  require(static_cast<bool>(out), ErrorKind::Io, "failed writing " + path.string());
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_snapshot(const fs::path& path, const Field& field) {
  const Grid& g = field.grid();
  std::vector<unsigned char> bytes(kHeaderSize + 8 * field.size(), 0);
  std::memcpy(bytes.data(), kMagic, sizeof kMagic);
  put_u32(bytes.data() + 8, static_cast<std::uint32_t>(g.dim));
  put_u32(bytes.data() + 12, static_cast<std::uint32_t>(g.n[0]));
  put_u32(bytes.data() + 16, static_cast<std::uint32_t>(g.n[1]));
  for (std::size_t i = 0; i < field.size(); ++i) put_f64(bytes.data() + kHeaderSize + 8 * i, field[i]);
  auto out = open_out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(out), ErrorKind::Io, "failed writing " + path.string());
}

Field read_snapshot(const fs::path& path, const Grid& grid) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open snapshot " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  require(bytes.size() >= kHeaderSize && std::memcmp(bytes.data(), kMagic, sizeof kMagic) == 0, ErrorKind::Io,
          path.string() + " is not a field snapshot");
  const auto dim = get_u32(bytes.data() + 8);
  const auto n0 = get_u32(bytes.data() + 12);
  const auto n1 = get_u32(bytes.data() + 16);
  require(static_cast<int>(dim) == grid.dim && static_cast<int>(n0) == grid.n[0] &&
              static_cast<int>(n1) == grid.n[1],
          ErrorKind::Dimension, path.string() + " was written on a different grid");
  require(bytes.size() == kHeaderSize + 8 * grid.cell_count(), ErrorKind::Io, path.string() + " is truncated");
  std::vector<double> values(grid.cell_count());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = get_f64(bytes.data() + kHeaderSize + 8 * i);
  Field f(grid, std::move(values));
  require(f.all_finite(), ErrorKind::Io, path.string() + " holds non-finite values");
  return f;
}

void write_trajectory(const fs::path& manifest, const Trajectory& traj, const std::vector<std::string>& names) {
  require(!traj.frames.empty(), ErrorKind::InvalidArgument, "cannot write an empty trajectory");
  require(!names.empty() && names.size() <= 3, ErrorKind::InvalidArgument, "one to three component names");
  const fs::path dir = manifest.parent_path();
  const std::string stem = manifest.stem().string();
  json j;
  j["format"] = "chopt-trajectory-1";
  j["grid"] = grid_json(traj.grid());
  j["time"] = {{"T", traj.time.T}, {"nt", traj.time.nt}};
  j["components"] = names;
  json frames = json::array();
  for (std::size_t k = 0; k < traj.frames.size(); ++k) {
    json files;
    for (std::size_t c = 0; c < names.size(); ++c) {
      const std::string rel = stem + "/" + frame_file(names[c], static_cast<int>(k));
      write_snapshot(dir / rel, traj.frames[k][c]);
      files[names[c]] = rel;
    }
    frames.push_back({{"k", k}, {"t", traj.time.t(static_cast<int>(k))}, {"files", files}});
  }
  j["frames"] = std::move(frames);
  write_text(manifest, j.dump(2) + "\n");
}

Trajectory read_trajectory(const fs::path& manifest, std::vector<std::string>* component_names) {
  json j;
  try {
    j = json::parse(read_text(manifest));
  } catch (const json::exception& e) {
    fail(ErrorKind::Io, manifest.string() + ": " + e.what());
  }
  try {
    Trajectory traj;
    const Grid grid = grid_from_json(j.at("grid"));
    traj.time = TimeGrid{j.at("time").at("T").get<double>(), j.at("time").at("nt").get<int>()};
    const auto names = j.at("components").get<std::vector<std::string>>();
    require(!names.empty() && names.size() <= 3, ErrorKind::Io, "manifest needs one to three components");
    for (const auto& fr : j.at("frames")) {
      Triple t{Field(grid), Field(grid), Field(grid)};
      for (std::size_t c = 0; c < names.size(); ++c)
        t[c] = read_snapshot(manifest.parent_path() / fr.at("files").at(names[c]).get<std::string>(), grid);
      traj.frames.push_back(std::move(t));
    }
    if (component_names) *component_names = names;
    return traj;
  } catch (const json::exception& e) {
    fail(ErrorKind::Io, manifest.string() + ": malformed manifest (" + e.what() + ")");
  }
}

void write_control(const fs::path& manifest, const ControlField& u) {
  Trajectory t;
  t.time = u.time;
  for (const Field& f : u.nodes) t.frames.push_back({f, Field(), Field()});
  write_trajectory(manifest, t, {"u"});
}

ControlField read_control(const fs::path& manifest) {
  std::vector<std::string> names;
  const Trajectory t = read_trajectory(manifest, &names);
  require(names.size() == 1 && names[0] == "u", ErrorKind::Io, manifest.string() + " is not a control manifest");
  ControlField u;
  u.time = t.time;
  for (const Triple& fr : t.frames) u.nodes.push_back(fr[0]);
  require(u.nodes.size() == static_cast<std::size_t>(u.time.node_count()), ErrorKind::Io,
          manifest.string() + ": control needs one frame per node");
  return u;
}

std::vector<Field> read_component(const fs::path& manifest, const std::string& component, const Grid& grid,
                                  const TimeGrid& time) {
  std::vector<std::string> names;
  const Trajectory t = read_trajectory(manifest, &names);
  const auto it = std::find(names.begin(), names.end(), component);
  require(it != names.end(), ErrorKind::Io, manifest.string() + " has no component '" + component + "'");
  require(t.time == time && t.frames.size() == static_cast<std::size_t>(time.node_count()),
          ErrorKind::ShapeMismatch, manifest.string() + " uses a different time grid");
  require(t.grid() == grid, ErrorKind::ShapeMismatch, manifest.string() + " uses a different grid");
  const auto c = static_cast<std::size_t>(it - names.begin());
  std::vector<Field> out;
  for (const Triple& fr : t.frames) out.push_back(fr[c]);
  return out;
}

void write_diagnostics_csv(const fs::path& path, const StateTrajectory& state) {
  std::vector<std::string> rows;
  for (const auto& s : state.steps)
    rows.push_back(std::to_string(s.step) + "," + std::to_string(s.newton_iters) + "," +
                   format_double(s.mass_residual) + "," + format_double(s.delta_sep));
  write_csv(path, "step,newton_iters,mass_residual,delta_sep", rows);
}

void write_history_csv(const fs::path& path, const std::vector<IterationRecord>& history) {
  std::vector<std::string> rows;
  for (const auto& h : history) {
    const CostBreakdown& c = h.cost;
    rows.push_back(std::to_string(h.iteration) + "," + format_double(c.tracking_Q) + "," +
                   format_double(c.tracking_Omega) + "," + format_double(c.nutrient_Q) + "," +
                   format_double(c.tumour_mass) + "," + format_double(c.linear_time) + "," +
                   format_double(c.quadratic_time) + "," + format_double(c.control_energy) + "," +
                   format_double(c.relaxed_term) + "," + format_double(c.total) + "," +
                   format_double(h.projected_gradient_norm) + "," + format_double(h.control_stationarity) + "," +
                   format_double(h.time_stationarity) + "," + format_double(h.tau) + "," + format_double(h.d_tau) +
                   "," + to_string(h.time_case));
  }
  write_csv(path,
            "iteration,tracking_Q,tracking_Omega,nutrient_Q,tumour_mass,linear_time,quadratic_time,"
            "control_energy,relaxed_term,total,proj_grad_norm,control_stationarity,time_stationarity,tau,d_tau,"
            "time_case",
            rows);
}

void write_breakdown_csv(const fs::path& path, const std::vector<IterationRecord>& history) {
  std::vector<std::string> rows;
  for (const auto& h : history) {
    const CostBreakdown& c = h.cost;
    rows.push_back(std::to_string(h.iteration) + "," + format_double(h.tau) + "," + format_double(c.tracking_Q) +
                   "," + format_double(c.tracking_Omega) + "," + format_double(c.nutrient_Q) + "," +
                   format_double(c.tumour_mass) + "," + format_double(c.linear_time) + "," +
                   format_double(c.quadratic_time) + "," + format_double(c.control_energy) + "," +
                   format_double(c.relaxed_term) + "," + format_double(c.total));
  }
  write_csv(path,
            "iteration,tau,tracking_Q,tracking_Omega,nutrient_Q,tumour_mass,linear_time,quadratic_time,"
            "control_energy,relaxed_term,total",
            rows);
}

void write_adjoint_csv(const fs::path& path, const std::vector<double>& step_residuals, double snap_offset) {
  std::vector<std::string> rows;
  for (std::size_t k = 0; k < step_residuals.size(); ++k)
    rows.push_back(std::to_string(k) + "," + format_double(step_residuals[k]) + "," + format_double(snap_offset));
  write_csv(path, "node,step_residual,snap_offset", rows);
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path, std::ios::binary);
  out << text;
  require(static_cast<bool>(out), ErrorKind::Io, "failed writing " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace chopt
