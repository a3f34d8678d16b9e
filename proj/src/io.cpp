#include "smcf/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "smcf/errors.hpp"

namespace smcf {

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

std::string snapshot_filename(double t) { return fmt::format("t{:.6f}.csv", t); }

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot read {}", path.string()));
  return in;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_number(const std::string& s, const std::filesystem::path& path) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw std::runtime_error(fmt::format("{}: cannot parse '{}' as a number", path.string(), s));
  }
  return v;
}

}  // namespace

void write_snapshot_csv(const std::filesystem::path& path, const Field& f) {
  std::ofstream out = open_out(path);
  out << (f.kind == FieldKind::line ? "x,u\n" : "r,u\n");
  for (std::size_t i = 0; i < f.size(); ++i) {
    out << format_double(f.nodes[i]) << ',' << format_double(f.values[i]) << '\n';
  }
}

SnapshotTable read_snapshot_csv(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || (line != "x,u" && line != "r,u")) {
    throw std::runtime_error(fmt::format("{}: expected header 'x,u' or 'r,u'", path.string()));
  }
  SnapshotTable table;
  table.coordinate = line.substr(0, 1);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 2) throw std::runtime_error(fmt::format("{}: malformed row '{}'", path.string(), line));
    table.nodes.push_back(parse_number(cells[0], path));
    table.values.push_back(parse_number(cells[1], path));
  }
  return table;
}

SnapshotTable read_profile_table(const std::filesystem::path& path) { return read_snapshot_csv(path); }

void write_diagnostics_csv(const std::filesystem::path& path,
                           const std::vector<DiagnosticsRecord>& records) {
  std::ofstream out = open_out(path);
  out << "t,sup_u,grad_max,l2,h1_grad,sup_phi,barrier_margin\n";
  for (const auto& r : records) {
    out << format_double(r.t) << ',' << format_double(r.sup_u) << ',' << format_double(r.grad_max)
        << ',' << format_double(r.l2) << ',' << format_double(r.h1_grad) << ','
        << (r.sup_phi ? format_double(*r.sup_phi) : "") << ','
        << (r.barrier_margin ? format_double(*r.barrier_margin) : "") << '\n';
  }
}

std::vector<DiagnosticsRecord> read_diagnostics_csv(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line != "t,sup_u,grad_max,l2,h1_grad,sup_phi,barrier_margin") {
    throw std::runtime_error(fmt::format("{}: unexpected diagnostics header", path.string()));
  }
  std::vector<DiagnosticsRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = split(line);
    if (c.size() != 7) throw std::runtime_error(fmt::format("{}: malformed row '{}'", path.string(), line));
    DiagnosticsRecord r;
    r.t = parse_number(c[0], path);
    r.sup_u = parse_number(c[1], path);
    r.grad_max = parse_number(c[2], path);
    r.l2 = parse_number(c[3], path);
    r.h1_grad = parse_number(c[4], path);
    if (!c[5].empty()) r.sup_phi = parse_number(c[5], path);
    if (!c[6].empty()) r.barrier_margin = parse_number(c[6], path);
    records.push_back(r);
  }
  return records;
}

void write_trajectory(const std::filesystem::path& dir, const FlowTrajectory& traj) {
  std::filesystem::create_directories(dir / "snapshots");
  for (const auto& s : traj.snapshots) write_snapshot_csv(dir / "snapshots" / snapshot_filename(s.t), s.field);
  write_diagnostics_csv(dir / "diagnostics.csv", traj.records);
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  return nlohmann::json::parse(in);
}

}  // namespace smcf
