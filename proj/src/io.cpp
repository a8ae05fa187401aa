#include "pcfcm/io.hpp"

#include "pcfcm/voronoi.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace pcfcm {

namespace {

// Shortest round-trip form, independent of locale.
void put(std::string& out, double v) {
  if (std::isnan(v)) {
    out += "nan";
    return;
  }
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, r.ptr);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

Vec2 grid_point(const Box& d, const SampleGrid& g, int i, int j) {
  return {d.lo.x() + d.size().x() * i / (g.nx - 1), d.lo.y() + d.size().y() * j / (g.ny - 1)};
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error("write failed for '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot rename onto '" + path + "'");
  }
}

void SampleGrid::validate() const {
  if (nx < 2 || ny < 2) throw ArgumentError("sample grid needs at least 2 points per direction");
}

std::string field_vtk(const StructuredMesh& mesh, int components, const Eigen::VectorXd& u,
                      const SampleGrid& grid) {
  grid.validate();
  const Box& d = mesh.domain();
  std::string s = "# vtk DataFile Version 3.0\npcfcm field\nASCII\nDATASET STRUCTURED_POINTS\n";
  s += "DIMENSIONS " + std::to_string(grid.nx) + " " + std::to_string(grid.ny) + " 1\nORIGIN ";
  put(s, d.lo.x());
  s += ' ';
  put(s, d.lo.y());
  s += " 0\nSPACING ";
  put(s, d.size().x() / (grid.nx - 1));
  s += ' ';
  put(s, d.size().y() / (grid.ny - 1));
  s += " 1\nPOINT_DATA " + std::to_string(grid.nx * grid.ny) + "\n";
  s += components == 1 ? "SCALARS u double 1\nLOOKUP_TABLE default\n" : "VECTORS u double\n";
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const Eigen::VectorXd v = evaluate(mesh, components, u, grid_point(d, grid, i, j)).value;
      put(s, v[0]);
      if (components == 2) {
        s += ' ';
        put(s, v[1]);
        s += " 0";
      }
      s += '\n';
    }
  }
  return s;
}

std::string field_csv(const StructuredMesh& mesh, int components, const Eigen::VectorXd& u,
                      const SampleGrid& grid) {
  grid.validate();
  const Box& d = mesh.domain();
  std::string s = components == 1 ? "x,y,u\n" : "x,y,ux,uy\n";
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const Vec2 x = grid_point(d, grid, i, j);
      const Eigen::VectorXd v = evaluate(mesh, components, u, x).value;
      put(s, x.x());
      s += ',';
      put(s, x.y());
      for (int c = 0; c < components; ++c) {
        s += ',';
        put(s, v[c]);
      }
      s += '\n';
    }
  }
  return s;
}

std::string segments_csv(const SharpReconstruction& rec) {
  std::string s = "x1,y1,x2,y2,key\n";
  for (const BoundedSegment& seg : rec.segments) {
    for (std::size_t i = 0; i < seg.intervals.size(); ++i) {
      const Segment p = seg.piece(i);
      put(s, p.a.x());
      s += ',';
      put(s, p.a.y());
      s += ',';
      put(s, p.b.x());
      s += ',';
      put(s, p.b.y());
      s += ',' + seg.key.str() + '\n';
    }
  }
  return s;
}

std::string region_map_csv(const PointCloud& cloud, int k, const Box& box, const SampleGrid& grid) {
  grid.validate();
  std::string s = "x,y,key\n";
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const Vec2 x = grid_point(box, grid, i, j);
      put(s, x.x());
      s += ',';
      put(s, x.y());
      s += ',' + region_key(cloud, x, k).str() + '\n';
    }
  }
  return s;
}

std::string beta_csv(const BetaStudy& study) {
  std::string s = "beta,e_percent\n";
  for (const BetaRow& r : study.rows) {
    put(s, r.beta);
    s += ',';
    put(s, r.error.empty() ? r.e_percent : std::nan(""));
    s += '\n';
  }
  return s;
}

IniFile IniFile::parse(std::istream& in) {
  IniFile ini;
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(where + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ParseError(where + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError(where + ": empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (ini.has(full)) throw ParseError(where + ": duplicate key '" + full + "'");
    ini.values_[full] = trim(line.substr(eq + 1));
  }
  return ini;
}

IniFile IniFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  return parse(in);
}

void IniFile::check_keys(const std::set<std::string>& allowed) const {
  for (const auto& [k, v] : values_) {
    if (!allowed.count(k)) throw ParseError("unknown config key '" + k + "'");
  }
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "inf" || t == "infinity") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size()) {
    throw ParseError("key '" + key + "': '" + text + "' is not a number");
  }
  return v;
}

int parse_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  int v = 0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size()) {
    throw ParseError("key '" + key + "': '" + text + "' is not an integer");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ParseError("key '" + key + "': '" + text + "' is not a boolean");
}

std::vector<double> parse_double_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) out.push_back(parse_double(key, item));
  if (out.empty()) throw ParseError("key '" + key + "': empty list");
  return out;
}

}  // namespace pcfcm
