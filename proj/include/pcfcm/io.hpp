#pragma once

#include "pcfcm/benchmarks.hpp"
#include "pcfcm/mesh.hpp"
#include "pcfcm/penalty.hpp"

#include <Eigen/Core>

#include <istream>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace pcfcm {

/// Writes `content` next to `path` under a temporary name, then renames it
/// into place, so readers never see a half-written file.
void write_file_atomic(const std::string& path, const std::string& content);

/// Regular sample grid over the mesh domain, nx x ny points including the
/// domain corners.
struct SampleGrid {
  int nx = 101;
  int ny = 101;
  void validate() const;
};

/// Legacy ASCII VTK STRUCTURED_POINTS file with the field as SCALARS (one
/// component) or VECTORS (two, padded with z = 0).
std::string field_vtk(const StructuredMesh& mesh, int components, const Eigen::VectorXd& u,
                      const SampleGrid& grid);

/// CSV "x,y,u" or "x,y,ux,uy" on the same grid.
std::string field_csv(const StructuredMesh& mesh, int components, const Eigen::VectorXd& u,
                      const SampleGrid& grid);

/// CSV "x1,y1,x2,y2,key", one row per kept subsegment.
std::string segments_csv(const SharpReconstruction& rec);

/// CSV "x,y,key" of the order-k region at every grid point over `box`.
std::string region_map_csv(const PointCloud& cloud, int k, const Box& box, const SampleGrid& grid);

/// CSV "beta,e_percent"; failed rows print "nan".
std::string beta_csv(const BetaStudy& study);

/// Parsed "[section]" / "key = value" text. '#' and ';' start comments.
/// Keys are stored as "section.key"; keys before any section header go
/// under their bare name.
class IniFile {
 public:
  static IniFile parse(std::istream& in);
  static IniFile parse_file(const std::string& path);

  [[nodiscard]] const std::map<std::string, std::string>& values() const { return values_; }
  [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) != 0; }
  [[nodiscard]] const std::string& get(const std::string& key) const { return values_.at(key); }

  /// Throws ParseError naming the first key not in `allowed`.
  void check_keys(const std::set<std::string>& allowed) const;

  void set(const std::string& key, const std::string& value) { values_[key] = value; }

 private:
  std::map<std::string, std::string> values_;
};

/// Number parsing with the key in the error message.
double parse_double(const std::string& key, const std::string& text);
int parse_int(const std::string& key, const std::string& text);
bool parse_bool(const std::string& key, const std::string& text);
std::vector<double> parse_double_list(const std::string& key, const std::string& text);

}  // namespace pcfcm
