#pragma once

#include "pcfcm/benchmarks.hpp"
#include "pcfcm/io.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace pcfcm {

enum class ProblemKind { annulus, membrane };

struct MeshSpec {
  Box domain{-1.1, -1.1, 1.1, 1.1};
  int cells = 16;
  int degree = 10;
  int tree_depth = 0;
  int n_gauss = 11;
  double alpha_fic = 1e-8;
};

/// Everything a CLI run needs. Defaults depend on the problem kind, see
/// default_run_config.
struct RunConfig {
  ProblemKind kind = ProblemKind::membrane;

  // membrane cloud: a file, or one of circle | multi-curve | open-snake
  std::string cloud;
  std::string synthetic = "circle";
  int synthetic_points = 2000;  // circle only
  double synthetic_spacing = 6e-3;
  bool scale = true;
  double load = 10.0;
  double u_hat = 1.0;

  AnnularConfig annulus;

  MeshSpec mesh;
  DistanceParams distance{4, 0.02};
  PenaltyMethod method = PenaltyMethod::sharp;
  double beta = 1e6;
  DiffuseParams diffuse;
  SharpParams sharp{5, 4, 11, 8e-2, {}};
  int n_gauss_reference = 11;

  std::string preset = "fig6-grid";
  std::vector<double> betas;  // overrides the preset if nonempty

  std::string output = "out";
  SampleGrid samples;
  int region_samples = 0;  // > 0 also writes regions.csv on that grid

  void validate() const;
};

RunConfig default_run_config(ProblemKind kind);

/// Every accepted "section.key".
const std::set<std::string>& run_config_keys();

/// Defaults for problem.kind, then every key of the file. Unknown keys and
/// bad values throw ParseError / ArgumentError naming the key.
RunConfig make_run_config(const IniFile& ini);

struct RunSummary {
  int dofs = 0;
  std::size_t penalty_points = 0;
  double energy = 0.0;
  std::optional<double> error;  // percent, when a reference energy exists
  std::vector<std::string> files;
  std::string extra;

  [[nodiscard]] std::string line() const;
};

RunSummary run_solve(const RunConfig& cfg);
RunSummary run_beta_study_command(const RunConfig& cfg);
RunSummary run_reconstruct(const RunConfig& cfg);

}  // namespace pcfcm
