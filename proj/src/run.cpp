#include "pcfcm/run.hpp"

#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>

namespace pcfcm {

namespace {

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

[[noreturn]] void bad(const std::string& key, const std::string& what) {
  throw ArgumentError("key '" + key + "': " + what);
}

template <typename Get>
Setter int_key(Get get, int lo) {
  return [get, lo](RunConfig& c, const std::string& k, const std::string& v) {
    const int x = parse_int(k, v);
    if (x < lo) bad(k, "must be >= " + std::to_string(lo));
    get(c) = x;
  };
}

template <typename Get>
Setter positive_key(Get get) {
  return [get](RunConfig& c, const std::string& k, const std::string& v) {
    const double x = parse_double(k, v);
    if (!(x > 0.0)) bad(k, "must be positive");
    get(c) = x;
  };
}

template <typename Get>
Setter double_key(Get get) {
  return [get](RunConfig& c, const std::string& k, const std::string& v) {
    const double x = parse_double(k, v);
    if (!std::isfinite(x)) bad(k, "must be finite");
    get(c) = x;
  };
}

template <typename Get>
Setter string_key(Get get) {
  return [get](RunConfig& c, const std::string& k, const std::string& v) {
    if (v.empty()) bad(k, "empty value");
    get(c) = v;
  };
}

ProblemKind parse_kind(const std::string& key, const std::string& v) {
  if (v == "annulus") return ProblemKind::annulus;
  if (v == "membrane") return ProblemKind::membrane;
  bad(key, "unknown problem kind '" + v + "' (annulus, membrane)");
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"problem.kind", [](RunConfig&, const std::string&, const std::string&) {}},
      {"problem.cloud", [](RunConfig& c, const std::string&, const std::string& v) { c.cloud = v; }},
      {"problem.synthetic",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v != "circle" && v != "multi-curve" && v != "open-snake") {
           bad(k, "unknown curve '" + v + "' (circle, multi-curve, open-snake)");
         }
         c.synthetic = v;
       }},
      {"problem.synthetic_points", int_key([](RunConfig& c) -> int& { return c.synthetic_points; }, 3)},
      {"problem.synthetic_spacing",
       positive_key([](RunConfig& c) -> double& { return c.synthetic_spacing; })},
      {"problem.scale",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.scale = parse_bool(k, v); }},
      {"problem.load", double_key([](RunConfig& c) -> double& { return c.load; })},
      {"problem.u_hat", double_key([](RunConfig& c) -> double& { return c.u_hat; })},
      {"problem.physics",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "poisson") {
           c.annulus.physics = Physics::poisson;
         } else if (v == "elasticity") {
           c.annulus.physics = Physics::elasticity;
         } else {
           bad(k, "unknown physics '" + v + "' (poisson, elasticity)");
         }
       }},
      {"problem.r_inner", positive_key([](RunConfig& c) -> double& { return c.annulus.r_inner; })},
      {"problem.r_outer", positive_key([](RunConfig& c) -> double& { return c.annulus.r_outer; })},
      {"problem.n_points", int_key([](RunConfig& c) -> int& { return c.annulus.n_points; }, 8)},
      {"problem.c1", double_key([](RunConfig& c) -> double& { return c.annulus.c1; })},
      {"problem.c2",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.annulus.c2 = parse_double(k, v); }},
      {"problem.c3", double_key([](RunConfig& c) -> double& { return c.annulus.c3; })},
      {"problem.young", positive_key([](RunConfig& c) -> double& { return c.annulus.material.E; })},
      {"problem.poisson",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const double nu = parse_double(k, v);
         if (!(nu > -1.0 && nu < 0.5)) bad(k, "must lie in (-1, 0.5)");
         c.annulus.material.nu = nu;
       }},
      {"mesh.domain",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const std::vector<double> d = parse_double_list(k, v);
         if (d.size() != 4 || !(d[2] > d[0] && d[3] > d[1])) bad(k, "expected x0, y0, x1, y1 with x1 > x0, y1 > y0");
         c.mesh.domain = Box(d[0], d[1], d[2], d[3]);
       }},
      {"mesh.cells", int_key([](RunConfig& c) -> int& { return c.mesh.cells; }, 1)},
      {"mesh.degree", int_key([](RunConfig& c) -> int& { return c.mesh.degree; }, 1)},
      {"mesh.tree_depth", int_key([](RunConfig& c) -> int& { return c.mesh.tree_depth; }, 0)},
      {"mesh.n_gauss", int_key([](RunConfig& c) -> int& { return c.mesh.n_gauss; }, 0)},
      {"mesh.alpha_fic",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const double a = parse_double(k, v);
         if (!(a >= 0.0 && a <= 1.0)) bad(k, "must lie in [0, 1]");
         c.mesh.alpha_fic = a;
       }},
      {"distance.k", int_key([](RunConfig& c) -> int& { return c.distance.k; }, 1)},
      {"distance.r", positive_key([](RunConfig& c) -> double& { return c.distance.r; })},
      {"penalty.method",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         try {
           c.method = parse_method(v);
         } catch (const ArgumentError& e) {
           bad(k, e.what());
         }
       }},
      {"penalty.beta", positive_key([](RunConfig& c) -> double& { return c.beta; })},
      {"diffuse.epsilon", positive_key([](RunConfig& c) -> double& { return c.diffuse.epsilon; })},
      {"diffuse.n_sub", int_key([](RunConfig& c) -> int& { return c.diffuse.n_sub; }, 0)},
      {"diffuse.n_gauss", int_key([](RunConfig& c) -> int& { return c.diffuse.n_gauss; }, 1)},
      {"diffuse.test_points", int_key([](RunConfig& c) -> int& { return c.diffuse.test_points; }, 2)},
      {"diffuse.eps_d", positive_key([](RunConfig& c) -> double& { return c.diffuse.eps_d; })},
      {"diffuse.guard",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.diffuse.guard = parse_bool(k, v); }},
      {"sharp.n_query", int_key([](RunConfig& c) -> int& { return c.sharp.n_query; }, 0)},
      {"sharp.n_sub", int_key([](RunConfig& c) -> int& { return c.sharp.n_sub; }, 0)},
      {"sharp.n_gauss", int_key([](RunConfig& c) -> int& { return c.sharp.n_gauss; }, 1)},
      {"sharp.l_max", positive_key([](RunConfig& c) -> double& { return c.sharp.l_max; })},
      {"sharp.test_grid",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const int m = parse_int(k, v);
         if (m < 1) bad(k, "must be >= 1");
         c.sharp.test_grid = {m, m};
       }},
      {"reference.n_gauss", int_key([](RunConfig& c) -> int& { return c.n_gauss_reference; }, 1)},
      {"beta_study.preset",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         try {
           (void)beta_preset(v);
         } catch (const ArgumentError& e) {
           bad(k, e.what());
         }
         c.preset = v;
       }},
      {"beta_study.betas",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.betas = parse_double_list(k, v);
         for (double b : c.betas) {
           if (!(b > 0.0)) bad(k, "values must be positive");
         }
         if (!std::is_sorted(c.betas.begin(), c.betas.end())) bad(k, "values must be ascending");
       }},
      {"output.directory", string_key([](RunConfig& c) -> std::string& { return c.output; })},
      {"output.samples",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const int n = parse_int(k, v);
         if (n < 2) bad(k, "must be >= 2");
         c.samples = {n, n};
       }},
      {"output.region_samples", int_key([](RunConfig& c) -> int& { return c.region_samples; }, 0)},
  };
  return table;
}

PointCloud membrane_cloud(const RunConfig& cfg) {
  PointCloud cloud;
  if (!cfg.cloud.empty()) {
    if (!std::filesystem::exists(cfg.cloud)) throw Error("cloud file '" + cfg.cloud + "' not found");
    cloud = load_point_cloud_file(cfg.cloud).cloud;
  } else if (cfg.synthetic == "circle") {
    cloud = PointCloud(circle_points(Vec2::Zero(), 1.0, cfg.synthetic_points));
  } else if (cfg.synthetic == "multi-curve") {
    cloud = PointCloud(multi_curve_points(cfg.synthetic_spacing));
  } else {
    cloud = PointCloud(open_snake_points(cfg.synthetic_spacing));
  }
  return cfg.scale ? scale_to_unit_box(cloud) : cloud;
}

StructuredMesh make_mesh(const RunConfig& cfg) {
  return StructuredMesh(cfg.mesh.domain, cfg.mesh.cells, cfg.mesh.cells, cfg.mesh.degree);
}

BetaStudyConfig study_config(const RunConfig& cfg) {
  BetaStudyConfig bc;
  bc.method = cfg.method;
  bc.distance = cfg.distance;
  bc.diffuse = cfg.diffuse;
  bc.sharp = cfg.sharp;
  bc.n_gauss_reference = cfg.n_gauss_reference;
  bc.betas = cfg.betas.empty() ? beta_preset(cfg.preset) : cfg.betas;
  return bc;
}

AnnularProblem annular_problem(const RunConfig& cfg) {
  AnnularProblem pb = build_annular_problem(cfg.annulus);
  pb.indicator.alpha_fic = cfg.mesh.alpha_fic;
  return pb;
}

GlobalSystem annular_volume(const StructuredMesh& mesh, const AnnularProblem& pb, const RunConfig& cfg) {
  return assemble_volume(mesh, pb.material, pb.indicator, pb.body,
                         VolumeQuadrature{cfg.mesh.tree_depth, cfg.mesh.n_gauss});
}

std::string path_in(const RunConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.output) / name).string();
}

void emit(RunSummary& s, const std::string& path, const std::string& content) {
  write_file_atomic(path, content);
  s.files.push_back(path);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

void RunConfig::validate() const {
  if (mesh.cells < 1 || mesh.degree < 1) throw ArgumentError("key 'mesh.cells': mesh needs cells >= 1 and degree >= 1");
  if (!(annulus.r_inner < annulus.r_outer)) bad("problem.r_inner", "must be smaller than problem.r_outer");
  if (kind == ProblemKind::annulus) {
    const Box& d = mesh.domain;
    if (!d.contains(Vec2(-annulus.r_outer, -annulus.r_outer)) || !d.contains(Vec2(annulus.r_outer, annulus.r_outer))) {
      bad("mesh.domain", "must contain the outer circle");
    }
  }
  if (kind == ProblemKind::membrane && method != PenaltyMethod::sharp) {
    bad("penalty.method", "the membrane problem supports the sharp method only");
  }
  try {
    diffuse.validate();
  } catch (const ArgumentError& e) {
    throw ArgumentError(std::string("section 'diffuse': ") + e.what());
  }
  try {
    sharp.validate();
  } catch (const ArgumentError& e) {
    throw ArgumentError(std::string("section 'sharp': ") + e.what());
  }
  samples.validate();
}

RunConfig default_run_config(ProblemKind kind) {
  RunConfig c;
  c.kind = kind;
  if (kind == ProblemKind::annulus) {
    c.mesh = MeshSpec{Box(-1.05, -1.05, 1.05, 1.05), 4, 8, 10, 11, 1e-8};
    c.distance = DistanceParams{4, 0.01};
    c.sharp = SharpParams{10, 3, 11, 1.5e-3, {}};
  }
  return c;
}

const std::set<std::string>& run_config_keys() {
  static const std::set<std::string> keys = [] {
    std::set<std::string> k;
    for (const auto& [name, fn] : setters()) k.insert(name);
    return k;
  }();
  return keys;
}

RunConfig make_run_config(const IniFile& ini) {
  ini.check_keys(run_config_keys());
  const ProblemKind kind =
      ini.has("problem.kind") ? parse_kind("problem.kind", ini.get("problem.kind")) : ProblemKind::membrane;
  RunConfig c = default_run_config(kind);
  for (const auto& [key, value] : ini.values()) setters().at(key)(c, key, value);
  c.validate();
  return c;
}

std::string RunSummary::line() const {
  std::string s;
  if (dofs > 0) {
    s = "dofs=" + std::to_string(dofs) + " penalty_points=" + std::to_string(penalty_points) +
        " energy=" + fmt("%.10g", energy);
    if (error) s += " error=" + fmt("%.6g", *error) + "%";
  }
  if (!extra.empty()) s += (s.empty() ? "" : " ") + extra;
  return s;
}

RunSummary run_solve(const RunConfig& cfg) {
  cfg.validate();
  RunSummary s;
  if (cfg.kind == ProblemKind::membrane) {
    MembraneConfig mc;
    mc.domain = cfg.mesh.domain;
    mc.cells = cfg.mesh.cells;
    mc.degree = cfg.mesh.degree;
    mc.load = cfg.load;
    mc.u_hat = cfg.u_hat;
    mc.beta = cfg.beta;
    mc.n_gauss = cfg.mesh.n_gauss;
    mc.distance = cfg.distance;
    mc.sharp = cfg.sharp;
    const MembraneResult r = solve_membrane(membrane_cloud(cfg), mc);
    s.dofs = r.dofs;
    s.penalty_points = r.quadrature_points;
    s.energy = r.energy;
    s.extra = "mean_constraint_error=" + fmt("%.6g", r.mean_constraint_error);
    emit(s, path_in(cfg, "field.vtk"), field_vtk(r.mesh, 1, r.u, cfg.samples));
    emit(s, path_in(cfg, "field.csv"), field_csv(r.mesh, 1, r.u, cfg.samples));
    emit(s, path_in(cfg, "segments.csv"), segments_csv(r.boundary));
    return s;
  }
  const AnnularProblem pb = annular_problem(cfg);
  const StructuredMesh mesh = make_mesh(cfg);
  const GlobalSystem vol = annular_volume(mesh, pb, cfg);
  SharpReconstruction rec;
  const PenaltySystem pen = assemble_annular_penalty(mesh, pb, study_config(cfg), &rec);
  const SolveResult sol = solve(add_penalty(vol, pen, cfg.beta));
  s.dofs = vol.size();
  s.penalty_points = pen.quadrature_points;
  s.energy = strain_energy(vol.K_physical, sol.u);
  s.error = energy_error(s.energy, pb.energy);
  const int nc = pb.components();
  emit(s, path_in(cfg, "field.vtk"), field_vtk(mesh, nc, sol.u, cfg.samples));
  emit(s, path_in(cfg, "field.csv"), field_csv(mesh, nc, sol.u, cfg.samples));
  if (cfg.method == PenaltyMethod::sharp) emit(s, path_in(cfg, "segments.csv"), segments_csv(rec));
  return s;
}

RunSummary run_beta_study_command(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.kind != ProblemKind::annulus) bad("problem.kind", "beta-study needs the annulus problem");
  const AnnularProblem pb = annular_problem(cfg);
  const StructuredMesh mesh = make_mesh(cfg);
  const GlobalSystem vol = annular_volume(mesh, pb, cfg);
  const BetaStudy st = run_beta_study(mesh, pb, vol, study_config(cfg));
  RunSummary s;
  s.dofs = vol.size();
  s.penalty_points = st.quadrature_points;
  std::size_t failed = 0;
  double best = std::numeric_limits<double>::infinity();
  for (const BetaRow& r : st.rows) {
    if (!r.error.empty()) {
      ++failed;
      continue;
    }
    if (r.e_percent < best) {
      best = r.e_percent;
      s.energy = r.energy;
      s.error = r.e_percent;
    }
  }
  s.extra = "rows=" + std::to_string(st.rows.size()) + " failed=" + std::to_string(failed);
  emit(s, path_in(cfg, "beta.csv"), beta_csv(st));
  return s;
}

RunSummary run_reconstruct(const RunConfig& cfg) {
  cfg.validate();
  const PointCloud cloud = cfg.kind == ProblemKind::annulus ? build_annular_problem(cfg.annulus).cloud
                                                            : membrane_cloud(cfg);
  const StructuredMesh mesh = make_mesh(cfg);
  const SharpReconstruction rec = reconstruct_sharp(mesh, cloud, cfg.distance, cfg.sharp);
  RunSummary s;
  s.extra = "segments=" + std::to_string(rec.segments.size()) + " kept_length=" +
            fmt("%.10g", rec.kept_length()) + " warnings=" + std::to_string(rec.warnings);
  emit(s, path_in(cfg, "segments.csv"), segments_csv(rec));
  if (cfg.region_samples > 0) {
    emit(s, path_in(cfg, "regions.csv"),
         region_map_csv(cloud, cfg.distance.k, mesh.domain(), {cfg.region_samples, cfg.region_samples}));
  }
  return s;
}

}  // namespace pcfcm
