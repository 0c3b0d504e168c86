#include "monofem/runner.hpp"

#include <algorithm>
#include <iostream>

#include "monofem/locpot.hpp"
#include "monofem/mono.hpp"
#include "monofem/verify.hpp"

namespace monofem {

namespace {

namespace fs = std::filesystem;
using io::json;

fs::path resolve(const RunConfig& cfg, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : cfg.config_dir / path;
}

const json& need(const json& j, const std::string& key, const std::string& ctx) {
  if (!j.contains(key))
    throw ConfigError("config: missing '" + key + "' in " + ctx);
  return j.at(key);
}

Mesh mesh_from_config(const RunConfig& cfg) {
  const json& j = need(cfg.raw, "mesh", "top level");
  const std::string kind = need(j, "kind", "mesh").get<std::string>();
  if (kind == "file") return io::read_mesh_json(resolve(cfg, j.at("path")));
  const double h = need(j, "h", "mesh").get<double>();
  if (kind == "disk") {
    Eigen::Vector2d center(0, 0);
    if (j.contains("center"))
      center = {j["center"][0].get<double>(), j["center"][1].get<double>()};
    return build_mesh(DomainSpec::disk(j.value("radius", 1.0), center), h);
  }
  if (kind == "rect")
    return build_mesh(DomainSpec::rectangle(j.value("x0", 0.0), j.value("x1", 1.0),
                                            j.value("y0", 0.0), j.value("y1", 1.0)),
                      h);
  throw ConfigError("config: unknown mesh kind '" + kind + "'");
}

GammaSpec gamma_from_config(const RunConfig& cfg, const Mesh& mesh) {
  if (!cfg.raw.contains("gamma"))
    return select_gamma(mesh, GammaPredicate::full());
  const json& j = cfg.raw.at("gamma");
  const std::string kind = j.value("kind", "full");
  if (kind == "full") return select_gamma(mesh, GammaPredicate::full());
  if (kind == "angle") {
    Eigen::Vector2d center(0, 0);
    if (j.contains("center"))
      center = {j["center"][0].get<double>(), j["center"][1].get<double>()};
    return select_gamma(mesh, GammaPredicate::angle_interval(
                                  need(j, "from", "gamma").get<double>(),
                                  need(j, "to", "gamma").get<double>(), center));
  }
  if (kind == "box")
    return select_gamma(
        mesh, GammaPredicate::box(j.value("xmin", -1e300), j.value("xmax", 1e300),
                                  j.value("ymin", -1e300), j.value("ymax", 1e300)));
  throw ConfigError("config: unknown gamma kind '" + kind + "'");
}

RegionMask mask_from_config(const RunConfig& cfg, const json& j, const Mesh& mesh) {
  const std::string kind = need(j, "kind", "mask").get<std::string>();
  if (kind == "csv") {
    RegionMask m = io::read_mask_csv(resolve(cfg, j.at("path")));
    if (m.size() != mesh.n_triangles())
      throw ConfigError("config: mask csv size does not match the mesh");
    return m;
  }
  if (kind == "all") return RegionMask::all(mesh);
  if (kind == "none") return RegionMask::none(mesh);
  MaskPredicate p;
  if (kind == "ball")
    p = MaskPredicate::ball({j.at("center")[0].get<double>(),
                             j.at("center")[1].get<double>()},
                            j.at("radius").get<double>());
  else if (kind == "halfplane")
    p = MaskPredicate::halfplane({j.at("direction")[0].get<double>(),
                                  j.at("direction")[1].get<double>()},
                                 j.at("offset").get<double>());
  else if (kind == "box")
    p = MaskPredicate::box(j.at("xmin").get<double>(), j.at("xmax").get<double>(),
                           j.at("ymin").get<double>(), j.at("ymax").get<double>());
  else if (kind == "annulus")
    p = MaskPredicate::annulus({j.at("center")[0].get<double>(),
                                j.at("center")[1].get<double>()},
                               j.at("inner").get<double>(),
                               j.at("outer").get<double>());
  else
    throw ConfigError("config: unknown mask kind '" + kind + "'");
  return mask_from_predicate(mesh, p);
}

Matrix2c matrix_from_config(const json& j) {
  if (!j.is_array() || j.size() != 8)
    throw ConfigError("config: a coefficient matrix needs 8 reals "
                      "(re/im per entry, row-major)");
  Matrix2c m;
  m(0, 0) = cplx(j[0].get<double>(), j[1].get<double>());
  m(0, 1) = cplx(j[2].get<double>(), j[3].get<double>());
  m(1, 0) = cplx(j[4].get<double>(), j[5].get<double>());
  m(1, 1) = cplx(j[6].get<double>(), j[7].get<double>());
  return m;
}

Phantom phantom_from_config(const RunConfig& cfg, const Mesh& mesh) {
  PhantomSpec spec;
  if (cfg.raw.contains("background"))
    spec.background = matrix_from_config(cfg.raw.at("background"));
  if (cfg.raw.contains("pieces")) {
    for (const json& pj : cfg.raw.at("pieces")) {
      PhantomPiece piece;
      piece.mask = mask_from_config(cfg, need(pj, "mask", "piece"), mesh);
      piece.value = matrix_from_config(need(pj, "matrix", "piece"));
      spec.pieces.push_back(std::move(piece));
    }
  }
  if (cfg.raw.contains("tau_plus")) spec.tau_plus = cfg.raw["tau_plus"].get<double>();
  if (cfg.raw.contains("tau_minus")) spec.tau_minus = cfg.raw["tau_minus"].get<double>();
  return build_phantom(spec, mesh);
}

CoefficientBounds bounds_from_config(const RunConfig& cfg, const Phantom& ph,
                                     const Mesh& mesh) {
  if (cfg.raw.contains("bounds")) {
    const json& j = cfg.raw.at("bounds");
    CoefficientBounds b{need(j, "alpha", "bounds").get<double>(),
                        need(j, "beta", "bounds").get<double>(),
                        j.value("eta", 0.0)};
    if (!b.valid()) throw ConfigError("config: bounds must satisfy 0 < alpha <= beta, eta >= 0");
    return b;
  }
  return joint_bounds(ph.a0, ph.ad, mesh);
}

Method method_from_config(const RunConfig& cfg) {
  const std::string m = cfg.raw.value("method", "corollary");
  if (m == "nonlinear") return Method::Nonlinear;
  if (m == "linearized") return Method::Linearized;
  if (m == "corollary") return Method::Corollary;
  if (m == "extreme") return Method::Extreme;
  throw ConfigError("config: unknown method '" + m + "'");
}

OneSided one_sided_from_config(const RunConfig& cfg) {
  const std::string s = cfg.raw.value("one_sided", "both");
  if (s == "both") return OneSided::Both;
  if (s == "upper_only") return OneSided::UpperOnly;
  if (s == "lower_only") return OneSided::LowerOnly;
  throw ConfigError("config: unknown one_sided '" + s + "'");
}

BoundaryCurrent current_from_config(const RunConfig& cfg, const Mesh& mesh,
                                    const GammaSpec& gamma) {
  if (!cfg.raw.contains("current"))
    return fourier_current(mesh, gamma, 1);
  const json& j = cfg.raw.at("current");
  const std::string kind = j.value("kind", "fourier");
  if (kind == "fourier")
    return fourier_current(mesh, gamma, j.value("n", 1), j.value("sine", false));
  if (kind == "random") {
    std::mt19937_64 rng(cfg.seed);
    return random_current(mesh, gamma, rng);
  }
  if (kind == "csv") {
    BoundaryCurrent f = io::read_current_csv(resolve(cfg, j.at("path")));
    if (f.size() != gamma.size())
      throw ConfigError("config: current csv size does not match Gamma");
    return project_mean_free(mesh, gamma, f.values);
  }
  throw ConfigError("config: unknown current kind '" + kind + "'");
}

CandidateSet candidates_from_config(const RunConfig& cfg, const Mesh& mesh,
                                    const RegionMask& m) {
  const json& j = need(cfg.raw, "dictionary", "top level");
  const std::string kind = j.value("kind", "halfspace_caps");
  if (kind == "halfspace_caps") {
    CapsDictionary dict;
    dict.n_dirs = j.value("n_dirs", 8);
    dict.n_offsets = j.value("n_offsets", 8);
    dict.margin = j.value("margin", 0.05);
    return generate_candidates(mesh, m, dict);
  }
  if (kind == "user_masks") {
    std::vector<RegionMask> masks;
    for (const json& mj : need(j, "masks", "dictionary"))
      masks.push_back(mask_from_config(cfg, mj, mesh));
    return candidates_from_masks(mesh, m, masks);
  }
  throw ConfigError("config: unknown dictionary kind '" + kind + "'");
}

void validate_method_constraints(const RunConfig& cfg, Method method,
                                 const Phantom& ph) {
  if ((method == Method::Corollary || method == Method::Extreme) &&
      !ph.a0.is_self_adjoint(1e-12))
    throw ConfigError("config: the " + method_name(method) +
                      " method requires a self-adjoint background coefficient");
}

struct Manifest {
  fs::path dir;
  json artifacts = json::array();

  void add(const fs::path& path) {
    json entry;
    entry["path"] = fs::relative(path, dir).generic_string();
    entry["fnv1a64"] = io::fnv1a64(io::read_text(path));
    artifacts.push_back(entry);
  }
  void write(const RunConfig& cfg, const std::string& subcommand) {
    json m;
    m["subcommand"] = subcommand;
    m["seed"] = cfg.seed;
    m["jobs"] = cfg.jobs;
    m["artifacts"] = artifacts;
    io::write_text(dir / "manifest.json", m.dump(2) + "\n");
  }
};

json report_to_json(const TestReport& rep) {
  json j;
  j["candidate_id"] = rep.candidate_id;
  j["tol"] = io::rounded(rep.tol);
  j["pass"] = rep.pass;
  json iq = json::array();
  for (const auto& r : rep.inequalities) {
    json e;
    e["name"] = r.name;
    e["min_eig"] = io::rounded(r.min_eig);
    e["pass"] = r.pass;
    iq.push_back(e);
  }
  j["inequalities"] = iq;
  return j;
}

struct PipelineData {
  Mesh mesh;
  GammaSpec gamma;
  Phantom phantom;
  CoefficientBounds bounds;
};

PipelineData load_pipeline(const RunConfig& cfg) {
  PipelineData p;
  p.mesh = mesh_from_config(cfg);
  p.gamma = gamma_from_config(cfg, p.mesh);
  p.phantom = phantom_from_config(cfg, p.mesh);
  p.bounds = bounds_from_config(cfg, p.phantom, p.mesh);
  return p;
}

NDOperator measured_data(const RunConfig& cfg, const PipelineData& p) {
  if (cfg.raw.contains("data")) {
    const json& j = cfg.raw.at("data");
    if (j.value("kind", "phantom") == "csv")
      return io::read_nd_operator(resolve(cfg, j.at("matrix")),
                                  resolve(cfg, j.at("gram")));
  }
  return compute_nd(assemble_and_factor(p.mesh, p.phantom.ad, p.gamma));
}

double tolerance_from_config(const RunConfig& cfg, Method method,
                             const NDOperator& data, const CandidateSet* cands,
                             TestContext& ctx, OneSided one_sided) {
  if (!cfg.raw.contains("tol")) return default_tolerance(data);
  const json& j = cfg.raw.at("tol");
  if (j.contains("abs")) return j["abs"].get<double>();
  if (j.value("calibrate", false)) {
    if (!cands)
      throw ConfigError("config: tol calibration needs a candidate dictionary");
    NDOperator background =
        compute_nd(assemble_and_factor(*ctx.mesh, *ctx.a0, ctx.gamma));
    return calibrate_tolerance(method, background, *cands, ctx, one_sided,
                               cfg.jobs);
  }
  return default_tolerance(data, j.value("rel", 1e-9));
}

int run_mesh(RunConfig& cfg) {
  Mesh mesh = mesh_from_config(cfg);
  Manifest man{cfg.output_dir};
  io::write_mesh_json(cfg.output_dir / "mesh.json", mesh);
  man.add(cfg.output_dir / "mesh.json");
  json stats;
  stats["n_nodes"] = mesh.n_nodes();
  stats["n_triangles"] = mesh.n_triangles();
  stats["n_boundary_edges"] = mesh.n_boundary_edges();
  stats["total_area"] = io::rounded(mesh.total_area());
  stats["boundary_length"] = io::rounded(mesh.boundary_length());
  io::write_text(cfg.output_dir / "mesh_stats.json", stats.dump(2) + "\n");
  man.add(cfg.output_dir / "mesh_stats.json");
  man.write(cfg, "mesh");
  return 0;
}

int run_phantom(RunConfig& cfg) {
  PipelineData p = load_pipeline(cfg);
  Manifest man{cfg.output_dir};
  io::write_mesh_json(cfg.output_dir / "mesh.json", p.mesh);
  man.add(cfg.output_dir / "mesh.json");
  io::write_mask_csv(cfg.output_dir / "d_mask.csv", p.phantom.d);
  man.add(cfg.output_dir / "d_mask.csv");
  io::write_mask_csv(cfg.output_dir / "m_mask.csv", p.phantom.m);
  man.add(cfg.output_dir / "m_mask.csv");
  io::write_mask_pgm(cfg.output_dir / "d_mask.pgm", p.mesh, p.phantom.d);
  man.add(cfg.output_dir / "d_mask.pgm");
  io::write_coeff_csv(cfg.output_dir / "a0.csv", p.phantom.a0);
  man.add(cfg.output_dir / "a0.csv");
  io::write_coeff_csv(cfg.output_dir / "ad.csv", p.phantom.ad);
  man.add(cfg.output_dir / "ad.csv");

  AssumptionReport rep = check_assumptions(p.phantom, p.mesh, p.gamma,
                                           cfg.raw.value("collar_k", 2));
  json j;
  j["bounds"] = {{"alpha", io::rounded(rep.bounds.alpha)},
                 {"beta", io::rounded(rep.bounds.beta)},
                 {"eta", io::rounded(rep.bounds.eta)}};
  j["case_a"] = rep.case_a;
  j["case_b"] = rep.case_b;
  j["tau_plus_required"] = io::rounded(rep.tau_plus_required);
  j["tau_minus_required"] = io::rounded(rep.tau_minus_required);
  j["margin_a"] = io::rounded(rep.margin_a);
  j["margin_b"] = io::rounded(rep.margin_b);
  j["definiteness_ok"] = rep.definiteness_ok;
  j["s_covers_outer_boundary"] = rep.s_covers_outer_boundary;
  j["s_reaches_gamma"] = rep.s_reaches_gamma;
  j["ucp"] = rep.ucp;
  j["notes"] = rep.notes;
  io::write_text(cfg.output_dir / "assumptions.json", j.dump(2) + "\n");
  man.add(cfg.output_dir / "assumptions.json");
  man.write(cfg, "phantom");
  return 0;
}

int run_forward(RunConfig& cfg) {
  PipelineData p = load_pipeline(cfg);
  BoundaryCurrent f = current_from_config(cfg, p.mesh, p.gamma);
  FactorizedSystem sys = assemble_and_factor(p.mesh, p.phantom.ad, p.gamma);
  FieldSolution u = sys.solve(f);
  Manifest man{cfg.output_dir};
  io::write_solution_csv(cfg.output_dir / "solution.csv", u);
  man.add(cfg.output_dir / "solution.csv");
  io::write_current_csv(cfg.output_dir / "current.csv", f);
  man.add(cfg.output_dir / "current.csv");
  man.write(cfg, "forward");
  return 0;
}

int run_ndmap(RunConfig& cfg) {
  PipelineData p = load_pipeline(cfg);
  NDOperator data = measured_data(cfg, p);
  Manifest man{cfg.output_dir};
  io::write_nd_operator(cfg.output_dir / "nd.csv", cfg.output_dir / "gram.csv",
                        data);
  man.add(cfg.output_dir / "nd.csv");
  man.add(cfg.output_dir / "gram.csv");
  Eigen::VectorXd ev = generalized_eigenvalues(hermitian_split(data).first);
  std::string spec_csv = "k,eigenvalue\n";
  for (int k = 0; k < ev.size(); ++k)
    spec_csv += std::to_string(k + 1) + "," +
                io::format_double(ev[ev.size() - 1 - k]) + "\n";
  io::write_text(cfg.output_dir / "spectrum.csv", spec_csv);
  man.add(cfg.output_dir / "spectrum.csv");
  man.write(cfg, "ndmap");
  return 0;
}

int run_test(RunConfig& cfg) {
  PipelineData p = load_pipeline(cfg);
  Method method = method_from_config(cfg);
  OneSided one_sided = one_sided_from_config(cfg);
  validate_method_constraints(cfg, method, p.phantom);
  RegionMask c = mask_from_config(cfg, need(cfg.raw, "candidate", "test"), p.mesh);
  NDOperator data = measured_data(cfg, p);
  TestContext ctx = make_test_context(p.mesh, p.phantom.a0, p.gamma, p.bounds);
  double tol = tolerance_from_config(cfg, method, data, nullptr, ctx, one_sided);
  TestReport rep = run_inclusion_test(method, data, c, ctx, tol, one_sided);
  Manifest man{cfg.output_dir};
  json j = report_to_json(rep);
  j["method"] = method_name(method);
  io::write_text(cfg.output_dir / "test_report.json", j.dump(2) + "\n");
  man.add(cfg.output_dir / "test_report.json");
  man.write(cfg, "test");
  return 0;
}

int run_reconstruct(RunConfig& cfg) {
  PipelineData p = load_pipeline(cfg);
  Method method = method_from_config(cfg);
  OneSided one_sided = one_sided_from_config(cfg);
  validate_method_constraints(cfg, method, p.phantom);
  NDOperator data = measured_data(cfg, p);
  TestContext ctx = make_test_context(p.mesh, p.phantom.a0, p.gamma, p.bounds);
  CandidateSet cands = candidates_from_config(cfg, p.mesh, ctx.m);
  double tol = tolerance_from_config(cfg, method, data, &cands, ctx, one_sided);
  ReconResult res = reconstruct(method, data, cands, ctx, tol, one_sided, cfg.jobs);

  Manifest man{cfg.output_dir};
  json j;
  j["method"] = method_name(method);
  j["one_sided"] = cfg.raw.value("one_sided", "both");
  j["tol"] = io::rounded(res.tol);
  j["empty_pass_warning"] = res.empty_pass_warning;
  j["passing_ids"] = res.passing_ids;
  json dropped = json::array();
  for (const auto& [id, why] : cands.dropped)
    dropped.push_back({{"id", id}, {"reason", why}});
  j["dropped"] = dropped;
  json reports = json::array();
  for (const auto& rep : res.reports) reports.push_back(report_to_json(rep));
  j["reports"] = reports;
  io::write_text(cfg.output_dir / "recon.json", j.dump(2) + "\n");
  man.add(cfg.output_dir / "recon.json");
  io::write_mask_csv(cfg.output_dir / "recon_mask.csv", res.mask);
  man.add(cfg.output_dir / "recon_mask.csv");
  io::write_mask_pgm(cfg.output_dir / "recon_mask.pgm", p.mesh, res.mask);
  man.add(cfg.output_dir / "recon_mask.pgm");

  // Plot data: candidate offset vs worst min-eigenvalue.
  std::string plot = "id,dir_index,offset_index,angle,offset,min_eig,pass\n";
  for (size_t i = 0; i < cands.kept.size(); ++i) {
    const Candidate& c = cands.kept[i];
    const TestReport& rep = res.reports[i];
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& iq : rep.inequalities) worst = std::min(worst, iq.min_eig);
    plot += std::to_string(c.id) + "," + std::to_string(c.dir_index) + "," +
            std::to_string(c.offset_index) + "," + io::format_double(c.angle) +
            "," + io::format_double(c.offset) + "," + io::format_double(worst) +
            "," + (rep.pass ? "1" : "0") + "\n";
  }
  io::write_text(cfg.output_dir / "candidates.csv", plot);
  man.add(cfg.output_dir / "candidates.csv");
  man.write(cfg, "reconstruct");
  return 0;
}

// Predicate masks for the localized-potential functionals use the
// conservative discretization (target region sampled from inside, leak
// region from outside) unless the config turns it off.
RegionMask locpot_mask(const RunConfig& cfg, const json& locpot_cfg,
                       const json& mj, const Mesh& mesh) {
  const std::string kind = need(mj, "kind", "locpot mask").get<std::string>();
  if (!locpot_cfg.value("conservative", true) || kind == "csv" ||
      kind == "all" || kind == "none")
    return mask_from_config(cfg, mj, mesh);
  RunConfig probe = cfg;  // reuse the predicate parsing, then resample
  RegionMask centroid_mask = mask_from_config(probe, mj, mesh);
  MaskPredicate p;
  if (kind == "ball")
    p = MaskPredicate::ball({mj.at("center")[0].get<double>(),
                             mj.at("center")[1].get<double>()},
                            mj.at("radius").get<double>());
  else if (kind == "halfplane")
    p = MaskPredicate::halfplane({mj.at("direction")[0].get<double>(),
                                  mj.at("direction")[1].get<double>()},
                                 mj.at("offset").get<double>());
  else if (kind == "box")
    p = MaskPredicate::box(mj.at("xmin").get<double>(), mj.at("xmax").get<double>(),
                           mj.at("ymin").get<double>(), mj.at("ymax").get<double>());
  else if (kind == "annulus")
    p = MaskPredicate::annulus({mj.at("center")[0].get<double>(),
                                mj.at("center")[1].get<double>()},
                               mj.at("inner").get<double>(),
                               mj.at("outer").get<double>());
  else
    return centroid_mask;
  return mask_fully_inside(mesh, p);
}

int run_locpot(RunConfig& cfg) {
  PipelineData p = load_pipeline(cfg);
  const json& j = need(cfg.raw, "locpot", "top level");
  RegionMask u_set = locpot_mask(cfg, j, need(j, "u", "locpot"), p.mesh);
  RegionMask b_set = locpot_mask(cfg, j, need(j, "b", "locpot"), p.mesh);
  LocpotResult res = localized_current(
      p.mesh, p.phantom.a0, p.gamma, u_set, b_set, j.value("reg", 1e-8),
      j.value("ucp", std::string("d=2 real A^R")));
  Manifest man{cfg.output_dir};
  json out;
  out["energy_in_b"] = io::rounded(res.energy_in_b);
  out["energy_outside_u"] = io::rounded(res.energy_outside_u);
  out["ratio"] = io::rounded(res.ratio);
  out["rayleigh"] = io::rounded(res.rayleigh);
  out["reg"] = io::rounded(j.value("reg", 1e-8));
  out["ucp_condition"] = res.ucp_condition;
  io::write_text(cfg.output_dir / "locpot.json", out.dump(2) + "\n");
  man.add(cfg.output_dir / "locpot.json");
  io::write_current_csv(cfg.output_dir / "locpot_current.csv", res.current);
  man.add(cfg.output_dir / "locpot_current.csv");
  man.write(cfg, "locpot");
  return 0;
}

int run_verify(RunConfig& cfg) {
  PipelineData p = load_pipeline(cfg);
  const json vj = cfg.raw.value("verify", json::object());
  const int n_pairs = vj.value("n_pairs", 20);
  const int n_currents = vj.value("n_currents", 3);
  const double alpha = vj.value("alpha", 0.5);
  const double beta = vj.value("beta", 2.0);
  const double eta = vj.value("eta", 0.5);
  const int n_quad = vj.value("n_quad", 8);

  json out;
  out["seed"] = cfg.seed;
  json general = json::array();
  json improved = json::array();
  json remainder = json::array();
  bool all_ok = true;
  for (int s = 0; s < n_pairs; ++s) {
    std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(s));
    MatrixField a1 = random_admissible_field(p.mesh, rng, alpha, beta, eta);
    MatrixField a2 = random_admissible_field(p.mesh, rng, alpha, beta, eta);
    for (int c = 0; c < n_currents; ++c) {
      BoundaryCurrent f = random_current(p.mesh, p.gamma, rng);
      MonoBoundsReport g = general_mono_bounds(a1, a2, f, p.mesh, p.gamma);
      MonoBoundsReport m = improved_mono_bounds(a1, a2, f, p.mesh, p.gamma);
      all_ok = all_ok && g.ok && m.ok;
      general.push_back({{"pair", s},
                         {"current", c},
                         {"lhs", io::rounded(g.lhs)},
                         {"lower", io::rounded(g.lower)},
                         {"upper", io::rounded(g.upper)},
                         {"lower_main", io::rounded(g.lower_main)},
                         {"lower_skew", io::rounded(g.lower_skew)},
                         {"upper_main", io::rounded(g.upper_main)},
                         {"upper_skew", io::rounded(g.upper_skew)},
                         {"upper_mixed", io::rounded(g.upper_mixed)},
                         {"margin_lower", io::rounded(g.margin_lower)},
                         {"margin_upper", io::rounded(g.margin_upper)},
                         {"ok", g.ok}});
      improved.push_back({{"pair", s},
                          {"current", c},
                          {"lhs", io::rounded(m.lhs)},
                          {"lower", io::rounded(m.lower)},
                          {"upper", io::rounded(m.upper)},
                          {"lower_main", io::rounded(m.lower_main)},
                          {"cross_lower", io::rounded(m.cross_lower)},
                          {"upper_main", io::rounded(m.upper_main)},
                          {"cross_upper", io::rounded(m.cross_upper)},
                          {"margin_lower", io::rounded(m.margin_lower)},
                          {"margin_upper", io::rounded(m.margin_upper)},
                          {"mixed_identity_residual",
                           io::rounded(m.mixed_identity_residual)},
                          {"ok", m.ok}});
    }
    BoundaryCurrent f = random_current(p.mesh, p.gamma, rng);
    RemainderReport r = remainder_chain_check(a1, a2, (s % 2) + 1, f, p.mesh,
                                              p.gamma, n_quad);
    all_ok = all_ok && r.ok;
    json wt_norms = json::array(), wt_slack = json::array(), t_nodes = json::array();
    for (double v : r.wt_norms) wt_norms.push_back(io::rounded(v));
    for (double v : r.wt_bound_slack) wt_slack.push_back(io::rounded(v));
    for (double v : r.t_nodes) t_nodes.push_back(io::rounded(v));
    remainder.push_back({{"pair", s},
                         {"cross_term", io::rounded(r.cross_term)},
                         {"im_u2_term", io::rounded(r.im_u2_term)},
                         {"n_quad", r.n_quad},
                         {"taylor_rel_err", io::rounded(r.taylor_rel_err)},
                         {"t_nodes", t_nodes},
                         {"wt_norms", wt_norms},
                         {"wt_bound_slack", wt_slack},
                         {"c1", io::rounded(r.c1)},
                         {"c2", io::rounded(r.c2)},
                         {"final_bound", io::rounded(r.final_bound)},
                         {"final_bound_full", io::rounded(r.final_bound_full)},
                         {"slack", io::rounded(r.slack)},
                         {"ok", r.ok}});
  }

  // Loewner product bound on random self-adjoint pairs with guaranteed
  // hypotheses (disjoint spectra on both sides).
  json loewner = json::array();
  for (int s = 0; s < std::max(1, n_pairs / 4); ++s) {
    std::mt19937_64 rng(cfg.seed + 7777 + static_cast<std::uint64_t>(s));
    MatrixField low = random_admissible_field(p.mesh, rng, 0.5, 1.0, 0.0);
    MatrixField high = random_admissible_field(p.mesh, rng, 1.5, 2.5, 0.0);
    RegionMask v = RegionMask::all(p.mesh);
    LoewnerReport up = loewner_product_check(low, high, p.mesh, v, 0.5,
                                             LoewnerCase::PositiveJump);
    LoewnerReport down = loewner_product_check(high, low, p.mesh, v, 0.5,
                                               LoewnerCase::NegativeJump);
    all_ok = all_ok && up.hypothesis_ok && up.conclusion_ok &&
             down.hypothesis_ok && down.conclusion_ok;
    loewner.push_back({{"pair", s},
                       {"positive_jump_ok", up.conclusion_ok},
                       {"negative_jump_ok", down.conclusion_ok},
                       {"alpha", io::rounded(down.alpha)},
                       {"beta", io::rounded(down.beta)},
                       {"worst_margin_positive", io::rounded(up.worst_margin)},
                       {"worst_margin_negative", io::rounded(down.worst_margin)},
                       {"isotropic", down.isotropic}});
  }

  out["general_bounds"] = general;
  out["improved_bounds"] = improved;
  out["remainder_chain"] = remainder;
  out["loewner_product"] = loewner;
  out["all_ok"] = all_ok;

  Manifest man{cfg.output_dir};
  io::write_text(cfg.output_dir / "verify.json", out.dump(2) + "\n");
  man.add(cfg.output_dir / "verify.json");
  man.write(cfg, "verify");
  return all_ok ? 0 : 3;
}

}  // namespace

RunConfig load_config(const std::filesystem::path& path) {
  RunConfig cfg;
  try {
    cfg.raw = io::json::parse(io::read_text(path));
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: cannot parse: ") + e.what());
  }
  cfg.config_dir = path.has_parent_path() ? path.parent_path()
                                          : std::filesystem::path(".");
  if (cfg.raw.contains("output_dir"))
    cfg.output_dir = resolve(cfg, cfg.raw["output_dir"].get<std::string>());
  cfg.seed = cfg.raw.value("seed", 1ull);
  cfg.jobs = cfg.raw.value("jobs", 1);
  return cfg;
}

int run_subcommand(const std::string& name, RunConfig& cfg) {
  if (name == "mesh") return run_mesh(cfg);
  if (name == "phantom") return run_phantom(cfg);
  if (name == "forward") return run_forward(cfg);
  if (name == "ndmap") return run_ndmap(cfg);
  if (name == "test") return run_test(cfg);
  if (name == "reconstruct") return run_reconstruct(cfg);
  if (name == "locpot") return run_locpot(cfg);
  if (name == "verify") return run_verify(cfg);
  throw ConfigError("unknown subcommand '" + name + "'");
}

}  // namespace monofem
