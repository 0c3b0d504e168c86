#include "monofem/mono.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace monofem {

PsdResult is_psd(const NDOperator& h, double tol) {
  if (tol < 0.0) throw std::invalid_argument("is_psd: tol must be >= 0");
  // Near-zero differences of operators are legitimately noisy; measure the
  // Hermitian defect against the boundary Gram scale as well.
  const double scale = std::max(h.matrix.cwiseAbs().maxCoeff(),
                                h.gram.cwiseAbs().maxCoeff());
  const double herm_defect = (h.matrix - h.matrix.adjoint()).cwiseAbs().maxCoeff();
  if (herm_defect > 1e-8 * std::max(scale, 1e-300))
    throw std::invalid_argument("is_psd: operator is not Hermitian");
  Eigen::VectorXd ev = generalized_eigenvalues(h);
  PsdResult r;
  r.min_eig = ev[0];
  r.pass = r.min_eig >= -tol;
  return r;
}

std::string method_name(Method m) {
  switch (m) {
    case Method::Nonlinear: return "nonlinear";
    case Method::Linearized: return "linearized";
    case Method::Corollary: return "corollary";
    case Method::Extreme: return "extreme";
  }
  return "?";
}

const LinearizedBase& TestContext::linearized_base() {
  if (!linearized)
    linearized = std::make_shared<LinearizedBase>(
        make_linearized_base(*mesh, *a0, gamma));
  return *linearized;
}

TestContext make_test_context(const Mesh& mesh, const MatrixField& a0,
                              const GammaSpec& gamma,
                              const CoefficientBounds& bounds) {
  if (!bounds.valid())
    throw std::invalid_argument("make_test_context: invalid bounds");
  TestContext ctx;
  ctx.mesh = &mesh;
  ctx.a0 = &a0;
  ctx.gamma = gamma;
  ctx.m = skew_support(a0);
  ctx.bounds = bounds;
  return ctx;
}

namespace {

void require_admissible(const Mesh& mesh, const RegionMask& C,
                        const RegionMask& m, Method method) {
  auto rep = admissible_test_inclusion(mesh, C, m);
  if (!rep.admissible) {
    std::string why;
    for (const auto& r : rep.reasons) why += (why.empty() ? "" : "; ") + r;
    throw std::invalid_argument("run_inclusion_test(" + method_name(method) +
                                "): inadmissible C: " + why);
  }
  if (method == Method::Extreme && !mask_edge_boundary_regular(mesh, C))
    throw std::invalid_argument(
        "run_inclusion_test(extreme): C boundary is not regular (pinch vertex)");
}

void require_self_adjoint_background(const TestContext& ctx, Method method) {
  if (!ctx.a0->is_self_adjoint(1e-12))
    throw std::invalid_argument("run_inclusion_test(" + method_name(method) +
                                "): background must be self-adjoint");
}

bool want_upper(OneSided s) { return s != OneSided::LowerOnly; }
bool want_lower(OneSided s) { return s != OneSided::UpperOnly; }

void push_ineq(TestReport& rep, const std::string& name, const NDOperator& op,
               double tol) {
  auto res = is_psd(op, tol);
  rep.inequalities.push_back({name, res.min_eig, res.pass});
}

}  // namespace

TestReport run_inclusion_test(Method method, const NDOperator& data,
                              const RegionMask& C, TestContext& ctx,
                              double tol, OneSided one_sided) {
  const Mesh& mesh = *ctx.mesh;
  require_admissible(mesh, C, method == Method::Nonlinear || method == Method::Linearized
                                  ? ctx.m
                                  : RegionMask::none(mesh),
                     method);

  TestReport rep;
  rep.tol = tol;
  NDOperator data_r = hermitian_split(data).first;

  switch (method) {
    case Method::Nonlinear: {
      auto ops = nonlinear_test_operators(mesh, *ctx.a0, C, ctx.bounds, ctx.gamma);
      if (want_lower(one_sided))
        push_ineq(rep, "lambda_minus >= lambda_R(data)",
                  ops.lambda_minus - data_r, tol);
      if (want_upper(one_sided))
        push_ineq(rep, "lambda_R(data) >= lambda_plus + d_plus(M\\C)",
                  data_r - ops.lambda_plus - ops.d_m_minus_c, tol);
      break;
    }
    case Method::Linearized: {
      const LinearizedBase& base = ctx.linearized_base();
      auto ops = linearized_test_operators(base, mesh, *ctx.a0, C, ctx.bounds);
      NDOperator shift = data_r - base.lambda0;
      if (want_lower(one_sided))
        push_ineq(rep, "d_minus >= lambda_R(data) - lambda(A0^R)",
                  ops.d_minus - shift, tol);
      if (want_upper(one_sided))
        push_ineq(rep, "lambda_R(data) - lambda(A0^R) >= d_plus + d(M\\C)",
                  shift - ops.d_plus - ops.d_m_minus_c, tol);
      break;
    }
    case Method::Corollary: {
      require_self_adjoint_background(ctx, method);
      auto nops = nonlinear_test_operators(mesh, *ctx.a0, C, ctx.bounds, ctx.gamma);
      const LinearizedBase& base = ctx.linearized_base();
      auto lops = linearized_test_operators(base, mesh, *ctx.a0, C, ctx.bounds);
      NDOperator shift = data_r - base.lambda0;
      if (want_lower(one_sided)) {
        push_ineq(rep, "lambda_minus >= lambda_R(data)",
                  nops.lambda_minus - data_r, tol);
        push_ineq(rep, "d_minus >= lambda_R(data) - lambda(A0)",
                  lops.d_minus - shift, tol);
      }
      if (want_upper(one_sided)) {
        push_ineq(rep, "lambda_R(data) >= lambda_plus", data_r - nops.lambda_plus,
                  tol);
        push_ineq(rep, "lambda_R(data) - lambda(A0) >= d_plus",
                  shift - lops.d_plus, tol);
      }
      break;
    }
    case Method::Extreme: {
      require_self_adjoint_background(ctx, method);
      auto ops = extreme_operators(mesh, *ctx.a0, C, ctx.gamma);
      if (want_lower(one_sided))
        push_ineq(rep, "lambda_C^0 >= lambda_R(data)", ops.insulating - data_r,
                  tol);
      if (want_upper(one_sided))
        push_ineq(rep, "lambda_R(data) >= lambda_0^C", data_r - ops.conducting,
                  tol);
      break;
    }
  }
  rep.pass = !rep.inequalities.empty() &&
             std::all_of(rep.inequalities.begin(), rep.inequalities.end(),
                         [](const InequalityResult& r) { return r.pass; });
  return rep;
}

namespace {

std::vector<double> distances_to_boundary(const Mesh& mesh) {
  std::vector<double> dist(mesh.n_triangles(),
                           std::numeric_limits<double>::infinity());
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const Eigen::Vector2d& p = mesh.tri_centroid[t];
    for (int e = 0; e < mesh.n_boundary_edges(); ++e) {
      const auto& be = mesh.boundary_edges[e];
      const Eigen::Vector2d& a = mesh.nodes[be[0]];
      Eigen::Vector2d d = mesh.nodes[be[1]] - a;
      double s = std::clamp((p - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
      dist[t] = std::min(dist[t], (p - a - s * d).norm());
    }
  }
  return dist;
}

}  // namespace

CandidateSet generate_candidates(const Mesh& mesh, const RegionMask& m,
                                 const CapsDictionary& dict) {
  if (dict.n_dirs < 1 || dict.n_offsets < 1)
    throw std::invalid_argument("generate_candidates: need n_dirs, n_offsets >= 1");
  auto dist = distances_to_boundary(mesh);
  std::vector<int> interior;
  for (int t = 0; t < mesh.n_triangles(); ++t)
    if (dist[t] > dict.margin) interior.push_back(t);

  CandidateSet set;
  int id = 0;
  for (int di = 0; di < dict.n_dirs; ++di) {
    const double angle = 2.0 * std::numbers::pi * di / dict.n_dirs;
    const Eigen::Vector2d theta(std::cos(angle), std::sin(angle));
    std::vector<double> proj(interior.size());
    for (size_t k = 0; k < interior.size(); ++k)
      proj[k] = theta.dot(mesh.tri_centroid[interior[k]]);
    std::vector<double> sorted = proj;
    std::sort(sorted.begin(), sorted.end());
    for (int oi = 0; oi < dict.n_offsets; ++oi, ++id) {
      const double q = static_cast<double>(oi + 1) / dict.n_offsets;
      const size_t idx = std::min(
          sorted.size() - 1,
          static_cast<size_t>(std::ceil(q * sorted.size())) - 1);
      const double t = sorted[idx];
      Candidate c;
      c.id = id;
      c.dir_index = di;
      c.offset_index = oi;
      c.angle = angle;
      c.offset = t;
      c.mask = RegionMask::none(mesh);
      for (size_t k = 0; k < interior.size(); ++k)
        if (proj[k] <= t) c.mask.flags[interior[k]] = true;
      auto rep = admissible_test_inclusion(mesh, c.mask, m);
      if (rep.admissible) {
        set.kept.push_back(std::move(c));
      } else {
        std::string why;
        for (const auto& r : rep.reasons) why += (why.empty() ? "" : "; ") + r;
        set.dropped.push_back({id, why});
      }
    }
  }
  if (set.kept.empty())
    throw std::invalid_argument(
        "generate_candidates: empty dictionary after admissibility filtering");
  return set;
}

CandidateSet candidates_from_masks(const Mesh& mesh, const RegionMask& m,
                                   const std::vector<RegionMask>& masks) {
  CandidateSet set;
  for (size_t i = 0; i < masks.size(); ++i) {
    Candidate c;
    c.id = static_cast<int>(i);
    c.mask = masks[i];
    auto rep = admissible_test_inclusion(mesh, c.mask, m);
    if (rep.admissible) {
      set.kept.push_back(std::move(c));
    } else {
      std::string why;
      for (const auto& r : rep.reasons) why += (why.empty() ? "" : "; ") + r;
      set.dropped.push_back({c.id, why});
    }
  }
  if (set.kept.empty())
    throw std::invalid_argument(
        "candidates_from_masks: empty dictionary after admissibility filtering");
  return set;
}

namespace {

void run_parallel(int n_items, int jobs, const std::function<void(int)>& work) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || n_items <= 1) {
    for (int i = 0; i < n_items; ++i) work(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int w = 0; w < std::min(jobs, n_items); ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= n_items) return;
        try {
          work(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// Incremental evaluation of the linearized tests over nested caps of one
// direction: the bracket integrals over C grow by slab contributions, so a
// single pass over the sorted elements prices every offset.
void linearized_caps_sweep(const NDOperator& data, TestContext& ctx,
                           const std::vector<const Candidate*>& chain,
                           double tol, OneSided one_sided,
                           std::vector<TestReport>& out) {
  const Mesh& mesh = *ctx.mesh;
  const LinearizedBase& base = *ctx.linearized;
  const int dim = base.basis.dim();
  const CoefficientBounds& bounds = ctx.bounds;

  NDOperator data_r = hermitian_split(data).first;
  NDOperator shift = data_r - base.lambda0;

  const double plus_level = bounds.beta + bounds.eta * bounds.eta / bounds.alpha;
  const double minus_level = bounds.beta * bounds.beta / bounds.alpha;
  std::vector<Matrix2c> wplus(mesh.n_triangles()), wminus(mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    wplus[t] = plus_level * Matrix2c::Identity() - ctx.a0->self_adjoint(t);
    wminus[t] = ctx.a0->self_adjoint(t) - minus_level * Matrix2c::Identity();
  }
  MatrixField wplus_f(std::move(wplus)), wminus_f(std::move(wminus));
  MatrixField skew_w = skew_square_weight(*ctx.a0);
  NDOperator d_m_full = assemble_form_operator(mesh, base.basis, base.nodal,
                                               skew_w, ctx.m, -1.0);

  // The chain is ordered by offset; caps are nested along it.
  const Eigen::Vector2d theta(std::cos(chain.front()->angle),
                              std::sin(chain.front()->angle));
  std::vector<int> elems;
  for (int t = 0; t < mesh.n_triangles(); ++t)
    if (chain.back()->mask[t]) elems.push_back(t);
  std::sort(elems.begin(), elems.end(), [&](int a, int b) {
    double pa = theta.dot(mesh.tri_centroid[a]);
    double pb = theta.dot(mesh.tri_centroid[b]);
    return pa != pb ? pa < pb : a < b;
  });

  // Skew contribution restricted to M inside the cap.
  std::vector<int> m_elems;
  std::vector<int> m_break(chain.size(), 0);
  {
    size_t ci = 0;
    for (size_t k = 0; k < elems.size(); ++k) {
      while (ci < chain.size() && !chain[ci]->mask[elems[k]]) {
        m_break[ci] = static_cast<int>(m_elems.size());
        ++ci;
      }
      if (ctx.m[elems[k]]) m_elems.push_back(elems[k]);
    }
    for (; ci < chain.size(); ++ci) m_break[ci] = static_cast<int>(m_elems.size());
  }

  Eigen::MatrixXcd qp = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::MatrixXcd qm = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::MatrixXcd qs = Eigen::MatrixXcd::Zero(dim, dim);

  int done = 0, m_done = 0;
  for (size_t ci = 0; ci < chain.size(); ++ci) {
    const Candidate& cand = *chain[ci];
    int hi = done;
    while (hi < static_cast<int>(elems.size()) && cand.mask[elems[hi]]) ++hi;
    accumulate_region_quadform(mesh, base.nodal, wplus_f, elems, done, hi, -1.0, qp);
    accumulate_region_quadform(mesh, base.nodal, wminus_f, elems, done, hi, -1.0, qm);
    accumulate_region_quadform(mesh, base.nodal, skew_w, m_elems, m_done,
                               m_break[ci], +1.0, qs);
    done = hi;
    m_done = m_break[ci];

    NDOperator d_plus{qp, base.basis.gram};
    NDOperator d_minus{qm, base.basis.gram};
    mirror_hermitian(d_plus.matrix);
    mirror_hermitian(d_minus.matrix);
    Eigen::MatrixXcd qs_m = qs;
    mirror_hermitian(qs_m);
    NDOperator d_msc{d_m_full.matrix + qs_m, base.basis.gram};

    TestReport rep;
    rep.candidate_id = cand.id;
    rep.tol = tol;
    if (one_sided != OneSided::UpperOnly)
      push_ineq(rep, "d_minus >= lambda_R(data) - lambda(A0^R)",
                d_minus - shift, tol);
    if (one_sided != OneSided::LowerOnly)
      push_ineq(rep, "lambda_R(data) - lambda(A0^R) >= d_plus + d(M\\C)",
                shift - d_plus - d_msc, tol);
    rep.pass = !rep.inequalities.empty() &&
               std::all_of(rep.inequalities.begin(), rep.inequalities.end(),
                           [](const InequalityResult& r) { return r.pass; });
    out[cand.id] = std::move(rep);
  }
}

}  // namespace

ReconResult reconstruct(Method method, const NDOperator& data,
                        const CandidateSet& candidates, TestContext& ctx,
                        double tol, OneSided one_sided, int jobs) {
  if (candidates.kept.empty())
    throw std::invalid_argument("reconstruct: no candidates");
  const Mesh& mesh = *ctx.mesh;

  if (method == Method::Linearized || method == Method::Corollary)
    ctx.linearized_base();  // build the shared solves before going parallel

  int max_id = 0;
  for (const auto& c : candidates.kept) max_id = std::max(max_id, c.id);
  std::vector<TestReport> by_id(max_id + 1);

  bool caps_chain = method == Method::Linearized;
  for (const auto& c : candidates.kept) caps_chain = caps_chain && c.dir_index >= 0;

  if (caps_chain) {
    // Group nested caps per direction and sweep each chain once.
    std::map<int, std::vector<const Candidate*>> chains;
    for (const auto& c : candidates.kept) chains[c.dir_index].push_back(&c);
    std::vector<std::vector<const Candidate*>> chain_list;
    for (auto& [di, chain] : chains) {
      std::sort(chain.begin(), chain.end(),
                [](const Candidate* a, const Candidate* b) {
                  return a->offset_index < b->offset_index;
                });
      chain_list.push_back(chain);
    }
    run_parallel(static_cast<int>(chain_list.size()), jobs, [&](int i) {
      linearized_caps_sweep(data, ctx, chain_list[i], tol, one_sided, by_id);
    });
  } else {
    run_parallel(static_cast<int>(candidates.kept.size()), jobs, [&](int i) {
      const Candidate& c = candidates.kept[i];
      TestReport rep = run_inclusion_test(method, data, c.mask, ctx, tol, one_sided);
      rep.candidate_id = c.id;
      by_id[c.id] = std::move(rep);
    });
  }

  ReconResult res;
  res.method = method;
  res.one_sided = one_sided;
  res.tol = tol;
  res.mask = RegionMask::all(mesh);
  for (const auto& c : candidates.kept) {
    const TestReport& rep = by_id[c.id];
    res.reports.push_back(rep);
    if (rep.pass) {
      res.passing_ids.push_back(c.id);
      res.mask = res.mask & c.mask;
    }
  }
  if (res.passing_ids.empty()) {
    res.mask = RegionMask::all(mesh);
    res.empty_pass_warning = true;
  }
  return res;
}

double default_tolerance(const NDOperator& data, double rel) {
  return rel * operator_scale(data);
}

double calibrate_tolerance(Method method, const NDOperator& background_data,
                           const CandidateSet& candidates, TestContext& ctx,
                           OneSided one_sided, int jobs) {
  ReconResult res = reconstruct(method, background_data, candidates, ctx,
                                /*tol=*/0.0, one_sided, jobs);
  double worst = 0.0;
  for (const auto& rep : res.reports)
    for (const auto& iq : rep.inequalities) worst = std::min(worst, iq.min_eig);
  return std::max(1e-12 * operator_scale(background_data), 10.0 * -worst);
}

}  // namespace monofem
