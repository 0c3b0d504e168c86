#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "monofem/ndmap.hpp"

namespace monofem {

struct PsdResult {
  bool pass = false;
  double min_eig = 0.0;
};

// Minimum generalized eigenvalue of (Hermitian(H), Gram); passes when it is
// >= -tol. Throws std::invalid_argument when H deviates from Hermitian by
// more than 1e-8 relative.
PsdResult is_psd(const NDOperator& h, double tol);

enum class Method { Nonlinear, Linearized, Corollary, Extreme };
enum class OneSided { Both, UpperOnly, LowerOnly };

std::string method_name(Method m);

struct InequalityResult {
  std::string name;
  double min_eig = 0.0;
  bool pass = false;
};

struct TestReport {
  int candidate_id = -1;
  double tol = 0.0;
  std::vector<InequalityResult> inequalities;
  bool pass = false;
};

// Shared data for candidate tests of one measurement setting.
struct TestContext {
  const Mesh* mesh = nullptr;
  const MatrixField* a0 = nullptr;
  GammaSpec gamma;
  CoefficientBounds bounds;
  RegionMask m;  // supp(A0^I)
  std::shared_ptr<const LinearizedBase> linearized;  // built on demand

  const LinearizedBase& linearized_base();
};

// The bounds must cover both the background and the unknown coefficient
// (the assumption's "known bounds"); joint_bounds provides them for
// synthetic phantoms.
TestContext make_test_context(const Mesh& mesh, const MatrixField& a0,
                              const GammaSpec& gamma,
                              const CoefficientBounds& bounds);

// Evaluates the operator inequalities of the chosen method for one
// candidate C against the measured data Lambda(A_D). The corollary method
// requires a self-adjoint background and checks both the nonlinear and the
// linearized pair. Throws std::invalid_argument for inadmissible C or a
// method/background mismatch.
TestReport run_inclusion_test(Method method, const NDOperator& data,
                              const RegionMask& C, TestContext& ctx,
                              double tol, OneSided one_sided = OneSided::Both);

struct Candidate {
  int id = 0;
  RegionMask mask;
  int dir_index = -1;     // halfspace caps: direction/offset bookkeeping
  int offset_index = -1;
  double angle = 0.0;
  double offset = 0.0;
};

struct CandidateSet {
  std::vector<Candidate> kept;
  std::vector<std::pair<int, std::string>> dropped;  // id, reason
};

struct CapsDictionary {
  int n_dirs = 8;
  int n_offsets = 8;
  double margin = 0.05;  // distance to the boundary kept clear
};

// Half-space caps C(theta, t) = { elements farther than margin from the
// boundary with centroid . theta <= t }, t running over per-direction
// quantiles of the projections. Candidates failing the admissibility test
// against M are dropped with reasons; throws std::invalid_argument when
// nothing survives.
CandidateSet generate_candidates(const Mesh& mesh, const RegionMask& m,
                                 const CapsDictionary& dict);
CandidateSet candidates_from_masks(const Mesh& mesh, const RegionMask& m,
                                   const std::vector<RegionMask>& masks);

struct ReconResult {
  Method method = Method::Corollary;
  OneSided one_sided = OneSided::Both;
  double tol = 0.0;
  std::vector<TestReport> reports;  // aligned with candidate order
  std::vector<int> passing_ids;
  RegionMask mask;                  // intersection of passing candidates
  bool empty_pass_warning = false;  // no candidate passed; mask is all of Omega
};

// Runs the inclusion test over the whole dictionary and intersects the
// passing candidates. Candidate evaluations are independent and run on up
// to `jobs` worker threads; the collected output is ordered by candidate
// id and does not depend on the worker count. For the linearized method on
// a caps dictionary the per-direction operators are accumulated
// incrementally over nested caps.
ReconResult reconstruct(Method method, const NDOperator& data,
                        const CandidateSet& candidates, TestContext& ctx,
                        double tol, OneSided one_sided = OneSided::Both,
                        int jobs = 1);

// Default PSD tolerance: rel * (operator scale of the data).
double default_tolerance(const NDOperator& data, double rel = 1e-9);

// Noise-floor estimate from a known-background run: the most negative
// min-eigenvalue seen when testing the background against itself, widened
// by a factor of 10.
double calibrate_tolerance(Method method, const NDOperator& background_data,
                           const CandidateSet& candidates, TestContext& ctx,
                           OneSided one_sided = OneSided::Both, int jobs = 1);

}  // namespace monofem
