#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>
#include <random>

#include "monofem/coeff.hpp"
#include "monofem/mesh.hpp"

namespace monofem {

// Raised when a linear solve fails or a factorization is singular.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Piecewise-constant current density on the Gamma edges, mean-free:
// sum(edge length * value) = 0 up to 1e-12 relative.
struct BoundaryCurrent {
  Eigen::VectorXcd values;  // one coefficient per Gamma edge
  int size() const { return static_cast<int>(values.size()); }
};

double gamma_weighted_mean(const Mesh& mesh, const GammaSpec& gamma,
                           const Eigen::VectorXcd& values);
double current_l2_norm(const Mesh& mesh, const GammaSpec& gamma,
                       const BoundaryCurrent& f);
bool is_mean_free(const Mesh& mesh, const GammaSpec& gamma,
                  const Eigen::VectorXcd& values, double rel_tol = 1e-12);

// Removes the weighted mean from raw per-edge values.
BoundaryCurrent project_mean_free(const Mesh& mesh, const GammaSpec& gamma,
                                  const Eigen::VectorXcd& raw);
// cos(n*theta) or sin(n*theta) sampled at edge midpoints and mean-freed.
BoundaryCurrent fourier_current(const Mesh& mesh, const GammaSpec& gamma,
                                int n, bool sine = false,
                                Eigen::Vector2d center = {0.0, 0.0});
BoundaryCurrent random_current(const Mesh& mesh, const GammaSpec& gamma,
                               std::mt19937_64& rng, bool complex_valued = true);

// Nodal complex potential on the full node set. For the insulating solver
// the nodes strictly inside the removed region carry zero. Keeps the
// producing system (non-owning) and the driving current for bookkeeping.
struct FieldSolution {
  Eigen::VectorXcd nodal;
  Eigen::VectorXcd current_chi;                // empty for load-driven solves
  const class FactorizedSystem* source = nullptr;
  Eigen::Vector2cd gradient(const Mesh& mesh, int t) const;
};

enum class ExtremeKind { Insulating, Conducting };

// Assembled and LU-factorized gauged Neumann system for one coefficient.
// K[i][j] = sum_T area * (A grad(phi_j)) . grad(phi_i); the trace-mean gauge
// on Gamma enters as a single Lagrange multiplier. Immutable after
// construction; concurrent solves with distinct right-hand sides are safe.
class FactorizedSystem {
 public:
  FieldSolution solve(const BoundaryCurrent& f) const;
  // One solve per column of chi-basis coefficients; no mean-free check.
  Eigen::MatrixXcd solve_many(const Eigen::MatrixXcd& currents_chi) const;
  // Gauged solve against a general nodal load vector.
  FieldSolution solve_load(const Eigen::VectorXcd& nodal_load) const;

  // Per-edge trace integrals int_e u ds for a nodal field.
  Eigen::VectorXcd trace_integrals(const Eigen::VectorXcd& nodal) const;

  const Mesh& mesh() const { return *mesh_; }
  const GammaSpec& gamma() const { return gamma_; }
  int n_dofs() const { return n_dofs_; }

 private:
  struct Builder;
  friend struct Builder;
  friend FactorizedSystem assemble_and_factor(const Mesh&, const MatrixField&,
                                              const GammaSpec&);
  friend FactorizedSystem assemble_extreme(const Mesh&, const MatrixField&,
                                           const RegionMask&, ExtremeKind,
                                           const GammaSpec&);
  FactorizedSystem() = default;

  Eigen::VectorXcd solve_dofs(const Eigen::VectorXcd& rhs) const;

  const Mesh* mesh_ = nullptr;
  GammaSpec gamma_;
  std::vector<int> dof_of_node_;  // -1 for removed nodes
  int n_dofs_ = 0;                // excluding the multiplier
  Eigen::SparseMatrix<cplx> k_;   // bordered (n_dofs+1)^2 system
  std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<cplx>>> lu_;
  Eigen::SparseMatrix<double> trace_map_;  // n_gamma_edges x (n_dofs+1)
};

// Standard conforming P1 system. Requires an admissible coefficient;
// throws SolverError if the factorization fails.
FactorizedSystem assemble_and_factor(const Mesh& mesh, const MatrixField& a,
                                     const GammaSpec& gamma);

// Insulating: the elements of C are removed and the interface carries the
// natural zero-flux condition. Conducting: all nodes of each connected
// component of C are identified with a single unknown. The coefficient a0
// must be self-adjoint. Throws std::invalid_argument when C touches the
// boundary, pinches, or disconnects the remaining domain.
FactorizedSystem assemble_extreme(const Mesh& mesh, const MatrixField& a0,
                                  const RegionMask& C, ExtremeKind kind,
                                  const GammaSpec& gamma);

FieldSolution solve_neumann(const FactorizedSystem& system,
                            const BoundaryCurrent& f);

FieldSolution solve_extreme(const Mesh& mesh, const MatrixField& a0,
                            const RegionMask& C, ExtremeKind kind,
                            const BoundaryCurrent& f, const GammaSpec& gamma);

// int_region (M grad u) . conj(grad v) dx, exact for P1 fields.
cplx energy_integral(const Mesh& mesh, const FieldSolution& u,
                     const FieldSolution& v, const MatrixField& m,
                     const RegionMask& region);

// <f, u|_Gamma> = int_Gamma f conj(u) ds (inner product linear in f).
cplx boundary_pairing(const Mesh& mesh, const GammaSpec& gamma,
                      const BoundaryCurrent& f, const FieldSolution& u);

// Weak flux of u through the edge-boundary of C (discrete normal flux
// paired with the P1 collar function that is 1 on the interface nodes).
cplx interface_flux(const Mesh& mesh, const MatrixField& a,
                    const FieldSolution& u, const RegionMask& C);

}  // namespace monofem
