#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "xxzdrop/operators.hpp"
#include "xxzdrop/qcore.hpp"
#include "xxzdrop/sector_basis.hpp"

namespace xxz {

enum class SolverKind { dense, iterative };

struct EigenResult {
  std::vector<double> eigenvalues;           // ascending
  std::optional<Eigen::MatrixXd> eigenvectors;  // columns over `basis`
  std::vector<double> residuals;             // ||H v - lambda v|| per pair, when vectors exist
  SolverKind solver = SolverKind::dense;
  double tolerance = 0.0;
  BasisPtr basis;

  SectorVector vector(std::size_t i) const;
};

EigenResult eig_dense(const HamiltonianHandle& h, BasisPtr sector, bool want_vectors = false);

struct LanczosOptions {
  double tol = 1e-10;
  std::uint64_t seed = 1;
  int max_krylov = 400;   // Krylov dimension per sweep
  int max_restarts = 50;  // deflated sweeps
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, EigenResult partial)
      : std::runtime_error(what), partial(std::move(partial)) {}
  EigenResult partial;
};

// k lowest eigenpairs: Lanczos with full reorthogonalization and deflated
// restarts; a final sweep orthogonal to the converged vectors guards against
// missed degenerate copies.
EigenResult eig_lowest(const HamiltonianHandle& h, BasisPtr sector, int k, const LanczosOptions& opt = {});
EigenResult eig_lowest(const HamiltonianHandle& h, BasisPtr sector, int k, double tol, std::uint64_t seed);

// lowest eigenvalue over all sectors n = 0..L of an interval
double ground_energy_all_sectors(const HamiltonianHandle& h, bool dense, const LanczosOptions& opt = {});

// Orthogonal projector onto a subspace, held as an orthonormal column basis.
class SubspaceProjector {
 public:
  SubspaceProjector() = default;
  SubspaceProjector(BasisPtr basis, Eigen::MatrixXd orthonormal);

  // Loewdin whitening F E^{-1/2} of normalized spanning vectors; throws RankDeficiency
  static SubspaceProjector from_spanning_set(BasisPtr basis, const Eigen::MatrixXd& vectors);

  const Eigen::MatrixXd& frame() const { return q_; }
  Eigen::Index rank() const { return q_.cols(); }
  Eigen::Index ambient_dim() const { return q_.rows(); }
  const BasisPtr& basis() const { return basis_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const { return q_ * (q_.transpose() * v); }
  SectorVector apply(const SectorVector& v) const;
  Eigen::MatrixXd dense() const { return q_ * q_.transpose(); }

 private:
  BasisPtr basis_;
  Eigen::MatrixXd q_;
};

class RankDeficiency : public std::runtime_error {
 public:
  RankDeficiency(const std::string& what, double min_eig) : std::runtime_error(what), min_eigenvalue(min_eig) {}
  double min_eigenvalue;
};

// {xi_{L,n}(x)} over the admissible cuts, with the Gram matrix of normalized members
struct DropletFamily {
  int L = 0;
  int n_down = 0;
  std::vector<int> cuts;
  std::vector<SectorVector> members;
  Eigen::MatrixXd gram;

  BasisPtr basis() const { return members.front().basis; }
  Eigen::MatrixXd normalized_members() const;
};

DropletFamily build_droplet_family(int L, int n, const AnisotropyParams& p);
// ring droplets T^x xi, x = 0..L-1
DropletFamily build_ring_droplet_family(int L, int n, const AnisotropyParams& p);
DropletFamily family_from_vectors(std::vector<SectorVector> members);

SubspaceProjector gram_projector(const DropletFamily& family);

// sum of rank-one projectors onto the normalized members (dense)
Eigen::MatrixXd frame_operator(const DropletFamily& family);

// spectral projector onto the first `count` eigenvectors of a result
SubspaceProjector eigenspace_projector(const EigenResult& r, int count);

// ||P - Q||: 1 for unequal ranks, else sqrt(1 - sigma_min^2) of the cross-Gram block
double projector_distance(const SubspaceProjector& P, const SubspaceProjector& Q);

double rayleigh(const SectorVector& v, const HamiltonianHandle& h);

// spectral norm of (H - shift) P through the projector's frame
double restricted_norm(const HamiltonianHandle& h, const SubspaceProjector& P, double shift);

}  // namespace xxz
