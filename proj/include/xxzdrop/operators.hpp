#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "xxzdrop/qcore.hpp"
#include "xxzdrop/sector_basis.hpp"

namespace xxz {

// Field term -A (alpha S3_a + beta S3_b), alpha, beta in {-1, 0, +1}.
struct OpenFields {
  int alpha = 0;
  int beta = 0;
  bool operator==(const OpenFields&) const = default;
};

struct Periodic {
  bool operator==(const Periodic&) const = default;
};

using BoundarySpec = std::variant<OpenFields, Periodic>;

// "+-", "-+", "++", "--", "00", "ring"
BoundarySpec parse_boundary(std::string_view text);
std::string boundary_name(const BoundarySpec& bc);

class DenseCapExceeded : public std::length_error {
 public:
  DenseCapExceeded(std::size_t dim, std::size_t cap);
  std::size_t dim;
  std::size_t cap;
};

// XXZ Hamiltonian on an interval with boundary fields or a periodic wrap bond.
// Acts on any sector whose interval contains its own (as H (x) 1); periodic
// handles need the exact interval.
class HamiltonianHandle {
 public:
  HamiltonianHandle(Interval iv, BoundarySpec bc, AnisotropyParams params);

  static HamiltonianHandle free_chain(Interval iv, const AnisotropyParams& p) { return {iv, OpenFields{0, 0}, p}; }
  static HamiltonianHandle kink(Interval iv, const AnisotropyParams& p) { return {iv, OpenFields{+1, -1}, p}; }
  static HamiltonianHandle antikink(Interval iv, const AnisotropyParams& p) { return {iv, OpenFields{-1, +1}, p}; }
  static HamiltonianHandle droplet(Interval iv, const AnisotropyParams& p) { return {iv, OpenFields{+1, +1}, p}; }
  static HamiltonianHandle ring(int L, const AnisotropyParams& p) { return {{1, L}, Periodic{}, p}; }

  const Interval& interval() const { return interval_; }
  const BoundarySpec& boundary() const { return boundary_; }
  const AnisotropyParams& params() const { return params_; }
  bool periodic() const { return std::holds_alternative<Periodic>(boundary_); }

  void check_basis(const SectorBasis& basis) const;

  // out = H in, both of length basis.dim()
  void apply(const SectorBasis& basis, const double* in, double* out) const;
  Eigen::VectorXd apply(const SectorBasis& basis, const Eigen::VectorXd& in) const;

  double diagonal(const SectorBasis& basis, Mask m) const;

 private:
  struct Bond {
    int i, j;  // bit offsets relative to the handle interval
  };
  Interval interval_;
  BoundarySpec boundary_;
  AnisotropyParams params_;
  std::vector<Bond> bonds_;
};

SectorVector apply_hamiltonian(const HamiltonianHandle& h, const SectorVector& v);

// XXZ_DENSE_CAP, else 20000
std::size_t dense_cap();

Eigen::MatrixXd assemble_dense(const HamiltonianHandle& h, const SectorBasis& sector,
                               std::optional<std::size_t> cap = std::nullopt);

// spectral norm of a symmetric matrix
double symmetric_norm(const Eigen::MatrixXd& m);

// max over the three cutting identities of the dense operator-norm discrepancy
double cut_identity_residual(int L, int x, const AnisotropyParams& params, int n_down);

// T: site content moves by +1, site b wraps to site a
SectorVector translate(const SectorVector& v, int times = 1);

// Q_{P, n}: per-part down counts on adjacent intervals, identity elsewhere.
struct GeneralizedSectorProjector {
  std::vector<Interval> partition;
  std::vector<int> counts;

  void validate() const;
  bool accepts(Mask m, const Interval& basis_interval) const;
};

// orthogonal sum of generalized projectors
struct ProjectorSum {
  std::vector<GeneralizedSectorProjector> terms;
  bool accepts(Mask m, const Interval& basis_interval) const;
};

enum class Spin { up, down };

GeneralizedSectorProjector q_projector(Interval part, int count);
GeneralizedSectorProjector polarized_projector(Interval J, Spin s);  // P^up_J / P^down_J
ProjectorSum interval_projector(Interval J);                         // P_J = Q_{J,0} + Q_{J,|J|}
// G^sigma_j on [1,L] for J = [a,b]
GeneralizedSectorProjector g_projector(int L, int n, Interval J, Spin sigma, int j);

SectorVector apply_projector(const GeneralizedSectorProjector& p, const SectorVector& v);
SectorVector apply_projector(const ProjectorSum& p, const SectorVector& v);

// [P_J,[P_J,H]] = H - P H P - (1-P) H (1-P); J strictly inside the chain
SectorVector double_commutator_apply(const HamiltonianHandle& h, Interval J, const SectorVector& v);
// -(2 Delta)^-1 (A_{a-1,a} (x) P_{[a+1,b]} + P_{[a,b-1]} (x) A_{b,b+1}) v
// equals the commutator only for |J| >= 2 (a single site has P_J = 1)
SectorVector double_commutator_closed_form(const AnisotropyParams& p, Interval J, const SectorVector& v);
// dense spectral norm of [P_J,[P_J,H]] on a sector
double double_commutator_norm(const HamiltonianHandle& h, Interval J, const SectorBasis& sector);

}  // namespace xxz
