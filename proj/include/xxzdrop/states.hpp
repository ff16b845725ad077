#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "xxzdrop/operators.hpp"
#include "xxzdrop/qcore.hpp"
#include "xxzdrop/sector_basis.hpp"

namespace xxz {

enum class KinkDirection { kink, antikink };  // (+-) and (-+)

struct KinkSpec {
  Interval interval;
  int n_down = 0;
  KinkDirection direction = KinkDirection::kink;
  AnisotropyParams params;
};

// raw coefficients q^{sum (b+1-x_k)} (kink) or q^{sum (x_k+1-a)} (antikink)
SectorVector build_kink(const KinkSpec& spec);
SectorVector build_kink(Interval iv, int n, KinkDirection dir, double q);

double kink_norm_sq_closed(int length, int n, double q);
// <psi^{+-}(m), psi^{-+}(n)> on a common interval; zero for m != n
double mixed_overlap_closed(int length, int m, int n, double q);
inline double mixed_overlap_closed(int length, int n, double q) { return mixed_overlap_closed(length, n, n, q); }

// max amplitude discrepancy between the state and its split over [a,cut] (x) [cut+1,b]
double coproduct_check(const KinkSpec& spec, int cut);

struct DropletSpec {
  int L = 0;
  int n_down = 0;
  int x = 0;
  AnisotropyParams params;
};

// admissible cuts floor(n/2) <= x <= L - ceil(n/2)
std::pair<int, int> droplet_window(int L, int n);

// kink on [1,x] with floor(n/2) downs (x) antikink on [x+1,L] with ceil(n/2) downs
SectorVector build_droplet(const DropletSpec& spec);

// <psi^{+-}_{[1,x]}(m) (x) psi^{-+}_{[x+1,x+y+r]}(n+k), psi^{+-}_{[1,x+r]}(m+k) (x) psi^{-+}_{[x+r+1,x+y+r]}(n)>
double pair_overlap_closed(int x, int y, int r, int k, int m, int n, double q);
double pair_overlap_normalized_closed(int x, int y, int r, int k, int m, int n, double q);
double pair_overlap_direct(int x, int y, int r, int k, int m, int n, double q);

// normalized <xi(x), xi(y)>, computed from the built states
double droplet_overlap(const DropletSpec& a, const DropletSpec& b);
double droplet_overlap_closed(int L, int n, int x, int y, double q);

// ||Q_{P,n} psi||^2 / ||psi||^2 for a partition covering the kink interval
double projform_expectation(KinkDirection kind, Interval iv, int n, const std::vector<Interval>& partition,
                            const std::vector<int>& counts, double q);
double projform_exponent(KinkDirection kind, Interval iv, const std::vector<Interval>& partition,
                         const std::vector<int>& counts);

// <xi(x), G^sigma_j xi(x)> / ||xi(x)||^2 for J = [a,b] inside [1,L]
double g_expectation_closed(int L, int n, Interval J, int x, Spin sigma, int j, double q);

// ||P v||^2 / ||v||^2
double projector_expectation(const GeneralizedSectorProjector& p, const SectorVector& v);
double projector_expectation(const ProjectorSum& p, const SectorVector& v);

struct RingDropletSpec {
  int L = 0;
  int n_down = 0;
  int shift = 0;
  AnisotropyParams params;
};

// T^shift xi_{L,n}(floor(L/2))
SectorVector build_ring_droplet(const RingDropletSpec& spec);

// <xi_ring(0), T^x xi_ring(0)> / ||xi||^2 for 0 <= x <= floor(L/2)
double ring_translation_overlap_closed(int L, int n, int x, double q);
double ring_translation_overlap(int L, int n, int x, const AnisotropyParams& params);

struct DropletResidual {
  double residual = 0.0;  // ||(H^{++} - A) xi||^2 / ||xi||^2
  double bound = 0.0;     // 2 q^{2 floor(n/2)} / (1 - q^{2 floor(n/2)})
  // ||H^{++} xi - H^{++}_{x,x+1} xi|| / ||xi||, for 1 <= x <= L-1
  std::optional<double> local_discrepancy;
};

DropletResidual droplet_residual(const DropletSpec& spec);

// <psi^{+-}_{x}(j) (x) psi^{-+}_{x+1}(l), H^{++}_{x,x+1} psi^{+-}_{[x,x+1]}(j+l)>
double two_site_element_closed(int j, int l, const AnisotropyParams& p);
double two_site_element_direct(int j, int l, const AnisotropyParams& p);
// same pairing without the Hamiltonian
double two_site_overlap_closed(int j, int l, double q);
double two_site_overlap_direct(int j, int l, double q);

}  // namespace xxz
