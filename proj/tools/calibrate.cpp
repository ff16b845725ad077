// Dense calibration of the band/gap/distance constants used by check_theorem2 and check_ring.
#include <algorithm>
#include <cmath>
#include <cstdio>

#include "xxzdrop/spectral.hpp"
#include "xxzdrop/states.hpp"

using namespace xxz;

int main() {
  const double q = 0.25;
  const auto p = params_from_q(q);
  double band_c = 0, gap_eps = 0, dist_c = 0;
  for (int L : {8, 10, 12}) {
    for (int n = 3; n <= L - 3; ++n) {
      auto basis = make_basis({1, L}, n);
      const auto res = eig_dense(HamiltonianHandle::droplet({1, L}, p), basis, true);
      const int band = L - n + 1;
      double width = 0;
      for (int k = 0; k < band; ++k) width = std::max(width, std::abs(res.eigenvalues[k] - p.a_field));
      const double deficit = p.a_field + p.gamma - res.eigenvalues[band];
      const double dist =
          projector_distance(gram_projector(build_droplet_family(L, n, p)), eigenspace_projector(res, band));
      std::printf("L=%2d n=%2d width=%.6e width/q^n=%.6f deficit=%.6e dist=%.6e dist/q^(n/2)=%.6f\n", L, n, width,
                  width / std::pow(q, n), deficit, dist, dist / std::pow(q, 0.5 * n));
      band_c = std::max(band_c, width / std::pow(q, n));
      gap_eps = std::max(gap_eps, deficit);
      dist_c = std::max(dist_c, dist / std::pow(q, 0.5 * n));
    }
  }
  const int L = 12, n = 6;
  const auto res = eig_dense(HamiltonianHandle::ring(L, p), make_basis({1, L}, n));
  double width = 0;
  for (int k = 0; k < L; ++k) width = std::max(width, std::abs(res.eigenvalues[k] - 2 * p.a_field));
  const double ring_c = width / (std::pow(q, n) + std::pow(q, L - n));
  const double ring_eps = std::max(0.0, 2 * p.a_field + p.gamma - res.eigenvalues[L]);
  std::printf("ring L=12 n=6 width=%.6e c=%.6f deficit=%.6e\n", width, ring_c, ring_eps);
  std::printf("band_c=%.17g\ngap_eps=%.17g\ndist_c=%.17g\nring_band_c=%.17g\nring_gap_eps=%.17g\n", band_c,
              std::max(0.0, gap_eps), dist_c, ring_c, ring_eps);
}
