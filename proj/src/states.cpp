#include "xxzdrop/states.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace xxz {

namespace {

// c * q^e, in log space once the exponent gets large
double scaled_qpow(double c, double q, double e) {
  if (c == 0.0) return 0.0;
  if (e > 600.0) return std::copysign(std::exp(std::log(std::abs(c)) + e * std::log(q)), c);
  return c * std::pow(q, e);
}

// q-binomial with zero for any index outside its range, including m < 0
double qb(int m, int k, double q) { return m < 0 ? 0.0 : qbinom(m, k, q); }

void check_count(int len, int n, const char* what) {
  if (n < 0 || n > len) throw std::out_of_range(std::string(what) + ": down-spin count outside [0, length]");
}

}  // namespace

SectorVector build_kink(Interval iv, int n, KinkDirection dir, double q) {
  if (iv.last < iv.first - 1) throw std::invalid_argument("build_kink: malformed interval");
  check_count(iv.length(), n, "build_kink");
  auto basis = make_basis(iv, n);
  SectorVector v(basis);
  const int len = iv.length();
  for (std::size_t k = 0; k < basis->dim(); ++k) {
    Mask m = basis->mask(k);
    int e = 0;
    while (m) {
      const int p = std::countr_zero(m);  // x_k - a
      e += dir == KinkDirection::kink ? len - p : p + 1;
      m &= m - 1;
    }
    v.amplitudes[static_cast<Eigen::Index>(k)] = std::pow(q, e);
  }
  return v;
}

SectorVector build_kink(const KinkSpec& spec) {
  return build_kink(spec.interval, spec.n_down, spec.direction, spec.params.q);
}

double kink_norm_sq_closed(int length, int n, double q) {
  check_count(length, n, "kink_norm_sq_closed");
  return scaled_qpow(qbinom(length, n, q), q, double(n) * (n + 1));
}

double mixed_overlap_closed(int length, int m, int n, double q) {
  check_count(length, m, "mixed_overlap_closed");
  check_count(length, n, "mixed_overlap_closed");
  if (m != n) return 0.0;
  return scaled_qpow(binom(length, n), q, double(n) * (length + 1));
}

double coproduct_check(const KinkSpec& spec, int cut) {
  const Interval iv = spec.interval;
  const int a = iv.first, b = iv.last, n = spec.n_down;
  if (cut < a || cut > b - 1) throw std::out_of_range("coproduct_check: cut must satisfy a <= cut <= b-1");
  const double q = spec.params.q;
  const SectorVector whole = build_kink(spec);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(whole.amplitudes.size());
  const int left_len = cut - a + 1, right_len = b - cut;
  for (int k = std::max(0, n - right_len); k <= std::min(n, left_len); ++k) {
    const SectorVector l = build_kink({a, cut}, k, spec.direction, q);
    const SectorVector r = build_kink({cut + 1, b}, n - k, spec.direction, q);
    const double w = spec.direction == KinkDirection::kink ? std::pow(q, (b - cut) * k)
                                                           : std::pow(q, (cut + 1 - a) * (n - k));
    sum += w * tensor(l, r).amplitudes;
  }
  return (sum - whole.amplitudes).cwiseAbs().maxCoeff();
}

std::pair<int, int> droplet_window(int L, int n) { return {n / 2, L - (n + 1) / 2}; }

SectorVector build_droplet(const DropletSpec& spec) {
  const int L = spec.L, n = spec.n_down;
  if (L < 1 || L > kMaxSites) throw std::out_of_range("build_droplet: L out of range");
  check_count(L, n, "build_droplet");
  const auto [lo, hi] = droplet_window(L, n);
  if (spec.x < lo || spec.x > hi) throw std::out_of_range("build_droplet: cut outside admissible window");
  const double q = spec.params.q;
  return tensor(build_kink({1, spec.x}, n / 2, KinkDirection::kink, q),
                build_kink({spec.x + 1, L}, (n + 1) / 2, KinkDirection::antikink, q));
}

namespace {

void check_pair_args(int x, int y, int r, int k, int m, int n) {
  if (x < 0 || y < 0 || r < 0 || k < 0 || m < 0 || n < 0) throw std::out_of_range("pair overlap: negative argument");
  if (m > x || n > y || m + k > x + r || n + k > y + r) throw std::out_of_range("pair overlap: count exceeds interval");
}

}  // namespace

double pair_overlap_closed(int x, int y, int r, int k, int m, int n, double q) {
  check_pair_args(x, y, r, k, m, n);
  const double c = binom(r, k) * qbinom(x, m, q) * qbinom(y, n, q);
  const double e = double(r) * (m + n) + double(m) * (m + 1) + double(n) * (n + 1) + double(k) * (r + 1);
  return scaled_qpow(c, q, e);
}

double pair_overlap_normalized_closed(int x, int y, int r, int k, int m, int n, double q) {
  check_pair_args(x, y, r, k, m, n);
  const double ratio = qbinom(x, m, q) * qbinom(y, n, q) / (qbinom(x + r, m + k, q) * qbinom(y + r, n + k, q));
  return scaled_qpow(binom(r, k) * std::sqrt(ratio), q, double(m + n + k) * (r - k));
}

double pair_overlap_direct(int x, int y, int r, int k, int m, int n, double q) {
  check_pair_args(x, y, r, k, m, n);
  const int len = x + y + r;
  const auto K = KinkDirection::kink, AK = KinkDirection::antikink;
  const SectorVector u = tensor(build_kink({1, x}, m, K, q), build_kink({x + 1, len}, n + k, AK, q));
  const SectorVector v = tensor(build_kink({1, x + r}, m + k, K, q), build_kink({x + r + 1, len}, n, AK, q));
  return dot(u, v);
}

double droplet_overlap(const DropletSpec& a, const DropletSpec& b) {
  if (a.L != b.L || a.n_down != b.n_down) throw std::invalid_argument("droplet_overlap: mismatched L or n");
  const SectorVector u = build_droplet(a), v = build_droplet(b);
  return dot(u, v) / (u.norm() * v.norm());
}

double droplet_overlap_closed(int L, int n, int x, int y, double q) {
  const auto [lo, hi] = droplet_window(L, n);
  if (x < lo || x > hi || y < lo || y > hi) throw std::out_of_range("droplet_overlap_closed: cut outside window");
  if (x > y) std::swap(x, y);
  return pair_overlap_normalized_closed(x, L - y, y - x, 0, n / 2, (n + 1) / 2, q);
}

double projform_exponent(KinkDirection kind, Interval iv, const std::vector<Interval>& partition,
                         const std::vector<int>& counts) {
  int n = 0;
  for (int c : counts) n += c;
  double e = 0.0;
  for (std::size_t j = 0; j < partition.size(); ++j) {
    const int nj = counts[j];
    const int d = kind == KinkDirection::kink ? iv.last - partition[j].last : partition[j].first - iv.first;
    e += double(nj) * (2.0 * d - (n - nj));
  }
  return e;
}

double projform_expectation(KinkDirection kind, Interval iv, int n, const std::vector<Interval>& partition,
                            const std::vector<int>& counts, double q) {
  GeneralizedSectorProjector p{partition, counts};
  p.validate();
  if (partition.empty() || partition.front().first != iv.first || partition.back().last != iv.last)
    throw std::invalid_argument("projform_expectation: partition must cover the interval");
  check_count(iv.length(), n, "projform_expectation");
  int total = 0;
  double prod = 1.0;
  for (std::size_t j = 0; j < partition.size(); ++j) {
    total += counts[j];
    prod *= qbinom(partition[j].length(), counts[j], q);
  }
  if (total != n) throw std::invalid_argument("projform_expectation: counts must sum to n");
  return scaled_qpow(prod / qbinom(iv.length(), n, q), q, projform_exponent(kind, iv, partition, counts));
}

double g_expectation_closed(int L, int n, Interval J, int x, Spin sigma, int j, double q) {
  if (J.empty() || J.first < 1 || J.last > L) throw std::invalid_argument("g_expectation_closed: malformed J");
  const auto [lo, hi] = droplet_window(L, n);
  if (x < lo || x > hi) throw std::out_of_range("g_expectation_closed: cut outside admissible window");
  const int a = J.first, b = J.last, len = J.length();
  const int m = n / 2, p = (n + 1) / 2;
  const bool up = sigma == Spin::up;
  if (x <= a - 1) {
    const int r = a - 1 - x - j + m;
    if (up) return scaled_qpow(qb(a - 1 - x, r, q) * qb(L - b, n - j, q) / qb(L - x, p, q), q, 2.0 * (n - j) * (len + r));
    return scaled_qpow(qb(a - 1 - x, r, q) * qb(L - b, n - j - len, q) / qb(L - x, p, q), q, 2.0 * (n - j) * r);
  }
  if (x <= b) {
    const double den = qb(x, m, q) * qb(L - x, p, q);
    if (up) {
      if (j != m) return 0.0;
      return scaled_qpow(qb(a - 1, m, q) * qb(L - b, p, q) / den, q, 2.0 * (m * (x - a + 1) + p * (b - x)));
    }
    if (j != m - x + a - 1) return 0.0;
    return qb(a - 1, x - m, q) * qb(L - b, L - x - p, q) / den;
  }
  if (up) {
    const int r = x - b - m + j;
    return scaled_qpow(qb(a - 1, j, q) * qb(x - b, r, q) / qb(x, m, q), q, 2.0 * j * (len + r));
  }
  const int r = x - a + 1 - m + j;
  return scaled_qpow(qb(a - 1, j, q) * qb(x - b, r, q) / qb(x, m, q), q, 2.0 * (j + len) * r);
}

double projector_expectation(const GeneralizedSectorProjector& p, const SectorVector& v) {
  return apply_projector(p, v).squared_norm() / v.squared_norm();
}

double projector_expectation(const ProjectorSum& p, const SectorVector& v) {
  return apply_projector(p, v).squared_norm() / v.squared_norm();
}

SectorVector build_ring_droplet(const RingDropletSpec& spec) {
  if (spec.L < 2) throw std::out_of_range("build_ring_droplet: L must be >= 2");
  if (spec.shift < 0 || spec.shift > spec.L - 1) throw std::out_of_range("build_ring_droplet: shift outside [0, L-1]");
  const SectorVector base = build_droplet({spec.L, spec.n_down, spec.L / 2, spec.params});
  return translate(base, spec.shift);
}

double ring_translation_overlap_closed(int L, int n, int x, double q) {
  if (L < 2 || n < 0 || n > L) throw std::out_of_range("ring_translation_overlap_closed: bad L or n");
  if (x < 0 || x > L / 2) throw std::out_of_range("ring_translation_overlap_closed: x outside [0, L/2]");
  const int h = L / 2, m = n / 2, p = (n + 1) / 2;
  const double den = qbinom(h, m, q) * qbinom(L - h, p, q);
  double sum = 0.0;
  for (int k = 0; k <= x; ++k) {
    const double c = qb(h - x, m - k, q) * qb(L - h - x, p - k, q) / den * binom(x, k) * binom(x, k);
    sum += scaled_qpow(c, q, double(n) * x + double(k) * (L + 2 * k - 2 * x - 2 * n));
  }
  return sum;
}

double ring_translation_overlap(int L, int n, int x, const AnisotropyParams& params) {
  if (x < 0 || x > L / 2) throw std::out_of_range("ring_translation_overlap: x outside [0, L/2]");
  const SectorVector v = build_ring_droplet({L, n, 0, params});
  return dot(v, translate(v, x)) / v.squared_norm();
}

DropletResidual droplet_residual(const DropletSpec& spec) {
  const SectorVector xi = build_droplet(spec);
  const auto& p = spec.params;
  const auto H = HamiltonianHandle::droplet({1, spec.L}, p);
  const Eigen::VectorXd hx = H.apply(*xi.basis, xi.amplitudes);
  DropletResidual r;
  r.residual = (hx - p.a_field * xi.amplitudes).squaredNorm() / xi.squared_norm();
  const double t = std::pow(p.q, 2 * (spec.n_down / 2));
  r.bound = t < 1.0 ? 2.0 * t / (1.0 - t) : std::numeric_limits<double>::infinity();
  if (spec.x >= 1 && spec.x <= spec.L - 1) {
    const auto local = HamiltonianHandle::droplet({spec.x, spec.x + 1}, p);
    r.local_discrepancy = (hx - local.apply(*xi.basis, xi.amplitudes)).norm() / xi.norm();
  }
  return r;
}

double two_site_element_closed(int j, int l, const AnisotropyParams& p) {
  if (j < 0 || j > 1 || l < 0 || l > 1) throw std::out_of_range("two-site element: j, l in {0,1}");
  return (l == 0 ? -1.0 : 1.0) * p.a_field * std::pow(p.q, 3 * j + 2 * l);
}

double two_site_overlap_closed(int j, int l, double q) {
  if (j < 0 || j > 1 || l < 0 || l > 1) throw std::out_of_range("two-site overlap: j, l in {0,1}");
  return std::pow(q, 3 * j + 2 * l);
}

namespace {

std::pair<SectorVector, SectorVector> two_site_pair(int j, int l, double q) {
  if (j < 0 || j > 1 || l < 0 || l > 1) throw std::out_of_range("two-site pairing: j, l in {0,1}");
  SectorVector left = tensor(build_kink({1, 1}, j, KinkDirection::kink, q), build_kink({2, 2}, l, KinkDirection::antikink, q));
  SectorVector right = build_kink({1, 2}, j + l, KinkDirection::kink, q);
  return {std::move(left), std::move(right)};
}

}  // namespace

double two_site_element_direct(int j, int l, const AnisotropyParams& p) {
  auto [u, v] = two_site_pair(j, l, p.q);
  return dot(u, apply_hamiltonian(HamiltonianHandle::droplet({1, 2}, p), v));
}

double two_site_overlap_direct(int j, int l, double q) {
  auto [u, v] = two_site_pair(j, l, q);
  return dot(u, v);
}

}  // namespace xxz
