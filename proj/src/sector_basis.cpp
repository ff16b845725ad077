#include "xxzdrop/sector_basis.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <stdexcept>

namespace xxz {

namespace {

Mask low_bits(int len) { return len >= 64 ? ~Mask{0} : ((Mask{1} << len) - 1); }

void check_interval(const Interval& iv) {
  if (iv.last < iv.first - 1) throw std::invalid_argument("malformed interval");
  if (iv.length() > kMaxSites) throw std::out_of_range("interval longer than 63 sites");
}

}  // namespace

Interval make_interval(int first, int last) {
  Interval iv{first, last};
  check_interval(iv);
  return iv;
}

int SpinConfiguration::down_count() const { return std::popcount(down); }

bool SpinConfiguration::is_down(int site) const {
  if (!interval.contains(site)) throw std::out_of_range("site outside configuration interval");
  return (down >> (site - interval.first)) & 1u;
}

std::string SpinConfiguration::to_string() const {
  std::string s;
  for (int i = 0; i < interval.length(); ++i) s += ((down >> i) & 1u) ? 'd' : 'u';
  return s;
}

SpinConfiguration configuration_from_sites(Interval iv, const std::vector<int>& down_sites) {
  check_interval(iv);
  SpinConfiguration c{iv, 0};
  for (int s : down_sites) {
    if (!iv.contains(s)) throw std::out_of_range("down site outside interval");
    c.down |= Mask{1} << (s - iv.first);
  }
  return c;
}

std::uint64_t sector_dimension(int length, int n) {
  if (length < 0 || n < 0 || n > length)
    throw std::out_of_range("sector_dimension: need 0 <= n <= length");
  if (n > length - n) n = length - n;
  unsigned __int128 r = 1;
  for (int j = 1; j <= n; ++j) {
    r = r * static_cast<unsigned>(length - n + j) / static_cast<unsigned>(j);
    if (r > std::numeric_limits<std::uint64_t>::max())
      throw std::out_of_range("sector_dimension: overflow");
  }
  return static_cast<std::uint64_t>(r);
}

SpinConfiguration compose_split(const SpinConfiguration& left, const SpinConfiguration& right) {
  if (left.interval.last + 1 != right.interval.first)
    throw std::invalid_argument("compose_split: intervals are not adjacent");
  const Interval iv{left.interval.first, right.interval.last};
  check_interval(iv);
  return {iv, left.down | (right.down << left.interval.length())};
}

SectorBasis::SectorBasis(Interval iv, int n_down) : interval_(iv), n_down_(n_down) {
  check_interval(iv);
  const int len = iv.length();
  if (n_down < 0 || n_down > len) throw std::out_of_range("SectorBasis: n_down outside [0, length]");
  const auto d = sector_dimension(len, n_down);

  binom_.assign(len + 1, std::vector<std::uint64_t>(n_down + 2, 0));
  for (int p = 0; p <= len; ++p) {
    binom_[p][0] = 1;
    for (int i = 1; i <= std::min(p, n_down + 1); ++i)
      binom_[p][i] = binom_[p - 1][i - 1] + (i <= p - 1 ? binom_[p - 1][i] : 0);
  }

  masks_.reserve(d);
  std::vector<int> pos(n_down);
  for (int i = 0; i < n_down; ++i) pos[i] = i;
  while (true) {
    Mask m = 0;
    for (int p : pos) m |= Mask{1} << p;
    masks_.push_back(m);
    int i = n_down - 1;
    while (i >= 0 && pos[i] == len - n_down + i) --i;
    if (i < 0) break;
    ++pos[i];
    for (int j = i + 1; j < n_down; ++j) pos[j] = pos[j - 1] + 1;
  }
}

std::size_t SectorBasis::rank_mask(Mask m) const {
  // lex rank on positions = dim - 1 - colex rank of the mirrored positions
  const int len = interval_.length();
  std::uint64_t colex = 0;
  int i = 1;
  while (m) {
    const int p = 63 - std::countl_zero(m);
    colex += binom_[len - 1 - p][i];
    m &= ~(Mask{1} << p);
    ++i;
  }
  return masks_.size() - 1 - colex;
}

std::size_t SectorBasis::rank(const SpinConfiguration& c) const {
  if (!(c.interval == interval_)) throw std::invalid_argument("rank: interval mismatch");
  if ((c.down & ~low_bits(length())) != 0) throw std::invalid_argument("rank: bits beyond interval");
  if (c.down_count() != n_down_) throw std::invalid_argument("rank: down-spin count mismatch");
  return rank_mask(c.down);
}

SpinConfiguration SectorBasis::unrank(std::size_t index) const {
  if (index >= masks_.size()) throw std::out_of_range("unrank: index out of range");
  return {interval_, masks_[index]};
}

BasisPtr make_basis(Interval iv, int n_down) { return std::make_shared<const SectorBasis>(iv, n_down); }

SectorVector::SectorVector(BasisPtr b) : basis(std::move(b)) {
  amplitudes = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis->dim()));
}

SectorVector::SectorVector(BasisPtr b, Eigen::VectorXd amps) : basis(std::move(b)), amplitudes(std::move(amps)) {
  if (static_cast<std::size_t>(amplitudes.size()) != basis->dim())
    throw std::invalid_argument("SectorVector: amplitude length does not match basis dimension");
}

double SectorVector::amplitude(const SpinConfiguration& c) const {
  return amplitudes[static_cast<Eigen::Index>(basis->rank(c))];
}

double dot(const SectorVector& a, const SectorVector& b) {
  if (!a.basis->same_as(*b.basis)) throw std::invalid_argument("dot: vectors live on different sectors");
  return a.amplitudes.dot(b.amplitudes);
}

SectorVector tensor(const SectorVector& left, const SectorVector& right) {
  const auto& lb = *left.basis;
  const auto& rb = *right.basis;
  if (lb.interval().last + 1 != rb.interval().first)
    throw std::invalid_argument("tensor: intervals are not adjacent");
  auto basis = make_basis({lb.interval().first, rb.interval().last}, lb.n_down() + rb.n_down());
  SectorVector out(basis);
  const int shift = lb.length();
  for (std::size_t i = 0; i < lb.dim(); ++i) {
    const double li = left.amplitudes[static_cast<Eigen::Index>(i)];
    if (li == 0.0) continue;
    for (std::size_t j = 0; j < rb.dim(); ++j) {
      const Mask m = lb.mask(i) | (rb.mask(j) << shift);
      out.amplitudes[static_cast<Eigen::Index>(basis->rank_mask(m))] =
          li * right.amplitudes[static_cast<Eigen::Index>(j)];
    }
  }
  return out;
}

}  // namespace xxz
