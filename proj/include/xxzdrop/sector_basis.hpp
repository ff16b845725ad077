#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace xxz {

using Mask = std::uint64_t;

inline constexpr int kMaxSites = 63;

// Closed integer interval [first, last]; last = first - 1 is the empty interval.
struct Interval {
  int first = 1;
  int last = 0;

  int length() const { return last - first + 1; }
  bool empty() const { return last < first; }
  bool contains(int site) const { return site >= first && site <= last; }
  bool contains(const Interval& o) const {
    return o.empty() || (o.first >= first && o.last <= last);
  }
  bool operator==(const Interval&) const = default;
};

Interval make_interval(int first, int last);

// bit i of down <-> site interval.first + i, set bit = down spin
struct SpinConfiguration {
  Interval interval;
  Mask down = 0;

  int down_count() const;
  bool is_down(int site) const;
  std::string to_string() const;  // e.g. "ud" for up,down
  bool operator==(const SpinConfiguration&) const = default;
};

SpinConfiguration configuration_from_sites(Interval iv, const std::vector<int>& down_sites);

// exact C(length, n); throws std::out_of_range if n outside [0,length] or on overflow
std::uint64_t sector_dimension(int length, int n);

SpinConfiguration compose_split(const SpinConfiguration& left, const SpinConfiguration& right);

// Fixed-down-spin basis, ordered lexicographically on sorted down positions.
class SectorBasis {
 public:
  SectorBasis(Interval iv, int n_down);

  const Interval& interval() const { return interval_; }
  int length() const { return interval_.length(); }
  int n_down() const { return n_down_; }
  std::size_t dim() const { return masks_.size(); }

  std::size_t rank(const SpinConfiguration& c) const;
  SpinConfiguration unrank(std::size_t index) const;

  // unchecked fast paths for inner loops
  std::size_t rank_mask(Mask m) const;
  Mask mask(std::size_t index) const { return masks_[index]; }
  const std::vector<Mask>& masks() const { return masks_; }

  bool same_as(const SectorBasis& o) const {
    return interval_ == o.interval_ && n_down_ == o.n_down_;
  }

 private:
  Interval interval_;
  int n_down_;
  std::vector<Mask> masks_;
  // binom_[p][i] = C(p, i) for the colex-rank formula
  std::vector<std::vector<std::uint64_t>> binom_;
};

using BasisPtr = std::shared_ptr<const SectorBasis>;

BasisPtr make_basis(Interval iv, int n_down);

// Real amplitudes over a sector basis.
struct SectorVector {
  BasisPtr basis;
  Eigen::VectorXd amplitudes;

  SectorVector() = default;
  explicit SectorVector(BasisPtr b);
  SectorVector(BasisPtr b, Eigen::VectorXd amps);

  std::size_t dim() const { return static_cast<std::size_t>(amplitudes.size()); }
  double norm() const { return amplitudes.norm(); }
  double squared_norm() const { return amplitudes.squaredNorm(); }
  double amplitude(const SpinConfiguration& c) const;
};

double dot(const SectorVector& a, const SectorVector& b);

// Amplitude-wise tensor product over adjacent intervals.
SectorVector tensor(const SectorVector& left, const SectorVector& right);

}  // namespace xxz
