#include "xxzdrop/operators.hpp"

#include <bit>
#include <cstdlib>
#include <string>

#include <Eigen/Eigenvalues>

namespace xxz {

namespace {

Mask bits(int offset, int len) {
  if (len <= 0) return 0;
  const Mask m = len >= 64 ? ~Mask{0} : ((Mask{1} << len) - 1);
  return m << offset;
}

// Q-type count test on a part, offsets relative to the basis interval
bool part_ok(Mask m, const Interval& part, int count, const Interval& basis_iv) {
  if (part.empty()) return count == 0;
  return std::popcount(m & bits(part.first - basis_iv.first, part.length())) == count;
}

bool polarized(Mask m, const Interval& part, const Interval& basis_iv) {
  if (part.empty()) return true;
  const int c = std::popcount(m & bits(part.first - basis_iv.first, part.length()));
  return c == 0 || c == part.length();
}

}  // namespace

BoundarySpec parse_boundary(std::string_view text) {
  if (text == "ring") return Periodic{};
  auto sign = [&](char c) -> int {
    switch (c) {
      case '+': return +1;
      case '-': return -1;
      case '0': return 0;
    }
    throw std::invalid_argument("unknown boundary spec '" + std::string(text) + "'");
  };
  if (text.size() != 2) throw std::invalid_argument("unknown boundary spec '" + std::string(text) + "'");
  const int a = sign(text[0]), b = sign(text[1]);
  if ((a == 0) != (b == 0)) throw std::invalid_argument("unknown boundary spec '" + std::string(text) + "'");
  return OpenFields{a, b};
}

std::string boundary_name(const BoundarySpec& bc) {
  if (std::holds_alternative<Periodic>(bc)) return "ring";
  const auto f = std::get<OpenFields>(bc);
  auto c = [](int s) { return s > 0 ? '+' : (s < 0 ? '-' : '0'); };
  return {c(f.alpha), c(f.beta)};
}

DenseCapExceeded::DenseCapExceeded(std::size_t d, std::size_t c)
    : std::length_error("sector dimension " + std::to_string(d) + " exceeds dense cap " + std::to_string(c)),
      dim(d),
      cap(c) {}

HamiltonianHandle::HamiltonianHandle(Interval iv, BoundarySpec bc, AnisotropyParams params)
    : interval_(iv), boundary_(bc), params_(params) {
  if (iv.empty()) throw std::invalid_argument("Hamiltonian on an empty interval");
  if (iv.length() > kMaxSites) throw std::out_of_range("Hamiltonian interval longer than 63 sites");
  if (auto* f = std::get_if<OpenFields>(&bc)) {
    auto ok = [](int s) { return s >= -1 && s <= 1; };
    if (!ok(f->alpha) || !ok(f->beta)) throw std::invalid_argument("field signs must be in {-1,0,+1}");
  } else if (iv.length() < 2) {
    throw std::invalid_argument("periodic chain needs at least 2 sites");
  }
  for (int i = 0; i + 1 < iv.length(); ++i) bonds_.push_back({i, i + 1});
  if (periodic()) bonds_.push_back({iv.length() - 1, 0});
}

void HamiltonianHandle::check_basis(const SectorBasis& basis) const {
  if (periodic() ? !(basis.interval() == interval_) : !basis.interval().contains(interval_))
    throw std::invalid_argument("Hamiltonian interval does not match the vector's interval");
}

double HamiltonianHandle::diagonal(const SectorBasis& basis, Mask m) const {
  const int off = interval_.first - basis.interval().first;
  double d = 0.0;
  for (const auto& b : bonds_)
    if (((m >> (b.i + off)) ^ (m >> (b.j + off))) & 1u) d += 0.5;
  if (const auto* f = std::get_if<OpenFields>(&boundary_)) {
    // S3 = +1/2 (up) or -1/2 (down)
    auto s3 = [&](int site_off) { return ((m >> (site_off + off)) & 1u) ? -0.5 : 0.5; };
    d -= params_.a_field * (f->alpha * s3(0) + f->beta * s3(interval_.length() - 1));
  }
  return d;
}

void HamiltonianHandle::apply(const SectorBasis& basis, const double* in, double* out) const {
  check_basis(basis);
  const int off = interval_.first - basis.interval().first;
  const double hop = -0.5 / params_.delta;
  const std::size_t dim = basis.dim();
  for (std::size_t k = 0; k < dim; ++k) {
    const Mask m = basis.mask(k);
    double acc = diagonal(basis, m) * in[k];
    for (const auto& b : bonds_) {
      const Mask pair = (Mask{1} << (b.i + off)) | (Mask{1} << (b.j + off));
      const Mask sel = m & pair;
      if (sel != 0 && sel != pair) acc += hop * in[basis.rank_mask(m ^ pair)];
    }
    out[k] = acc;
  }
}

Eigen::VectorXd HamiltonianHandle::apply(const SectorBasis& basis, const Eigen::VectorXd& in) const {
  if (static_cast<std::size_t>(in.size()) != basis.dim()) throw std::invalid_argument("vector length mismatch");
  Eigen::VectorXd out(in.size());
  apply(basis, in.data(), out.data());
  return out;
}

SectorVector apply_hamiltonian(const HamiltonianHandle& h, const SectorVector& v) {
  return SectorVector(v.basis, h.apply(*v.basis, v.amplitudes));
}

std::size_t dense_cap() {
  if (const char* env = std::getenv("XXZ_DENSE_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return 20000;
}

Eigen::MatrixXd assemble_dense(const HamiltonianHandle& h, const SectorBasis& sector,
                               std::optional<std::size_t> cap) {
  const std::size_t limit = cap.value_or(dense_cap());
  if (sector.dim() > limit) throw DenseCapExceeded(sector.dim(), limit);
  h.check_basis(sector);
  const auto n = static_cast<Eigen::Index>(sector.dim());
  Eigen::MatrixXd m(n, n);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    e[j] = 1.0;
    h.apply(sector, e.data(), m.col(j).data());
    e[j] = 0.0;
  }
  return m;
}

double symmetric_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double cut_identity_residual(int L, int x, const AnisotropyParams& p, int n_down) {
  if (L < 2 || x < 1 || x > L - 1) throw std::out_of_range("cut_identity_residual: need 1 <= x <= L-1");
  const SectorBasis sector({1, L}, n_down);
  auto dense = [&](Interval iv, OpenFields f) { return assemble_dense(HamiltonianHandle(iv, f, p), sector); };
  const Eigen::MatrixXd full = dense({1, L}, {+1, +1});
  const Eigen::MatrixXd three = dense({1, x}, {+1, -1}) + dense({x, x + 1}, {+1, +1}) + dense({x + 1, L}, {-1, +1});
  const Eigen::MatrixXd left = dense({1, x}, {+1, -1}) + dense({x, L}, {+1, +1});
  const Eigen::MatrixXd right = dense({1, x}, {+1, +1}) + dense({x, L}, {-1, +1});
  return std::max({symmetric_norm(full - three), symmetric_norm(full - left), symmetric_norm(full - right)});
}

SectorVector translate(const SectorVector& v, int times) {
  const auto& b = *v.basis;
  const int len = b.length();
  SectorVector out(v.basis);
  if (len == 0) {
    out.amplitudes = v.amplitudes;
    return out;
  }
  const int s = ((times % len) + len) % len;
  const Mask all = bits(0, len);
  for (std::size_t k = 0; k < b.dim(); ++k) {
    const Mask m = b.mask(k);
    const Mask r = s == 0 ? m : (((m << s) | (m >> (len - s))) & all);
    out.amplitudes[static_cast<Eigen::Index>(b.rank_mask(r))] = v.amplitudes[static_cast<Eigen::Index>(k)];
  }
  return out;
}

void GeneralizedSectorProjector::validate() const {
  if (partition.size() != counts.size()) throw std::invalid_argument("projector: partition/counts length mismatch");
  for (std::size_t i = 0; i < partition.size(); ++i) {
    const auto& p = partition[i];
    if (p.last < p.first - 1) throw std::invalid_argument("projector: malformed interval");
    if (counts[i] < 0 || counts[i] > p.length()) throw std::invalid_argument("projector: count outside [0, |part|]");
    if (i > 0 && partition[i - 1].last + 1 != p.first)
      throw std::invalid_argument("projector: parts must be adjacent without overlap or gap");
  }
}

bool GeneralizedSectorProjector::accepts(Mask m, const Interval& basis_iv) const {
  for (std::size_t i = 0; i < partition.size(); ++i)
    if (!part_ok(m, partition[i], counts[i], basis_iv)) return false;
  return true;
}

bool ProjectorSum::accepts(Mask m, const Interval& basis_iv) const {
  for (const auto& t : terms)
    if (t.accepts(m, basis_iv)) return true;
  return false;
}

GeneralizedSectorProjector q_projector(Interval part, int count) {
  GeneralizedSectorProjector p{{part}, {count}};
  p.validate();
  return p;
}

GeneralizedSectorProjector polarized_projector(Interval J, Spin s) {
  if (J.empty()) throw std::invalid_argument("polarized projector on an empty interval");
  return q_projector(J, s == Spin::up ? 0 : J.length());
}

ProjectorSum interval_projector(Interval J) {
  return {{polarized_projector(J, Spin::up), polarized_projector(J, Spin::down)}};
}

GeneralizedSectorProjector g_projector(int L, int n, Interval J, Spin sigma, int j) {
  if (J.empty() || J.first < 1 || J.last > L) throw std::invalid_argument("g_projector: J must be a nonempty subinterval of [1,L]");
  const int inside = sigma == Spin::up ? 0 : J.length();
  GeneralizedSectorProjector p{{{1, J.first - 1}, J, {J.last + 1, L}}, {j, inside, n - j - inside}};
  p.validate();
  return p;
}

namespace {

template <class P>
SectorVector project(const P& p, const SectorVector& v) {
  const auto& b = *v.basis;
  SectorVector out(v.basis);
  for (std::size_t k = 0; k < b.dim(); ++k)
    if (p.accepts(b.mask(k), b.interval()))
      out.amplitudes[static_cast<Eigen::Index>(k)] = v.amplitudes[static_cast<Eigen::Index>(k)];
  return out;
}

template <class P>
void check_inside(const P& parts, const Interval& iv) {
  for (const auto& part : parts)
    if (!iv.contains(part)) throw std::invalid_argument("projector part outside the vector's interval");
}

void check_strictly_inside(const Interval& J, const Interval& chain) {
  if (J.empty() || J.first < chain.first + 1 || J.last > chain.last - 1)
    throw std::invalid_argument("J must lie strictly inside the chain");
}

}  // namespace

SectorVector apply_projector(const GeneralizedSectorProjector& p, const SectorVector& v) {
  p.validate();
  check_inside(p.partition, v.basis->interval());
  return project(p, v);
}

SectorVector apply_projector(const ProjectorSum& p, const SectorVector& v) {
  for (const auto& t : p.terms) {
    t.validate();
    check_inside(t.partition, v.basis->interval());
  }
  return project(p, v);
}

SectorVector double_commutator_apply(const HamiltonianHandle& h, Interval J, const SectorVector& v) {
  check_strictly_inside(J, h.interval());
  const auto P = interval_projector(J);
  const SectorVector pv = apply_projector(P, v);
  SectorVector qv(v.basis, v.amplitudes - pv.amplitudes);
  const SectorVector hv = apply_hamiltonian(h, v);
  const SectorVector php = apply_projector(P, apply_hamiltonian(h, pv));
  const SectorVector hq = apply_hamiltonian(h, qv);
  const SectorVector qhq(v.basis, hq.amplitudes - apply_projector(P, hq).amplitudes);
  return SectorVector(v.basis, hv.amplitudes - php.amplitudes - qhq.amplitudes);
}

SectorVector double_commutator_closed_form(const AnisotropyParams& p, Interval J, const SectorVector& v) {
  const auto& b = *v.basis;
  const Interval& iv = b.interval();
  check_strictly_inside(J, iv);
  const int a = J.first, e = J.last;
  const double c = -0.5 / p.delta;
  auto pair_mask = [&](int s) { return (Mask{1} << (s - iv.first)) | (Mask{1} << (s + 1 - iv.first)); };
  const Mask left = pair_mask(a - 1), right = pair_mask(e);
  SectorVector out(v.basis);
  for (std::size_t k = 0; k < b.dim(); ++k) {
    const Mask m = b.mask(k);
    const double amp = v.amplitudes[static_cast<Eigen::Index>(k)];
    if (amp == 0.0) continue;
    const Mask sl = m & left, sr = m & right;
    if (sl != 0 && sl != left && polarized(m, {a + 1, e}, iv))
      out.amplitudes[static_cast<Eigen::Index>(b.rank_mask(m ^ left))] += c * amp;
    if (sr != 0 && sr != right && polarized(m, {a, e - 1}, iv))
      out.amplitudes[static_cast<Eigen::Index>(b.rank_mask(m ^ right))] += c * amp;
  }
  return out;
}

double double_commutator_norm(const HamiltonianHandle& h, Interval J, const SectorBasis& sector) {
  if (J.empty() || !h.interval().contains(J)) throw std::invalid_argument("J must be a nonempty subinterval of the chain");
  Eigen::MatrixXd m = assemble_dense(h, sector);
  const auto P = interval_projector(J);
  std::vector<bool> in(sector.dim());
  for (std::size_t k = 0; k < sector.dim(); ++k) in[k] = P.accepts(sector.mask(k), sector.interval());
  // keep only the blocks coupling range(P) with its complement
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (in[i] == in[j]) m(i, j) = 0.0;
  return symmetric_norm(m);
}

}  // namespace xxz
