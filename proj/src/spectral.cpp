#include "xxzdrop/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "xxzdrop/states.hpp"

namespace xxz {

SectorVector EigenResult::vector(std::size_t i) const {
  if (!eigenvectors) throw std::logic_error("EigenResult holds no eigenvectors");
  if (i >= static_cast<std::size_t>(eigenvectors->cols())) throw std::out_of_range("eigenvector index out of range");
  return SectorVector(basis, eigenvectors->col(static_cast<Eigen::Index>(i)));
}

EigenResult eig_dense(const HamiltonianHandle& h, BasisPtr sector, bool want_vectors) {
  const Eigen::MatrixXd m = assemble_dense(h, *sector);
  EigenResult r;
  r.solver = SolverKind::dense;
  r.basis = sector;
  if (m.rows() == 0) return r;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("dense eigensolver failed");
  const auto& ev = es.eigenvalues();
  r.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  r.tolerance = 1e-10 * scale;
  if (want_vectors) {
    r.eigenvectors = es.eigenvectors();
    for (Eigen::Index i = 0; i < ev.size(); ++i)
      r.residuals.push_back((m * es.eigenvectors().col(i) - ev[i] * es.eigenvectors().col(i)).norm());
  }
  return r;
}

namespace {

struct Sweep {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  std::vector<double> estimates;  // |beta_m s_{m,i}|
};

class Lanczos {
 public:
  Lanczos(const HamiltonianHandle& h, const SectorBasis& b, const LanczosOptions& o)
      : h_(h), b_(b), opt_(o), rng_(o.seed), dim_(static_cast<Eigen::Index>(b.dim())) {}

  Eigen::VectorXd random_start() {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd v(dim_);
    for (Eigen::Index i = 0; i < dim_; ++i) v[i] = u(rng_);
    return v;
  }

  void deflate(Eigen::VectorXd& w, const Eigen::MatrixXd& basis, Eigen::Index cols) const {
    if (cols == 0) return;
    const auto B = basis.leftCols(cols);
    w.noalias() -= B * (B.transpose() * w);
  }

  // Ritz pairs for the `want` lowest eigenvalues of H restricted to locked^perp
  Sweep run(Eigen::VectorXd start, const Eigen::MatrixXd& locked, int want) {
    const Eigen::Index avail = dim_ - locked.cols();
    const Eigen::Index mmax = std::min<Eigen::Index>(opt_.max_krylov, avail);
    Sweep out;
    if (mmax <= 0) return out;
    for (int pass = 0; pass < 2; ++pass) deflate(start, locked, locked.cols());
    double nrm = start.norm();
    if (nrm < 1e-300) {
      start = random_start();
      for (int pass = 0; pass < 2; ++pass) deflate(start, locked, locked.cols());
      nrm = start.norm();
    }
    Eigen::MatrixXd V(dim_, mmax);
    V.col(0) = start / nrm;
    std::vector<double> alpha, beta;
    Eigen::VectorXd w(dim_);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    Eigen::Index m = 0;
    double last_beta = 0.0;
    double scale = 0.0;
    while (true) {
      h_.apply(b_, V.col(m).data(), w.data());
      const double a = V.col(m).dot(w);
      alpha.push_back(a);
      w -= a * V.col(m);
      if (m > 0) w -= beta.back() * V.col(m - 1);
      for (int pass = 0; pass < 2; ++pass) {
        deflate(w, V, m + 1);
        deflate(w, locked, locked.cols());
      }
      last_beta = w.norm();
      scale = std::max({scale, std::abs(a), last_beta});
      ++m;
      const bool invariant = last_beta <= 1e-13 * std::max(1.0, scale);
      const bool full = m >= mmax;
      if (invariant || full || (m >= want && (m % 4 == 0))) {
        Eigen::VectorXd d = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
        Eigen::VectorXd e = m > 1 ? Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(beta.data(), m - 1)) : Eigen::VectorXd();
        es.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
        const int got = static_cast<int>(std::min<Eigen::Index>(want, m));
        bool done = true;
        for (int i = 0; i < got; ++i)
          if (std::abs(last_beta * es.eigenvectors()(m - 1, i)) > opt_.tol) done = false;
        if (done || invariant || full) break;
      }
      beta.push_back(last_beta);
      V.col(m) = w / last_beta;
    }
    const int got = static_cast<int>(std::min<Eigen::Index>(want, m));
    out.values = es.eigenvalues().head(got);
    out.vectors = V.leftCols(m) * es.eigenvectors().leftCols(got);
    const bool invariant = last_beta <= 1e-13 * std::max(1.0, scale);
    for (int i = 0; i < got; ++i)
      out.estimates.push_back(invariant ? 0.0 : std::abs(last_beta * es.eigenvectors()(m - 1, i)));
    return out;
  }

 private:
  const HamiltonianHandle& h_;
  const SectorBasis& b_;
  LanczosOptions opt_;
  std::mt19937_64 rng_;
  Eigen::Index dim_;
};

}  // namespace

EigenResult eig_lowest(const HamiltonianHandle& h, BasisPtr sector, int k, const LanczosOptions& opt) {
  h.check_basis(*sector);
  const auto dim = static_cast<Eigen::Index>(sector->dim());
  if (k < 1 || k > dim) throw std::invalid_argument("eig_lowest: need 1 <= k <= sector dimension");
  Lanczos lz(h, *sector, opt);

  Eigen::MatrixXd locked(dim, 0);
  std::vector<double> vals;
  auto lock = [&](double value, const Eigen::VectorXd& vec) {
    Eigen::VectorXd v = vec;
    for (int pass = 0; pass < 2; ++pass)
      if (locked.cols()) v -= locked * (locked.transpose() * v);
    locked.conservativeResize(Eigen::NoChange, locked.cols() + 1);
    locked.col(locked.cols() - 1) = v.normalized();
    vals.push_back(value);
  };

  auto finish = [&](bool converged) {
    std::vector<int> order(vals.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
    const int keep = std::min<int>(k, static_cast<int>(order.size()));
    EigenResult r;
    r.solver = SolverKind::iterative;
    r.tolerance = opt.tol;
    r.basis = sector;
    Eigen::MatrixXd vecs(dim, keep);
    Eigen::VectorXd hv(dim);
    for (int i = 0; i < keep; ++i) {
      const int o = order[i];
      vecs.col(i) = locked.col(o);
      h.apply(*sector, locked.col(o).data(), hv.data());
      r.eigenvalues.push_back(vals[o]);
      r.residuals.push_back((hv - vals[o] * locked.col(o)).norm());
    }
    r.eigenvectors = std::move(vecs);
    if (!converged)
      throw ConvergenceError("eig_lowest: " + std::to_string(keep) + " of " + std::to_string(k) +
                                 " eigenpairs converged within the iteration cap",
                             std::move(r));
    return r;
  };

  Eigen::VectorXd start = lz.random_start();
  int failures = 0;
  for (int sweep = 0; sweep < opt.max_restarts; ++sweep) {
    const bool verifying = static_cast<int>(vals.size()) >= k;
    const int need = verifying ? 1 : k - static_cast<int>(vals.size());
    Sweep s = lz.run(start, locked, need);
    if (s.values.size() == 0) return finish(static_cast<int>(vals.size()) >= k);

    if (verifying) {
      std::vector<double> sorted = vals;
      std::sort(sorted.begin(), sorted.end());
      const double kth = sorted[k - 1];
      if (s.estimates[0] > opt.tol) {
        start = s.vectors.col(0);
        if (++failures > opt.max_restarts / 2) return finish(false);
        continue;
      }
      if (s.values[0] < kth - opt.tol) {
        lock(s.values[0], s.vectors.col(0));
        start = lz.random_start();
        continue;
      }
      return finish(true);
    }

    int locked_now = 0;
    Eigen::Index first_open = -1;
    for (Eigen::Index i = 0; i < s.values.size(); ++i) {
      if (s.estimates[i] <= opt.tol) {
        lock(s.values[i], s.vectors.col(i));
        ++locked_now;
      } else if (first_open < 0) {
        first_open = i;
      }
    }
    if (first_open >= 0) {
      start = s.vectors.col(first_open);
      if (locked_now == 0 && ++failures > opt.max_restarts / 2) return finish(false);
    } else {
      start = lz.random_start();
    }
  }
  return finish(false);
}

EigenResult eig_lowest(const HamiltonianHandle& h, BasisPtr sector, int k, double tol, std::uint64_t seed) {
  LanczosOptions o;
  o.tol = tol;
  o.seed = seed;
  return eig_lowest(h, std::move(sector), k, o);
}

double ground_energy_all_sectors(const HamiltonianHandle& h, bool dense, const LanczosOptions& opt) {
  const Interval iv = h.interval();
  double best = std::numeric_limits<double>::infinity();
  for (int n = 0; n <= iv.length(); ++n) {
    auto b = make_basis(iv, n);
    const double e = dense ? eig_dense(h, b).eigenvalues.front() : eig_lowest(h, b, 1, opt).eigenvalues.front();
    best = std::min(best, e);
  }
  return best;
}

SubspaceProjector::SubspaceProjector(BasisPtr basis, Eigen::MatrixXd orthonormal)
    : basis_(std::move(basis)), q_(std::move(orthonormal)) {
  if (basis_ && static_cast<std::size_t>(q_.rows()) != basis_->dim())
    throw std::invalid_argument("SubspaceProjector: frame rows do not match the sector dimension");
}

SubspaceProjector SubspaceProjector::from_spanning_set(BasisPtr basis, const Eigen::MatrixXd& vectors) {
  Eigen::MatrixXd F = vectors;
  for (Eigen::Index i = 0; i < F.cols(); ++i) {
    const double n = F.col(i).norm();
    if (n == 0.0) throw RankDeficiency("spanning set contains a zero vector", 0.0);
    F.col(i) /= n;
  }
  const Eigen::MatrixXd E = F.transpose() * F;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(E);
  const double mu_min = E.size() ? es.eigenvalues().minCoeff() : 1.0;
  if (mu_min < 1e-12)
    throw RankDeficiency("Gram matrix is numerically singular (min eigenvalue " + std::to_string(mu_min) + ")", mu_min);
  const Eigen::MatrixXd inv_sqrt =
      es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
  return SubspaceProjector(std::move(basis), F * inv_sqrt);
}

SectorVector SubspaceProjector::apply(const SectorVector& v) const {
  if (basis_ && !basis_->same_as(*v.basis)) throw std::invalid_argument("projector and vector live on different sectors");
  return SectorVector(v.basis, apply(v.amplitudes));
}

Eigen::MatrixXd DropletFamily::normalized_members() const {
  Eigen::MatrixXd F(static_cast<Eigen::Index>(basis()->dim()), static_cast<Eigen::Index>(members.size()));
  for (std::size_t i = 0; i < members.size(); ++i)
    F.col(static_cast<Eigen::Index>(i)) = members[i].amplitudes / members[i].norm();
  return F;
}

DropletFamily family_from_vectors(std::vector<SectorVector> members) {
  if (members.empty()) throw std::invalid_argument("empty family");
  for (const auto& m : members)
    if (!m.basis->same_as(*members.front().basis)) throw std::invalid_argument("family members on different sectors");
  DropletFamily f;
  f.L = members.front().basis->length();
  f.n_down = members.front().basis->n_down();
  f.members = std::move(members);
  const Eigen::MatrixXd F = f.normalized_members();
  f.gram = F.transpose() * F;
  return f;
}

DropletFamily build_droplet_family(int L, int n, const AnisotropyParams& p) {
  const auto [lo, hi] = droplet_window(L, n);
  std::vector<SectorVector> members;
  std::vector<int> cuts;
  for (int x = lo; x <= hi; ++x) {
    members.push_back(build_droplet({L, n, x, p}));
    cuts.push_back(x);
  }
  DropletFamily f = family_from_vectors(std::move(members));
  f.cuts = std::move(cuts);
  return f;
}

DropletFamily build_ring_droplet_family(int L, int n, const AnisotropyParams& p) {
  std::vector<SectorVector> members;
  std::vector<int> shifts;
  const SectorVector base = build_ring_droplet({L, n, 0, p});
  for (int x = 0; x < L; ++x) {
    members.push_back(translate(base, x));
    shifts.push_back(x);
  }
  DropletFamily f = family_from_vectors(std::move(members));
  f.cuts = std::move(shifts);
  return f;
}

SubspaceProjector gram_projector(const DropletFamily& family) {
  return SubspaceProjector::from_spanning_set(family.basis(), family.normalized_members());
}

Eigen::MatrixXd frame_operator(const DropletFamily& family) {
  const Eigen::MatrixXd F = family.normalized_members();
  return F * F.transpose();
}

SubspaceProjector eigenspace_projector(const EigenResult& r, int count) {
  if (!r.eigenvectors) throw std::invalid_argument("eigenspace_projector: result holds no eigenvectors");
  if (count < 0 || count > r.eigenvectors->cols()) throw std::out_of_range("eigenspace_projector: count out of range");
  return SubspaceProjector(r.basis, r.eigenvectors->leftCols(count));
}

double projector_distance(const SubspaceProjector& P, const SubspaceProjector& Q) {
  if (P.ambient_dim() != Q.ambient_dim() || (P.basis() && Q.basis() && !P.basis()->same_as(*Q.basis())))
    throw std::invalid_argument("projector_distance: projectors act on different spaces");
  if (P.rank() != Q.rank()) return 1.0;
  if (P.rank() == 0) return 0.0;
  auto sin_max = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const Eigen::MatrixXd w = b - a * (a.transpose() * b);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(w);
    return std::min(1.0, svd.singularValues()(0));
  };
  return std::max(sin_max(P.frame(), Q.frame()), sin_max(Q.frame(), P.frame()));
}

double rayleigh(const SectorVector& v, const HamiltonianHandle& h) {
  const double nn = v.squared_norm();
  if (nn == 0.0) throw std::invalid_argument("rayleigh: zero vector");
  return v.amplitudes.dot(h.apply(*v.basis, v.amplitudes)) / nn;
}

double restricted_norm(const HamiltonianHandle& h, const SubspaceProjector& P, double shift) {
  if (P.rank() == 0) return 0.0;
  const auto& b = *P.basis();
  Eigen::MatrixXd W(P.ambient_dim(), P.rank());
  for (Eigen::Index i = 0; i < P.rank(); ++i) {
    const Eigen::VectorXd col = P.frame().col(i);
    W.col(i) = h.apply(b, col) - shift * col;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(W);
  return svd.singularValues()(0);
}

}  // namespace xxz
