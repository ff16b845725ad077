#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "xxzdrop/operators.hpp"
#include "xxzdrop/qcore.hpp"
#include "xxzdrop/spectral.hpp"
#include "xxzdrop/states.hpp"

using namespace xxz;

namespace {

const char* kBcs[] = {"+-", "-+", "++", "--", "00"};

Eigen::VectorXd sorted_eigs(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

SectorVector basis_state(BasisPtr b, std::size_t i) {
  SectorVector v(b);
  v.amplitudes[Eigen::Index(i)] = 1.0;
  return v;
}

}  // namespace

TEST(Boundary, ParseAndName) {
  for (const char* s : {"+-", "-+", "++", "--", "00", "ring"}) EXPECT_EQ(boundary_name(parse_boundary(s)), s);
  EXPECT_EQ(std::get<OpenFields>(parse_boundary("+-")), (OpenFields{+1, -1}));
  EXPECT_THROW(parse_boundary("+0x"), std::invalid_argument);
}

TEST(Hamiltonian, MatchesKroneckerOracleAllBoundaries) {
  for (double q : {0.3, 0.7}) {
    const auto p = params_from_q(q);
    for (int L = 1; L <= 8; ++L)
      for (const char* s : kBcs) {
        const auto o = std::get<OpenFields>(parse_boundary(s));
        const auto full = oracle::full_hamiltonian(L, o.alpha, o.beta, false, p.delta, p.a_field);
        HamiltonianHandle h({1, L}, o, p);
        for (int n = 0; n <= L; ++n) {
          SectorBasis b({1, L}, n);
          const auto dense = assemble_dense(h, b);
          EXPECT_LT((dense - oracle::sector_block(full, b)).cwiseAbs().maxCoeff(), 1e-14) << s << L << n;
        }
      }
  }
}

TEST(Hamiltonian, RingMatchesKroneckerOracle) {
  const auto p = params_from_q(0.3);
  for (int L = 3; L <= 9; ++L) {
    const auto full = oracle::full_hamiltonian(L, 0, 0, true, p.delta, p.a_field);
    const auto h = HamiltonianHandle::ring(L, p);
    const auto chain = HamiltonianHandle::free_chain({1, L}, p);
    const auto wrap = oracle::bond(L, L, 1, p.delta);
    for (int n = 0; n <= L; ++n) {
      SectorBasis b({1, L}, n);
      const auto dense = assemble_dense(h, b);
      EXPECT_LT((dense - oracle::sector_block(full, b)).cwiseAbs().maxCoeff(), 1e-14);
      EXPECT_LT((dense - assemble_dense(chain, b) - oracle::sector_block(wrap, b)).cwiseAbs().maxCoeff(), 1e-14);
    }
  }
}

TEST(Hamiltonian, OracleIsBlockDiagonalAndSectorSpectraCoverFullSpectrum) {
  const auto p = params_from_q(0.7);
  const int L = 7;
  const auto full = oracle::full_hamiltonian(L, 1, 1, false, p.delta, p.a_field);
  for (Eigen::Index i = 0; i < full.rows(); ++i)
    for (Eigen::Index j = 0; j < full.cols(); ++j)
      if (std::popcount(std::uint64_t(i)) != std::popcount(std::uint64_t(j))) ASSERT_EQ(full(i, j), 0.0);
  std::vector<double> ours;
  const auto h = HamiltonianHandle::droplet({1, L}, p);
  for (int n = 0; n <= L; ++n) {
    auto r = eig_dense(h, make_basis({1, L}, n));
    ours.insert(ours.end(), r.eigenvalues.begin(), r.eigenvalues.end());
  }
  std::sort(ours.begin(), ours.end());
  const auto ref = sorted_eigs(full);
  ASSERT_EQ(Eigen::Index(ours.size()), ref.size());
  for (Eigen::Index i = 0; i < ref.size(); ++i) EXPECT_NEAR(ours[i], ref[i], 1e-12);
}

TEST(Hamiltonian, MatvecAgreesWithDenseOnRandomVectors) {
  std::mt19937_64 rng(21);
  const auto p = params_from_q(0.3);
  for (int L = 2; L <= 10; ++L)
    for (const char* s : {"+-", "++", "00", "ring"}) {
      if (L < 3 && std::string(s) == "ring") continue;
      const auto bc = parse_boundary(s);
      HamiltonianHandle h({1, L}, bc, p);
      const int n = int(rng() % (L + 1));
      auto b = make_basis({1, L}, n);
      const auto dense = assemble_dense(h, *b);
      const auto v = oracle::random_vector(rng, Eigen::Index(b->dim()));
      const auto w = apply_hamiltonian(h, SectorVector(b, v));
      EXPECT_LT((w.amplitudes - dense * v).cwiseAbs().maxCoeff(), 1e-13 * (1 + v.cwiseAbs().maxCoeff()));
    }
}

TEST(Hamiltonian, SymmetricOnRandomPairs) {
  std::mt19937_64 rng(22);
  const auto p = params_from_q(0.7);
  for (int trial = 0; trial < 60; ++trial) {
    const int L = 2 + int(rng() % 11);
    const int n = int(rng() % (L + 1));
    const char* s = kBcs[rng() % 5];
    HamiltonianHandle h({1, L}, parse_boundary(s), p);
    auto b = make_basis({1, L}, n);
    SectorVector u(b, oracle::random_vector(rng, Eigen::Index(b->dim())));
    SectorVector v(b, oracle::random_vector(rng, Eigen::Index(b->dim())));
    const double lhs = dot(u, apply_hamiltonian(h, v));
    const double rhs = dot(apply_hamiltonian(h, u), v);
    EXPECT_NEAR(lhs, rhs, 1e-12 * (1 + std::abs(lhs)));
    EXPECT_LT(symmetric_norm(assemble_dense(h, *b) - assemble_dense(h, *b).transpose()), 1e-13);
  }
}

TEST(Hamiltonian, EmbeddedActionOnLargerInterval) {
  std::mt19937_64 rng(23);
  const auto p = params_from_q(0.3);
  const int L = 7;
  const auto full = oracle::full_hamiltonian(L, 0, 0, false, p.delta, p.a_field);
  // H_{3,4} alone embedded in [1,7]
  const auto bond = oracle::bond(L, 3, 4, p.delta);
  HamiltonianHandle h = HamiltonianHandle::free_chain({3, 4}, p);
  for (int n = 0; n <= L; ++n) {
    SectorBasis b({1, L}, n);
    EXPECT_LT((assemble_dense(h, b) - oracle::sector_block(bond, b)).cwiseAbs().maxCoeff(), 1e-14);
  }
  (void)full;
  EXPECT_THROW(assemble_dense(HamiltonianHandle::ring(5, p), SectorBasis({1, 6}, 2)), std::invalid_argument);
}

TEST(Hamiltonian, TwoSiteExamples) {
  for (double q : {0.25, 0.3}) {
    const auto p = params_from_q(q);
    auto b1 = make_basis({1, 2}, 1);
    SectorVector trip(b1, Eigen::Vector2d(1, 1) / std::sqrt(2.0));
    const auto w = apply_hamiltonian(HamiltonianHandle::free_chain({1, 2}, p), trip);
    EXPECT_LT((w.amplitudes - 0.5 * (1 - p.inv_delta()) * trip.amplitudes).norm(), 1e-15);

    auto b0 = make_basis({1, 2}, 0);
    SectorVector up(b0, Eigen::VectorXd::Ones(1));
    EXPECT_NEAR(apply_hamiltonian(HamiltonianHandle::droplet({1, 2}, p), up).amplitudes[0], -p.a_field, 1e-15);
  }
}

TEST(Hamiltonian, AllUpIsAnnihilatedByFreeChain) {
  const auto p = params_from_q(0.7);
  for (int L = 1; L <= 20; ++L) {
    auto b = make_basis({1, L}, 0);
    SectorVector up(b, Eigen::VectorXd::Ones(1));
    EXPECT_EQ(apply_hamiltonian(HamiltonianHandle::free_chain({1, L}, p), up).amplitudes[0], 0.0);
  }
}

TEST(Hamiltonian, TwoSiteTables) {
  for (double q : {0.25, 0.3, 0.7}) {
    const auto p = params_from_q(q);
    const double lo = 0.5 * (1 - p.inv_delta()), hi = 0.5 * (1 + p.inv_delta());
    auto spectrum = [&](const HamiltonianHandle& h) {
      std::vector<double> ev;
      for (int n = 0; n <= 2; ++n) {
        auto r = eig_dense(h, make_basis({1, 2}, n));
        ev.insert(ev.end(), r.eigenvalues.begin(), r.eigenvalues.end());
      }
      std::sort(ev.begin(), ev.end());
      return ev;
    };
    const auto free = spectrum(HamiltonianHandle::free_chain({1, 2}, p));
    const std::vector<double> free_ref{0.0, 0.0, lo, hi};
    const auto drop = spectrum(HamiltonianHandle::droplet({1, 2}, p));
    const std::vector<double> drop_ref{-p.a_field, lo, p.a_field, hi};
    std::vector<double> drop_sorted = drop_ref;
    std::sort(drop_sorted.begin(), drop_sorted.end());
    for (int i = 0; i < 4; ++i) {
      EXPECT_NEAR(free[i], free_ref[i], 1e-13);
      EXPECT_NEAR(drop[i], drop_sorted[i], 1e-13);
    }
    // fields cancel in the n = 1 block
    auto e1 = eig_dense(HamiltonianHandle::droplet({1, 2}, p), make_basis({1, 2}, 1)).eigenvalues;
    EXPECT_NEAR(e1[0], lo, 1e-13);
    EXPECT_NEAR(e1[1], hi, 1e-13);
  }
  const auto p = params_from_q(0.25);
  auto all = [&](const HamiltonianHandle& h) {
    std::vector<double> ev;
    for (int n = 0; n <= 2; ++n)
      for (double e : eig_dense(h, make_basis({1, 2}, n)).eigenvalues) ev.push_back(e);
    std::sort(ev.begin(), ev.end());
    return ev;
  };
  const auto ev = all(HamiltonianHandle::droplet({1, 2}, p));
  EXPECT_NEAR(ev[0], -15.0 / 34, 1e-13);
  EXPECT_NEAR(ev[1], 9.0 / 34, 1e-13);
  EXPECT_NEAR(ev[2], 15.0 / 34, 1e-13);
  EXPECT_NEAR(ev[3], 25.0 / 34, 1e-13);
}

TEST(Hamiltonian, KinkAntikinkIsospectral) {
  const auto p = params_from_q(0.3);
  for (int L = 1; L <= 10; ++L)
    for (int n = 0; n <= L; ++n) {
      auto b = make_basis({1, L}, n);
      const auto a = eig_dense(HamiltonianHandle::kink({1, L}, p), b).eigenvalues;
      const auto c = eig_dense(HamiltonianHandle::antikink({1, L}, p), b).eigenvalues;
      for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], c[i], 1e-10);
    }
}

TEST(Hamiltonian, DenseCapAndOverride) {
  const auto p = params_from_q(0.3);
  const auto h = HamiltonianHandle::kink({1, 4}, p);
  EXPECT_THROW(assemble_dense(h, SectorBasis({1, 4}, 2), std::size_t(5)), DenseCapExceeded);
  EXPECT_NO_THROW(assemble_dense(h, SectorBasis({1, 4}, 2), std::size_t(6)));
  ::setenv("XXZ_DENSE_CAP", "5", 1);
  EXPECT_EQ(dense_cap(), 5u);
  EXPECT_THROW(eig_dense(h, make_basis({1, 4}, 2)), DenseCapExceeded);
  ::unsetenv("XXZ_DENSE_CAP");
  EXPECT_EQ(dense_cap(), 20000u);
}

TEST(CutIdentity, Examples) {
  EXPECT_LE(cut_identity_residual(4, 2, params_from_q(0.25), 2), 1e-12);
  EXPECT_LE(cut_identity_residual(6, 3, params_from_q(0.5), 3), 1e-12);
  EXPECT_THROW(cut_identity_residual(4, 0, params_from_q(0.25), 2), std::out_of_range);
  EXPECT_THROW(cut_identity_residual(4, 4, params_from_q(0.25), 2), std::out_of_range);
}

TEST(CutIdentity, AllCutsAndSectors) {
  for (double q : {0.3, 0.7})
    for (int L = 2; L <= 8; ++L)
      for (int x = 1; x < L; ++x)
        for (int n = 0; n <= L; ++n) EXPECT_LE(cut_identity_residual(L, x, params_from_q(q), n), 1e-12);
}

TEST(Translate, ShiftsSiteContent) {
  auto b = make_basis({1, 3}, 1);
  const auto v = basis_state(b, b->rank(configuration_from_sites({1, 3}, {1})));
  const auto w = translate(v);
  EXPECT_EQ(w.amplitude(configuration_from_sites({1, 3}, {2})), 1.0);
  EXPECT_EQ(w.squared_norm(), 1.0);
  // site L wraps to site 1
  const auto e = basis_state(b, b->rank(configuration_from_sites({1, 3}, {3})));
  EXPECT_EQ(translate(e).amplitude(configuration_from_sites({1, 3}, {1})), 1.0);
}

TEST(Translate, CyclicUnitaryAndCommutesWithRing) {
  std::mt19937_64 rng(31);
  const auto p = params_from_q(0.7);
  for (int L = 3; L <= 12; ++L) {
    const int n = int(rng() % (L + 1));
    auto b = make_basis({1, L}, n);
    SectorVector v(b, oracle::random_vector(rng, Eigen::Index(b->dim())));
    EXPECT_LT((translate(v, L).amplitudes - v.amplitudes).norm(), 1e-15);
    EXPECT_NEAR(translate(v).norm(), v.norm(), 1e-12);
    EXPECT_LT((translate(translate(v), L - 1).amplitudes - v.amplitudes).norm(), 1e-15);
    const auto h = HamiltonianHandle::ring(L, p);
    EXPECT_LT((apply_hamiltonian(h, translate(v)).amplitudes - translate(apply_hamiltonian(h, v)).amplitudes).norm(),
              1e-12 * v.norm());
  }
}

TEST(Projector, FullPartIsIdentityAndPolarizedKillsMixed) {
  std::mt19937_64 rng(41);
  const int L = 7;
  for (int n = 0; n <= L; ++n) {
    auto b = make_basis({1, L}, n);
    SectorVector v(b, oracle::random_vector(rng, Eigen::Index(b->dim())));
    EXPECT_EQ((apply_projector(q_projector({1, L}, n), v).amplitudes - v.amplitudes).norm(), 0.0);
  }
  auto b = make_basis({1, 5}, 2);
  const auto mixed = basis_state(b, b->rank(configuration_from_sites({1, 5}, {2, 5})));
  EXPECT_EQ(apply_projector(interval_projector({2, 3}), mixed).norm(), 0.0);
  EXPECT_EQ(apply_projector(interval_projector({3, 4}), mixed).norm(), 1.0);
}

TEST(Projector, IdempotentDiagonalAndMatchesKronecker) {
  std::mt19937_64 rng(42);
  const int L = 8;
  for (int trial = 0; trial < 40; ++trial) {
    // random adjacent partition of a random window
    const int a = 1 + int(rng() % L);
    const int b = a + int(rng() % (L - a + 1));
    std::vector<Interval> parts;
    std::vector<int> counts;
    std::vector<oracle::Mat> pieces;
    for (int s = a; s <= b;) {
      const int e = s + int(rng() % (b - s + 1));
      parts.push_back({s, e});
      counts.push_back(int(rng() % (e - s + 2)));
      s = e + 1;
    }
    GeneralizedSectorProjector P{parts, counts};
    P.validate();
    // oracle: diagonal indicator built from the full-space count operators
    const auto dimf = Eigen::Index(1) << L;
    for (int n = 0; n <= L; ++n) {
      auto basis = make_basis({1, L}, n);
      SectorVector v(basis, oracle::random_vector(rng, Eigen::Index(basis->dim())));
      const auto pv = apply_projector(P, v);
      EXPECT_EQ((apply_projector(P, pv).amplitudes - pv.amplitudes).norm(), 0.0);
      for (std::size_t i = 0; i < basis->dim(); ++i) {
        const auto sites = oracle::down_sites({1, L}, basis->mask(i));
        bool ok = true;
        for (std::size_t k = 0; k < parts.size(); ++k)
          ok = ok && std::count_if(sites.begin(), sites.end(), [&](int s) { return parts[k].contains(s); }) == counts[k];
        EXPECT_EQ(pv.amplitudes[Eigen::Index(i)], ok ? v.amplitudes[Eigen::Index(i)] : 0.0);
      }
    }
    (void)dimf;
  }
}

TEST(Projector, MalformedPartitions) {
  EXPECT_THROW((GeneralizedSectorProjector{{{1, 3}, {3, 4}}, {0, 0}}.validate()), std::invalid_argument);
  EXPECT_THROW((GeneralizedSectorProjector{{{1, 2}, {4, 5}}, {0, 0}}.validate()), std::invalid_argument);
  EXPECT_THROW((GeneralizedSectorProjector{{{1, 2}}, {3}}.validate()), std::invalid_argument);
  EXPECT_THROW((GeneralizedSectorProjector{{{1, 2}}, {0, 1}}.validate()), std::invalid_argument);
  auto b = make_basis({1, 4}, 1);
  EXPECT_THROW(apply_projector(q_projector({3, 6}, 1), SectorVector(b)), std::invalid_argument);
}

TEST(Projector, GExpectationOnSmallDroplet) {
  for (double q : {0.25, 0.3, 0.7}) {
    const auto p = params_from_q(q);
    const double t = q * q;
    const auto xi = build_droplet({6, 2, 3, p});
    const double got = projector_expectation(g_projector(6, 2, {3, 4}, Spin::down, 0), xi);
    EXPECT_NEAR(got, 1 / ((1 + t + t * t) * (1 + t + t * t)), 1e-14);
  }
}

TEST(DoubleCommutator, NormBoundExample) {
  const auto p = params_from_q(0.25);
  const auto h = HamiltonianHandle::free_chain({1, 6}, p);
  const double nrm = double_commutator_norm(h, {3, 4}, SectorBasis({1, 6}, 3));
  EXPECT_LE(nrm, 8.0 / 17 + 1e-12);
  EXPECT_GT(nrm, 0.0);
}

TEST(DoubleCommutator, MatchesKroneckerCommutator) {
  const auto p = params_from_q(0.7);
  const int L = 7;
  const auto H = oracle::full_hamiltonian(L, 0, 0, false, p.delta, p.a_field);
  const auto dimf = Eigen::Index(1) << L;
  for (int a = 2; a <= L - 1; ++a)
    for (int bsite = a; bsite <= L - 1; ++bsite) {
      std::vector<int> sites;
      std::vector<oracle::Mat> ups, downs;
      for (int s = a; s <= bsite; ++s) {
        sites.push_back(s);
        ups.push_back(oracle::up_proj());
        downs.push_back(oracle::down_proj());
      }
      const oracle::Mat P = oracle::embed(L, sites, ups) + oracle::embed(L, sites, downs);
      const oracle::Mat I = oracle::Mat::Identity(dimf, dimf);
      const oracle::Mat C = H - P * H * P - (I - P) * H * (I - P);
      const auto h = HamiltonianHandle::free_chain({1, L}, p);
      for (int n = 0; n <= L; ++n) {
        auto b = make_basis({1, L}, n);
        const auto ref = oracle::sector_block(C, *b);
        for (std::size_t j = 0; j < b->dim(); ++j) {
          const auto col = double_commutator_apply(h, {a, bsite}, basis_state(b, j)).amplitudes;
          ASSERT_LT((col - ref.col(Eigen::Index(j))).cwiseAbs().maxCoeff(), 1e-14);
        }
      }
    }
}

TEST(DoubleCommutator, ClosedFormAndNormBoundRandom) {
  std::mt19937_64 rng(51);
  for (double q : {0.3, 0.7}) {
    const auto p = params_from_q(q);
    for (int L = 3; L <= 10; ++L)
      for (int a = 2; a <= L - 1; ++a)
        for (int b = a; b <= L - 1; ++b) {
          const int n = int(rng() % (L + 1));
          auto basis = make_basis({1, L}, n);
          SectorVector v(basis, oracle::random_vector(rng, Eigen::Index(basis->dim())));
          const auto h = HamiltonianHandle::free_chain({1, L}, p);
          const auto x = double_commutator_apply(h, {a, b}, v);
          if (a == b) {
            // a single site is always polarized, P_J = 1
            EXPECT_EQ(x.amplitudes.cwiseAbs().maxCoeff(), 0.0);
            continue;
          }
          const auto y = double_commutator_closed_form(p, {a, b}, v);
          EXPECT_LT((x.amplitudes - y.amplitudes).cwiseAbs().maxCoeff(), 1e-13);
          if (L <= 8) EXPECT_LE(double_commutator_norm(h, {a, b}, *basis), p.inv_delta() + 1e-12);
        }
  }
}

TEST(DoubleCommutator, VanishesAwayFromEdgesOfJ) {
  const auto p = params_from_q(0.3);
  const int L = 10;
  const Interval J{5, 6};
  auto b = make_basis({1, L}, 2);
  // downs at 1 and 10 leave sites a-1..b+1 polarized up
  const auto v = basis_state(b, b->rank(configuration_from_sites({1, L}, {1, 10})));
  EXPECT_EQ(double_commutator_apply(HamiltonianHandle::free_chain({1, L}, p), J, v).norm(), 0.0);
}

TEST(DoubleCommutator, RejectsBoundaryTouchingJ) {
  const auto p = params_from_q(0.3);
  const auto h = HamiltonianHandle::free_chain({1, 6}, p);
  SectorVector v(make_basis({1, 6}, 2));
  EXPECT_THROW(double_commutator_apply(h, {1, 3}, v), std::invalid_argument);
  EXPECT_THROW(double_commutator_apply(h, {4, 6}, v), std::invalid_argument);
  EXPECT_THROW(double_commutator_closed_form(p, {1, 2}, v), std::invalid_argument);
}
