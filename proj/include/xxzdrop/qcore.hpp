#pragma once

#include <vector>

namespace xxz {

// q, Delta = (q + 1/q)/2, boundary field A(Delta), bulk gap gamma = 1 - 1/Delta.
struct AnisotropyParams {
  double q = 0.0;
  double delta = 0.0;
  double a_field = 0.0;
  double gamma = 0.0;

  double inv_delta() const { return 1.0 / delta; }
};

AnisotropyParams params_from_q(double q);
AnisotropyParams params_from_delta(double delta);

// Gaussian binomial [m k] at t = q^2; zero for k outside [0, m].
double qbinom(int m, int k, double q);

// ordinary binomial coefficient as a double; zero outside [0, m]
double binom(int m, int k);

class QBinomialTable {
 public:
  QBinomialTable(double q, int max_m);

  double operator()(int m, int k) const;
  double q() const { return q_; }
  int max_m() const { return max_m_; }

 private:
  double q_;
  int max_m_;
  std::vector<std::vector<double>> rows_;
};

struct FqInfinity {};
inline constexpr FqInfinity fq_infinity{};

// f_q(n) = prod_{k=1..n} (1 - q^{2k})
double fq(int n, double q);
double fq(FqInfinity, double q);

// 1 - cos(pi/L)/Delta, the kink-sector gap
double kink_gap_gamma_L(int L, double delta);

}  // namespace xxz
