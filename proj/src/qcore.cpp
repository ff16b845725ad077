#include "xxzdrop/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace xxz {

AnisotropyParams params_from_q(double q) {
  if (!(q > 0.0 && q < 1.0))
    throw std::domain_error("q must lie in (0,1), got " + std::to_string(q));
  AnisotropyParams p;
  p.q = q;
  p.delta = 0.5 * (q + 1.0 / q);
  const double q2 = q * q;
  p.a_field = (1.0 - q2) / (2.0 * (1.0 + q2));
  p.gamma = (1.0 - q) * (1.0 - q) / (1.0 + q2);
  return p;
}

AnisotropyParams params_from_delta(double delta) {
  if (!(delta > 1.0) || !std::isfinite(delta))
    throw std::domain_error("Delta must be > 1, got " + std::to_string(delta));
  // q = Delta - sqrt(Delta^2 - 1), written to avoid cancellation for large Delta
  const double q = 1.0 / (delta + std::sqrt((delta - 1.0) * (delta + 1.0)));
  return params_from_q(q);
}

double qbinom(int m, int k, double q) {
  if (m < 0) throw std::domain_error("qbinom: m must be nonnegative");
  if (k < 0 || k > m) return 0.0;
  if (k > m - k) k = m - k;
  const double t = q * q;
  // row-by-row Pascal recurrence [i j] = [i-1 j-1] + t^j [i-1 j]
  std::vector<double> row(k + 1, 0.0), tp(k + 1, 1.0);
  for (int j = 1; j <= k; ++j) tp[j] = tp[j - 1] * t;
  row[0] = 1.0;
  for (int i = 1; i <= m; ++i) {
    const int top = std::min(i, k);
    for (int j = top; j >= 1; --j) row[j] = row[j - 1] + tp[j] * row[j];
  }
  return row[k];
}

double binom(int m, int k) {
  if (m < 0 || k < 0 || k > m) return 0.0;
  if (k > m - k) k = m - k;
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (m - k + j) / j;
  return std::round(r);
}

QBinomialTable::QBinomialTable(double q, int max_m) : q_(q), max_m_(max_m) {
  if (max_m < 0) throw std::domain_error("QBinomialTable: max_m must be nonnegative");
  const double t = q * q;
  rows_.resize(max_m + 1);
  rows_[0] = {1.0};
  for (int m = 1; m <= max_m; ++m) {
    auto& r = rows_[m];
    const auto& p = rows_[m - 1];
    r.assign(m + 1, 0.0);
    r[0] = 1.0;
    r[m] = 1.0;
    double tk = t;
    for (int k = 1; k < m; ++k, tk *= t) r[k] = p[k - 1] + tk * p[k];
  }
}

double QBinomialTable::operator()(int m, int k) const {
  if (m < 0 || m > max_m_) throw std::out_of_range("QBinomialTable: m out of range");
  if (k < 0 || k > m) return 0.0;
  return rows_[m][k];
}

double fq(int n, double q) {
  if (n < 0) throw std::domain_error("fq: n must be nonnegative");
  const double t = q * q;
  double prod = 1.0, tk = 1.0;
  for (int k = 1; k <= n; ++k) {
    tk *= t;
    prod *= 1.0 - tk;
  }
  return prod;
}

double fq(FqInfinity, double q) {
  const double t = q * q;
  double prod = 1.0, tk = 1.0;
  while (true) {
    tk *= t;
    if (tk < 1e-17) break;
    prod *= 1.0 - tk;
  }
  return prod;
}

double kink_gap_gamma_L(int L, double delta) {
  if (L < 2) throw std::domain_error("kink_gap_gamma_L: L must be >= 2");
  if (!(delta > 1.0)) throw std::domain_error("kink_gap_gamma_L: Delta must be > 1");
  return 1.0 - std::cos(std::numbers::pi / L) / delta;
}

}  // namespace xxz
