#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "xxzdrop/qcore.hpp"
#include "xxzdrop/sector_basis.hpp"

namespace xxz {

struct CheckReport {
  std::string name;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  std::map<std::string, double> measured;
  std::map<std::string, double> bound;
  bool pass = true;
  double margin = 0.0;  // smallest signed slack over the asserted comparisons
  std::string notes;

  // measured <= bound + tol
  void expect_le(const std::string& key, double value, double limit, double tol = 0.0);
  // measured >= bound - tol
  void expect_ge(const std::string& key, double value, double limit, double tol = 0.0);
  // |measured - target| <= tol
  void expect_near(const std::string& key, double value, double target, double tol);
  // a condition without a numeric bound
  void expect_true(const std::string& key, bool ok);
  void record(const std::string& key, double value) { measured[key] = value; }
  void note(const std::string& text);

 private:
  bool any_ = false;
  void slack(double s, bool ok);
};

nlohmann::ordered_json to_json(const CheckReport& r);

// Constants frozen from the dense calibration runs (tools/xxzdrop_calibrate);
// acceptance applies them with 10% slack.
struct Calibration {
  double band_c = 0.0;        // max_n band_width / q^n
  double gap_eps = 0.0;       // max_n (A + gamma - lambda_{L-n+2}), floored at 0
  double dist_c = 0.0;        // max_n dist / q^{n/2}
  double ring_band_c = 0.0;   // max |lambda_k - 2A| / (q^n + q^{L-n}) over the L lowest
  double ring_gap_eps = 0.0;  // 2A + gamma - lambda_{L+1}, floored at 0
  double slack = 1.1;
};

const Calibration& frozen_calibration();

CheckReport check_kink_gap(int L, double q);
CheckReport check_xxz_gap(int L, double q);
CheckReport check_prop24(int L, double q);
CheckReport check_theorem1(int L, int n, double q);
CheckReport check_theorem2(int L, int n, double q, const Calibration& cal = frozen_calibration());

enum class StateSource { ground_state, droplet, random_in_sector, all_up };
StateSource parse_state_source(const std::string& s);
std::string state_source_name(StateSource s);
// ground state of H^{++} in sector n, centered droplet, seeded random vector, or all-up
SectorVector make_state(StateSource s, int L, int n, double q, std::uint64_t seed = 7);

CheckReport check_polarized_interval(int L, double q, int l, const SectorVector& psi, const std::string& source);
CheckReport check_polarized_interval(int L, int n, double q, int l, StateSource source, std::uint64_t seed = 7);

CheckReport check_ring(int L, int n, double q, const Calibration& cal = frozen_calibration());
CheckReport measure_epsilon_lambda(int L, int n, double q, double lambda);
// (L, n) grid points in order of increasing n; asserts the deviation decreases along the list
CheckReport check_truncation_convergence(double q, const std::vector<std::pair<int, int>>& points);

struct AppendixLimits {
  int max_L = 10;
  std::vector<double> qs = {0.25, 0.5};
  int max_partition_length = 10;
};
CheckReport check_appendix_closed_forms(const AppendixLimits& limits = {});

// named runner used by the CLI; unknown names throw std::invalid_argument
struct CheckArgs {
  int L = 0;
  int n = -1;
  double q = 0.25;
  int l = 2;
  double lambda = -1.0;  // negative: gamma/2
  std::string state = "ground_state";
  std::uint64_t seed = 7;
};
const std::vector<std::string>& check_names();
std::vector<CheckReport> run_check(const std::string& name, const CheckArgs& args);
// desk-scale suite; quick trims the largest grids
std::vector<CheckReport> run_all_checks(bool quick);

}  // namespace xxz
