#include "xxzdrop/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <system_error>
#include <thread>
#include <unistd.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "xxzdrop/operators.hpp"
#include "xxzdrop/qcore.hpp"
#include "xxzdrop/sector_basis.hpp"
#include "xxzdrop/spectral.hpp"
#include "xxzdrop/states.hpp"
#include "xxzdrop/verify.hpp"

namespace xxz {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// thrown for bad flag values found after CLI11 parsing
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(text);
  while (std::getline(is, cur, sep)) parts.push_back(trim(cur));
  return parts;
}

int to_int(const std::string& s) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw UsageError("not an integer: '" + s + "'");
  return v;
}

double to_double(const std::string& s) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw UsageError("not a number: '" + s + "'");
  return v;
}

std::string iso_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// write-temp-then-rename
void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + tmp + "'");
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("write failed for '" + tmp + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot rename onto '" + path + "'");
  }
}

bool path_writable(const std::string& path) {
  const std::string probe = path + ".probe." + std::to_string(::getpid());
  std::ofstream f(probe, std::ios::binary | std::ios::trunc);
  if (!f) return false;
  f.close();
  std::error_code ec;
  fs::remove(probe, ec);
  return true;
}

void emit(const std::string& out_path, const std::string& content, std::ostream& out) {
  if (out_path.empty() || out_path == "-")
    out << content;
  else
    write_atomic(out_path, content);
}

struct Common {
  int L = 0;
  std::string n;
  bool all_sectors = false;
  std::optional<double> q;
  std::optional<double> delta;
  std::string bc = "++";
  std::string solver = "dense";
  int k = 0;
  double tol = 1e-10;
  std::uint64_t seed = 1;
  std::string out;
  bool force = false;
};

void add_params(CLI::App* sub, Common& c) {
  auto* oq = sub->add_option("--q", c.q, "deformation parameter, 0 < q < 1");
  auto* od = sub->add_option("--delta", c.delta, "anisotropy Delta > 1");
  oq->excludes(od);
}

void add_output(CLI::App* sub, Common& c) {
  sub->add_option("--out", c.out, "output file (stdout if omitted)");
}

AnisotropyParams resolve_params(const Common& c) {
  try {
    if (c.q) return params_from_q(*c.q);
    if (c.delta) return params_from_delta(*c.delta);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  throw UsageError("one of --q or --delta is required");
}

BoundarySpec resolve_bc(const std::string& s) {
  try {
    return parse_boundary(s);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

HamiltonianHandle make_hamiltonian(int L, const BoundarySpec& bc, const AnisotropyParams& p) {
  if (std::holds_alternative<Periodic>(bc)) return HamiltonianHandle::ring(L, p);
  return HamiltonianHandle({1, L}, bc, p);
}

void check_L(int L, const BoundarySpec& bc) {
  const bool ring = std::holds_alternative<Periodic>(bc);
  if (L < (ring ? 3 : 1) || L > kMaxSites)
    throw UsageError("--L " + std::to_string(L) + " out of range (" + (ring ? "3" : "1") + ".." +
                     std::to_string(kMaxSites) + ")");
}

std::vector<int> sectors_for(const Common& c) {
  if (c.all_sectors) {
    std::vector<int> all(c.L + 1);
    for (int i = 0; i <= c.L; ++i) all[i] = i;
    return all;
  }
  if (c.n.empty()) throw UsageError("--n or --all-sectors is required");
  std::vector<int> ns = c.n == "all" ? parse_int_list("0.." + std::to_string(c.L)) : parse_int_list(c.n);
  for (int n : ns)
    if (n < 0 || n > c.L)
      throw UsageError("sector n=" + std::to_string(n) + " outside 0..L=" + std::to_string(c.L));
  return ns;
}

bool is_dense(const std::string& solver) {
  if (solver == "dense") return true;
  if (solver == "lanczos") return false;
  throw UsageError("--solver must be dense or lanczos");
}

void check_dense_cap(int L, int n) {
  const auto dim = sector_dimension(L, n);
  if (dim > dense_cap()) throw DenseCapExceeded(dim, dense_cap());
}

std::vector<double> lowest(const HamiltonianHandle& h, int L, int n, bool dense, int k, double tol,
                           std::uint64_t seed) {
  auto basis = make_basis({1, L}, n);
  const int dim = static_cast<int>(basis->dim());
  if (dense) {
    auto r = eig_dense(h, basis);
    if (k > 0 && k < dim) r.eigenvalues.resize(k);
    return r.eigenvalues;
  }
  LanczosOptions o;
  o.tol = tol;
  o.seed = seed;
  return eig_lowest(h, basis, std::min(k > 0 ? k : 5, dim), o).eigenvalues;
}

// ---- spectrum ----

int cmd_spectrum(const Common& c, std::ostream& out) {
  const auto bc = resolve_bc(c.bc);
  check_L(c.L, bc);
  const auto p = resolve_params(c);
  const bool dense = is_dense(c.solver);
  const auto ns = sectors_for(c);
  if (c.k < 0) throw UsageError("--k must be positive");
  if (dense)
    for (int n : ns) check_dense_cap(c.L, n);
  const auto h = make_hamiltonian(c.L, bc, p);
  std::ostringstream csv;
  csv << "sector_n,index,eigenvalue\n";
  for (int n : ns) {
    const auto ev = lowest(h, c.L, n, dense, c.k, c.tol, c.seed);
    for (std::size_t i = 0; i < ev.size(); ++i) csv << n << ',' << i + 1 << ',' << format_double(ev[i]) << '\n';
  }
  emit(c.out, csv.str(), out);
  return exit_ok;
}

// ---- verify ----

struct VerifyArgs {
  std::vector<std::string> checks;
  bool all = false;
  std::string profile = "quick";
  int l = 2;
  double lambda = -1.0;
  std::string state = "ground_state";
};

int cmd_verify(const Common& c, const VerifyArgs& v, std::ostream& out, std::ostream& err) {
  if (!v.all && v.checks.empty()) throw UsageError("give --check NAME or --all");
  if (v.profile != "quick" && v.profile != "full") throw UsageError("--profile must be quick or full");
  const auto& names = check_names();
  for (const auto& name : v.checks)
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      std::string list;
      for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
      throw UsageError("unknown check '" + name + "' (known: " + list + ")");
    }
  CheckArgs a;
  a.L = c.L;
  a.n = c.n.empty() ? -1 : to_int(c.n);
  if (c.q || c.delta) a.q = resolve_params(c).q;
  a.l = v.l;
  a.lambda = v.lambda;
  a.state = v.state;
  a.seed = c.seed;
  try {
    parse_state_source(a.state);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }

  std::vector<CheckReport> reports;
  if (v.all) reports = run_all_checks(v.profile == "quick");
  for (const auto& name : v.checks)
    for (auto& r : run_check(name, a)) reports.push_back(std::move(r));

  ordered_json arr = ordered_json::array();
  bool ok = true;
  for (const auto& r : reports) {
    arr.push_back(to_json(r));
    ok = ok && r.pass;
    err << (r.pass ? "PASS " : "FAIL ") << r.name << ' ' << r.params.dump() << '\n';
  }
  emit(c.out, arr.dump(2) + "\n", out);
  return ok ? exit_ok : exit_check_failed;
}

// ---- sweep ----

struct GridPoint {
  int L;
  int n;
  double q;
  std::string key;
};

// shortest round-trip form of q keeps keys readable
std::string sweep_key(int L, int n, double q, const std::string& bc, const std::string& solver) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, q);
  return std::to_string(L) + "/" + std::to_string(n) + "/" + std::string(buf, end) + "/" + bc + "/" + solver;
}

ordered_json sweep_record(const GridPoint& g, const BoundarySpec& bc, const Common& c, bool dense) {
  const auto p = params_from_q(g.q);
  const auto started = iso_now();
  const auto h = make_hamiltonian(g.L, bc, p);
  const int dim = static_cast<int>(sector_dimension(g.L, g.n));

  int band = 1;
  std::optional<double> ref;
  if (std::holds_alternative<Periodic>(bc)) {
    band = std::min(dim, g.L);
    ref = 2 * p.a_field;
  } else if (std::get<OpenFields>(bc) == OpenFields{+1, +1}) {
    band = std::min(dim, g.L - g.n + 1);
    ref = p.a_field;
  }
  const int need = std::min(dim, std::max(c.k, band + 1));
  const auto ev = lowest(h, g.L, g.n, dense, need, c.tol, c.seed);
  const double center = ref ? *ref : ev.front();
  double width = 0.0;
  for (int i = 0; i < band; ++i) width = std::max(width, std::abs(ev[i] - center));

  ordered_json rec;
  rec["key"] = g.key;
  rec["L"] = g.L;
  rec["n"] = g.n;
  rec["q"] = g.q;
  rec["delta"] = p.delta;
  rec["bc"] = c.bc;
  rec["solver"] = c.solver;
  rec["k"] = c.k > 0 ? std::min(c.k, dim) : need;
  rec["tol"] = c.tol;
  rec["seed"] = c.seed;
  const int keep = c.k > 0 ? std::min(c.k, static_cast<int>(ev.size())) : static_cast<int>(ev.size());
  rec["eigenvalues"] = std::vector<double>(ev.begin(), ev.begin() + keep);
  rec["band_size"] = band;
  rec["band_center"] = center;
  rec["band_width"] = width;
  if (static_cast<int>(ev.size()) > band)
    rec["gap"] = ev[band] - ev[band - 1];
  else
    rec["gap"] = nullptr;
  rec["started"] = started;
  rec["finished"] = iso_now();
  rec["version"] = kVersionTag;
  return rec;
}

int cmd_sweep(const Common& c, const std::string& L_list, const std::string& q_list, const std::string& delta_list,
              int workers, std::ostream& out, std::ostream& err) {
  if (c.out.empty()) throw UsageError("sweep needs --out");
  if (workers < 1) throw UsageError("--workers must be >= 1");
  if (c.k < 0) throw UsageError("--k must be positive");
  const auto bc = resolve_bc(c.bc);
  const bool dense = is_dense(c.solver);
  if (L_list.empty()) throw UsageError("--L is required");
  if (c.n.empty()) throw UsageError("--n is required");
  if (q_list.empty() == delta_list.empty()) throw UsageError("give exactly one of --q or --delta");

  std::vector<double> qs;
  try {
    if (!q_list.empty())
      for (double q : parse_double_list(q_list)) qs.push_back(params_from_q(q).q);
    else
      for (double d : parse_double_list(delta_list)) qs.push_back(params_from_delta(d).q);
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }

  // validate every point before any work
  std::vector<GridPoint> grid;
  for (int L : parse_int_list(L_list)) {
    check_L(L, bc);
    const auto ns = c.n == "all" ? parse_int_list("0.." + std::to_string(L)) : parse_int_list(c.n);
    for (int n : ns) {
      if (n < 0 || n > L)
        throw UsageError("grid point L=" + std::to_string(L) + " n=" + std::to_string(n) + " has n outside 0..L");
      if (dense) check_dense_cap(L, n);
      for (double q : qs) grid.push_back({L, n, q, sweep_key(L, n, q, c.bc, c.solver)});
    }
  }

  // existing records, in file order
  std::vector<ordered_json> records;
  std::map<std::string, std::size_t> index;
  if (fs::exists(c.out)) {
    std::ifstream f(c.out);
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
      ++lineno;
      if (trim(line).empty()) continue;
      ordered_json rec;
      try {
        rec = ordered_json::parse(line);
      } catch (const std::exception&) {
        err << "warning: " << c.out << ":" << lineno << " is not valid JSON, dropped\n";
        continue;
      }
      if (!rec.contains("key") || !rec["key"].is_string()) continue;
      const auto key = rec["key"].get<std::string>();
      if (auto it = index.find(key); it != index.end())
        records[it->second] = std::move(rec);
      else {
        index[key] = records.size();
        records.push_back(std::move(rec));
      }
    }
  }
  if (!path_writable(c.out)) throw UsageError("output path '" + c.out + "' is not writable");

  std::vector<GridPoint> todo;
  for (const auto& g : grid)
    if (c.force || !index.count(g.key)) todo.push_back(g);
  // duplicates in the grid
  std::sort(todo.begin(), todo.end(), [](const GridPoint& a, const GridPoint& b) { return a.key < b.key; });
  todo.erase(std::unique(todo.begin(), todo.end(), [](const GridPoint& a, const GridPoint& b) { return a.key == b.key; }),
             todo.end());
  std::stable_sort(todo.begin(), todo.end(), [](const GridPoint& a, const GridPoint& b) {
    return std::tie(a.L, a.n, a.q) < std::tie(b.L, b.n, b.q);
  });

  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::vector<std::string> failures;
  auto flush_locked = [&] {
    std::string content;
    for (const auto& r : records) content += r.dump() + "\n";
    write_atomic(c.out, content);
  };
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < todo.size();) {
      const auto& g = todo[i];
      try {
        auto rec = sweep_record(g, bc, c, dense);
        std::lock_guard lk(mu);
        if (auto it = index.find(g.key); it != index.end())
          records[it->second] = std::move(rec);
        else {
          index[g.key] = records.size();
          records.push_back(std::move(rec));
        }
        flush_locked();
      } catch (const std::exception& e) {
        std::lock_guard lk(mu);
        failures.push_back(g.key + ": " + e.what());
      }
    }
  };
  const int width = std::min<int>(workers, std::max<std::size_t>(todo.size(), 1));
  std::vector<std::thread> pool;
  for (int w = 1; w < width; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  err << "sweep: " << todo.size() - failures.size() << " computed, " << grid.size() - todo.size()
      << " already present\n";
  for (const auto& f : failures) err << "error: " << f << '\n';
  out << std::flush;
  return failures.empty() ? exit_ok : exit_check_failed;
}

// ---- state / overlap ----

int cmd_state(const Common& c, const std::string& kind, std::optional<int> x, bool normalize, std::ostream& out) {
  const auto p = resolve_params(c);
  if (c.n.empty()) throw UsageError("--n is required");
  const int n = to_int(c.n);
  if (c.L < 1 || c.L > kMaxSites) throw UsageError("--L out of range");
  if (n < 0 || n > c.L) throw UsageError("--n outside 0..L");
  if (sector_dimension(c.L, n) > dense_cap()) throw DenseCapExceeded(sector_dimension(c.L, n), dense_cap());

  SectorVector v;
  if (kind == "kink" || kind == "antikink") {
    v = build_kink({1, c.L}, n, kind == "kink" ? KinkDirection::kink : KinkDirection::antikink, p.q);
  } else if (kind == "droplet") {
    const auto [lo, hi] = droplet_window(c.L, n);
    const int cut = x.value_or(std::clamp(c.L / 2, lo, hi));
    if (cut < lo || cut > hi)
      throw UsageError("--x must lie in " + std::to_string(lo) + ".." + std::to_string(hi));
    v = build_droplet({c.L, n, cut, p});
  } else if (kind == "ring") {
    if (c.L < 3) throw UsageError("ring needs L >= 3");
    v = build_ring_droplet({c.L, n, x.value_or(0), p});
  } else {
    throw UsageError("--kind must be kink, antikink, droplet or ring");
  }
  const double scale = normalize ? v.norm() : 1.0;
  std::ostringstream csv;
  csv << "index,configuration,amplitude\n";
  for (std::size_t i = 0; i < v.basis->dim(); ++i)
    csv << i << ',' << SpinConfiguration{v.basis->interval(), v.basis->mask(i)}.to_string() << ','
        << format_double(v.amplitudes[static_cast<Eigen::Index>(i)] / scale) << '\n';
  emit(c.out, csv.str(), out);
  return exit_ok;
}

int cmd_overlap(const Common& c, std::ostream& out) {
  const auto p = resolve_params(c);
  if (c.n.empty()) throw UsageError("--n is required");
  const int n = to_int(c.n);
  const auto bc = resolve_bc(c.bc);
  check_L(c.L, bc);
  if (n < 0 || n > c.L) throw UsageError("--n outside 0..L");
  if (sector_dimension(c.L, n) > dense_cap()) throw DenseCapExceeded(sector_dimension(c.L, n), dense_cap());
  std::ostringstream csv;
  if (std::holds_alternative<Periodic>(bc)) {
    if (n < 1 || n > c.L - 1) throw UsageError("ring overlaps need 1 <= n <= L-1");
    csv << "x,direct,closed\n";
    for (int x = 0; x <= c.L / 2; ++x)
      csv << x << ',' << format_double(ring_translation_overlap(c.L, n, x, p)) << ','
          << format_double(ring_translation_overlap_closed(c.L, n, x, p.q)) << '\n';
  } else {
    if (std::get<OpenFields>(bc) != OpenFields{+1, +1}) throw UsageError("overlap tables are for --bc ++ or ring");
    const auto [lo, hi] = droplet_window(c.L, n);
    csv << "x,y,direct,closed\n";
    for (int x = lo; x <= hi; ++x)
      for (int y = x; y <= hi; ++y)
        csv << x << ',' << y << ',' << format_double(droplet_overlap({c.L, n, x, p}, {c.L, n, y, p})) << ','
            << format_double(droplet_overlap_closed(c.L, n, x, y, p.q)) << '\n';
  }
  emit(c.out, csv.str(), out);
  return exit_ok;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, p);
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (const auto& part : split(text, ',')) {
    if (part.empty()) throw UsageError("empty entry in list '" + text + "'");
    if (auto dots = part.find(".."); dots != std::string::npos) {
      const int a = to_int(part.substr(0, dots));
      const int b = to_int(part.substr(dots + 2));
      if (b < a) throw UsageError("empty range '" + part + "'");
      for (int i = a; i <= b; ++i) out.push_back(i);
    } else {
      out.push_back(to_int(part));
    }
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) out.push_back(to_double(part));
  if (out.empty()) throw UsageError("empty list");
  return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"XXZ droplet spectra and verification", "xxzdrop"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersionTag);

  Common c;
  VerifyArgs v;
  std::string L_list, q_list, delta_list, kind = "droplet";
  std::optional<int> x;
  int workers = 1;
  bool normalize = false;

  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues per sector as CSV");
  spectrum->add_option("--L", c.L, "chain length")->required();
  spectrum->add_option("--n", c.n, "sector (down spins); list or range allowed");
  spectrum->add_flag("--all-sectors", c.all_sectors, "n = 0..L");
  add_params(spectrum, c);
  spectrum->add_option("--bc", c.bc, "+-, -+, ++, --, 00, ring");
  spectrum->add_option("--solver", c.solver, "dense or lanczos");
  spectrum->add_option("--k", c.k, "eigenvalues per sector (lanczos default 5, dense default all)");
  spectrum->add_option("--tol", c.tol);
  spectrum->add_option("--seed", c.seed);
  add_output(spectrum, c);

  auto* verify = app.add_subcommand("verify", "run named checks, JSON report");
  verify->add_option("--check", v.checks, "check name, repeatable");
  verify->add_flag("--all", v.all, "desk-scale suite");
  verify->add_option("--profile", v.profile, "quick or full");
  verify->add_option("--L", c.L);
  verify->add_option("--n", c.n);
  add_params(verify, c);
  verify->add_option("--l", v.l, "sub-interval length");
  verify->add_option("--lambda", v.lambda);
  verify->add_option("--state", v.state, "ground_state, droplet, random, all_up");
  verify->add_option("--seed", c.seed);
  add_output(verify, c);

  auto* sweep = app.add_subcommand("sweep", "persisted parameter sweep, JSON lines");
  sweep->add_option("--L", L_list, "list, e.g. 8,10,12 or 8..12")->required();
  sweep->add_option("--n", c.n, "list, range or 'all'")->required();
  auto* sq = sweep->add_option("--q", q_list, "list of q");
  auto* sd = sweep->add_option("--delta", delta_list, "list of Delta");
  sq->excludes(sd);
  sweep->add_option("--bc", c.bc);
  sweep->add_option("--solver", c.solver);
  sweep->add_option("--k", c.k, "eigenvalues kept per record (default band size + 1)");
  sweep->add_option("--tol", c.tol);
  sweep->add_option("--seed", c.seed);
  sweep->add_option("--out", c.out)->required();
  sweep->add_flag("--force", c.force, "recompute existing keys");
  sweep->add_option("--workers", workers);

  auto* state = app.add_subcommand("state", "amplitudes of a kink, droplet or ring state as CSV");
  state->add_option("--kind", kind, "kink, antikink, droplet, ring");
  state->add_option("--L", c.L)->required();
  state->add_option("--n", c.n)->required();
  state->add_option("--x", x, "droplet cut or ring shift");
  add_params(state, c);
  state->add_flag("--normalize", normalize);
  add_output(state, c);

  auto* overlap = app.add_subcommand("overlap", "droplet overlap table as CSV");
  overlap->add_option("--L", c.L)->required();
  overlap->add_option("--n", c.n)->required();
  add_params(overlap, c);
  overlap->add_option("--bc", c.bc, "++ or ring");
  add_output(overlap, c);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForVersion&) {
    out << kVersionTag << '\n';
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    for (auto* sub : app.get_subcommands())
      if (sub->parsed()) {
        err << sub->help();
        return exit_usage;
      }
    err << app.help();
    return exit_usage;
  }

  try {
    if (spectrum->parsed()) return cmd_spectrum(c, out);
    if (verify->parsed()) return cmd_verify(c, v, out, err);
    if (sweep->parsed()) return cmd_sweep(c, L_list, q_list, delta_list, workers, out, err);
    if (state->parsed()) return cmd_state(c, kind, x, normalize, out);
    if (overlap->parsed()) return cmd_overlap(c, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const DenseCapExceeded& e) {
    err << "error: " << e.what() << " (raise XXZ_DENSE_CAP or use --solver lanczos)\n";
    return exit_usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_check_failed;
  }
  return exit_usage;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace xxz
