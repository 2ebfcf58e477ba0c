#include <chrono>
#include <map>
#include <cstdio>
#include <numbers>
#include <string>

#include "kernel_checks.hpp"
#include "xvem/experiments.hpp"

using namespace xvem;

namespace {

int failures = 0;
std::FILE* log_file = nullptr;

void emit(const std::string& line) {
  std::printf("%s\n", line.c_str());
  std::fflush(stdout);
  if (log_file) {
    std::fprintf(log_file, "%s\n", line.c_str());
    std::fflush(log_file);
  }
}

void report(int id, bool ok, const std::string& name, const std::string& detail) {
  failures += !ok;
  emit(std::string(ok ? "[PASS]" : "[FAIL]") + " criterion " + std::to_string(id) + ": " + name + " -- " + detail);
}

std::string fmt(const char* f, auto... args) {
  char buf[1024];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const std::vector<int> quad_sizes{10, 20, 40, 80};

ConvergenceStudy study(EnrichmentMode mode, double alpha, double E = 1e5) {
  BenchmarkOptions o;
  o.enrichment = mode;
  o.radius = 0.5;
  o.kernel.alpha = alpha;
  o.material.E = E;
  o.compute_sif = false;
  return run_convergence(o, quad_sizes);
}

void criterion1() {
  auto q = run_extended_patch_test(MeshKind::quad);
  auto p = run_extended_patch_test(MeshKind::poly);
  const bool ok = q.rel_error <= 1e-8 && p.rel_error <= 1e-6 && q.wall_time < 10 && p.wall_time < 10;
  report(1, ok, "extended patch test",
         fmt("10x10 quads err %.2e (<= 1e-8, %.2fs); %d polygons err %.2e (<= 1e-6, %.2fs)", q.rel_error, q.wall_time,
             p.n, p.rel_error, p.wall_time));
}

void criterion2() {
  auto r = run_discontinuous_patch_test();
  const bool ok = r.rel_error <= 1e-10 && r.max_dof_error <= 1e-8 && r.wall_time < 5;
  report(2, ok, "discontinuous patch test",
         fmt("energy err %.2e (<= 1e-10), max DOF deviation %.2e (<= 1e-8), %.2fs", r.rel_error, r.max_dof_error,
             r.wall_time));
}

void criterion3_4() {
  auto t0 = std::chrono::steady_clock::now();
  auto vem = study(EnrichmentMode::none, 1.0);
  auto topo = study(EnrichmentMode::topological, 1.0);
  BenchmarkOptions o;
  o.kernel.alpha = 1.0;
  o.radius = 0.5;
  o.extra_sif_radii = {0.3, 0.5};
  std::vector<BenchmarkRun> geom_runs;
  ConvergenceStudy geom;
  std::vector<double> h, e;
  for (int n : quad_sizes) {
    o.n = n;
    geom_runs.push_back(run_benchmark(o));
    geom.rows.push_back(geom_runs.back().result);
    h.push_back(geom.rows.back().h);
    e.push_back(geom.rows.back().rel_error);
  }
  geom.slope = fit_slope(h, e);
  const double total = seconds_since(t0);

  bool below = true;
  std::string errs;
  for (std::size_t i = 0; i < quad_sizes.size(); ++i) {
    below = below && topo.rows[i].rel_error < vem.rows[i].rel_error && geom.rows[i].rel_error < vem.rows[i].rel_error;
    errs += fmt(" n=%d vem %.2e topo %.2e geom %.2e;", quad_sizes[i], vem.rows[i].rel_error, topo.rows[i].rel_error,
                geom.rows[i].rel_error);
  }
  const bool topo_ok = std::abs(topo.slope - 1.0) <= 0.15;
  const bool geom_ok = std::abs(geom.slope - 2.0) <= 0.2;
  report(3, topo_ok && geom_ok && below && total < 300, "convergence rates on quads",
         fmt("slopes topo %.3f (1.0 +- 0.15) %s, geom %.3f (2.0 +- 0.2) %s, vem %.3f; X-VEM below VEM everywhere: %s; "
             "%.1fs;",
             topo.slope, topo_ok ? "ok" : "out", geom.slope, geom_ok ? "ok" : "out", vem.slope, below ? "yes" : "no",
             total) +
             errs);

  const auto& fine = geom_runs.back();
  double kmin_I = fine.result.K_I, kmax_I = kmin_I, kmin_II = fine.result.K_II, kmax_II = kmin_II;
  for (const auto& s : fine.extra_sifs) {
    kmin_I = std::min(kmin_I, s.K_I);
    kmax_I = std::max(kmax_I, s.K_I);
    kmin_II = std::min(kmin_II, s.K_II);
    kmax_II = std::max(kmax_II, s.K_II);
  }
  const double dI = std::abs(fine.result.K_I - 1.0), dII = std::abs(fine.result.K_II - 1.0);
  const double sweep = std::max((kmax_I - kmin_I) / fine.result.K_I, (kmax_II - kmin_II) / fine.result.K_II);
  report(4, dI <= 0.01 && dII <= 0.01 && sweep <= 0.02, "SIF accuracy",
         fmt("80x80 geom r_d=0.4: K_I %.5f, K_II %.5f (within 1%% of 1); r_d sweep 0.3/0.4/0.5 spread %.3f%% (<= 2%%)",
             fine.result.K_I, fine.result.K_II, 100 * sweep));
}

void criterion5() {
  struct Row {
    double beta, K_I, K_II;
    const char* name;
  };
  const Row rows[] = {{std::numbers::pi / 12, 2.9351, 0.4631, "pi/12"},
                      {std::numbers::pi / 6, 2.3652, 0.7607, "pi/6"},
                      {std::numbers::pi / 4, 1.6418, 0.8333, "pi/4"}};
  bool ok = true;
  std::string detail;
  for (const auto& row : rows) {
    InclinedOptions o;
    o.beta = row.beta;
    o.kernel.alpha = 0.01;
    auto r = run_inclined(o).result;
    const double eI = (r.K_I - row.K_I) / row.K_I, eII = (r.K_II - row.K_II) / row.K_II;
    ok = ok && std::abs(eI) <= 0.005 && std::abs(eII) <= 0.005 && r.wall_time < 120;
    detail += fmt(" %s: K_I %.4f (%+.2f%%), K_II %.4f (%+.2f%%), %.1fs;", row.name, r.K_I, 100 * eI, r.K_II,
                  100 * eII, r.wall_time);
  }
  report(5, ok, "inclined edge crack table (60x120, alpha 0.01, within 0.5%)", detail);
}

void criterion6() {
  std::mt19937_64 rng(20240611);
  double gbd = 0, pid = 0, rows = 0, asym = 0, min_eig = 0, oracle = 0, slowest = 0;
  int n_poly = 0, n_cases = 0, zero_ok = 0, zero_bad_plain = 0;
  std::map<std::string, std::pair<int, int>> per_kind;  // matches, total
  std::string worst_zero;
  for (int t = 0; t < 200; ++t) {
    ++n_poly;
    for (const auto& c : fixtures::kernel_cases(rng)) {
      ++n_cases;
      gbd = std::max(gbd, c.gbd);
      pid = std::max(pid, c.pid);
      rows = std::max(rows, c.rows);
      asym = std::max(asym, c.asym);
      min_eig = std::min(min_eig, c.min_eig);
      oracle = std::max(oracle, c.oracle);
      slowest = std::max(slowest, c.seconds);
      const bool z = c.zero_modes == c.expected_zero_modes;
      zero_ok += z;
      auto& pk = per_kind[c.kind];
      pk.first += z;
      ++pk.second;
      if (!z && worst_zero.empty())
        worst_zero = fmt(" (e.g. %s kernel: %d zero modes, expected %d)", c.kind.c_str(), c.zero_modes,
                         c.expected_zero_modes);
      zero_bad_plain += !z && (c.kind == "plain" || c.kind == "cut");
    }
  }
  const bool ok = gbd <= 1e-10 && pid <= 1e-10 && rows == 0.0 && asym <= 1e-12 && min_eig >= -1e-10 &&
                  oracle <= 1e-12 && slowest < 1.0 && zero_ok == n_cases;
  std::string counts;
  for (const auto& [k, v] : per_kind) counts += fmt(" %s %d/%d", k.c_str(), v.first, v.second);
  report(6, ok, "kernel identities on 200 random polygons",
         fmt("|G-BD| %.1e, |PiD-I| %.1e, rows 1-3 max %.1e, asym %.1e, min eig %.1e, oracle %.1e, slowest %.3fs; "
             "exact zero-mode count:",
             gbd, pid, rows, asym, min_eig, oracle, slowest) +
             counts + worst_zero);
}

void criterion7() {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail = " slopes:";
  for (double alpha : {1e-3, 1e-2, 1e-1, 1.0, 10.0}) {
    auto s = study(EnrichmentMode::geometric, alpha);
    ok = ok && std::abs(s.slope - 2.0) <= 0.3;
    detail += fmt(" alpha=%g %.3f", alpha, s.slope);
  }
  std::vector<ConvergenceStudy> curves;
  for (double E : {1e3, 1e5, 1e7}) curves.push_back(study(EnrichmentMode::geometric, 0.01, E));
  double spread = 0.0;
  for (std::size_t i = 0; i < quad_sizes.size(); ++i) {
    double lo = 1e300, hi = 0.0;
    for (const auto& c : curves) {
      lo = std::min(lo, c.rows[i].rel_error);
      hi = std::max(hi, c.rows[i].rel_error);
    }
    spread = std::max(spread, (hi - lo) / lo);
  }
  ok = ok && spread <= 0.05;
  report(7, ok, "alpha robustness and modulus invariance",
         fmt("E in {1e3,1e5,1e7} at alpha 0.01: max relative spread %.2e (<= 5%%);", spread) + detail +
             fmt(" (2.0 +- 0.3); %.1fs", seconds_since(t0)));
}

}  // namespace

// Optional argument: a file that receives a copy of the report.
int main(int argc, char** argv) {
  if (argc > 1) log_file = std::fopen(argv[1], "w");
  criterion1();
  criterion2();
  criterion3_4();
  criterion5();
  criterion6();
  criterion7();
  emit(std::to_string(failures) + " of 7 criteria failed");
  if (log_file) std::fclose(log_file);
  return 0;
}
