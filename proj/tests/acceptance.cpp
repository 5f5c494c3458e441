// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Every simulation uses n = 2001 nodes, t_end = 2 and the automatic domain width.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "degenwave/degenwave.hpp"
#include "degenwave/harness.hpp"

using namespace degenwave;
namespace dh = degenwave::harness;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::size_t worker_count() { return std::max(2u, std::thread::hardware_concurrency()); }

const std::vector<double> kExponents{2.0, 3.0, 5.0};

dh::ExperimentConfig corpus_config(const std::string& family, double s, double delta) {
  dh::ExperimentConfig cfg;
  cfg.s = s;
  cfg.data.family = FamilySpec{family, {}};
  cfg.delta = delta;
  cfg.t_end = 2.0;
  cfg.grid.n = 2001;
  cfg.snapshot_count = 81;
  cfg.workers = worker_count();
  return cfg;
}

struct CorpusRun {
  std::string family;
  double s = 0.0;
  double delta = 0.0;
  dh::Simulation sim;
  double seconds = 0.0;
};

// every corpus member (family x s x delta) run once, shared by criteria 2-6
std::vector<CorpusRun> run_corpus() {
  std::vector<std::tuple<std::string, double, double>> jobs;
  for (const auto& f : family_names()) {
    for (double s : kExponents) {
      for (double d : {0.2, 0.1}) jobs.emplace_back(f, s, d);
    }
  }
  return dh::parallel_map<CorpusRun>(jobs.size(), worker_count(), [&](std::size_t i) {
    const auto& [family, s, delta] = jobs[i];
    const auto start = std::chrono::steady_clock::now();
    const auto cfg = corpus_config(family, s, delta);
    const ModelParams p = params_new(s);
    const GridSpec grid = dh::resolve_grid(cfg, p, delta);
    const InitialData data = dh::build_initial_data(cfg, grid, p);
    CorpusRun r{family, s, delta, dh::simulate(cfg, p, grid, data, delta, cfg.epsilon_for(delta))};
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  });
}

const Verdict* find(const dh::Simulation& sim, const std::string& name) {
  for (const auto& v : sim.verdicts) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

std::string label(const CorpusRun& r) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s s=%g delta=%g", r.family.c_str(), r.s, r.delta);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome criterion_round_trip() {
  // Errors are measured in the (u, v^theta) coordinates: v = (v^theta)^{1/theta}
  // has an unbounded derivative at the vacuum line, so plain relative error in v
  // reflects conditioning, not the transforms.
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> uv(0.0, 10.0), uu(-5.0, 5.0), us(1.05, 6.0);
  std::bernoulli_distribution vacuum(0.05);
  double worst = 0.0;
  for (int field = 0; field < 1000; ++field) {
    const ModelParams p = params_new(us(rng));
    const std::size_t n = 64;
    ConservedField c{std::vector<double>(n), std::vector<double>(n), 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      c.v[i] = vacuum(rng) ? 0.0 : uv(rng);
      c.u[i] = uu(rng);
    }
    const RiemannField r = riemann_from_conserved(c, p);
    const ConservedField back = conserved_from_riemann(r, p);
    const RiemannField again = riemann_from_conserved(back, p);
    for (std::size_t i = 0; i < n; ++i) {
      const double vt = pow_nonneg(c.v[i], p.theta);
      const double scale = std::max({std::abs(c.u[i]), vt, 1e-300});
      worst = std::max(worst, std::abs(pow_nonneg(back.v[i], p.theta) - vt) / scale);
      worst = std::max(worst, std::abs(back.u[i] - c.u[i]) / scale);
      const double rs = std::max({std::abs(r.w[i]), std::abs(r.z[i]), 1e-300});
      worst = std::max(worst, std::abs(again.w[i] - r.w[i]) / rs);
      worst = std::max(worst, std::abs(again.z[i] - r.z[i]) / rs);
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  char buf[160];
  std::snprintf(buf, sizeof buf, "1000 fields, max relative error %.3e (limit 1e-12), %.3f s (limit 1 s)", worst, secs);
  return {worst <= 1e-12 && secs < 1.0, buf};
}

Outcome criterion_invariant_region(const std::vector<CorpusRun>& corpus) {
  double worst_ratio = 0.0;
  double slowest = 0.0;
  std::string failures;
  for (const auto& r : corpus) {
    slowest = std::max(slowest, r.seconds);
    const Verdict* v = find(r.sim, monitor_names::kInvariantRegion);
    if (!v || !v->evaluated || !v->passed || r.sim.result.report.aborted || !r.sim.admissibility.admissible) {
      failures += " [" + label(r) + "]";
      continue;
    }
    worst_ratio = std::max(worst_ratio, v->worst / v->tolerance);
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "%zu runs (5 families x s{2,3,5} x delta{0.2,0.1}), worst violation/tol %.2e, slowest run %.2f s",
                corpus.size(), worst_ratio, slowest);
  return {failures.empty() && slowest <= 60.0, buf + (failures.empty() ? "" : "; failed:" + failures)};
}

Outcome criterion_monotonicity(const std::vector<CorpusRun>& corpus) {
  double worst_slope = 0.0;
  double worst_v = 0.0;
  std::string failures;
  for (const auto& r : corpus) {
    const Verdict* m = find(r.sim, monitor_names::kMonotonicity);
    const Verdict* v = find(r.sim, monitor_names::kVDecreasing);
    if (!m || !v || !m->passed || !v->passed) failures += " [" + label(r) + "]";
    if (m) worst_slope = std::max(worst_slope, m->worst / m->tolerance);
    if (v) worst_v = std::max(worst_v, v->worst);
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "worst slope/tol %.2e, worst v increase %.2e (limit 1e-10)", worst_slope, worst_v);
  return {failures.empty(), buf + (failures.empty() ? "" : "; failed:" + failures)};
}

Outcome criterion_l1(const std::vector<CorpusRun>& corpus) {
  double worst_identity = 0.0;
  std::string failures;
  for (const auto& r : corpus) {
    const auto& l1 = r.sim.l1;
    if (!l1 || !l1->space.passed || !l1->time.passed || l1->identity_relative_error > 1e-6) {
      failures += " [" + label(r) + "]";
    }
    if (l1 && r.family != "constant") worst_identity = std::max(worst_identity, l1->identity_relative_error);
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "space and time inequalities hold; identity max relative error %.2e (limit 1e-6)",
                worst_identity);
  return {failures.empty(), buf + (failures.empty() ? "" : "; failed:" + failures)};
}

Outcome criterion_comparison(const std::vector<CorpusRun>& corpus) {
  double worst_ratio = 0.0;
  std::string failures;
  for (const auto& r : corpus) {
    const Verdict* v = find(r.sim, monitor_names::kComparison);
    if (!v || !v->passed) failures += " [" + label(r) + "]";
    if (v) worst_ratio = std::max(worst_ratio, v->worst / v->tolerance);
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "all four bounds at every snapshot, worst violation/tol %.2e", worst_ratio);
  return {failures.empty(), buf + (failures.empty() ? "" : "; failed:" + failures)};
}

Outcome criterion_f_identity(const std::vector<CorpusRun>& corpus) {
  double worst_ratio = 0.0;
  std::size_t checked = 0;
  std::string failures;
  for (const auto& r : corpus) {
    if (r.sim.threshold.classification != Classification::kExistence) continue;
    ++checked;
    const Verdict* v = find(r.sim, monitor_names::kFIdentity);
    if (!v || !v->passed) failures += " [" + label(r) + "]";
    if (v) worst_ratio = std::max(worst_ratio, v->worst / v->tolerance);
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu T>=0 runs, worst |F - (u_- - u_+) t| / (5 (dx + eps) scale) = %.2e", checked,
                worst_ratio);
  return {failures.empty() && checked > 0, buf + (failures.empty() ? "" : "; failed:" + failures)};
}

Outcome criterion_nonexistence() {
  // gauss_bump with level 1 and amplitude -4 at s = 3: T = -4 + 1 + 1 = -2.
  const double s = 3.0;
  const double cut = 1.5;
  const ModelParams p = params_new(s);
  dh::ExperimentConfig cfg = corpus_config("gauss_bump", s, 0.2);
  cfg.data.family.params["amplitude"] = -4.0;
  cfg.f_cut = cut;
  const std::vector<double> deltas{0.2, 0.1, 0.05};
  const GridSpec grid = dh::resolve_grid(cfg, p, deltas.front());
  const InitialData data = dh::build_initial_data(cfg, grid, p);

  // limiting crossing time from the unmollified data
  const RiemannField raw = raw_riemann(data, p);
  const double gap_raw = interpolate(raw.w, grid, -cut) - interpolate(raw.z, grid, cut);
  const double c_m_raw = 2.0 * cut * *std::max_element(data.v0.begin(), data.v0.end());
  const double t_star_raw = c_m_raw / gap_raw;

  auto sims = dh::parallel_map<dh::Simulation>(deltas.size(), worker_count(), [&](std::size_t i) {
    return dh::simulate(cfg, p, grid, data, deltas[i], default_epsilon(deltas[i]));
  });
  std::vector<double> errors;
  bool crossings_match = true;
  bool degeneracy = true;
  std::string line;
  for (std::size_t i = 0; i < sims.size(); ++i) {
    const auto& f = sims[i].f;
    if (!f || !f->t_star) {
      crossings_match = false;
      errors.push_back(INFINITY);
      continue;
    }
    errors.push_back(std::abs(*f->t_star - t_star_raw) / t_star_raw);
    if (*f->t_star < cfg.t_end && (!f->crossing || std::abs(*f->crossing - *f->t_star) > 1e-9)) crossings_match = false;
    const auto& ev = sims[i].result.report.degeneracy;
    if (!ev || !(ev->t < cfg.t_end)) degeneracy = false;
    char buf[120];
    std::snprintf(buf, sizeof buf, " delta=%g: t*=%.4f (%.1f%%), degeneracy t=%.3f;", deltas[i], *f->t_star,
                  100.0 * errors.back(), ev ? ev->t : NAN);
    line += buf;
  }
  const bool converging = std::is_sorted(errors.rbegin(), errors.rend()) && errors.back() <= 0.10;

  // classification table from the threshold sweep flips exactly where T changes sign
  dh::ExperimentConfig sweep = corpus_config("gauss_bump", s, 0.1);
  sweep.f_cut = cut;
  const std::vector<double> amplitudes{-1.0, -1.5, -1.9, -2.0, -2.1, -2.5, -3.0, -4.0};
  bool flips_ok = true;
  Classification prev = Classification::kExistence;
  double prev_t = 0.0;
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    dh::ExperimentConfig c = sweep;
    c.data.family.params["amplitude"] = amplitudes[i];
    const InitialData d = dh::build_initial_data(c, grid, p);
    const ThresholdReport th = threshold(d, p);
    if (i > 0 && ((prev != th.classification) != ((prev_t >= 0.0) != (th.T >= 0.0)))) flips_ok = false;
    prev = th.classification;
    prev_t = th.T;
  }
  char head[200];
  std::snprintf(head, sizeof head, "T=-2, M=%.1f, limiting t*=%.4f;", cut, t_star_raw);
  return {converging && crossings_match && degeneracy && flips_ok,
          std::string(head) + line + (flips_ok ? " classification flips at sign(T)" : " classification flip mismatch")};
}

Outcome criterion_entropy() {
  // frozen mpmath values of B(1/2, lambda + 1)
  const std::vector<std::pair<double, double>> oracle{
      {2.0, 7.28595194366274}, {3.0, 5.24411510858424}, {5.0, 4.20654631597636}};
  double d0_err = 0.0;
  for (const auto& [s, beta] : oracle) {
    const ModelParams p = params_new(s);
    d0_err = std::max(d0_err, std::abs(d0(p, make_jacobi_quadrature(p)) - beta));
  }
  dh::EntropyConfig e;
  e.s_values = kExponents;
  e.points = 20;
  e.v_min = 0.2;
  const dh::EntropyStudy st = dh::entropy_study(e);
  // the oracle table carries 15 significant digits
  const bool d0_ok = d0_err <= 1e-10 && st.d0_max_error <= 1e-10;
  const bool order_ok = st.ratio_min >= 3.5 && st.ratio_max <= 4.5;
  char buf[240];
  std::snprintf(buf, sizeof buf,
                "d0 max error %.2e (limit 1e-10); %zu ratios in [%.4f, %.4f] (limit [3.5, 4.5]), %zu at rounding floor",
                std::max(d0_err, st.d0_max_error), st.ratios, st.ratio_min, st.ratio_max, st.excluded);
  return {d0_ok && order_ok, buf};
}

Outcome criterion_weak_residual() {
  std::string failures;
  std::string summary;
  double worst_over_floor = 0.0;
  struct Job {
    std::string family;
    double s;
  };
  std::vector<Job> jobs;
  for (const auto& f : family_names()) {
    for (double s : kExponents) jobs.push_back({f, s});
  }
  auto tables = dh::parallel_map<dh::ConvergenceTable>(jobs.size(), worker_count(), [&](std::size_t i) {
    dh::ExperimentConfig cfg = corpus_config(jobs[i].family, jobs[i].s, 0.2);
    cfg.sweep.deltas = {0.2, 0.1, 0.05};
    cfg.workers = 1;
    const ModelParams p = params_new(jobs[i].s);
    const GridSpec grid = dh::resolve_grid(cfg, p, cfg.sweep.deltas.front());
    return dh::converge_sweep(cfg, p, grid);
  });
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& t = tables[i];
    const bool constant = jobs[i].family == "constant";
    // constant data sit at the floor for every delta; there is nothing to decrease
    const bool decreasing = constant || t.residual_decreasing;
    if (!decreasing || !t.floor_criterion) {
      char buf[200];
      std::snprintf(buf, sizeof buf, " [%s s=%g: %.2e > %.2e > %.2e, floor %.2e, final/floor %.1f]",
                    jobs[i].family.c_str(), jobs[i].s, t.residuals[0], t.residuals[1], t.residuals[2], t.floor,
                    t.final_over_floor);
      failures += buf;
    }
    worst_over_floor = std::max(worst_over_floor, t.final_over_floor);
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "%zu sweeps delta{0.2,0.1,0.05}, dx ~ delta; worst final/floor %.2f (limit 10)",
                jobs.size(), worst_over_floor);
  return {failures.empty(), buf + (failures.empty() ? "" : "; failed:" + failures)};
}

Outcome criterion_negative_controls() {
  struct Control {
    std::string name;
    std::string kind;
    double amplitude;
    double center;
    std::string monitor;
  };
  const std::vector<Control> controls{
      {"z0 below c0+delta", "shift_z", -1.2, 0.0, monitor_names::kInvariantRegion},
      {"w0 above c0-delta", "shift_w", 1.2, 0.0, monitor_names::kInvariantRegion},
      {"increasing bump in w0", "bump_w", 0.3, 2.0, monitor_names::kMonotonicity},
      {"increasing bump in z0", "bump_z", 0.3, 2.0, monitor_names::kMonotonicity},
  };
  const auto root = std::filesystem::temp_directory_path() / "degenwave_acceptance_controls";
  std::string line;
  bool all = true;
  for (std::size_t i = 0; i < controls.size(); ++i) {
    dh::ExperimentConfig cfg = corpus_config("gauss_bump", 3.0, 0.1);
    cfg.t_end = 1.0;
    cfg.snapshot_count = 21;
    cfg.perturb.kind = controls[i].kind;
    cfg.perturb.amplitude = controls[i].amplitude;
    cfg.perturb.center = controls[i].center;
    cfg.perturb.width = 0.4;
    cfg.out_dir = (root / ("c" + std::to_string(i))).string();
    const int code = dh::cmd_run(cfg);
    // the named monitor must be the one that failed
    const ModelParams p = params_new(3.0);
    const GridSpec grid = dh::resolve_grid(cfg, p, cfg.delta);
    const auto sim = dh::simulate(cfg, p, grid, dh::build_initial_data(cfg, grid, p), cfg.delta, cfg.epsilon_for(cfg.delta));
    const Verdict* v = find(sim, controls[i].monitor);
    const bool ok = code == dh::kExitMonitor && v && v->evaluated && !v->passed;
    all = all && ok;
    line += " " + controls[i].name + ": exit " + std::to_string(code) + (ok ? " ok;" : " WRONG;");
  }
  std::filesystem::remove_all(root);
  return {all, std::to_string(controls.size()) + " controls;" + line};
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria;
  std::vector<CorpusRun> corpus;
  bool corpus_ready = false;
  auto with_corpus = [&](std::function<Outcome(const std::vector<CorpusRun>&)> fn) {
    return [&, fn] {
      if (!corpus_ready) {
        corpus = run_corpus();
        corpus_ready = true;
      }
      return fn(corpus);
    };
  };
  criteria.emplace_back("transform round trip", criterion_round_trip);
  criteria.emplace_back("invariant region", with_corpus(criterion_invariant_region));
  criteria.emplace_back("monotonicity and decreasing v", with_corpus(criterion_monotonicity));
  criteria.emplace_back("L1 derivative bounds", with_corpus(criterion_l1));
  criteria.emplace_back("comparison bounds", with_corpus(criterion_comparison));
  criteria.emplace_back("F identity", with_corpus(criterion_f_identity));
  criteria.emplace_back("nonexistence mechanism", criterion_nonexistence);
  criteria.emplace_back("entropy pairs", criterion_entropy);
  criteria.emplace_back("weak-form residual", criterion_weak_residual);
  criteria.emplace_back("negative controls", criterion_negative_controls);

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %2zu %-4s %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
