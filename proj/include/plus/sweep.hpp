#pragma once
// Batch parameter-space study over wingspan x chord x pylon span x sag:
// every (cell, trial) runs the full derive-schedule-simulate-measure pipeline
// and reports the morphing-demand metric delta-C_L,m alongside the tracking
// figures. Cells are independent; a worker pool fills a preallocated result
// table by linear index, so output order and content are invariant under the
// job count, and every trial's jitter derives from (master seed, cell, trial)
// alone.
//
// Also hosts the least-squares trend search: piecewise-constant sigma knots
// fitted to an altitude reference by box-projected Levenberg-Marquardt,
// initialized from the analytic frequency-matching schedule.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "plus/controller.hpp"
#include "plus/csv.hpp"
#include "plus/optim.hpp"
#include "plus/powerline.hpp"
#include "plus/rng.hpp"
#include "plus/simulator.hpp"
#include "plus/stability.hpp"
#include "plus/synthetic.hpp"

namespace plus::sweep {

struct SweepGrid {
  std::vector<double> wingspans_m;
  std::vector<double> chords_m;
  std::vector<double> pylon_spans_m;
  std::vector<double> sag_fractions;
  int trials_per_cell = 25;

  static SweepGrid default_grid() {
    SweepGrid g;
    g.wingspans_m = {1.0, 1.4, 1.8};
    g.chords_m = {0.203, 0.254, 0.305};
    g.pylon_spans_m = {40.0, 100.0, 300.0, 500.0};
    g.sag_fractions = {0.01, 0.02, 0.03, 0.04, 0.05};
    g.trials_per_cell = 25;
    return g;
  }

  std::size_t cell_count() const {
    return wingspans_m.size() * chords_m.size() * pylon_spans_m.size() * sag_fractions.size();
  }
  std::size_t row_count() const { return cell_count() * static_cast<std::size_t>(trials_per_cell); }

  void validate() const {
    if (wingspans_m.empty() || chords_m.empty() || pylon_spans_m.empty() ||
        sag_fractions.empty())
      throw std::invalid_argument("SweepGrid: every axis needs at least one value");
    if (trials_per_cell < 1)
      throw std::invalid_argument("SweepGrid: trials_per_cell must be >= 1");
  }
};

struct SweepRow {
  double span_m = 0.0;
  double chord_m = 0.0;
  double pylon_span_m = 0.0;
  double sag_pct = 0.0;  // percent, as in the output table
  int trial = 0;
  double delta_CL_m = std::numeric_limits<double>::quiet_NaN();
  double clearance_frac = std::numeric_limits<double>::quiet_NaN();
  double lambda_ph_m = std::numeric_limits<double>::quiet_NaN();
  long saturated_samples = -1;
  bool ok = false;
  std::string error;  // diagnostic for failed runs; not serialized
};

// Earliest-peak morphing demand: sigma-bar is sigma at the first index
// attaining the maximum, and the result is CL at that instant minus trimmed
// unmorphed CL.
inline double delta_CL_max(const std::vector<double>& sigma_trace,
                           const std::vector<double>& alpha_trace,
                           const std::function<double(double alpha, double sigma)>& cl,
                           double alpha0) {
  if (sigma_trace.empty()) throw std::invalid_argument("delta_CL_max: empty trace");
  if (sigma_trace.size() != alpha_trace.size())
    throw std::invalid_argument("delta_CL_max: trace length mismatch");
  std::size_t im = 0;
  for (std::size_t i = 1; i < sigma_trace.size(); ++i)
    if (sigma_trace[i] > sigma_trace[im]) im = i;
  return cl(alpha_trace[im], sigma_trace[im]) - cl(alpha0, 0.0);
}

// Tower height for a pylon span: midpoint of the matching class's band, or a
// nominal 25% above the floor when the band is open-ended.
inline double tower_height_for_span(double pylon_span_m) {
  const env::LineClass& c = env::class_for_span(pylon_span_m);
  if (!std::isfinite(c.tower_height_max)) return 1.25 * c.tower_height_min;
  return 0.5 * (c.tower_height_min + c.tower_height_max);
}

struct SweepConfig {
  SweepGrid grid = SweepGrid::default_grid();
  std::uint64_t master_seed = 1;
  int jobs = 1;
  int spans_per_run = 1;      // reduced horizon: spans simulated per trial
  double dt = 1e-3;
  double u0 = 25.0;
  double schedule_dx = 0.5;   // [m]
  double jitter_u_frac = 0.05;    // |u(0)| <= frac * u0
  double jitter_h_m = 0.5;        // |h(0)| <= this
  double divergence_bound = 1e4;
  aero::AircraftGeometry base_geometry;       // mass and inertia reused per cell
  aero::SyntheticModelParams model_params;    // includes the morph envelope
  std::function<void(std::size_t, std::size_t)> progress;  // (done cells, total)

  void validate() const {
    grid.validate();
    if (jobs < 1) throw std::invalid_argument("SweepConfig: jobs must be >= 1");
    if (spans_per_run < 1) throw std::invalid_argument("SweepConfig: spans_per_run must be >= 1");
    if (!(dt > 0.0)) throw std::invalid_argument("SweepConfig: dt must be positive");
    if (!(u0 > 0.0)) throw std::invalid_argument("SweepConfig: u0 must be positive");
    if (!(schedule_dx > 0.0))
      throw std::invalid_argument("SweepConfig: schedule_dx must be positive");
  }
};

namespace detail {

struct CellKey {
  double b, c, pylon, sag;
  std::size_t index;  // linear grid index
};

inline std::vector<CellKey> enumerate_cells(const SweepGrid& g) {
  std::vector<CellKey> cells;
  cells.reserve(g.cell_count());
  std::size_t idx = 0;
  for (double b : g.wingspans_m)
    for (double c : g.chords_m)
      for (double L : g.pylon_spans_m)
        for (double s : g.sag_fractions) cells.push_back({b, c, L, s, idx++});
  return cells;
}

}  // namespace detail

// One (cell, trial) evaluation; pure function of its arguments.
inline SweepRow run_case(const SweepConfig& cfg, double b, double c, double pylon_span,
                         double sag_fraction, int trial) {
  SweepRow row;
  row.span_m = b;
  row.chord_m = c;
  row.pylon_span_m = pylon_span;
  row.sag_pct = 100.0 * sag_fraction;
  row.trial = trial;
  try {
    aero::AircraftGeometry geom = cfg.base_geometry;
    geom.span = b;
    geom.chord = c;
    const aero::SyntheticAeroModel model(cfg.model_params, geom);
    const aero::FlightCondition cond{cfg.u0};
    const double alpha0 = aero::trim_state(model, geom, cond).alpha;
    const aero::StabilityDerivatives derivs = aero::derive_stability_matrices(model, geom, cond);
    const aero::PlantMatrices plant = aero::assemble_plant(derivs);

    const double h_tower = tower_height_for_span(pylon_span);
    const env::PowerlineProfile profile = env::uniform_profile(
        static_cast<std::size_t>(cfg.spans_per_run), pylon_span, h_tower, sag_fraction);

    ctrl::MatchingContext mctx;
    mctx.derivs = derivs;
    mctx.u0 = cfg.u0;
    mctx.catenary = profile.spans().front();
    mctx.sigma_lo = cfg.model_params.sigma_min();
    mctx.sigma_hi = cfg.model_params.sigma_max();
    const ctrl::MorphSchedule schedule = ctrl::build_schedule(mctx, profile, cfg.schedule_dx);

    sim::SimConfig scfg;
    scfg.dt = cfg.dt;
    scfg.u0 = cfg.u0;
    scfg.x_end = profile.total_length();
    scfg.divergence_bound = cfg.divergence_bound;
    const std::uint64_t key =
        num::mix_key(cfg.master_seed, static_cast<std::uint64_t>(std::llround(b * 1000)),
                     static_cast<std::uint64_t>(std::llround(c * 1000)),
                     static_cast<std::uint64_t>(std::llround(pylon_span * 1000)),
                     static_cast<std::uint64_t>(std::llround(sag_fraction * 10000)),
                     static_cast<std::uint64_t>(trial));
    num::Rng rng(key);
    scfg.initial_state(0) = rng.uniform(-cfg.jitter_u_frac, cfg.jitter_u_frac) * cfg.u0;
    scfg.initial_state(4) = rng.uniform(-cfg.jitter_h_m, cfg.jitter_h_m);

    const sim::Trajectory traj = sim::integrate(plant, schedule, nullptr, scfg);

    std::vector<double> sigma_trace, alpha_trace;
    sigma_trace.reserve(traj.size());
    alpha_trace.reserve(traj.size());
    for (const auto& s : traj) {
      sigma_trace.push_back(s.sigma_achieved);
      alpha_trace.push_back(alpha0 + s.w / cfg.u0);
    }
    row.delta_CL_m = delta_CL_max(
        sigma_trace, alpha_trace,
        [&model](double a, double s) { return model.eval(a, 0.0, s).CL; }, alpha0);

    const sim::TrackingMetrics metrics = sim::clearance_metrics(traj, profile, h_tower);
    row.clearance_frac = metrics.fraction_under;
    row.lambda_ph_m = derivs.u0 / ctrl::phugoid_frequency(derivs, 0.0);
    row.saturated_samples = schedule.saturated_count(0.0, profile.total_length());
    row.ok = true;
  } catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
  }
  return row;
}

// Full sweep: returns grid.row_count() rows in grid order (trial-major within
// each cell), identical for any job count.
inline std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const auto cells = detail::enumerate_cells(cfg.grid);
  const std::size_t trials = static_cast<std::size_t>(cfg.grid.trials_per_cell);
  std::vector<SweepRow> rows(cfg.grid.row_count());

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t ci = next.fetch_add(1);
      if (ci >= cells.size()) return;
      const auto& cell = cells[ci];
      for (std::size_t t = 0; t < trials; ++t)
        rows[cell.index * trials + t] =
            run_case(cfg, cell.b, cell.c, cell.pylon, cell.sag, static_cast<int>(t));
      const std::size_t d = done.fetch_add(1) + 1;
      if (cfg.progress) cfg.progress(d, cells.size());
    }
  };

  const int jobs = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(cfg.jobs), cells.size()));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return rows;
}

inline constexpr const char* kSweepCsvHeader =
    "span_m,chord_m,pylon_span_m,sag_pct,trial,delta_CL_m,clearance_frac,lambda_ph_m,"
    "saturated_samples";

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepCsvHeader << '\n';
  for (const auto& r : rows)
    out << io::format_double(r.span_m) << ',' << io::format_double(r.chord_m) << ','
        << io::format_double(r.pylon_span_m) << ',' << io::format_double(r.sag_pct) << ','
        << r.trial << ',' << io::format_double(r.delta_CL_m) << ','
        << io::format_double(r.clearance_frac) << ',' << io::format_double(r.lambda_ph_m)
        << ',' << r.saturated_samples << '\n';
}

inline std::vector<SweepRow> read_sweep_csv(std::istream& in) {
  std::vector<SweepRow> rows;
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw std::runtime_error("sweep csv: empty input");
  ++line_no;
  if (line != kSweepCsvHeader)
    throw std::runtime_error("sweep csv: unrecognized header '" + line + "'");
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = io::split_csv_line(line);
    if (f.size() != 9)
      throw std::runtime_error("sweep csv: line " + std::to_string(line_no) +
                               ": expected 9 fields");
    SweepRow r;
    r.span_m = io::parse_double(f[0], line_no, "span_m");
    r.chord_m = io::parse_double(f[1], line_no, "chord_m");
    r.pylon_span_m = io::parse_double(f[2], line_no, "pylon_span_m");
    r.sag_pct = io::parse_double(f[3], line_no, "sag_pct");
    r.trial = static_cast<int>(io::parse_double(f[4], line_no, "trial"));
    r.delta_CL_m = io::parse_double(f[5], line_no, "delta_CL_m");
    r.clearance_frac = io::parse_double(f[6], line_no, "clearance_frac");
    r.lambda_ph_m = io::parse_double(f[7], line_no, "lambda_ph_m");
    r.saturated_samples = static_cast<long>(io::parse_double(f[8], line_no, "saturated_samples"));
    r.ok = std::isfinite(r.delta_CL_m);
    rows.push_back(r);
  }
  return rows;
}

// Resume support: rows whose key already appears in `existing` are reused
// verbatim; everything else is recomputed. Pure-function semantics make the
// merged table equal to an uninterrupted run.
inline std::vector<SweepRow> run_sweep_resumed(const SweepConfig& cfg,
                                               const std::vector<SweepRow>& existing) {
  cfg.validate();
  auto key_of = [](const SweepRow& r) {
    return std::tuple<double, double, double, double, int>(r.span_m, r.chord_m, r.pylon_span_m,
                                                           r.sag_pct, r.trial);
  };
  std::map<std::tuple<double, double, double, double, int>, SweepRow> have;
  for (const auto& r : existing)
    if (r.ok) have.emplace(key_of(r), r);

  const auto cells = detail::enumerate_cells(cfg.grid);
  const std::size_t trials = static_cast<std::size_t>(cfg.grid.trials_per_cell);
  std::vector<SweepRow> rows(cfg.grid.row_count());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t ci = next.fetch_add(1);
      if (ci >= cells.size()) return;
      const auto& cell = cells[ci];
      for (std::size_t t = 0; t < trials; ++t) {
        SweepRow probe;
        probe.span_m = cell.b;
        probe.chord_m = cell.c;
        probe.pylon_span_m = cell.pylon;
        probe.sag_pct = 100.0 * cell.sag;
        probe.trial = static_cast<int>(t);
        const auto it = have.find(key_of(probe));
        rows[cell.index * trials + t] =
            it != have.end()
                ? it->second
                : run_case(cfg, cell.b, cell.c, cell.pylon, cell.sag, static_cast<int>(t));
      }
      const std::size_t d = done.fetch_add(1) + 1;
      if (cfg.progress) cfg.progress(d, cells.size());
    }
  };
  const int jobs = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(cfg.jobs), cells.size()));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return rows;
}

struct TrendRow {
  double span_m = 0.0;
  double chord_m = 0.0;
  double sag_pct = 0.0;
  double max_abs_delta_CL = 0.0;
  double mean_delta_CL = 0.0;
  double mean_clearance_frac = 0.0;
  long trials = 0;
};

struct TrendTable {
  double pylon_span_m = 0.0;
  std::vector<TrendRow> rows;  // sorted by (span, chord, sag)
};

// Per-pylon-span aggregation of the demand metric over trials. Failed trials
// are excluded from the statistics but tracked in the trial count denominator
// only when successful.
inline std::vector<TrendTable> aggregate_trends(const std::vector<SweepRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("aggregate_trends: no rows");
  std::map<double, std::map<std::tuple<double, double, double>, TrendRow>> acc;
  for (const auto& r : rows) {
    if (!r.ok || !std::isfinite(r.delta_CL_m)) continue;
    auto& cell = acc[r.pylon_span_m][{r.span_m, r.chord_m, r.sag_pct}];
    cell.span_m = r.span_m;
    cell.chord_m = r.chord_m;
    cell.sag_pct = r.sag_pct;
    cell.max_abs_delta_CL = std::max(cell.max_abs_delta_CL, std::abs(r.delta_CL_m));
    cell.mean_delta_CL += r.delta_CL_m;
    cell.mean_clearance_frac += r.clearance_frac;
    ++cell.trials;
  }
  std::vector<TrendTable> tables;
  for (auto& [pylon, cells] : acc) {
    TrendTable t;
    t.pylon_span_m = pylon;
    for (auto& [key, row] : cells) {
      if (row.trials > 0) {
        row.mean_delta_CL /= static_cast<double>(row.trials);
        row.mean_clearance_frac /= static_cast<double>(row.trials);
      }
      t.rows.push_back(row);
    }
    tables.push_back(std::move(t));
  }
  return tables;
}

inline void write_trend_csv(std::ostream& out, const std::vector<TrendTable>& tables) {
  out << "pylon_span_m,span_m,chord_m,sag_pct,max_abs_delta_CL_m,mean_delta_CL_m,"
         "mean_clearance_frac,trials\n";
  for (const auto& t : tables)
    for (const auto& r : t.rows)
      out << io::format_double(t.pylon_span_m) << ',' << io::format_double(r.span_m) << ','
          << io::format_double(r.chord_m) << ',' << io::format_double(r.sag_pct) << ','
          << io::format_double(r.max_abs_delta_CL) << ',' << io::format_double(r.mean_delta_CL)
          << ',' << io::format_double(r.mean_clearance_frac) << ',' << r.trials << '\n';
}

// ---------------------------------------------------------------------------
// Least-squares trend search

struct TrendSearchConfig {
  int knots_per_span = 20;
  double dt = 1e-3;
  double u0 = 25.0;
  double h_ref = 0.0;          // altitude datum added to the h state
  double sigma_lo = 0.0;
  double sigma_hi = 0.0;
  int residual_stride = 25;    // trajectory samples per residual entry
  int max_iterations = 40;
  sim::Vector5d initial_state = sim::Vector5d::Zero();

  void validate() const {
    if (knots_per_span < 1)
      throw std::invalid_argument("TrendSearchConfig: knots_per_span must be >= 1");
    if (!(sigma_hi > sigma_lo))
      throw std::invalid_argument("TrendSearchConfig: sigma_hi must exceed sigma_lo");
    if (residual_stride < 1)
      throw std::invalid_argument("TrendSearchConfig: residual_stride must be >= 1");
  }
};

struct TrendSearchResult {
  std::vector<double> knots;   // piecewise-constant sigma, span-major
  double knot_dx = 0.0;
  double residual = 0.0;       // final 0.5 * sum of squared altitude errors
  double initial_residual = 0.0;
  bool converged = false;      // false: stagnated, best-so-far returned
};

// sigma(x) for a knot vector over the profile: knot j of span s covers
// [j*knot_dx, (j+1)*knot_dx) in span-local coordinates.
inline double knot_sigma_at(const std::vector<double>& knots, const env::PowerlineProfile& profile,
                            int knots_per_span, double x) {
  const double total = profile.total_length();
  const double xc = std::min(std::max(x, 0.0), total);
  const std::size_t span = profile.span_index_at(xc);
  const double local = profile.span_local(xc, span);
  const double dx = profile.spans()[span].span_length / knots_per_span;
  const int j = std::min(static_cast<int>(local / dx), knots_per_span - 1);
  return knots[span * static_cast<std::size_t>(knots_per_span) + static_cast<std::size_t>(j)];
}

// Fits the knot vector so the simulated altitude tracks target_altitude(x)
// (the wire height, in the tracking application). Initial guess: the analytic
// schedule averaged over each knot interval. Monotone acceptance guarantees
// the returned residual never exceeds the initialization's.
inline TrendSearchResult trend_search(const aero::PlantMatrices& plant,
                                      const env::PowerlineProfile& profile,
                                      const ctrl::MorphSchedule& init_schedule,
                                      const std::function<double(double)>& target_altitude,
                                      const TrendSearchConfig& cfg) {
  cfg.validate();
  if (!(profile.total_length() > 0.0))
    throw std::invalid_argument("trend_search: empty horizon");
  const std::size_t n_spans = profile.span_count();
  const std::size_t n = n_spans * static_cast<std::size_t>(cfg.knots_per_span);

  // knot averages of the initial schedule
  Eigen::VectorXd x0(n);
  {
    std::size_t k = 0;
    for (std::size_t s = 0; s < n_spans; ++s) {
      const double span_len = profile.spans()[s].span_length;
      const double dx = span_len / cfg.knots_per_span;
      for (int j = 0; j < cfg.knots_per_span; ++j, ++k) {
        double acc = 0.0;
        constexpr int kAvg = 8;
        for (int m = 0; m < kAvg; ++m) {
          const double local = (j + (m + 0.5) / kAvg) * dx;
          acc += init_schedule.sigma_at(profile.tower_positions()[s] + local);
        }
        x0(k) = std::clamp(acc / kAvg, cfg.sigma_lo, cfg.sigma_hi);
      }
    }
  }

  sim::SimConfig scfg;
  scfg.dt = cfg.dt;
  scfg.u0 = cfg.u0;
  scfg.x_end = profile.total_length();
  scfg.initial_state = cfg.initial_state;

  auto residual = [&](const Eigen::VectorXd& knots) {
    std::vector<double> kv(knots.data(), knots.data() + knots.size());
    const sim::Trajectory traj = sim::integrate(
        plant,
        [&](double x) { return knot_sigma_at(kv, profile, cfg.knots_per_span, x); }, nullptr,
        scfg);
    const std::size_t m = (traj.size() + cfg.residual_stride - 1) / cfg.residual_stride;
    Eigen::VectorXd r(m);
    std::size_t o = 0;
    for (std::size_t i = 0; i < traj.size(); i += cfg.residual_stride)
      r(o++) = (cfg.h_ref + traj[i].h) - target_altitude(traj[i].x);
    return r;
  };

  num::LeastSquaresOptions opt;
  opt.max_iterations = cfg.max_iterations;
  opt.fd_step = 1e-4;
  const Eigen::VectorXd lo = Eigen::VectorXd::Constant(n, cfg.sigma_lo);
  const Eigen::VectorXd hi = Eigen::VectorXd::Constant(n, cfg.sigma_hi);

  TrendSearchResult out;
  out.initial_residual = 0.5 * residual(x0).squaredNorm();
  const num::LeastSquaresResult lm = num::levenberg_marquardt(residual, x0, lo, hi, opt);
  out.knots.assign(lm.x.data(), lm.x.data() + lm.x.size());
  out.knot_dx = profile.spans().front().span_length / cfg.knots_per_span;
  out.residual = lm.cost;
  out.converged = lm.converged;
  return out;
}

}  // namespace plus::sweep
