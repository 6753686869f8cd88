#include "fhn/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <random>

#include "fhn/equilibria.hpp"
#include "fhn/errors.hpp"

namespace fhn {

std::string_view to_string(BranchEventKind k) noexcept {
  switch (k) {
    case BranchEventKind::fold: return "fold";
    case BranchEventKind::amplitude_to_zero: return "amplitude_to_zero";
    case BranchEventKind::period_blowup: return "period_blowup";
    case BranchEventKind::escaped: return "escaped";
    case BranchEventKind::open_edge_of_scan: return "open_edge_of_scan";
    case BranchEventKind::truncated: return "truncated";
  }
  return "?";
}

std::string_view to_string(TerminationKind k) noexcept {
  switch (k) {
    case TerminationKind::singular_point: return "singular_point";
    case TerminationKind::separatrix_cycle: return "separatrix_cycle";
    case TerminationKind::unbounded: return "unbounded";
    case TerminationKind::open: return "open";
    case TerminationKind::truncated: return "truncated";
  }
  return "?";
}

namespace {

double fd_step_for(double mu, double rel) { return rel * std::max(1.0, std::abs(mu)); }

// Second derivative of d in s from extrapolated central differences of d_s.
std::optional<double> second_derivative(const PlanarField& f, const Section& sec, double s,
                                        const CycleOptions& opt, double* error = nullptr) {
  const double h = 0.02 * std::max(s, 1e-3);
  auto central = [&](double step) -> std::optional<double> {
    const auto p = displacement(f, sec, s + step, opt);
    const auto m = displacement(f, sec, s - step, opt);
    if (!p.returned || !m.returned) return std::nullopt;
    return (p.slope - m.slope) / (2.0 * step);
  };
  const auto d1 = central(h), d2 = central(0.5 * h);
  if (!d1 || !d2) return std::nullopt;
  if (error) *error = std::abs(*d2 - *d1) / 3.0;
  return (4.0 * *d2 - *d1) / 3.0;
}

double saddle_gap(const LimitCycle& cyc, const PlanarField& f) {
  double gap = std::numeric_limits<double>::infinity();
  const auto eqs = finite_equilibria(f);
  std::vector<Vec2> saddles;
  for (const auto& e : eqs)
    if (e.kind == EquilibriumKind::saddle) saddles.push_back(e.location);
  if (saddles.empty()) return gap;
  for (const auto& step : cyc.orbit) {
    if (step.t0 >= cyc.period) break;
    for (int k = 0; k < 8; ++k) {
      const auto y = step.at_theta(k / 8.0);
      for (const auto& sp : saddles) gap = std::min(gap, distance({y[0], y[1]}, sp));
    }
  }
  return gap;
}

struct Residual {
  bool ok = false;
  double g = 0.0;
  double gs = 0.0;
  DisplacementSample sample;
};

// d(s, mu) on a section that follows its equilibrium anchor, optionally
// divided by s.
class BranchProblem {
 public:
  BranchProblem(const LimitCycle& start, Param which, const CycleOptions& opt)
      : base_(start.field()), which_(which), section_(start.section), opt_(opt),
        reduced_(start.section.anchored_at_equilibrium) {
    anchor_cache_ = section_.anchor;
    // Repelling cycles are followed through the inverse return map, which
    // contracts and has the same fixed points.
    opt_.crossing.integrator.backward = start.multiplier_ds > 0.0;
  }

  bool reduced() const { return reduced_; }
  const CycleOptions& options() const { return opt_; }
  // Stability changes at folds, so the map direction follows each new point.
  void follow(double multiplier) { opt_.crossing.integrator.backward = multiplier > 0.0; }
  Param param() const { return which_; }
  PlanarField field_at(double mu) const { return base_.with(which_, mu); }

  std::optional<Section> section_at(double mu) {
    if (!section_.anchored_at_equilibrium) return section_;
    const auto eq = polish_equilibrium(field_at(mu), anchor_cache_);
    if (!eq || distance(*eq, anchor_cache_) > 0.5) return std::nullopt;
    anchor_cache_ = *eq;
    Section s = section_;
    s.anchor = *eq;
    return s;
  }

  Residual eval(double s, double mu) {
    Residual r;
    if (!(s > 0.0)) return r;
    const auto sec = section_at(mu);
    if (!sec) return r;
    r.sample = displacement(field_at(mu), *sec, s, opt_);
    if (!r.sample.returned) return r;
    r.ok = true;
    if (reduced_) {
      r.g = r.sample.d / s;
      r.gs = (r.sample.slope - r.g) / s;
    } else {
      r.g = r.sample.d;
      r.gs = r.sample.slope;
    }
    return r;
  }

  std::optional<double> g_mu(double s, double mu, double rel) {
    double h = fd_step_for(mu, rel);
    std::optional<double> est;
    const double h_floor = 1e-13 * std::max(1.0, std::abs(mu));
    for (int pass = 0, refined = 0; pass < 8 && refined < 3; ++pass) {
      const Vec2 keep = anchor_cache_;
      const auto p = eval(s, mu + h);
      anchor_cache_ = keep;
      const auto m = eval(s, mu - h);
      anchor_cache_ = keep;
      if (!p.ok || !m.ok) {
        // The span reaches past the end of the family.
        if (est || h * 0.1 < h_floor) return est;
        h *= 0.1;
        continue;
      }
      ++refined;
      est = (p.g - m.g) / (2.0 * h);
      // Steep in mu: retake the difference over a shorter, near-linear span.
      const double target = 1e-5 * std::max(1.0, std::abs(p.g + m.g));
      if (std::abs(*est) * h <= target) break;
      h = std::max(target / std::abs(*est), h_floor);
    }
    return est;
  }

  // Mu where the linear return multiplier around the anchor vanishes, i.e.
  // the limit of d/s = 0 as s -> 0.
  std::optional<double> zero_amplitude_limit(double mu) {
    auto linear = [&](double m) -> std::optional<double> {
      const auto sec = section_at(m);
      if (!sec) return std::nullopt;
      const Mat2 J = field_at(m).jacobian(sec->anchor);
      const double alpha = 0.5 * J.trace();
      const double w2 = J.det() - alpha * alpha;
      if (w2 <= 0.0) return std::nullopt;
      return std::expm1(2.0 * std::numbers::pi * alpha / std::sqrt(w2));
    };
    for (int it = 0; it < 50; ++it) {
      const auto g = linear(mu);
      if (!g) return std::nullopt;
      if (std::abs(*g) <= 1e-14) return mu;
      const double h = fd_step_for(mu, 1e-6);
      const auto gp = linear(mu + h), gm = linear(mu - h);
      if (!gp || !gm || *gp == *gm) return std::nullopt;
      const double step = *g * 2.0 * h / (*gp - *gm);
      mu -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(mu))) return mu;
    }
    return std::nullopt;
  }

 private:
  PlanarField base_;
  Param which_;
  Section section_;
  CycleOptions opt_;
  bool reduced_;
  Vec2 anchor_cache_;
};

// The family has become vertical in mu at the resolution of a double while
// its period keeps growing: the approach to a separatrix cycle whose saddle
// has very unequal eigenvalues, where the cycle gets close to the saddle
// only for parameter offsets far below machine precision.
bool frozen_with_growing_period(const std::vector<BranchPoint>& pts) {
  constexpr std::size_t window = 6;
  if (pts.size() < window) return false;
  const BranchPoint& last = pts.back();
  const BranchPoint& first = pts[pts.size() - window];
  const double mu_span = std::abs(last.mu - first.mu);
  const double s_span = std::abs(last.s0 - first.s0);
  if (mu_span > 1e-9 * std::max(1.0, std::abs(last.mu)) || s_span <= 0.0) return false;
  for (std::size_t i = pts.size() - window + 1; i < pts.size(); ++i)
    if (!(pts[i].period > pts[i - 1].period)) return false;
  return true;
}

struct Tangent {
  double s = 0.0;
  double mu = 0.0;
};

Tangent tangent_from(double gs, double gmu, const Tangent& prev) {
  Tangent t{-gmu, gs};
  const double n = std::hypot(t.s, t.mu);
  t.s /= n;
  t.mu /= n;
  if (t.s * prev.s + t.mu * prev.mu < 0.0) {
    t.s = -t.s;
    t.mu = -t.mu;
  }
  return t;
}

}  // namespace

FoldPoint solve_fold(const PlanarField& field, const Section& section, Param which, double s_guess,
                     double mu_guess, const CycleOptions& opt) {
  FoldPoint fp;
  double s = s_guess, mu = mu_guess;
  for (int it = 0; it < 40; ++it) {
    const PlanarField f = field.with(which, mu);
    const auto c = displacement(f, section, s, opt);
    if (!c.returned) return fp;
    fp.s = s;
    fp.mu = mu;
    fp.d = c.d;
    fp.ds = c.slope;
    const double hs = 1e-3 * s;
    const auto sp = displacement(f, section, s + hs, opt);
    const auto sm = displacement(f, section, s - hs, opt);
    const double hm = fd_step_for(mu, 1e-6);
    const auto mp = displacement(field.with(which, mu + hm), section, s, opt);
    const auto mm = displacement(field.with(which, mu - hm), section, s, opt);
    if (!sp.returned || !sm.returned || !mp.returned || !mm.returned) return fp;
    const double dss = (sp.slope - sm.slope) / (2.0 * hs);
    const double dmu = (mp.d - mm.d) / (2.0 * hm);
    const double dsmu = (mp.slope - mm.slope) / (2.0 * hm);
    fp.dss = dss;
    if (std::abs(c.d) <= 1e-12 && std::abs(c.slope) <= 1e-11) break;
    const double det = c.slope * dsmu - dmu * dss;
    if (det == 0.0 || !std::isfinite(det)) return fp;
    double ds_step = -(dsmu * c.d - dmu * c.slope) / det;
    double dmu_step = -(-dss * c.d + c.slope * c.slope) / det;
    // Keep the iterate on the section and inside a trust region.
    const double limit = 0.25 * s;
    const double scale = std::max(1.0, std::abs(ds_step) / limit);
    ds_step /= scale;
    dmu_step /= scale;
    s += ds_step;
    mu += dmu_step;
    // On an equilibrium-anchored section d = d_s = 0 also holds as s -> 0 at
    // a Hopf point; an iterate collapsing towards the anchor is abandoned.
    if (!(s > 0.25 * s_guess)) return fp;
    if (std::abs(ds_step) <= 1e-14 * s && std::abs(dmu_step) <= 1e-15 * std::max(1.0, std::abs(mu)))
      break;
  }
  const auto final_sample = displacement(field.with(which, fp.mu), section, fp.s, opt);
  if (!final_sample.returned) return fp;
  fp.d = final_sample.d;
  fp.ds = final_sample.slope;
  if (const auto dss = second_derivative(field.with(which, fp.mu), section, fp.s, opt)) fp.dss = *dss;
  fp.converged = std::abs(fp.d) <= 1e-8 && std::abs(fp.ds) <= 1e-8;
  return fp;
}

Branch continue_branch(const LimitCycle& start, Param which, Interval range,
                       const ContinuationOptions& opt) {
  const PlanarField f0 = start.field();
  if (!f0.is_active(which)) throw usage_error("continue_branch: parameter inactive in this stage");
  if (opt.direction != 1 && opt.direction != -1)
    throw usage_error("continue_branch: direction must be +1 or -1");
  const double mu0 = f0.params().get(which);
  if (!range.contains(mu0)) throw usage_error("continue_branch: start outside the parameter range");

  Branch br;
  br.param = which;
  BranchProblem prob(start, which, opt.cycle);

  auto snapshot = [&](double s, double mu, BranchPoint& bp) -> bool {
    const auto sec = prob.section_at(mu);
    if (!sec) return false;
    const PlanarField f = prob.field_at(mu);
    try {
      const LimitCycle c = complete_cycle(f, *sec, s, prob.options());
      bp = {mu, s, c.period, c.amplitude, c.multiplier_ds, parameter_sensitivities(c),
            saddle_gap(c, f), sec->anchor};
      return true;
    } catch (const numerical_error&) {
      return false;
    }
  };

  double s = start.s0, mu = mu0;
  Residual r = prob.eval(s, mu);
  auto gmu = prob.g_mu(s, mu, opt.fd_step);
  if (!r.ok || !gmu) throw numerical_error("continue_branch: start cycle does not return");
  Tangent t = tangent_from(r.gs, *gmu, {0.0, double(opt.direction)});
  if (t.mu * opt.direction < 0.0 || std::abs(t.mu) < 1e-12) {
    t = tangent_from(r.gs, *gmu, {1.0, 0.0});
  }
  BranchPoint bp;
  if (!snapshot(s, mu, bp)) throw numerical_error("continue_branch: start cycle cannot be completed");
  br.points.push_back(bp);

  double h = opt.step_init;
  bool done = false;
  auto finish = [&](BranchEventKind kind, double at_mu, double at_s) {
    br.termination = kind;
    if (kind != BranchEventKind::open_edge_of_scan && kind != BranchEventKind::truncated)
      br.events.push_back({kind, at_mu, at_s, br.points.size(), std::nullopt});
    done = true;
  };

  while (!done) {
    if (static_cast<int>(br.points.size()) >= opt.max_points) {
      br.diagnostic = "point budget exhausted";
      finish(BranchEventKind::open_edge_of_scan, mu, s);
      break;
    }
    const double sp = s + h * t.s, mup = mu + h * t.mu;
    double sn = sp, mun = mup;
    bool converged = false;
    int iterations = 0;
    Residual rn;
    double gmun = 0.0;
    for (; iterations < opt.max_corrector_iterations; ++iterations) {
      rn = prob.eval(sn, mun);
      const auto gm = rn.ok ? prob.g_mu(sn, mun, opt.fd_step) : std::nullopt;
      if (!rn.ok || !gm) break;
      gmun = *gm;
      const double f2 = t.s * (sn - sp) + t.mu * (mun - mup);
      const double det = rn.gs * t.mu - gmun * t.s;
      if (det == 0.0 || !std::isfinite(det)) break;
      const double dsn = -(t.mu * rn.g - gmun * f2) / det;
      const double dmun = -(-t.s * rn.g + rn.gs * f2) / det;
      sn += dsn;
      mun += dmun;
      // Residual measured against the gradient: a strongly expanding return
      // map amplifies integration error in g but not in (s, mu).
      const double tol = opt.corrector_tol * std::max(1.0, std::hypot(rn.gs, gmun));
      if (std::abs(rn.g) <= tol &&
          std::hypot(dsn, dmun) <= 1e-9 * (1.0 + std::hypot(sn, mun))) {
        rn = prob.eval(sn, mun);
        converged = rn.ok && std::abs(rn.g) <= 10.0 * tol;
        break;
      }
    }

    if (!converged) {
      // Reset the anchor cache to the last accepted point before retrying.
      prob.section_at(mu);
      h *= 0.5;
      if (h >= opt.step_min) continue;
      const BranchPoint& last = br.points.back();
      if (last.period > opt.period_cap || last.saddle_gap < 10.0 * opt.saddle_proximity ||
          frozen_with_growing_period(br.points)) {
        finish(BranchEventKind::period_blowup, last.mu, last.s0);
      } else {
        br.diagnostic = rn.sample.status == ReturnStatus::escaped
                            ? "corrector failed at the minimum step (trial orbit escaped)"
                            : "corrector failed at the minimum step";
        finish(BranchEventKind::truncated, last.mu, last.s0);
      }
      break;
    }

    const Tangent tn = tangent_from(rn.gs, gmun, t);

    if (!range.contains(mun)) {
      // Land exactly on the edge by a natural-parameter solve in s.
      const double edge = mun > range.hi ? range.hi : range.lo;
      double se = s + (sn - s) * (edge - mu) / (mun - mu);
      for (int it = 0; it < 30; ++it) {
        const auto re = prob.eval(se, edge);
        if (!re.ok || re.gs == 0.0) break;
        const double step = re.g / re.gs;
        se -= step;
        if (std::abs(re.g) <= opt.corrector_tol) break;
      }
      if (snapshot(se, edge, bp)) br.points.push_back(bp);
      finish(BranchEventKind::open_edge_of_scan, edge, se);
      break;
    }

    if (!snapshot(sn, mun, bp)) {
      prob.section_at(mu);
      h *= 0.5;
      if (h < opt.step_min) {
        br.diagnostic = "cycle could not be completed";
        finish(BranchEventKind::truncated, mu, s);
      }
      continue;
    }

    if (tn.mu * t.mu < 0.0) {
      // Seed from the end closer to the turning point.
      const bool near_new = std::abs(bp.multiplier) < std::abs(br.points.back().multiplier);
      const double sg = near_new ? sn : s, mg = near_new ? mun : mu;
      const auto sec = prob.section_at(mg);
      BranchEvent ev{BranchEventKind::fold, mg, sg, br.points.size(), std::nullopt};
      if (sec) {
        const FoldPoint fp = solve_fold(prob.field_at(mg), *sec, which, sg, mg, opt.cycle);
        ev.fold = fp;
        if (fp.converged) {
          ev.mu = fp.mu;
          ev.s0 = fp.s;
        }
      }
      prob.section_at(mun);
      br.events.push_back(ev);
    }

    br.points.push_back(bp);
    s = sn;
    mu = mun;
    t = tn;
    prob.follow(bp.multiplier);

    if (bp.amplitude > opt.escape_amplitude) {
      finish(BranchEventKind::escaped, mu, s);
    } else if (bp.period > opt.period_cap || bp.saddle_gap < opt.saddle_proximity) {
      finish(BranchEventKind::period_blowup, mu, s);
    } else if (prob.reduced() && s < opt.s_floor) {
      const auto end = prob.zero_amplitude_limit(mu);
      finish(BranchEventKind::amplitude_to_zero, end.value_or(mu), 0.0);
    } else if (br.points.size() > 10 &&
               std::hypot(s - br.points.front().s0, mu - br.points.front().mu) < 0.5 * h) {
      br.possible_cyclic = true;
      br.diagnostic = "returned near the start point";
      finish(BranchEventKind::open_edge_of_scan, mu, s);
    }

    if (iterations <= 4) {
      h = std::min(opt.step_max, 1.5 * h);
    } else if (iterations >= 7) {
      h = std::max(opt.step_min, 0.5 * h);
    }
  }
  return br;
}

FoldSurface trace_fold_surface(const PlanarField& base, const Section& section,
                               const FoldPoint& seed, const FoldSurfaceGrid& grid,
                               const CycleOptions& opt) {
  if (grid.n1 < 1 || grid.n2 < 1) throw usage_error("trace_fold_surface: empty grid");
  FoldSurface out;
  out.samples.resize(std::size_t(grid.n1) * grid.n2);
  auto value = [](const Interval& r, int n, int i) {
    return n == 1 ? r.lo : r.lo + r.width() * i / (n - 1);
  };
  for (int i = 0; i < grid.n1; ++i)
    for (int j = 0; j < grid.n2; ++j) {
      auto& x = out.samples[std::size_t(i) * grid.n2 + j];
      x.p1 = value(grid.range1, grid.n1, i);
      x.p2 = value(grid.range2, grid.n2, j);
    }
  if (!seed.converged) {
    out.diagnostic = "no seed fold";
    return out;
  }

  const double v1 = base.params().get(grid.p1), v2 = base.params().get(grid.p2);
  int si = 0, sj = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid.n1; ++i)
    for (int j = 0; j < grid.n2; ++j) {
      const double dd = std::hypot(value(grid.range1, grid.n1, i) - v1,
                                   value(grid.range2, grid.n2, j) - v2);
      if (dd < best) {
        best = dd;
        si = i;
        sj = j;
      }
    }

  struct Job {
    int i, j;
    double s, mu;
    Vec2 anchor;
  };
  std::vector<char> queued(out.samples.size(), 0);
  std::deque<Job> queue{{si, sj, seed.s, seed.mu, section.anchor}};
  queued[std::size_t(si) * grid.n2 + sj] = 1;
  while (!queue.empty()) {
    const Job job = queue.front();
    queue.pop_front();
    auto& x = out.samples[std::size_t(job.i) * grid.n2 + job.j];
    const PlanarField f = base.with(grid.p1, x.p1).with(grid.p2, x.p2);
    Section sec = section;
    if (section.anchored_at_equilibrium) {
      const auto eq = polish_equilibrium(f.with(grid.fold_param, job.mu), job.anchor);
      if (!eq) continue;
      sec.anchor = *eq;
    }
    const FoldPoint fp = solve_fold(f, sec, grid.fold_param, job.s, job.mu, opt);
    if (!fp.converged) continue;
    x.present = true;
    x.mu = fp.mu;
    x.s0 = fp.s;
    x.residual_d = std::abs(fp.d);
    x.residual_ds = std::abs(fp.ds);
    const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      const int ni = job.i + di[k], nj = job.j + dj[k];
      if (ni < 0 || nj < 0 || ni >= grid.n1 || nj >= grid.n2) continue;
      auto& q = queued[std::size_t(ni) * grid.n2 + nj];
      if (q) continue;
      q = 1;
      queue.push_back({ni, nj, fp.s, fp.mu, sec.anchor});
    }
  }
  return out;
}

namespace {

struct CuspResidual {
  bool ok = false;
  std::array<double, 3> r{};
};

CuspResidual cusp_residual(const FhnParams& p, Vec2 direction, double s, const CycleOptions& opt) {
  CuspResidual out;
  const PlanarField f(p);
  Section sec;
  try {
    sec = make_section(f, {0.0, 0.0}, direction);
  } catch (const usage_error&) {
    return out;
  }
  const auto c = displacement(f, sec, s, opt);
  if (!c.returned) return out;
  const auto dss = second_derivative(f, sec, s, opt);
  if (!dss) return out;
  out.ok = true;
  out.r = {c.d, c.slope, *dss};
  return out;
}

bool solve3(std::array<std::array<double, 3>, 3> m, std::array<double, 3>& b) {
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    if (m[piv][col] == 0.0) return false;
    std::swap(m[piv], m[col]);
    std::swap(b[piv], b[col]);
    for (int r = col + 1; r < 3; ++r) {
      const double k = m[r][col] / m[col][col];
      for (int c = col; c < 3; ++c) m[r][c] -= k * m[col][c];
      b[r] -= k * b[col];
    }
  }
  for (int r = 2; r >= 0; --r) {
    for (int c = r + 1; c < 3; ++c) b[r] -= m[r][c] * b[c];
    b[r] /= m[r][r];
  }
  return std::all_of(b.begin(), b.end(), [](double v) { return std::isfinite(v); });
}

double norm3(const std::array<double, 3>& v) { return std::hypot(v[0], v[1], v[2]); }

}  // namespace

CuspSearch search_cusp(const FhnParams& base, const CuspBox& box, Vec2 direction,
                       const CuspSearchOptions& opt) {
  CuspSearch out;
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto pick = [&](const Interval& r) { return r.lo + r.width() * u01(rng); };
  auto in_box = [&](const FhnParams& p) {
    auto widen = [](const Interval& r, double v) {
      const double m = 0.5 * r.width();
      return v >= r.lo - m && v <= r.hi + m;
    };
    return widen(box.a, p.a) && widen(box.gamma, p.gamma) && p.c > 0.0;
  };

  for (int k = 0; k < opt.multistarts; ++k) {
    FhnParams p = base;
    p.a = pick(box.a);
    p.c = pick(box.c);
    p.gamma = pick(box.gamma);
    const PlanarField f(p);
    Section sec;
    try {
      sec = make_section(f, {0.0, 0.0}, direction);
    } catch (const usage_error&) {
      continue;
    }
    const auto scan = find_cycles(f, sec, opt.s_min, opt.s_max, opt.n_scan, opt.cycle);
    std::vector<double> seeds;
    for (const auto& c : scan.cycles) seeds.push_back(c.s0);
    for (const auto& g : scan.grazes) seeds.push_back(g.s);
    if (seeds.empty()) continue;
    ++out.starts_with_cycles;

    for (double s : seeds) {
      ++out.newton_runs;
      FhnParams q = p;
      CuspResidual res = cusp_residual(q, direction, s, opt.cycle);
      bool alive = res.ok;
      for (int it = 0; alive && it < opt.max_iterations; ++it) {
        if (std::max({std::abs(res.r[0]), std::abs(res.r[1]), std::abs(res.r[2])}) <= 0.1 * opt.accept_tol)
          break;
        // Forward-difference Jacobian in (s, a, gamma).
        std::array<std::array<double, 3>, 3> jac{};
        const double hs = 1e-4 * s, hp = 1e-5;
        const std::array<double, 3> steps{hs, hp, hp};
        for (int col = 0; col < 3 && alive; ++col) {
          double s2 = s;
          FhnParams q2 = q;
          if (col == 0) s2 += hs;
          if (col == 1) q2.a += hp;
          if (col == 2) q2.gamma += hp;
          const auto r2 = cusp_residual(q2, direction, s2, opt.cycle);
          if (!r2.ok) alive = false;
          for (int row = 0; row < 3; ++row) jac[row][col] = (r2.r[row] - res.r[row]) / steps[col];
        }
        if (!alive) break;
        std::array<double, 3> delta{-res.r[0], -res.r[1], -res.r[2]};
        if (!solve3(jac, delta)) break;
        // Damped update: accept the first fraction that lowers the residual.
        bool improved = false;
        for (double lambda = 1.0; lambda >= 1.0 / 16; lambda *= 0.5) {
          const double s2 = s + lambda * delta[0];
          FhnParams q2 = q;
          q2.a += lambda * delta[1];
          q2.gamma += lambda * delta[2];
          if (s2 < opt.s_floor || !in_box(q2)) continue;
          const auto r2 = cusp_residual(q2, direction, s2, opt.cycle);
          if (r2.ok && norm3(r2.r) < norm3(res.r)) {
            s = s2;
            q = q2;
            res = r2;
            improved = true;
            break;
          }
        }
        if (!improved) alive = false;
      }
      if (!res.ok) continue;
      const std::array<double, 3> a{std::abs(res.r[0]), std::abs(res.r[1]), std::abs(res.r[2])};
      if (std::max({a[0], a[1], a[2]}) > opt.accept_tol) continue;
      CuspCandidate cand{s, q, a, false};
      const PlanarField fq(q);
      const auto again = multiplicity(fq, make_section(fq, {0.0, 0.0}, direction), s,
                                      opt.accept_tol, opt.cycle);
      cand.reproduced = std::abs(again.d) <= opt.accept_tol && std::abs(again.ds) <= opt.accept_tol &&
                        std::abs(again.dss) <= opt.accept_tol;
      out.candidates.push_back(cand);
    }
  }
  return out;
}

TerminationReport classify_termination(const Branch& branch, std::optional<Interval> homoclinic) {
  TerminationReport rep;
  rep.possible_cyclic = branch.possible_cyclic;
  rep.end_mu = branch.points.empty() ? 0.0 : branch.points.back().mu;
  for (auto it = branch.events.rbegin(); it != branch.events.rend(); ++it) {
    if (it->kind == branch.termination) {
      rep.end_mu = it->mu;
      break;
    }
  }
  switch (branch.termination) {
    case BranchEventKind::amplitude_to_zero: rep.kind = TerminationKind::singular_point; break;
    case BranchEventKind::period_blowup: rep.kind = TerminationKind::separatrix_cycle; break;
    case BranchEventKind::escaped: rep.kind = TerminationKind::unbounded; break;
    case BranchEventKind::truncated: rep.kind = TerminationKind::truncated; break;
    default: rep.kind = TerminationKind::open; break;
  }
  if (homoclinic && rep.kind == TerminationKind::separatrix_cycle) {
    const double mid = 0.5 * (homoclinic->lo + homoclinic->hi);
    rep.confirmed_by_separatrix = std::abs(rep.end_mu - mid) <= 1e-3 + 0.5 * homoclinic->width();
  }
  return rep;
}

}  // namespace fhn
