#include "fhn/separatrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fhn/cycles.hpp"

namespace fhn {

std::string_view to_string(BranchFate f) noexcept {
  switch (f) {
    case BranchFate::captured: return "captured";
    case BranchFate::escaped: return "escaped";
    case BranchFate::time_cap: return "time_cap";
  }
  return "?";
}

std::string_view to_string(LoopKind k) noexcept {
  switch (k) {
    case LoopKind::small_O: return "small_O";
    case LoopKind::small_A: return "small_A";
    case LoopKind::big: return "big";
    case LoopKind::eight_loop: return "eight_loop";
    case LoopKind::none: return "none";
  }
  return "?";
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Vec2 as_vec(const State<2>& y) { return {y[0], y[1]}; }

Vec2 oriented(Vec2 v) {
  v = normalized(v);
  if (v.x < 0.0 || (v.x == 0.0 && v.y < 0.0)) v = -v;
  return v;
}

Vec2 eigenvector(const Mat2& j, double lambda) {
  const Vec2 r1{j.xy, lambda - j.xx};
  const Vec2 r2{lambda - j.yy, j.yx};
  return oriented(norm(r1) >= norm(r2) ? r1 : r2);
}

double residual(const Mat2& j, Vec2 v, double lambda) { return norm(j * v - lambda * v); }

struct Target {
  Vec2 center;
  double radius = 0.0;
  std::size_t index = 0;
};

double min_separation(const std::vector<Equilibrium>& eqs, Vec2 p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : eqs) {
    const double d = distance(e.location, p);
    if (d > 1e-9) best = std::min(best, d);
  }
  return best;
}

bool attracts(EquilibriumKind k, bool backward) {
  if (backward) return k == EquilibriumKind::unstable_node || k == EquilibriumKind::unstable_focus;
  return k == EquilibriumKind::stable_node || k == EquilibriumKind::stable_focus;
}

// theta in [0, 1] where g changes sign inside the step, g(0) and g(1) of opposite sign.
template <class G>
double refine_theta(const DenseStep<2>& ds, G&& g) {
  double lo = 0.0, hi = 1.0;
  const bool lo_neg = g(as_vec(ds.at_theta(lo))) < 0.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((g(as_vec(ds.at_theta(mid))) < 0.0) == lo_neg)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

SeparatrixBranch trace_branch(const PlanarField& field, Vec2 start, bool unstable, int side,
                              const std::vector<Target>& targets, const SeparatrixOptions& opt) {
  SeparatrixBranch br;
  br.unstable = unstable;
  br.side = side;
  br.launch = start;
  br.end = start;

  const double sign = unstable ? 1.0 : -1.0;
  auto rhs = [&field, sign](const State<2>& y) {
    const Vec2 f = field.velocity({y[0], y[1]});
    return State<2>{sign * f.x, sign * f.y};
  };
  IntegratorOptions io;
  io.tol = opt.tol;
  io.escape_radius = 4.0 * opt.escape_radius;

  bool stopped = false;
  (void)detail::drive<2>(rhs, State<2>{start.x, start.y}, opt.time_cap, io,
                         [&](const DenseStep<2>& ds) {
                           br.path.push_back(ds);
                           const Vec2 p1 = as_vec(ds.at_theta(1.0));
                           br.end = p1;
                           br.duration = ds.t1();
                           for (const auto& t : targets) {
                             if (distance(p1, t.center) > t.radius) continue;
                             auto g = [&t](Vec2 p) { return distance(p, t.center) - t.radius; };
                             const double th =
                                 g(as_vec(ds.at_theta(0.0))) > 0.0 ? refine_theta(ds, g) : 0.0;
                             br.end = as_vec(ds.at_theta(th));
                             br.duration = ds.t0 + th * ds.h;
                             br.fate = BranchFate::captured;
                             br.captured_by = t.index;
                             stopped = true;
                             return false;
                           }
                           if (norm(p1) >= opt.escape_radius) {
                             auto g = [&opt](Vec2 p) { return norm(p) - opt.escape_radius; };
                             const double th = refine_theta(ds, g);
                             br.end = as_vec(ds.at_theta(th));
                             br.duration = ds.t0 + th * ds.h;
                             br.fate = BranchFate::escaped;
                             stopped = true;
                             return false;
                           }
                           return true;
                         });
  if (!stopped) br.fate = BranchFate::time_cap;
  return br;
}

}  // namespace

Vec2 SeparatrixBranch::at(double t) const {
  if (path.empty()) return launch;
  t = std::clamp(t, 0.0, duration);
  auto it = std::upper_bound(path.begin(), path.end(), t,
                             [](double v, const DenseStep<2>& d) { return v < d.t0; });
  if (it != path.begin()) --it;
  return as_vec(it->at(t));
}

SeparatrixBranchSet separatrices(const PlanarField& field, const Equilibrium& saddle,
                                 double offset, const SeparatrixOptions& opt) {
  if (!(offset >= 1e-8 && offset <= 1e-5))
    throw usage_error("separatrices: offset must lie in [1e-8, 1e-5]");
  if (!(opt.time_cap > 0.0) || !(opt.tol > 0.0) || !(opt.escape_radius > 0.0) ||
      !(opt.capture_fraction > 0.0 && opt.capture_fraction < 0.5))
    throw usage_error("separatrices: invalid options");
  const Mat2 j = field.jacobian(saddle.location);
  if (!(j.det() < -kDetTolerance))
    throw usage_error("separatrices: equilibrium is not a saddle");

  SeparatrixBranchSet set;
  set.saddle = saddle;
  set.saddle.kind = EquilibriumKind::saddle;
  set.equilibria = finite_equilibria(field);

  const double half = 0.5 * j.trace();
  const double root = std::sqrt(half * half - j.det());
  set.lambda_unstable = half + root;
  set.lambda_stable = j.det() / set.lambda_unstable;
  set.unstable_vector = eigenvector(j, set.lambda_unstable);
  set.stable_vector = eigenvector(j, set.lambda_stable);
  set.residual_unstable = residual(j, set.unstable_vector, set.lambda_unstable);
  set.residual_stable = residual(j, set.stable_vector, set.lambda_stable);

  std::vector<Target> forward, backward;
  for (std::size_t i = 0; i < set.equilibria.size(); ++i) {
    const auto& e = set.equilibria[i];
    if (distance(e.location, saddle.location) <= 1e-9) continue;
    const double sep = min_separation(set.equilibria, e.location);
    if (!std::isfinite(sep)) continue;
    const Target t{e.location, opt.capture_fraction * sep, i};
    if (attracts(e.kind, false)) forward.push_back(t);
    if (attracts(e.kind, true)) backward.push_back(t);
  }

  const Vec2 s = saddle.location;
  const Vec2 vu = offset * set.unstable_vector, vs = offset * set.stable_vector;
  set.unstable_plus = trace_branch(field, s + vu, true, 1, forward, opt);
  set.unstable_minus = trace_branch(field, s - vu, true, -1, forward, opt);
  set.stable_plus = trace_branch(field, s + vs, false, 1, backward, opt);
  set.stable_minus = trace_branch(field, s - vs, false, -1, backward, opt);
  return set;
}

namespace {

struct Frame {
  double gamma = 0.0;
  PlanarField field;
  SeparatrixBranchSet set;
  double separation = 0.0;

  const SeparatrixBranch& u(int side) const {
    return side > 0 ? set.unstable_plus : set.unstable_minus;
  }
  const SeparatrixBranch& s(int side) const {
    return side > 0 ? set.stable_plus : set.stable_minus;
  }
};

Frame build_frame(const FhnParams& params, double gamma, const HomoclinicOptions& opt) {
  const FhnParams p = params.with(Param::gamma, gamma);
  PlanarField field(p);
  const auto eqs = finite_equilibria(field);
  const auto saddle = find_labeled(eqs, EquilibriumLabel::S);
  if (!saddle)
    throw usage_error("find_homoclinic: no saddle at gamma = " + std::to_string(gamma));
  Frame f{gamma, field, separatrices(field, *saddle, opt.offset, opt.separatrix), 0.0};
  f.separation = min_separation(eqs, saddle->location);
  return f;
}

struct Fate {
  BranchFate fate = BranchFate::time_cap;
  std::size_t index = 0;
  bool operator==(const Fate&) const = default;
};

Fate fate_of(const SeparatrixBranch& b) {
  return {b.fate, b.captured_by.value_or(std::numeric_limits<std::size_t>::max())};
}

struct Sample {
  double t = 0.0;
  Vec2 p;
};

std::vector<Sample> sample_path(const SeparatrixBranch& b, int per_step) {
  std::vector<Sample> out;
  out.reserve(b.path.size() * static_cast<std::size_t>(per_step) + 1);
  out.push_back({0.0, b.launch});
  for (const auto& ds : b.path) {
    for (int k = 1; k <= per_step; ++k) {
      const double t = ds.t0 + ds.h * k / per_step;
      if (t > b.duration) break;
      out.push_back({t, as_vec(ds.at(t))});
    }
  }
  return out;
}

std::vector<Sample> far_samples(const SeparatrixBranch& b, Vec2 saddle, double rho) {
  std::vector<Sample> out;
  for (const auto& x : sample_path(b, 8))
    if (distance(x.p, saddle) > rho) out.push_back(x);
  return out;
}

// Segment through a stable-branch point, normal to the branch there.
struct Transversal {
  Vec2 q;
  Vec2 tangent;
  double half_length = 0.0;
  double t_unstable = 0.0;  ///< reference crossing times
  double t_stable = 0.0;
  int unstable_side = 0;
  int stable_side = 0;
  double approach = 0.0;
};

struct Hit {
  double t = 0.0;
  double coord = 0.0;
};

std::vector<Hit> hits(const SeparatrixBranch& b, const Transversal& tr) {
  std::vector<Hit> out;
  auto g = [&tr](Vec2 p) { return dot(p - tr.q, tr.tangent); };
  for (const auto& ds : b.path) {
    const double t1 = std::min(ds.t1(), b.duration);
    if (t1 <= ds.t0) break;
    const double g0 = g(as_vec(ds.at(ds.t0))), g1 = g(as_vec(ds.at(t1)));
    if ((g0 < 0.0) == (g1 < 0.0)) continue;
    // Refine within [t0, t1] of this step.
    double lo = ds.t0, hi = t1;
    const bool lo_neg = g0 < 0.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if ((g(as_vec(ds.at(mid))) < 0.0) == lo_neg)
        lo = mid;
      else
        hi = mid;
    }
    const double t = 0.5 * (lo + hi);
    out.push_back({t, dot(as_vec(ds.at(t)) - tr.q, perp(tr.tangent))});
  }
  return out;
}

std::optional<Hit> nearest_hit(const std::vector<Hit>& hs, double t_ref, double half_length) {
  std::optional<Hit> best;
  for (const auto& h : hs) {
    if (std::abs(h.coord) > half_length) continue;
    if (!best || std::abs(h.t - t_ref) < std::abs(best->t - t_ref)) best = h;
  }
  return best;
}

// Closest approach of the unstable branch to either stable branch outside the
// saddle neighbourhood.
std::optional<Transversal> place_transversal(const Frame& f, int u_side,
                                             const HomoclinicOptions& opt, bool strict = true) {
  const Vec2 s = f.set.saddle.location;
  const double rho = opt.transversal_fraction * f.separation;
  const auto us = far_samples(f.u(u_side), s, rho);
  std::optional<Transversal> best;
  for (int s_side : {1, -1}) {
    const auto ss = far_samples(f.s(s_side), s, rho);
    if (ss.empty() || us.empty()) continue;
    // Coarse pass on thinned samples, then a full-resolution pass around it.
    const std::size_t ku = std::max<std::size_t>(1, us.size() / 3000);
    const std::size_t ks = std::max<std::size_t>(1, ss.size() / 3000);
    auto closest = [&](std::size_t u0, std::size_t u1, std::size_t du, std::size_t s0,
                       std::size_t s1, std::size_t dsk) {
      std::pair<std::size_t, std::size_t> at{u0, s0};
      double dmin = std::numeric_limits<double>::infinity();
      for (std::size_t i = u0; i < u1; i += du)
        for (std::size_t j = s0; j < s1; j += dsk) {
          const double dx = us[i].p.x - ss[j].p.x, dy = us[i].p.y - ss[j].p.y;
          const double d2 = dx * dx + dy * dy;
          if (d2 < dmin) {
            dmin = d2;
            at = {i, j};
          }
        }
      return at;
    };
    auto [ci, cj] = closest(0, us.size(), ku, 0, ss.size(), ks);
    const auto [bi, bj] = closest(ci >= 2 * ku ? ci - 2 * ku : 0, std::min(us.size(), ci + 2 * ku + 1),
                                  1, cj >= 2 * ks ? cj - 2 * ks : 0,
                                  std::min(ss.size(), cj + 2 * ks + 1), 1);
    const double d = distance(us[bi].p, ss[bj].p);
    if (best && d >= best->approach) continue;
    Transversal tr;
    tr.q = ss[bj].p;
    tr.tangent = normalized(f.field.velocity(tr.q));
    tr.t_unstable = us[bi].t;
    tr.t_stable = ss[bj].t;
    tr.unstable_side = u_side;
    tr.stable_side = s_side;
    tr.approach = d;
    best = tr;
  }
  if (!best) return std::nullopt;

  // Keep the segment clear of the other passes of both branches.
  double clear = rho;
  Transversal& tr = *best;
  tr.half_length = std::numeric_limits<double>::infinity();
  const auto hs = hits(f.s(tr.stable_side), tr);
  const auto hu = hits(f.u(tr.unstable_side), tr);
  const auto ms = nearest_hit(hs, tr.t_stable, tr.half_length);
  const auto mu = nearest_hit(hu, tr.t_unstable, tr.half_length);
  if (!ms || !mu) return std::nullopt;
  for (const auto& h : hs)
    if (h.t != ms->t) clear = std::min(clear, 0.5 * std::abs(h.coord - ms->coord));
  for (const auto& h : hu)
    if (h.t != mu->t) clear = std::min(clear, 0.5 * std::abs(h.coord - ms->coord));
  tr.half_length = clear;
  tr.t_stable = ms->t;
  tr.t_unstable = mu->t;
  if (strict && std::abs(mu->coord - ms->coord) >= clear) return std::nullopt;
  return best;
}

struct Split {
  double value = kNaN;
  bool defined = false;
  double t_unstable = 0.0;
  double t_stable = 0.0;
};

Split splitting_on(const Frame& f, const Transversal& tr) {
  Split out;
  const auto ms = nearest_hit(hits(f.s(tr.stable_side), tr), tr.t_stable, tr.half_length);
  const auto mu = nearest_hit(hits(f.u(tr.unstable_side), tr), tr.t_unstable, tr.half_length);
  if (!ms || !mu) return out;
  out.value = mu->coord - ms->coord;
  out.defined = true;
  out.t_unstable = mu->t;
  out.t_stable = ms->t;
  return out;
}

LoopKind classify_loop(const Frame& f, const Transversal& tr, const Split& sp) {
  std::vector<Vec2> loop;
  const auto& u = f.u(tr.unstable_side);
  const auto& s = f.s(tr.stable_side);
  const int n = 2000;
  for (int k = 0; k <= n; ++k) loop.push_back(u.at(sp.t_unstable * k / n));
  for (int k = n; k >= 0; --k) loop.push_back(s.at(sp.t_stable * k / n));
  bool around_o = false, around_a = false;
  for (const auto& e : f.set.equilibria) {
    if (e.label != EquilibriumLabel::O && e.label != EquilibriumLabel::A) continue;
    if (winding_number(loop, e.location) == 0) continue;
    (e.label == EquilibriumLabel::O ? around_o : around_a) = true;
  }
  if (around_o && around_a) return LoopKind::big;
  if (around_o) return LoopKind::small_O;
  if (around_a) return LoopKind::small_A;
  return LoopKind::none;
}

bool sign_change(const Split& a, const Split& b) {
  return a.defined && b.defined && ((a.value < 0.0) != (b.value < 0.0));
}

// Jumps larger than ten times the neighbouring variation.
std::vector<std::size_t> jumps(const std::vector<SplittingSample>& xs) {
  std::vector<std::size_t> out;
  if (xs.size() < 4) return out;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double d = std::abs(xs[i + 1].value - xs[i].value);
    double local = 0.0;
    int n = 0;
    if (i > 0) {
      local = std::max(local, std::abs(xs[i].value - xs[i - 1].value));
      ++n;
    }
    if (i + 2 < xs.size()) {
      local = std::max(local, std::abs(xs[i + 2].value - xs[i + 1].value));
      ++n;
    }
    if (n > 0 && d > 10.0 * local && d > 0.0) out.push_back(i);
  }
  return out;
}

struct Candidate {
  double lo = 0.0, hi = 0.0;
  int u_side = 0;
};

struct Scan {
  std::vector<LoopDetection> loops;
  std::vector<SplittingSample> trace;
  std::vector<std::string> notes;
};

LoopDetection resolve(const FhnParams& params, const Candidate& cand,
                      const HomoclinicOptions& opt, std::string& note) {
  LoopDetection det;
  det.unstable_side = cand.u_side;

  // Narrow the fate change so one transversal serves the whole bracket.
  double lo = cand.lo, hi = cand.hi;
  const Fate f_lo = fate_of(build_frame(params, lo, opt).u(cand.u_side));
  const double fate_width = 10.0 * opt.bracket_width;
  while (hi - lo > fate_width) {
    const double mid = 0.5 * (lo + hi);
    if (fate_of(build_frame(params, mid, opt).u(cand.u_side)) == f_lo)
      lo = mid;
    else
      hi = mid;
  }

  const Frame ref = build_frame(params, 0.5 * (lo + hi), opt);
  const auto tr = place_transversal(ref, cand.u_side, opt);
  if (!tr) {
    note = "fate change without a transversal near " + std::to_string(ref.gamma);
    return det;
  }
  det.stable_side = tr->stable_side;

  std::vector<SplittingSample> samples;
  auto eval = [&](double g) {
    const Split sp = splitting_on(build_frame(params, g, opt), *tr);
    samples.push_back({g, sp.value, sp.defined});
    return sp;
  };
  const int n_local = 9;
  for (int k = 0; k < n_local; ++k) eval(lo + (hi - lo) * k / (n_local - 1));
  auto sorted = [&] {
    std::sort(samples.begin(), samples.end(),
              [](const SplittingSample& a, const SplittingSample& b) { return a.gamma < b.gamma; });
  };
  sorted();

  Split s_lo = splitting_on(build_frame(params, lo, opt), *tr);
  Split s_hi = splitting_on(build_frame(params, hi, opt), *tr);
  if (!sign_change(s_lo, s_hi)) {
    det.splitting = samples;
    note = "splitting keeps its sign across the fate change near " + std::to_string(ref.gamma);
    return det;
  }
  while (hi - lo > opt.bracket_width) {
    const double mid = 0.5 * (lo + hi);
    const Split sm = eval(mid);
    if (!sm.defined) {
      sorted();
      det.splitting = samples;
      note = "splitting undefined inside the bracket near " + std::to_string(mid);
      return det;
    }
    if (sign_change(s_lo, sm)) {
      hi = mid;
      s_hi = sm;
    } else {
      lo = mid;
      s_lo = sm;
    }
  }
  sorted();

  for (int depth = 0; depth <= opt.max_resample_depth; ++depth) {
    bool all_defined = std::all_of(samples.begin(), samples.end(),
                                   [](const SplittingSample& x) { return x.defined; });
    if (!all_defined) break;
    const auto bad = jumps(samples);
    if (bad.empty()) break;
    if (depth == opt.max_resample_depth) {
      for (std::size_t i : bad)
        if (samples[i].gamma <= hi && samples[i + 1].gamma >= lo) {
          det.splitting = samples;
          note = "splitting is discontinuous at the sign change near " + std::to_string(lo);
          return det;
        }
      break;
    }
    std::vector<double> mids;
    for (std::size_t i : bad) mids.push_back(0.5 * (samples[i].gamma + samples[i + 1].gamma));
    for (double g : mids) eval(g);
    sorted();
  }

  det.gamma_bracket = {lo, hi};
  det.splitting = samples;
  const Frame mid = build_frame(params, 0.5 * (lo + hi), opt);
  const Split sm = splitting_on(mid, *tr);
  det.kind = sm.defined ? classify_loop(mid, *tr, sm) : LoopKind::none;
  if (det.kind == LoopKind::none) note = "loop encloses no antisaddle near " + std::to_string(lo);
  return det;
}

// Splitting over the sample grid on the closest-approach transversal of the
// middle frame, for the trace of a failed search.
std::vector<SplittingSample> grid_trace(const std::vector<Frame>& frames,
                                        const HomoclinicOptions& opt) {
  std::vector<SplittingSample> best;
  int best_defined = -1;
  if (frames.empty()) return best;
  const Frame& ref = frames[frames.size() / 2];
  for (int u_side : {1, -1}) {
    auto tr = place_transversal(ref, u_side, opt, false);
    if (!tr) continue;
    tr->half_length = opt.transversal_fraction * ref.separation;
    std::vector<SplittingSample> xs;
    int defined = 0;
    for (const auto& f : frames) {
      const Split sp = splitting_on(f, *tr);
      xs.push_back({f.gamma, sp.value, sp.defined});
      defined += sp.defined ? 1 : 0;
    }
    if (defined > best_defined) {
      best_defined = defined;
      best = std::move(xs);
    }
  }
  if (best.empty())
    for (const auto& f : frames) best.push_back({f.gamma, kNaN, false});
  return best;
}

Scan scan(const FhnParams& params, Interval range, const HomoclinicOptions& opt) {
  if (!(range.lo < range.hi) || !std::isfinite(range.lo) || !std::isfinite(range.hi))
    throw usage_error("find_homoclinic: empty or non-finite gamma range");
  if (opt.n_samples < 3) throw usage_error("find_homoclinic: n_samples must be at least 3");
  if (!(opt.bracket_width > 0.0) || !(opt.transversal_fraction > 0.0))
    throw usage_error("find_homoclinic: invalid options");

  std::vector<Frame> frames;
  frames.reserve(static_cast<std::size_t>(opt.n_samples));
  for (int k = 0; k < opt.n_samples; ++k)
    frames.push_back(build_frame(params, range.lo + range.width() * k / (opt.n_samples - 1), opt));

  Scan out;
  for (int u_side : {1, -1}) {
    for (std::size_t k = 0; k + 1 < frames.size(); ++k) {
      if (fate_of(frames[k].u(u_side)) == fate_of(frames[k + 1].u(u_side))) continue;
      std::string note;
      LoopDetection det =
          resolve(params, {frames[k].gamma, frames[k + 1].gamma, u_side}, opt, note);
      if (det.kind != LoopKind::none)
        out.loops.push_back(std::move(det));
      else
        out.notes.push_back(note);
    }
  }
  std::sort(out.loops.begin(), out.loops.end(), [](const LoopDetection& a, const LoopDetection& b) {
    return a.gamma_bracket.lo < b.gamma_bracket.lo;
  });

  std::vector<LoopDetection> eights;
  for (const auto& o : out.loops) {
    if (o.kind != LoopKind::small_O) continue;
    for (const auto& a : out.loops) {
      if (a.kind != LoopKind::small_A) continue;
      if (auto e = combine_eight_loop(o, a, opt.eight_tolerance)) eights.push_back(std::move(*e));
    }
  }
  for (auto& e : eights) out.loops.push_back(std::move(e));
  out.trace = grid_trace(frames, opt);
  return out;
}

}  // namespace

std::optional<LoopDetection> combine_eight_loop(const LoopDetection& around_o,
                                                const LoopDetection& around_a, double tolerance) {
  if (around_o.kind != LoopKind::small_O || around_a.kind != LoopKind::small_A) return std::nullopt;
  const double mo = 0.5 * (around_o.gamma_bracket.lo + around_o.gamma_bracket.hi);
  const double ma = 0.5 * (around_a.gamma_bracket.lo + around_a.gamma_bracket.hi);
  if (!(std::abs(mo - ma) <= tolerance)) return std::nullopt;
  LoopDetection e = around_o;
  e.kind = LoopKind::eight_loop;
  e.gamma_bracket = {std::min(around_o.gamma_bracket.lo, around_a.gamma_bracket.lo),
                     std::max(around_o.gamma_bracket.hi, around_a.gamma_bracket.hi)};
  e.second_bracket = around_a.gamma_bracket;
  e.splitting.insert(e.splitting.end(), around_a.splitting.begin(), around_a.splitting.end());
  std::sort(e.splitting.begin(), e.splitting.end(),
            [](const SplittingSample& x, const SplittingSample& y) { return x.gamma < y.gamma; });
  return e;
}

std::vector<LoopDetection> find_loops(const FhnParams& params, Interval gamma_range,
                                      const HomoclinicOptions& opt) {
  return scan(params, gamma_range, opt).loops;
}

LoopDetection find_homoclinic(const FhnParams& params, Interval gamma_range, LoopKind target,
                              const HomoclinicOptions& opt) {
  Scan sc = scan(params, gamma_range, opt);
  for (auto& l : sc.loops)
    if (l.kind == target) return std::move(l);
  LoopDetection none;
  none.splitting = std::move(sc.trace);
  std::string msg = "no " + std::string(to_string(target)) + " loop in range";
  for (const auto& l : sc.loops) msg += "; found " + std::string(to_string(l.kind));
  for (const auto& n : sc.notes) msg += "; " + n;
  none.diagnostic = msg;
  return none;
}

}  // namespace fhn
