// Argument-principle zero counting and localization for the secular function.
// Only log-magnitude and phase of F are ever carried, so the e^{V Im k}
// growth of the determinant cannot overflow the walk.
#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "qgr/secular.hpp"

namespace qgr {

struct ZeroRecord {
  cplx k;
  int multiplicity = 1;
  double residual = 0.0;   // |F| normalized to the enclosing-box boundary scale
  double box_radius = 0.0; // half-diameter of the final enclosing box
  std::string status = "ok";  // ok | unpolished | unresolved
};

struct Box {
  double re_min, re_max, im_min, im_max;
  cplx center() const { return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)}; }
  double diam() const { return std::hypot(re_max - re_min, im_max - im_min); }
  Box expanded(double f) const {
    double dr = 0.5 * f * (re_max - re_min), di = 0.5 * f * (im_max - im_min);
    return {re_min - dr, re_max + dr, im_min - di, im_max + di};
  }
};

namespace detail {

inline double wrap_pi(double x) { return std::remainder(x, 2 * M_PI); }

// Total phase change of F along path(t), t in [t0, t1], by adaptive
// bisection until adjacent phase steps are below phase_step_max.
inline double phase_walk(const std::function<LogVal(double)>& value, double t0,
                         LogVal v0, double t1, LogVal v1, int depth,
                         const Config& cfg) {
  double d = wrap_pi(v1.phase - v0.phase);
  if (std::abs(d) < cfg.phase_step_max) return d;
  if (depth <= 0)
    throw Error(ErrorCode::contour_unresolved,
                "phase tracking could not resolve the contour");
  double tm = 0.5 * (t0 + t1);
  LogVal vm = value(tm);
  if (!vm.finite())
    throw Error(ErrorCode::contour_unresolved,
                "contour passes through a zero of the secular function");
  return phase_walk(value, t0, v0, tm, vm, depth - 1, cfg) +
         phase_walk(value, tm, vm, t1, v1, depth - 1, cfg);
}

inline double closed_walk(const std::function<LogVal(double)>& value,
                          int initial, const Config& cfg) {
  std::vector<LogVal> vals(initial + 1);
  for (int i = 0; i <= initial; ++i) {
    vals[i] = value(double(i) / initial);
    if (!vals[i].finite())
      throw Error(ErrorCode::contour_unresolved,
                  "contour passes through a zero of the secular function");
  }
  double total = 0;
  for (int i = 0; i < initial; ++i)
    total += phase_walk(value, double(i) / initial, vals[i],
                        double(i + 1) / initial, vals[i + 1],
                        cfg.contour_depth, cfg);
  return total;
}

inline int to_winding(double total_phase, const Config& cfg) {
  double w = total_phase / (2 * M_PI);
  double r = std::round(w);
  if (std::abs(w - r) > cfg.winding_integrality)
    throw Error(ErrorCode::contour_unresolved,
                "winding " + std::to_string(w) + " is not close to an integer");
  return static_cast<int>(r);
}

// Deterministic jitter schedule used before giving up on a contour.
inline const std::vector<double>& jitter_schedule() {
  static const std::vector<double> j{0.0,    0.001,  -0.001, 0.0025,
                                     -0.0025, 0.005, -0.005};
  return j;
}

}  // namespace detail

// Winding number of F around the circle |k - center| = radius.
inline int count_zeros(const SecularEvaluator& eval, cplx center, double radius,
                       const Config& cfg = default_config()) {
  if (!(radius > 0))
    throw Error(ErrorCode::invalid_graph, "count_zeros: radius must be positive");
  for (double j : detail::jitter_schedule()) {
    double r = radius * (1.0 + j);
    auto value = [&](double t) {
      return eval(center + std::polar(r, 2 * M_PI * t));
    };
    try {
      // Start resolution scales with the expected phase content of the circle.
      int initial = std::max(cfg.contour_initial,
                             int(8 * r * eval.model().size().to_double()) + 8);
      return detail::to_winding(detail::closed_walk(value, initial, cfg), cfg);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::contour_unresolved) throw;
    }
  }
  throw Error(ErrorCode::contour_unresolved,
              "count_zeros: all radius jitters failed");
}

inline int count_zeros(const OneVertexModel& m, cplx center, double radius,
                       const Config& cfg = default_config()) {
  return count_zeros(SecularEvaluator::best(m, cfg), center, radius, cfg);
}

// Winding number around the boundary of a rectangle (counterclockwise).
inline int winding_rect(const SecularEvaluator& eval, const Box& b,
                        const Config& cfg = default_config()) {
  for (double j : detail::jitter_schedule()) {
    Box bb = b.expanded(j);
    auto corner = [&](int i) -> cplx {
      switch (i & 3) {
        case 0: return {bb.re_min, bb.im_min};
        case 1: return {bb.re_max, bb.im_min};
        case 2: return {bb.re_max, bb.im_max};
        default: return {bb.re_min, bb.im_max};
      }
    };
    auto value = [&](double t) {
      double s = t * 4;
      int seg = std::min(3, int(s));
      double f = s - seg;
      cplx a = corner(seg), c = corner(seg + 1);
      return eval(a + f * (c - a));
    };
    try {
      int initial = std::max(
          cfg.contour_initial,
          int(4 * b.diam() * eval.model().size().to_double()) + 8);
      return detail::to_winding(detail::closed_walk(value, initial, cfg), cfg);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::contour_unresolved) throw;
    }
  }
  throw Error(ErrorCode::contour_unresolved,
              "winding_rect: all boundary jitters failed");
}

struct LocateResult {
  std::vector<ZeroRecord> zeros;
  bool complete = true;  // false when some sub-box stayed unresolved
};

namespace detail {

inline cplx normalized_value(const SecularEvaluator& eval, cplx k, double ref) {
  LogVal v = eval(k);
  if (!v.finite()) return {0, 0};
  return std::polar(std::exp(v.log_mag - ref), v.phase);
}

// Newton polish with central-difference derivative on the normalized secular
// value. Returns false when the iteration leaves the trust region.
inline bool polish_zero(const SecularEvaluator& eval, cplx& k, double trust,
                        double& residual) {
  double ref = 0.0;
  {
    LogVal v = eval(k + cplx(trust, trust));  // off-center probe, finite scale
    if (v.finite()) ref = v.log_mag;
  }
  cplx start = k;
  for (int it = 0; it < 80; ++it) {
    double h = 1e-6 * (1.0 + std::abs(k));
    cplx f = normalized_value(eval, k, ref);
    if (std::abs(f) == 0.0) { residual = 0.0; return true; }
    cplx fp = (normalized_value(eval, k + h, ref) -
               normalized_value(eval, k - h, ref)) / (2 * h);
    if (fp == cplx(0, 0)) break;
    cplx step = f / fp;
    k -= step;
    if (std::abs(k - start) > 8 * trust) { k = start; return false; }
    if (std::abs(step) < 1e-14 * (1.0 + std::abs(k))) {
      residual = std::abs(normalized_value(eval, k, ref));
      return true;
    }
  }
  residual = std::abs(normalized_value(eval, k, ref));
  return residual < 1e-6;
}

inline void locate_recurse(const SecularEvaluator& eval, const Box& b, int w,
                           double tol, const Config& cfg, LocateResult& out) {
  if (w == 0) return;
  if (b.diam() < tol) {
    ZeroRecord z;
    z.k = b.center();
    z.multiplicity = w;
    z.box_radius = 0.5 * b.diam();
    if (w == 1) {
      double res = 0;
      cplx kk = z.k;
      if (polish_zero(eval, kk, std::max(b.diam(), tol), res)) {
        z.k = kk;
        z.residual = res;
      } else {
        z.status = "unpolished";
      }
    }
    out.zeros.push_back(z);
    return;
  }
  // Try a few cut positions; a zero sitting on a cut line shows up as
  // children whose windings do not add up.
  static const double cuts[] = {0.5, 0.53, 0.47, 0.41, 0.59};
  for (double c : cuts) {
    double rm = b.re_min + c * (b.re_max - b.re_min);
    double im = b.im_min + c * (b.im_max - b.im_min);
    Box q[4] = {{b.re_min, rm, b.im_min, im},
                {rm, b.re_max, b.im_min, im},
                {b.re_min, rm, im, b.im_max},
                {rm, b.re_max, im, b.im_max}};
    int wq[4];
    bool ok = true;
    int sum = 0;
    for (int i = 0; i < 4 && ok; ++i) {
      try {
        wq[i] = winding_rect(eval, q[i], cfg);
        sum += wq[i];
      } catch (const Error& e) {
        if (e.code() != ErrorCode::contour_unresolved) throw;
        ok = false;
      }
    }
    if (ok && sum == w) {
      for (int i = 0; i < 4; ++i) locate_recurse(eval, q[i], wq[i], tol, cfg, out);
      return;
    }
  }
  ZeroRecord z;
  z.k = b.center();
  z.multiplicity = w;
  z.box_radius = 0.5 * b.diam();
  z.status = "unresolved";
  out.zeros.push_back(z);
  out.complete = false;
}

}  // namespace detail

// Quadtree localization of all zeros in a rectangle, to diameter < tol;
// winding-1 boxes are polished by a derivative-free Newton iteration.
inline LocateResult locate_zeros(const SecularEvaluator& eval, const Box& box,
                                 double tol,
                                 const Config& cfg = default_config()) {
  if (!(tol > 0))
    throw Error(ErrorCode::invalid_graph, "locate_zeros: tol must be positive");
  LocateResult out;
  int w = winding_rect(eval, box, cfg);
  detail::locate_recurse(eval, box, w, tol, cfg, out);
  std::sort(out.zeros.begin(), out.zeros.end(),
            [](const ZeroRecord& a, const ZeroRecord& b) {
              if (a.k.real() != b.k.real()) return a.k.real() < b.k.real();
              return a.k.imag() < b.k.imag();
            });
  return out;
}

inline LocateResult locate_zeros(const OneVertexModel& m, const Box& box,
                                 double tol,
                                 const Config& cfg = default_config()) {
  return locate_zeros(SecularEvaluator::best(m, cfg), box, tol, cfg);
}

// ---------------------------------------------------------------------------
// Counting function and slope fit

struct CountingTable {
  std::vector<std::pair<double, long>> samples;  // (R, N(R))
  double slope = 0, intercept = 0;
  double w_est = 0;
  double half_width = 0;  // 2-sigma confidence half-width on w_est
  bool partial = false;   // some radius could not be resolved
};

inline CountingTable counting_function(const SecularEvaluator& eval,
                                       const std::vector<double>& radii,
                                       const Config& cfg = default_config()) {
  if (radii.size() < 2)
    throw Error(ErrorCode::invalid_graph,
                "counting_function: need at least two radii");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1]))
      throw Error(ErrorCode::invalid_graph,
                  "counting_function: radii must be increasing");
  CountingTable t;
  for (double r : radii) {
    try {
      t.samples.emplace_back(r, count_zeros(eval, cplx(0, 0), r, cfg));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::contour_unresolved) throw;
      t.partial = true;
    }
  }
  if (t.samples.size() < 2) {
    t.partial = true;
    return t;
  }
  // least-squares over all resolved radii; the intercept absorbs the O(1)
  // term, so small radii do not bias the slope
  std::size_t n = t.samples.size();
  std::size_t start = 0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t cnt = n - start;
  for (std::size_t i = start; i < n; ++i) {
    sx += t.samples[i].first;
    sy += t.samples[i].second;
    sxx += t.samples[i].first * t.samples[i].first;
    sxy += t.samples[i].first * t.samples[i].second;
  }
  double denom = cnt * sxx - sx * sx;
  t.slope = (cnt * sxy - sx * sy) / denom;
  t.intercept = (sy - t.slope * sx) / cnt;
  t.w_est = 0.5 * M_PI * t.slope;
  if (cnt > 2) {
    double ss = 0;
    for (std::size_t i = start; i < n; ++i) {
      double r = t.samples[i].second - (t.slope * t.samples[i].first + t.intercept);
      ss += r * r;
    }
    double var_slope = ss / double(cnt - 2) / (sxx - sx * sx / cnt);
    t.half_width = 0.5 * M_PI * 2.0 * std::sqrt(std::max(0.0, var_slope));
  }
  return t;
}

inline CountingTable counting_function(const OneVertexModel& m,
                                       const std::vector<double>& radii,
                                       const Config& cfg = default_config()) {
  return counting_function(SecularEvaluator::best(m, cfg), radii, cfg);
}

// ---------------------------------------------------------------------------
// Parameter sweeps

struct SweepTrajectory {
  struct Track {
    int id = 0;
    std::vector<std::pair<int, ZeroRecord>> points;  // (schedule index, zero)
    bool flagged = false;  // ambiguous matching along the way
  };
  std::string param;
  std::vector<double> schedule;
  std::vector<Track> tracks;
};

// Locates zeros at every schedule value and links them step to step by
// nearest-neighbor matching within a trust radius (3x the previous
// displacement, floor 0.1).
inline SweepTrajectory sweep_parameter(
    const std::function<OneVertexModel(double)>& family,
    const std::vector<double>& schedule, const Box& region, double tol,
    const Config& cfg = default_config()) {
  SweepTrajectory out;
  out.schedule = schedule;
  struct Live {
    int track = -1;
    cplx pos;
    double last_disp = 0;
  };
  std::vector<Live> live;
  int next_id = 0;
  for (std::size_t step = 0; step < schedule.size(); ++step) {
    OneVertexModel m = family(schedule[step]);
    auto res = locate_zeros(m, region, tol, cfg);
    std::vector<bool> zero_used(res.zeros.size(), false);
    std::vector<bool> track_used(live.size(), false);
    // greedy ascending-distance matching
    struct Cand { double d; std::size_t t, z; };
    std::vector<Cand> cands;
    for (std::size_t t = 0; t < live.size(); ++t)
      for (std::size_t z = 0; z < res.zeros.size(); ++z)
        cands.push_back({std::abs(res.zeros[z].k - live[t].pos), t, z});
    std::sort(cands.begin(), cands.end(),
              [](const Cand& a, const Cand& b) { return a.d < b.d; });
    std::vector<Live> new_live;
    for (const auto& c : cands) {
      if (track_used[c.t] || zero_used[c.z]) continue;
      double trust = std::max(0.1, 3.0 * live[c.t].last_disp);
      if (c.d > trust) continue;
      // ambiguity: a second unused candidate within 10% of this distance
      bool ambiguous = false;
      for (std::size_t z2 = 0; z2 < res.zeros.size(); ++z2) {
        if (z2 == c.z || zero_used[z2]) continue;
        double d2 = std::abs(res.zeros[z2].k - live[c.t].pos);
        if (d2 <= c.d * 1.1) { ambiguous = true; break; }
      }
      track_used[c.t] = true;
      zero_used[c.z] = true;
      auto& tr = out.tracks[live[c.t].track];
      if (ambiguous) tr.flagged = true;
      tr.points.emplace_back(static_cast<int>(step), res.zeros[c.z]);
      new_live.push_back({live[c.t].track, res.zeros[c.z].k, c.d});
    }
    for (std::size_t z = 0; z < res.zeros.size(); ++z) {
      if (zero_used[z]) continue;
      SweepTrajectory::Track tr;
      tr.id = next_id++;
      tr.points.emplace_back(static_cast<int>(step), res.zeros[z]);
      out.tracks.push_back(tr);
      new_live.push_back({tr.id, res.zeros[z].k, 0.0});
    }
    live = std::move(new_live);
  }
  return out;
}

}  // namespace qgr
