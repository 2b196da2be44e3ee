#pragma once

// Continuous sub-problems of the trajectory design: per-slot horizontal
// projection onto the intersection of the motion and backhaul disks, and
// per-slot altitude optimization over a feasibility window. The sweep
// drivers apply these slot by slot (drones in index order, slots in
// increasing order) and accept an update only if it keeps the trajectory
// feasible and does not worsen the slot's objective term, so the overall
// objective is non-increasing no matter how the feasible geometry
// misbehaves.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "dctraj/channel.hpp"
#include "dctraj/model.hpp"

namespace dctraj::traj {

struct DiskConstraint {
  Vec2 center;
  double radius = 0.0;
};

struct AltitudeWindow {
  double lo = 0.0;
  double hi = 0.0;
};

namespace detail {

inline Vec2 project_onto_disk(const Vec2& q, const DiskConstraint& disk) {
  const Vec2 delta = q - disk.center;
  const double len = delta.norm();
  if (len <= disk.radius) return q;
  return disk.center + delta * (disk.radius / len);
}

inline bool inside_all(const Vec2& q, std::span<const DiskConstraint> disks,
                       double tol) {
  for (const auto& d : disks)
    if (distance(q, d.center) > d.radius + tol) return false;
  return true;
}

}  // namespace detail

// Euclidean projection of `target` onto the intersection of `disks`,
// computed with Dykstra's alternating projections. The intersection is
// assumed nonempty (the caller's incumbent point lies in it). Stops when
// a full cycle moves less than 1e-4 m or after 1e4 cycles, then polishes
// the iterate into every disk to 1e-6 m.
inline Vec2 project_horizontal(const Vec2& target,
                               std::span<const DiskConstraint> disks,
                               const Vec2& start) {
  (void)start;  // feasibility witness only
  if (disks.empty() || detail::inside_all(target, disks, 1e-12)) return target;

  Vec2 x = target;
  std::vector<Vec2> inc(disks.size(), Vec2{0.0, 0.0});
  for (int cycle = 0; cycle < 10000; ++cycle) {
    const Vec2 before = x;
    for (size_t i = 0; i < disks.size(); ++i) {
      const Vec2 y = detail::project_onto_disk(x + inc[i], disks[i]);
      inc[i] = (x + inc[i]) - y;
      x = y;
    }
    if (distance(before, x) < 1e-4) break;
  }
  for (int round = 0; round < 64 && !detail::inside_all(x, disks, 1e-9);
       ++round) {
    for (const auto& d : disks) x = detail::project_onto_disk(x, d);
  }
  return x;
}

// Argmin over h in [window.lo, window.hi] of the U2D pathloss at fixed
// horizontal distance r. Newton iterations on the altitude derivative,
// kept inside a shrinking bracket; when a Newton step leaves the bracket
// (or curvature is unusable) the step falls back to a golden-section
// split. Terminates once the step drops below 1e-3 m.
inline double optimize_altitude(double r, AltitudeWindow window,
                                const channel::U2dParams& p) {
  if (!(window.lo <= window.hi))
    throw std::invalid_argument("optimize_altitude: empty window");
  if (window.hi - window.lo <= 1e-12) return window.lo;
  if (r <= 0.0) return window.lo;  // pathloss monotone in h above a device

  auto d1 = [&](double h) { return channel::u2d_pathloss_dh(r, h, p); };
  auto d2 = [&](double h) { return channel::u2d_pathloss_d2h(r, h, p); };
  auto val = [&](double h) { return channel::u2d_pathloss(r, h, p).db; };

  // boundary minima of the (unimodal) objective
  if (d1(window.lo) >= 0.0) return window.lo;
  if (d1(window.hi) <= 0.0) return window.hi;

  double lo = window.lo, hi = window.hi;
  double x = 0.5 * (lo + hi);
  constexpr double kGolden = 0.3819660112501051;
  for (int it = 0; it < 200; ++it) {
    const double g = d1(x);
    if (g < 0.0)
      lo = x;
    else
      hi = x;
    double next;
    const double curv = d2(x);
    if (curv > 1e-300) {
      next = x - g / curv;
      if (!(next > lo && next < hi)) next = lo + kGolden * (hi - lo);
    } else {
      next = lo + kGolden * (hi - lo);
    }
    if (std::abs(next - x) <= 1e-3) {
      x = next;
      break;
    }
    x = next;
  }
  x = std::clamp(x, window.lo, window.hi);
  // never return worse than an endpoint
  double best = x;
  double best_val = val(x);
  for (double cand : {window.lo, window.hi}) {
    const double cv = val(cand);
    if (cv < best_val) {
      best = cand;
      best_val = cv;
    }
  }
  return best;
}

// Samples the altitude objective and counts descending-to-ascending
// transitions; anything above one means the single-minimum assumption
// failed for this instance. Used by tests and diagnostics.
inline int count_valleys(double r, AltitudeWindow window,
                         const channel::U2dParams& p, int samples = 512) {
  int valleys = 0;
  double prev = channel::u2d_pathloss(r, window.lo, p).db;
  int dir = 0;  // -1 descending, +1 ascending
  for (int i = 1; i <= samples; ++i) {
    const double h = window.lo + (window.hi - window.lo) * i / samples;
    const double cur = channel::u2d_pathloss(r, h, p).db;
    if (cur < prev - 1e-9)
      dir = -1;
    else if (cur > prev + 1e-9) {
      if (dir == -1) ++valleys;
      dir = +1;
    }
    prev = cur;
  }
  return valleys;
}

namespace detail {

// User scheduled at (d, n), else the next scheduled user in cyclic slot
// order; -1 when the drone serves nobody at all.
inline int target_user(const model::Schedule& sched, int d, int n) {
  const int direct = sched.user_at(d, n);
  if (direct >= 0) return direct;
  for (int step = 1; step < sched.num_slots; ++step) {
    const int u = sched.user_at(d, (n + step) % sched.num_slots);
    if (u >= 0) return u;
  }
  return -1;
}

inline bool backhaul_ok(const model::Scenario& s, const Vec2& pos, double h) {
  if (!std::isfinite(s.backhaul_limit_db)) return s.backhaul_limit_db > 0;
  const double r = std::max(distance(pos, s.bs_position),
                            channel::kD2bMinRadius);
  return channel::d2b_pathloss(r, h, s.d2b).db <= s.backhaul_limit_db + 1e-9;
}

}  // namespace detail

// One pass of per-slot horizontal updates. Slot targets are the scheduled
// user's position (idle slots aim at the next scheduled user, which
// shapes travel segments toward the upcoming service point). Constraints
// per slot: motion disks around both neighbours and the backhaul disk at
// the slot's current altitude. The backhaul-feasible set is not always a
// disk, so each proposal is re-checked against the true constraint and
// rejected if the disk over-approximation let it slip through.
inline void horizontal_sweep(const model::Scenario& s, model::Solution& sol) {
  auto& traj = sol.traj;
  for (int d = 0; d < s.num_dcs; ++d) {
    for (int n = 0; n < s.num_slots; ++n) {
      const int u = detail::target_user(sol.sched, d, n);
      if (u < 0) continue;
      const bool scheduled = sol.sched.user_at(d, n) >= 0;
      const Vec2 target = s.users[u];
      const Vec3& cur = traj.at(d, n);
      const Vec3& prev = traj.at(d, traj.prev_slot(n));
      const Vec3& next = traj.at(d, traj.next_slot(n));

      std::vector<DiskConstraint> disks;
      if (s.num_slots > 1) {
        disks.push_back({prev.xy(), s.max_horizontal_step});
        disks.push_back({next.xy(), s.max_horizontal_step});
      }
      const auto r7k = channel::d2b_feasible_radius(
          cur.h, s.backhaul_limit_db, s.d2b);
      if (!r7k) continue;  // cannot certify any move at this altitude
      disks.push_back({s.bs_position, *r7k});

      const Vec2 prop = project_horizontal(target, disks, cur.xy());

      bool ok = true;
      if (s.num_slots > 1) {
        ok = ok && distance(prop, prev.xy()) <= s.max_horizontal_step + 1e-9;
        ok = ok && distance(prop, next.xy()) <= s.max_horizontal_step + 1e-9;
      }
      ok = ok && detail::backhaul_ok(s, prop, cur.h);
      if (scheduled)
        ok = ok && distance(prop, target) <= distance(cur.xy(), target) + 1e-12;
      if (ok) {
        traj.at(d, n).x = prop.x;
        traj.at(d, n).y = prop.y;
      }
    }
  }
}

// One pass of per-slot altitude updates. The window is the intersection
// of the vertical-speed band around both neighbours, the flight floor and
// ceiling, and the backhaul-feasible altitude interval containing the
// incumbent altitude at the slot's horizontal position.
inline void altitude_sweep(const model::Scenario& s, model::Solution& sol) {
  auto& traj = sol.traj;
  for (int d = 0; d < s.num_dcs; ++d) {
    for (int n = 0; n < s.num_slots; ++n) {
      const int u = detail::target_user(sol.sched, d, n);
      if (u < 0) continue;
      const bool scheduled = sol.sched.user_at(d, n) >= 0;
      const Vec3& cur = traj.at(d, n);
      const double h_prev = traj.at(d, traj.prev_slot(n)).h;
      const double h_next = traj.at(d, traj.next_slot(n)).h;

      double lo = s.min_altitude;
      double hi = s.max_altitude;
      if (s.num_slots > 1) {
        lo = std::max({lo, h_prev - s.max_vertical_step,
                       h_next - s.max_vertical_step});
        hi = std::min({hi, h_prev + s.max_vertical_step,
                       h_next + s.max_vertical_step});
      }

      const double r_bs = std::max(distance(cur.xy(), s.bs_position),
                                   channel::kD2bMinRadius);
      const auto intervals = channel::d2b_feasible_altitude_intervals(
          r_bs, s.backhaul_limit_db, s.d2b, s.max_altitude);
      if (intervals.empty()) continue;
      const channel::Interval* band = nullptr;
      double best_gap = std::numeric_limits<double>::infinity();
      for (const auto& iv : intervals) {
        if (cur.h >= iv.lo - 1e-6 && cur.h <= iv.hi + 1e-6) {
          band = &iv;
          break;
        }
        const double gap = cur.h < iv.lo ? iv.lo - cur.h : cur.h - iv.hi;
        if (gap < best_gap) {
          best_gap = gap;
          band = &iv;
        }
      }
      lo = std::max(lo, band->lo);
      hi = std::min(hi, band->hi);
      if (lo > hi) continue;

      const double r_ud = distance(cur.xy(), s.users[u]);
      const double prop = optimize_altitude(r_ud, {lo, hi}, s.u2d);

      bool ok = true;
      if (s.num_slots > 1) {
        ok = ok && std::abs(prop - h_prev) <= s.max_vertical_step + 1e-9;
        ok = ok && std::abs(prop - h_next) <= s.max_vertical_step + 1e-9;
      }
      ok = ok && detail::backhaul_ok(s, cur.xy(), prop);
      if (scheduled) {
        const double before =
            channel::u2d_pathloss(r_ud, cur.h, s.u2d).db;
        const double after = channel::u2d_pathloss(r_ud, prop, s.u2d).db;
        ok = ok && after <= before + 1e-12;
      }
      if (ok) traj.at(d, n).h = prop;
    }
  }
}

}  // namespace dctraj::traj
