#pragma once

// Block-coordinate descent driver: association, scheduling, horizontal
// sweep and altitude sweep are re-optimized in that order every iteration
// until the maximum per-slot 3D displacement between consecutive
// iterations falls below the convergence threshold.
//
// The association step minimizes a linearized cost (each user keeps its
// current slot pattern while candidate drones are priced), which is only
// a surrogate for the true post-rescheduling cost. Both the candidate and
// the incumbent association are therefore rescheduled exactly and the
// cheaper of the two is kept, so the objective can never increase.

#include <chrono>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "dctraj/assign.hpp"
#include "dctraj/channel.hpp"
#include "dctraj/model.hpp"
#include "dctraj/traj.hpp"

namespace dctraj::bcd {

struct BcdOptions {
  double epsilon = 0.1;  // m, on the max per-slot displacement
  int max_iterations = 100;
  assign::ScheduleFill schedule_fill = assign::ScheduleFill::full;
  bool record_history = true;
  // Cross-checks every association/scheduling solve against the
  // exhaustive solvers; only usable on instances within their guards.
  bool oracle_check = false;
  std::function<void(const model::IterationRecord&)> on_iteration;
};

namespace detail {

inline double slot_pathloss(const model::Scenario& s, const Vec3& g, int u) {
  return channel::u2d_pathloss(distance(g.xy(), s.users[u]), g.h, s.u2d).db;
}

// Linearized association costs: price user u on drone d as if u kept the
// slot pattern it currently has on its serving drone.
inline assign::CostMatrix association_costs(const model::Scenario& s,
                                            const model::Trajectory& traj,
                                            const model::Association& assoc,
                                            const model::Schedule& sched) {
  assign::CostMatrix c(s.num_users(), s.num_dcs);
  for (int u = 0; u < s.num_users(); ++u) {
    const int home = assoc.dc_of(u);
    for (int d = 0; d < s.num_dcs; ++d) {
      double sum = 0.0;
      for (int n = 0; n < s.num_slots; ++n)
        if (home >= 0 && sched.at(u, home, n))
          sum += slot_pathloss(s, traj.at(d, n), u);
      c.at(u, d) = sum;
    }
  }
  return c;
}

inline assign::SlotCostTensor slot_costs(const model::Scenario& s,
                                         const model::Trajectory& traj,
                                         const model::Association& assoc) {
  assign::SlotCostTensor w(s.num_users(), s.num_dcs, s.num_slots);
  for (int u = 0; u < s.num_users(); ++u)
    for (int d = 0; d < s.num_dcs; ++d) {
      if (!assoc.at(u, d)) continue;
      for (int n = 0; n < s.num_slots; ++n)
        w.at(u, d, n) = slot_pathloss(s, traj.at(d, n), u);
    }
  return w;
}

// Pulls the initial ring into the backhaul-feasible region. Lowering the
// altitude is preferred because it keeps the drones spread over the
// coverage area; shrinking the ring radius is the fallback.
inline void repair_initial(const model::Scenario& s, model::Trajectory& traj) {
  for (int d = 0; d < s.num_dcs; ++d) {
    Vec3 p = traj.at(d, 0);
    auto feasible = [&](const Vec3& q) {
      return traj::detail::backhaul_ok(s, q.xy(), q.h);
    };
    if (!feasible(p)) {
      Vec3 low = p;
      low.h = s.min_altitude;
      if (feasible(low)) {
        double good = low.h, bad = p.h;
        while (bad - good > 1e-3) {
          const double mid = 0.5 * (good + bad);
          Vec3 q = p;
          q.h = mid;
          if (feasible(q))
            good = mid;
          else
            bad = mid;
        }
        p.h = good;
      } else {
        // walk the point toward the BS mast at its original altitude
        const Vec2 dir = p.xy() - s.bs_position;
        const double len = dir.norm();
        double good = -1.0, bad = 1.0;
        for (double f = 0.0; f <= 1.0; f += 1.0 / 64.0) {
          Vec3 q{s.bs_position.x + dir.x * f, s.bs_position.y + dir.y * f,
                 p.h};
          if (feasible(q))
            good = f;
          else if (good >= 0.0) {
            bad = f;
            break;
          }
        }
        if (good < 0.0)
          throw model::InfeasibleError(
              "no backhaul-feasible initial placement exists");
        while ((bad - good) * len > 1e-3) {
          const double mid = 0.5 * (good + bad);
          Vec3 q{s.bs_position.x + dir.x * mid, s.bs_position.y + dir.y * mid,
                 p.h};
          if (feasible(q))
            good = mid;
          else
            bad = mid;
        }
        p.x = s.bs_position.x + dir.x * good;
        p.y = s.bs_position.y + dir.y * good;
      }
    }
    for (int n = 0; n < s.num_slots; ++n) traj.at(d, n) = p;
  }
}

inline double max_displacement(const model::Trajectory& a,
                               const model::Trajectory& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.pts.size(); ++i)
    m = std::max(m, distance3(a.pts[i], b.pts[i]));
  return m;
}

inline void oracle_check_assoc(const assign::CostMatrix& c, int cap,
                               const model::Association& got) {
  const auto ref = assign::brute_force_association(c, cap);
  std::int64_t a = 0, b = 0;
  for (int u = 0; u < c.num_users; ++u)
    for (int d = 0; d < c.num_dcs; ++d) {
      if (got.at(u, d)) a += assign::scaled_cost(c.at(u, d));
      if (ref.at(u, d)) b += assign::scaled_cost(c.at(u, d));
    }
  if (a != b)
    throw std::logic_error("oracle mismatch: association objective");
}

inline void oracle_check_sched(const assign::SlotCostTensor& w,
                               const model::Association& assoc, int s_min,
                               int N, assign::ScheduleFill fill,
                               const model::Schedule& got) {
  const auto ref = assign::brute_force_schedule(w, assoc, s_min, N, fill);
  std::int64_t a = 0, b = 0;
  for (int u = 0; u < w.num_users; ++u)
    for (int d = 0; d < w.num_dcs; ++d)
      for (int n = 0; n < N; ++n) {
        if (got.at(u, d, n)) a += assign::scaled_cost(w.at(u, d, n));
        if (ref.at(u, d, n)) b += assign::scaled_cost(w.at(u, d, n));
      }
  if (a != b) throw std::logic_error("oracle mismatch: scheduling objective");
}

}  // namespace detail

inline model::Solution solve(const model::Scenario& s,
                             const BcdOptions& opts = {}) {
  if (opts.epsilon <= 0.0 && !std::isinf(opts.epsilon))
    throw std::invalid_argument("bcd: epsilon must be positive");
  if (opts.max_iterations < 1)
    throw std::invalid_argument("bcd: max_iterations must be >= 1");
  model::check_scenario(s);

  const auto t0 = std::chrono::steady_clock::now();
  auto wall_ms = [&] {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
  };

  model::Solution sol;
  sol.traj = model::initial_trajectories(s);
  detail::repair_initial(s, sol.traj);

  // nearest-feasible-drone start: static positions price each pair
  assign::CostMatrix c0(s.num_users(), s.num_dcs);
  for (int u = 0; u < s.num_users(); ++u)
    for (int d = 0; d < s.num_dcs; ++d)
      c0.at(u, d) = detail::slot_pathloss(s, sol.traj.at(d, 0), u);
  sol.assoc = assign::solve_association(c0, s.max_users_per_dc);
  sol.sched = model::initial_schedule(s, sol.assoc);
  sol.objective = model::evaluate_objective(s, sol.traj, sol.assoc, sol.sched);

  model::Trajectory prev = sol.traj;
  for (int t = 1; t <= opts.max_iterations; ++t) {
    // association (linearized) + exact rescheduling, keep the cheaper
    const auto costs =
        detail::association_costs(s, sol.traj, sol.assoc, sol.sched);
    auto cand_assoc = assign::solve_association(costs, s.max_users_per_dc);
    if (opts.oracle_check)
      detail::oracle_check_assoc(costs, s.max_users_per_dc, cand_assoc);

    const auto w_cand = detail::slot_costs(s, sol.traj, cand_assoc);
    auto cand_sched =
        assign::solve_scheduling(w_cand, cand_assoc, s.min_slots_per_user,
                                 s.num_slots, opts.schedule_fill);
    if (opts.oracle_check)
      detail::oracle_check_sched(w_cand, cand_assoc, s.min_slots_per_user,
                                 s.num_slots, opts.schedule_fill, cand_sched);
    const auto w_inc = detail::slot_costs(s, sol.traj, sol.assoc);
    auto inc_sched =
        assign::solve_scheduling(w_inc, sol.assoc, s.min_slots_per_user,
                                 s.num_slots, opts.schedule_fill);

    const double cand_obj =
        model::evaluate_objective(s, sol.traj, cand_assoc, cand_sched);
    const double inc_obj =
        model::evaluate_objective(s, sol.traj, sol.assoc, inc_sched);
    if (cand_obj <= inc_obj + 1e-12) {
      sol.assoc = std::move(cand_assoc);
      sol.sched = std::move(cand_sched);
    } else {
      sol.sched = std::move(inc_sched);
    }

    traj::horizontal_sweep(s, sol);
    traj::altitude_sweep(s, sol);

    sol.objective =
        model::evaluate_objective(s, sol.traj, sol.assoc, sol.sched);
    const double dg = detail::max_displacement(prev, sol.traj);
    prev = sol.traj;

    const model::IterationRecord rec{t, sol.objective, dg, wall_ms()};
    if (opts.record_history) sol.history.push_back(rec);
    if (opts.on_iteration) opts.on_iteration(rec);

    if (dg < opts.epsilon) {
      sol.converged = true;
      break;
    }
  }
  return sol;
}

}  // namespace dctraj::bcd
