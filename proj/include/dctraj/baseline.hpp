#pragma once

// Static-deployment baseline: per-drone iterated particle swarm
// optimization. Each round optimizes one drone's hover position at a
// time over (x, y, h), with the user association re-solved exactly after
// every drone update. Positions that violate the backhaul bound are
// repaired by pulling them toward the BS mast, where the bound always
// holds.

#include <cstdint>
#include <random>
#include <vector>

#include "dctraj/assign.hpp"
#include "dctraj/bcd.hpp"
#include "dctraj/channel.hpp"
#include "dctraj/model.hpp"

namespace dctraj::baseline {

struct PsoOptions {
  int swarm_size = 40;
  double inertia = 0.729;
  double cognitive = 1.494;
  double social = 1.494;
  int iterations_per_drone = 200;
  int outer_rounds = 10;
  std::uint64_t seed = 0;
};

struct StaticDeployment {
  std::vector<Vec3> positions;  // one hover point per drone
  model::Association assoc;
};

namespace detail {

inline Vec3 clamp_to_box(const model::Scenario& s, Vec3 p) {
  const Vec2 rel = p.xy() - s.bs_position;
  const double len = rel.norm();
  if (len > s.coverage_radius) {
    const Vec2 q = s.bs_position + rel * (s.coverage_radius / len);
    p.x = q.x;
    p.y = q.y;
  }
  p.h = std::clamp(p.h, s.min_altitude, s.max_altitude);
  return p;
}

inline Vec3 repair_backhaul(const model::Scenario& s, Vec3 p) {
  if (traj::detail::backhaul_ok(s, p.xy(), p.h)) return p;
  const Vec2 dir = p.xy() - s.bs_position;
  double good = 0.0, bad = 1.0;  // f=0 sits at the mast, always feasible
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (good + bad);
    const Vec2 q = s.bs_position + dir * mid;
    if (traj::detail::backhaul_ok(s, q, p.h))
      good = mid;
    else
      bad = mid;
  }
  const Vec2 q = s.bs_position + dir * good;
  return {q.x, q.y, p.h};
}

inline double deployment_cost(const model::Scenario& s, const Vec3& p,
                              const std::vector<int>& users) {
  double sum = 0.0;
  for (int u : users)
    sum += channel::u2d_pathloss(distance(p.xy(), s.users[u]), p.h, s.u2d).db;
  return sum;
}

inline assign::CostMatrix static_costs(const model::Scenario& s,
                                       const std::vector<Vec3>& pos) {
  assign::CostMatrix c(s.num_users(), s.num_dcs);
  for (int u = 0; u < s.num_users(); ++u)
    for (int d = 0; d < s.num_dcs; ++d)
      c.at(u, d) = channel::u2d_pathloss(
                       distance(pos[d].xy(), s.users[u]), pos[d].h, s.u2d)
                       .db;
  return c;
}

}  // namespace detail

inline StaticDeployment solve_static(const model::Scenario& s,
                                     const PsoOptions& opts = {}) {
  model::check_scenario(s);
  if (opts.swarm_size < 1 || opts.iterations_per_drone < 1 ||
      opts.outer_rounds < 1 || opts.inertia <= 0.0 || opts.cognitive <= 0.0 ||
      opts.social <= 0.0)
    throw std::invalid_argument("pso: options must be positive");

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // start from the same repaired ring as the trajectory solver
  auto t0 = model::initial_trajectories(s);
  bcd::detail::repair_initial(s, t0);
  std::vector<Vec3> pos(s.num_dcs);
  for (int d = 0; d < s.num_dcs; ++d) pos[d] = t0.at(d, 0);

  auto assoc = assign::solve_association(detail::static_costs(s, pos),
                                         s.max_users_per_dc);

  for (int round = 0; round < opts.outer_rounds; ++round) {
    for (int d = 0; d < s.num_dcs; ++d) {
      const auto users = assoc.users_of(d);
      if (users.empty()) continue;

      struct Particle {
        Vec3 x;
        Vec3 v;
        Vec3 best;
        double best_cost;
      };
      std::vector<Particle> swarm(opts.swarm_size);
      Vec3 gbest;
      double gbest_cost = std::numeric_limits<double>::infinity();
      for (int i = 0; i < opts.swarm_size; ++i) {
        Vec3 x;
        if (i == 0) {
          x = pos[d];  // incumbent seeds the swarm
        } else {
          const double rho = s.coverage_radius * std::sqrt(unit(rng));
          const double ang = 2.0 * M_PI * unit(rng);
          x = {s.bs_position.x + rho * std::cos(ang),
               s.bs_position.y + rho * std::sin(ang),
               s.min_altitude +
                   (s.max_altitude - s.min_altitude) * unit(rng)};
        }
        x = detail::repair_backhaul(s, detail::clamp_to_box(s, x));
        swarm[i] = {x, Vec3{0, 0, 0}, x, detail::deployment_cost(s, x, users)};
        if (swarm[i].best_cost < gbest_cost) {
          gbest_cost = swarm[i].best_cost;
          gbest = x;
        }
      }

      for (int it = 0; it < opts.iterations_per_drone; ++it) {
        for (auto& p : swarm) {
          const double r1x = unit(rng), r1y = unit(rng), r1h = unit(rng);
          const double r2x = unit(rng), r2y = unit(rng), r2h = unit(rng);
          p.v.x = opts.inertia * p.v.x +
                  opts.cognitive * r1x * (p.best.x - p.x.x) +
                  opts.social * r2x * (gbest.x - p.x.x);
          p.v.y = opts.inertia * p.v.y +
                  opts.cognitive * r1y * (p.best.y - p.x.y) +
                  opts.social * r2y * (gbest.y - p.x.y);
          p.v.h = opts.inertia * p.v.h +
                  opts.cognitive * r1h * (p.best.h - p.x.h) +
                  opts.social * r2h * (gbest.h - p.x.h);
          p.x.x += p.v.x;
          p.x.y += p.v.y;
          p.x.h += p.v.h;
          p.x = detail::repair_backhaul(s, detail::clamp_to_box(s, p.x));
          const double cost = detail::deployment_cost(s, p.x, users);
          if (cost < p.best_cost) {
            p.best_cost = cost;
            p.best = p.x;
          }
          if (cost < gbest_cost) {
            gbest_cost = cost;
            gbest = p.x;
          }
        }
      }
      pos[d] = gbest;
      assoc = assign::solve_association(detail::static_costs(s, pos),
                                        s.max_users_per_dc);
    }
  }
  return {std::move(pos), std::move(assoc)};
}

// Wraps a static deployment as a constant-trajectory solution so that the
// validator and the metrics treat both methods uniformly.
inline model::Solution static_as_trajectory(
    const StaticDeployment& dep, const model::Scenario& s,
    assign::ScheduleFill fill = assign::ScheduleFill::full) {
  model::Solution sol;
  sol.traj = model::Trajectory(s.num_dcs, s.num_slots);
  for (int d = 0; d < s.num_dcs; ++d)
    for (int n = 0; n < s.num_slots; ++n) sol.traj.at(d, n) = dep.positions[d];
  sol.assoc = dep.assoc;
  sol.sched = model::initial_schedule(s, sol.assoc);
  if (fill == assign::ScheduleFill::minimal) {
    // keep only the first min_slots_per_user slots of each service block
    for (int u = 0; u < s.num_users(); ++u)
      for (int d = 0; d < s.num_dcs; ++d) {
        int kept = 0;
        for (int n = 0; n < s.num_slots; ++n) {
          if (!sol.sched.at(u, d, n)) continue;
          if (kept < s.min_slots_per_user)
            ++kept;
          else
            sol.sched.at(u, d, n) = 0;
        }
      }
  }
  sol.objective = model::evaluate_objective(s, sol.traj, sol.assoc, sol.sched);
  sol.converged = true;
  return sol;
}

}  // namespace dctraj::baseline
