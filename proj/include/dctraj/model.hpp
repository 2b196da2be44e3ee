#pragma once

// Scenario and solution data model: scenario generation, initial state
// construction, objective evaluation and full-solution validation.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "dctraj/channel.hpp"
#include "dctraj/geometry.hpp"

namespace dctraj::model {

// Thrown when a parameter set cannot admit any feasible solution
// (as opposed to being malformed).
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Scenario {
  Vec2 bs_position{0.0, 0.0};      // world origin
  double coverage_radius = 900.0;  // BS radio coverage, m
  std::vector<Vec2> users;         // ground device coordinates
  int num_dcs = 5;
  int num_slots = 50;              // slots per trajectory period
  int min_slots_per_user = 4;
  int max_users_per_dc = 0;        // 0 = derive default below
  double max_horizontal_step = 90.0;  // m per slot
  double max_vertical_step = 10.0;    // m per slot
  double backhaul_limit_db = 80.0;    // D2B pathloss bound
  double epsilon = 0.1;               // convergence threshold, m
  double min_altitude = 30.0;         // flight floor, m
  double max_altitude = 1000.0;       // flight ceiling, m
  channel::U2dParams u2d;
  channel::D2bParams d2b;
  std::uint64_t seed = 0;

  int num_users() const { return static_cast<int>(users.size()); }
};

// Default cap on users per drone: hard schedulability limit, softened
// toward a balanced load.
inline int default_max_users_per_dc(int num_users, int num_dcs, int num_slots,
                                    int min_slots) {
  const int cap = num_slots / min_slots;
  const int balanced = (num_users + num_dcs - 1) / num_dcs + 2;
  return std::min(cap, balanced);
}

// Throws std::invalid_argument for malformed parameters and
// InfeasibleError when the parameters cannot be scheduled at all.
inline void check_scenario(const Scenario& s) {
  if (s.num_users() < 1) throw std::invalid_argument("scenario: no users");
  if (s.num_dcs < 1) throw std::invalid_argument("scenario: no drones");
  if (s.num_slots < 1) throw std::invalid_argument("scenario: no slots");
  if (s.min_slots_per_user < 1)
    throw std::invalid_argument("scenario: min slots per user < 1");
  if (s.coverage_radius <= 0.0)
    throw std::invalid_argument("scenario: coverage radius <= 0");
  if (s.max_horizontal_step <= 0.0 || s.max_vertical_step <= 0.0)
    throw std::invalid_argument("scenario: speed limits must be positive");
  if (s.epsilon <= 0.0) throw std::invalid_argument("scenario: epsilon <= 0");
  if (s.min_altitude < 0.0 || s.max_altitude <= s.min_altitude)
    throw std::invalid_argument("scenario: bad altitude range");
  if (s.u2d.a <= 0.0 || s.u2d.b <= 0.0 || s.u2d.fc <= 0.0 || s.u2d.c <= 0.0 ||
      s.u2d.eta_los < 0.0 || s.u2d.eta_nlos < s.u2d.eta_los)
    throw std::invalid_argument("scenario: bad U2D parameters");
  if (s.d2b.alpha <= 0.0 || s.d2b.B <= 0.0)
    throw std::invalid_argument("scenario: bad D2B parameters");
  for (const auto& u : s.users) {
    if (distance(u, s.bs_position) > s.coverage_radius + 1e-9)
      throw std::invalid_argument("scenario: user outside coverage");
  }
  const int n_u = s.max_users_per_dc;
  if (n_u < 1) throw std::invalid_argument("scenario: max users per DC < 1");
  if (static_cast<long long>(n_u) * s.num_dcs < s.num_users())
    throw InfeasibleError("scenario: per-DC capacity cannot cover all users");
  if (static_cast<long long>(s.min_slots_per_user) * n_u > s.num_slots)
    throw InfeasibleError("scenario: a full DC cannot meet min slots");
  if (static_cast<long long>(s.num_slots) * s.num_dcs <
      static_cast<long long>(s.num_users()) * s.min_slots_per_user)
    throw InfeasibleError("scenario: not enough slots for all users");
}

struct ScenarioOverrides {
  std::optional<double> coverage_radius;
  std::optional<int> num_slots;
  std::optional<int> min_slots_per_user;
  std::optional<int> max_users_per_dc;
  std::optional<double> max_horizontal_step;
  std::optional<double> max_vertical_step;
  std::optional<double> backhaul_limit_db;
  std::optional<double> epsilon;
  std::optional<double> min_altitude;
  std::optional<double> max_altitude;
  std::optional<channel::U2dParams> u2d;
  std::optional<channel::D2bParams> d2b;
};

// Users drawn uniformly at random in the coverage disk; pure function of
// (seed, parameters).
inline Scenario generate_scenario(std::uint64_t seed, int num_users,
                                  int num_dcs,
                                  const ScenarioOverrides& ov = {}) {
  if (num_users < 1) throw std::invalid_argument("generate: num_users < 1");
  if (num_dcs < 1) throw std::invalid_argument("generate: num_dcs < 1");
  Scenario s;
  s.seed = seed;
  s.num_dcs = num_dcs;
  if (ov.coverage_radius) s.coverage_radius = *ov.coverage_radius;
  if (ov.num_slots) s.num_slots = *ov.num_slots;
  if (ov.min_slots_per_user) s.min_slots_per_user = *ov.min_slots_per_user;
  if (ov.max_horizontal_step) s.max_horizontal_step = *ov.max_horizontal_step;
  if (ov.max_vertical_step) s.max_vertical_step = *ov.max_vertical_step;
  if (ov.backhaul_limit_db) s.backhaul_limit_db = *ov.backhaul_limit_db;
  if (ov.epsilon) s.epsilon = *ov.epsilon;
  if (ov.min_altitude) s.min_altitude = *ov.min_altitude;
  if (ov.max_altitude) s.max_altitude = *ov.max_altitude;
  if (ov.u2d) s.u2d = *ov.u2d;
  if (ov.d2b) s.d2b = *ov.d2b;
  s.max_users_per_dc =
      ov.max_users_per_dc
          ? *ov.max_users_per_dc
          : default_max_users_per_dc(num_users, num_dcs, s.num_slots,
                                     s.min_slots_per_user);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  s.users.reserve(num_users);
  for (int i = 0; i < num_users; ++i) {
    // sqrt keeps the area density uniform
    const double rho = s.coverage_radius * std::sqrt(unit(rng));
    const double ang = 2.0 * M_PI * unit(rng);
    s.users.push_back(
        {s.bs_position.x + rho * std::cos(ang), s.bs_position.y + rho * std::sin(ang)});
  }
  check_scenario(s);
  return s;
}

// Per-drone sequence of num_slots 3D waypoints; the period is closed, so
// the successor of the last slot is the first one.
struct Trajectory {
  int num_dcs = 0;
  int num_slots = 0;
  std::vector<Vec3> pts;  // dc-major

  Trajectory() = default;
  Trajectory(int dcs, int slots)
      : num_dcs(dcs), num_slots(slots),
        pts(static_cast<size_t>(dcs) * slots) {}

  Vec3& at(int d, int n) { return pts[static_cast<size_t>(d) * num_slots + n]; }
  const Vec3& at(int d, int n) const {
    return pts[static_cast<size_t>(d) * num_slots + n];
  }
  int next_slot(int n) const { return n + 1 == num_slots ? 0 : n + 1; }
  int prev_slot(int n) const { return n == 0 ? num_slots - 1 : n - 1; }
};

// Binary user-to-drone association; each user belongs to exactly one DC.
struct Association {
  int num_users = 0;
  int num_dcs = 0;
  std::vector<std::uint8_t> a;  // user-major

  Association() = default;
  Association(int users, int dcs)
      : num_users(users), num_dcs(dcs),
        a(static_cast<size_t>(users) * dcs, 0) {}

  std::uint8_t& at(int u, int d) {
    return a[static_cast<size_t>(u) * num_dcs + d];
  }
  std::uint8_t at(int u, int d) const {
    return a[static_cast<size_t>(u) * num_dcs + d];
  }
  // Serving DC of user u, or -1 if none.
  int dc_of(int u) const {
    for (int d = 0; d < num_dcs; ++d)
      if (at(u, d)) return d;
    return -1;
  }
  std::vector<int> users_of(int d) const {
    std::vector<int> out;
    for (int u = 0; u < num_users; ++u)
      if (at(u, d)) out.push_back(u);
    return out;
  }
};

// Binary per-slot service indicator k[u][d][n].
struct Schedule {
  int num_users = 0;
  int num_dcs = 0;
  int num_slots = 0;
  std::vector<std::uint8_t> k;  // user-major, then dc, then slot

  Schedule() = default;
  Schedule(int users, int dcs, int slots)
      : num_users(users), num_dcs(dcs), num_slots(slots),
        k(static_cast<size_t>(users) * dcs * slots, 0) {}

  std::uint8_t& at(int u, int d, int n) {
    return k[(static_cast<size_t>(u) * num_dcs + d) * num_slots + n];
  }
  std::uint8_t at(int u, int d, int n) const {
    return k[(static_cast<size_t>(u) * num_dcs + d) * num_slots + n];
  }
  // User served by DC d in slot n, or -1 when the slot is idle.
  int user_at(int d, int n) const {
    for (int u = 0; u < num_users; ++u)
      if (at(u, d, n)) return u;
    return -1;
  }
  int slots_of(int u, int d) const {
    int c = 0;
    for (int n = 0; n < num_slots; ++n) c += at(u, d, n);
    return c;
  }
};

struct IterationRecord {
  int iteration = 0;
  double objective = 0.0;
  double delta_g = 0.0;  // max per-slot 3D displacement vs previous iterate
  double wall_ms = 0.0;
};

struct Solution {
  Trajectory traj;
  Association assoc;
  Schedule sched;
  double objective = 0.0;
  std::vector<IterationRecord> history;
  bool converged = false;
};

// Static closed loops: each drone parked at a distinct position on a ring
// of half the coverage radius, equally spaced in angle, at 90 m altitude.
inline Trajectory initial_trajectories(const Scenario& s) {
  Trajectory t(s.num_dcs, s.num_slots);
  const double ring = s.coverage_radius / 2.0;
  for (int d = 0; d < s.num_dcs; ++d) {
    const double ang = 2.0 * M_PI * d / s.num_dcs;
    const Vec3 p{s.bs_position.x + ring * std::cos(ang),
                 s.bs_position.y + ring * std::sin(ang), 90.0};
    for (int n = 0; n < s.num_slots; ++n) t.at(d, n) = p;
  }
  return t;
}

// Round-robin starting schedule: each drone's associated users get
// contiguous blocks of floor(N/|U_d|) slots, remainder slots going to the
// lowest-index users. Throws InfeasibleError when a drone has too many
// users to give everyone min_slots_per_user.
inline Schedule initial_schedule(const Scenario& s, const Association& assoc) {
  Schedule k(s.num_users(), s.num_dcs, s.num_slots);
  for (int d = 0; d < s.num_dcs; ++d) {
    const auto users = assoc.users_of(d);
    if (users.empty()) continue;
    const int m = static_cast<int>(users.size());
    const int base = s.num_slots / m;
    if (base < s.min_slots_per_user)
      throw InfeasibleError("initial_schedule: drone " + std::to_string(d) +
                            " has too many users for the period");
    const int extra = s.num_slots % m;
    int slot = 0;
    for (int i = 0; i < m; ++i) {
      const int len = base + (i < extra ? 1 : 0);
      for (int j = 0; j < len; ++j) k.at(users[i], d, slot++) = 1;
    }
  }
  return k;
}

// Objective (dB-sum): sum over drones, their associated users and the
// slots scheduled to them of the per-slot U2D pathloss.
inline double evaluate_objective(const Scenario& s, const Trajectory& traj,
                                 const Association& assoc,
                                 const Schedule& sched) {
  double total = 0.0;
  for (int d = 0; d < s.num_dcs; ++d) {
    for (int u = 0; u < s.num_users(); ++u) {
      if (!assoc.at(u, d)) continue;
      for (int n = 0; n < s.num_slots; ++n) {
        if (!sched.at(u, d, n)) continue;
        const Vec3& g = traj.at(d, n);
        total +=
            channel::u2d_pathloss(distance(g.xy(), s.users[u]), g.h, s.u2d).db;
      }
    }
  }
  return total;
}

struct Violation {
  std::string constraint;  // semantic name, e.g. "horizontal_speed"
  int dc = -1;
  int user = -1;
  int slot = -1;
  double magnitude = 0.0;
};

// Checks every constraint of the design problem; violations are returned
// as data, never thrown. Geometry tolerance 1e-6 m, backhaul tolerance
// 1e-6 dB.
inline std::vector<Violation> validate_solution(const Scenario& s,
                                                const Solution& sol) {
  constexpr double kGeomTol = 1e-6;
  constexpr double kDbTol = 1e-6;
  std::vector<Violation> v;
  const int U = s.num_users();
  const int D = s.num_dcs;
  const int N = s.num_slots;

  if (sol.traj.num_dcs != D || sol.traj.num_slots != N ||
      sol.assoc.num_users != U || sol.assoc.num_dcs != D ||
      sol.sched.num_users != U || sol.sched.num_dcs != D ||
      sol.sched.num_slots != N) {
    v.push_back({"shape", -1, -1, -1, 0.0});
    return v;
  }

  for (int u = 0; u < U; ++u) {
    int row = 0;
    for (int d = 0; d < D; ++d) row += sol.assoc.at(u, d);
    if (row != 1)
      v.push_back({"user_association_count", -1, u, -1, double(row)});
  }
  for (int d = 0; d < D; ++d) {
    int col = 0;
    for (int u = 0; u < U; ++u) col += sol.assoc.at(u, d);
    if (col > s.max_users_per_dc)
      v.push_back({"dc_capacity", d, -1, -1, double(col - s.max_users_per_dc)});
  }
  for (int d = 0; d < D; ++d)
    for (int n = 0; n < N; ++n) {
      int served = 0;
      for (int u = 0; u < U; ++u) served += sol.sched.at(u, d, n);
      if (served > 1)
        v.push_back({"slot_user_conflict", d, -1, n, double(served - 1)});
    }
  for (int u = 0; u < U; ++u)
    for (int n = 0; n < N; ++n) {
      int servers = 0;
      for (int d = 0; d < D; ++d) servers += sol.sched.at(u, d, n);
      if (servers > 1)
        v.push_back({"user_slot_conflict", -1, u, n, double(servers - 1)});
    }
  for (int u = 0; u < U; ++u)
    for (int d = 0; d < D; ++d) {
      if (!sol.assoc.at(u, d)) {
        for (int n = 0; n < N; ++n)
          if (sol.sched.at(u, d, n)) {
            v.push_back({"schedule_without_association", d, u, n, 1.0});
            break;
          }
        continue;
      }
      const int got = sol.sched.slots_of(u, d);
      if (got < s.min_slots_per_user)
        v.push_back({"min_service_slots", d, u, -1,
                     double(s.min_slots_per_user - got)});
    }

  for (int d = 0; d < D; ++d)
    for (int n = 0; n < N; ++n) {
      const Vec3& cur = sol.traj.at(d, n);
      const Vec3& nxt = sol.traj.at(d, sol.traj.next_slot(n));
      const double hstep = distance(cur.xy(), nxt.xy());
      if (hstep > s.max_horizontal_step + kGeomTol)
        v.push_back({"horizontal_speed", d, -1, n,
                     hstep - s.max_horizontal_step});
      const double vstep = std::abs(cur.h - nxt.h);
      if (vstep > s.max_vertical_step + kGeomTol)
        v.push_back({"vertical_speed", d, -1, n, vstep - s.max_vertical_step});
      if (cur.h < -kGeomTol)
        v.push_back({"negative_altitude", d, -1, n, -cur.h});
      const double pl =
          channel::d2b_pathloss(
              std::max(distance(cur.xy(), s.bs_position),
                       channel::kD2bMinRadius),
              cur.h, s.d2b)
              .db;
      if (pl > s.backhaul_limit_db + kDbTol)
        v.push_back({"backhaul_pathloss", d, -1, n, pl - s.backhaul_limit_db});
    }
  return v;
}

}  // namespace dctraj::model
