#pragma once

// Exact solvers for the user-association and slot-scheduling integer
// programs, plus exhaustive reference solvers used as oracles. Both
// problems have transportation structure, so min-cost flow solves them
// to optimality. Costs in dB are rounded to 1e-6 dB and handled as
// integers throughout, which makes "optimal" an exact statement.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dctraj/flow.hpp"
#include "dctraj/model.hpp"

namespace dctraj::assign {

enum class ScheduleFill {
  minimal,  // every user gets exactly its minimum slot count, rest idle
  full      // every slot is assigned to some associated user
};

inline std::int64_t scaled_cost(double db) {
  if (!std::isfinite(db)) throw std::invalid_argument("cost not finite");
  return std::llround(db * 1e6);
}

struct CostMatrix {
  int num_users = 0;
  int num_dcs = 0;
  std::vector<double> c;  // user-major

  CostMatrix() = default;
  CostMatrix(int users, int dcs)
      : num_users(users), num_dcs(dcs),
        c(static_cast<size_t>(users) * dcs, 0.0) {}
  double& at(int u, int d) { return c[static_cast<size_t>(u) * num_dcs + d]; }
  double at(int u, int d) const {
    return c[static_cast<size_t>(u) * num_dcs + d];
  }
};

struct SlotCostTensor {
  int num_users = 0;
  int num_dcs = 0;
  int num_slots = 0;
  // +infinity marks pairs that are not associated and must never be used.
  std::vector<double> w;

  SlotCostTensor() = default;
  SlotCostTensor(int users, int dcs, int slots)
      : num_users(users), num_dcs(dcs), num_slots(slots),
        w(static_cast<size_t>(users) * dcs * slots,
          std::numeric_limits<double>::infinity()) {}
  double& at(int u, int d, int n) {
    return w[(static_cast<size_t>(u) * num_dcs + d) * num_slots + n];
  }
  double at(int u, int d, int n) const {
    return w[(static_cast<size_t>(u) * num_dcs + d) * num_slots + n];
  }
};

namespace detail {

// A uniform shift keeps the argmin because every feasible solution of
// these problems selects a fixed number of cost entries.
inline std::int64_t nonneg_shift(std::vector<std::int64_t>& costs) {
  std::int64_t mn = 0;
  for (auto c : costs) mn = std::min(mn, c);
  if (mn < 0)
    for (auto& c : costs) c -= mn;
  return mn;
}

}  // namespace detail

// Minimum-cost association: every user to exactly one drone, at most
// capacity users per drone. Throws InfeasibleError when capacity is
// insufficient.
inline model::Association solve_association(const CostMatrix& cost,
                                            int capacity) {
  const int U = cost.num_users;
  const int D = cost.num_dcs;
  if (U < 1 || D < 1) throw std::invalid_argument("association: empty");
  if (capacity < 1 || static_cast<long long>(capacity) * D < U)
    throw model::InfeasibleError("association: insufficient capacity");

  std::vector<std::int64_t> ic(cost.c.size());
  for (size_t i = 0; i < ic.size(); ++i) ic[i] = scaled_cost(cost.c[i]);
  detail::nonneg_shift(ic);

  // nodes: 0 source, 1..U users, U+1..U+D drones, U+D+1 sink
  flow::MinCostFlow f(U + D + 2);
  const int source = 0, sink = U + D + 1;
  for (int u = 0; u < U; ++u) f.add_edge(source, 1 + u, 1, 0);
  std::vector<int> edge_id(static_cast<size_t>(U) * D);
  for (int u = 0; u < U; ++u)
    for (int d = 0; d < D; ++d)
      edge_id[static_cast<size_t>(u) * D + d] =
          f.add_edge(1 + u, 1 + U + d, 1, ic[static_cast<size_t>(u) * D + d]);
  for (int d = 0; d < D; ++d) f.add_edge(1 + U + d, sink, capacity, 0);

  const auto res = f.solve(source, sink, U);
  if (res.flow != U)
    throw model::InfeasibleError("association: flow could not place all users");

  model::Association a(U, D);
  for (int u = 0; u < U; ++u)
    for (int d = 0; d < D; ++d)
      if (f.flow_on(edge_id[static_cast<size_t>(u) * D + d]) > 0)
        a.at(u, d) = 1;
  return a;
}

// Minimum-cost schedule for a fixed association. Drones are independent
// once the association is fixed, so each gets its own flow:
//   minimal: each associated user receives exactly min_slots slots.
//   full:    every slot is assigned; a large penalty layer on service
//            beyond min_slots makes the minimum-quota constraint bind
//            before any cost differences, keeping the solve exact.
inline model::Schedule solve_scheduling(const SlotCostTensor& w,
                                        const model::Association& assoc,
                                        int min_slots, int num_slots,
                                        ScheduleFill fill) {
  const int U = w.num_users;
  const int D = w.num_dcs;
  if (assoc.num_users != U || assoc.num_dcs != D || w.num_slots != num_slots)
    throw std::invalid_argument("scheduling: shape mismatch");

  model::Schedule k(U, D, num_slots);
  for (int d = 0; d < D; ++d) {
    const auto users = assoc.users_of(d);
    const int m = static_cast<int>(users.size());
    if (m == 0) continue;
    if (static_cast<long long>(m) * min_slots > num_slots)
      throw model::InfeasibleError("scheduling: drone " + std::to_string(d) +
                                   " lacks slots for its users");

    std::vector<std::int64_t> ic(static_cast<size_t>(m) * num_slots);
    for (int j = 0; j < m; ++j)
      for (int n = 0; n < num_slots; ++n)
        ic[static_cast<size_t>(j) * num_slots + n] =
            scaled_cost(w.at(users[j], d, n));
    detail::nonneg_shift(ic);

    if (fill == ScheduleFill::minimal) {
      // nodes: 0 source, 1..m users, m+1..m+N slots, m+N+1 sink
      flow::MinCostFlow f(m + num_slots + 2);
      const int source = 0, sink = m + num_slots + 1;
      for (int j = 0; j < m; ++j) f.add_edge(source, 1 + j, min_slots, 0);
      std::vector<int> eid(static_cast<size_t>(m) * num_slots);
      for (int j = 0; j < m; ++j)
        for (int n = 0; n < num_slots; ++n)
          eid[static_cast<size_t>(j) * num_slots + n] =
              f.add_edge(1 + j, 1 + m + n, 1,
                         ic[static_cast<size_t>(j) * num_slots + n]);
      for (int n = 0; n < num_slots; ++n) f.add_edge(1 + m + n, sink, 1, 0);
      const auto res =
          f.solve(source, sink, static_cast<std::int64_t>(m) * min_slots);
      if (res.flow != static_cast<std::int64_t>(m) * min_slots)
        throw model::InfeasibleError("scheduling: quota flow infeasible");
      for (int j = 0; j < m; ++j)
        for (int n = 0; n < num_slots; ++n)
          if (f.flow_on(eid[static_cast<size_t>(j) * num_slots + n]) > 0)
            k.at(users[j], d, n) = 1;
    } else {
      std::int64_t max_c = 0;
      for (auto c : ic) max_c = std::max(max_c, c);
      const std::int64_t penalty = max_c * num_slots + 1;
      // nodes: 0 source, 1..N slots, N+1..N+m users, N+m+1 sink
      flow::MinCostFlow f(num_slots + m + 2);
      const int source = 0, sink = num_slots + m + 1;
      for (int n = 0; n < num_slots; ++n) f.add_edge(source, 1 + n, 1, 0);
      std::vector<int> eid(static_cast<size_t>(m) * num_slots);
      for (int n = 0; n < num_slots; ++n)
        for (int j = 0; j < m; ++j)
          eid[static_cast<size_t>(j) * num_slots + n] =
              f.add_edge(1 + n, 1 + num_slots + j, 1,
                         ic[static_cast<size_t>(j) * num_slots + n]);
      for (int j = 0; j < m; ++j) {
        f.add_edge(1 + num_slots + j, sink, min_slots, 0);
        f.add_edge(1 + num_slots + j, sink, num_slots - min_slots, penalty);
      }
      const auto res = f.solve(source, sink, num_slots);
      if (res.flow != num_slots)
        throw model::InfeasibleError("scheduling: fill flow infeasible");
      for (int j = 0; j < m; ++j)
        for (int n = 0; n < num_slots; ++n)
          if (f.flow_on(eid[static_cast<size_t>(j) * num_slots + n]) > 0)
            k.at(users[j], d, n) = 1;
    }
  }
  return k;
}

// ---------------------------------------------------------------------------
// Exhaustive reference solvers. Deliberately independent of the flow
// formulation above; guarded against combinatorial blow-up.

inline void check_brute_guards(int users, int dcs, int slots) {
  if (users > 8 || dcs > 3 || slots > 12)
    throw std::invalid_argument("brute force: instance exceeds size guard");
}

inline model::Association brute_force_association(const CostMatrix& cost,
                                                  int capacity) {
  const int U = cost.num_users;
  const int D = cost.num_dcs;
  check_brute_guards(U, D, 0);
  if (capacity < 1 || static_cast<long long>(capacity) * D < U)
    throw model::InfeasibleError("association: insufficient capacity");

  std::vector<std::int64_t> ic(cost.c.size());
  for (size_t i = 0; i < ic.size(); ++i) ic[i] = scaled_cost(cost.c[i]);

  std::vector<int> pick(U, -1), best_pick;
  std::vector<int> load(D, 0);
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  auto rec = [&](auto&& self, int u, std::int64_t acc) -> void {
    if (u == U) {
      if (acc < best) {
        best = acc;
        best_pick = pick;
      }
      return;
    }
    for (int d = 0; d < D; ++d) {
      if (load[d] == capacity) continue;
      pick[u] = d;
      ++load[d];
      self(self, u + 1, acc + ic[static_cast<size_t>(u) * D + d]);
      --load[d];
      pick[u] = -1;
    }
  };
  rec(rec, 0, 0);
  if (best_pick.empty())
    throw model::InfeasibleError("association: no feasible assignment");

  model::Association a(U, D);
  for (int u = 0; u < U; ++u) a.at(u, best_pick[u]) = 1;
  return a;
}

// Exhaustive optimum over all schedules via dynamic programming on
// (slot, per-user service counts clamped at the quota); the clamp loses
// nothing because slots past the quota are unconstrained.
inline model::Schedule brute_force_schedule(const SlotCostTensor& w,
                                            const model::Association& assoc,
                                            int min_slots, int num_slots,
                                            ScheduleFill fill) {
  check_brute_guards(w.num_users, w.num_dcs, num_slots);
  model::Schedule k(w.num_users, w.num_dcs, num_slots);
  const std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

  for (int d = 0; d < w.num_dcs; ++d) {
    const auto users = assoc.users_of(d);
    const int m = static_cast<int>(users.size());
    if (m == 0) continue;
    if (static_cast<long long>(m) * min_slots > num_slots)
      throw model::InfeasibleError("scheduling: drone lacks slots");

    int states = 1;
    for (int j = 0; j < m; ++j) {
      states *= (min_slots + 1);
      if (states > (1 << 22))
        throw std::invalid_argument("brute force: state space exceeds guard");
    }
    std::vector<int> radix(m);
    int r = 1;
    for (int j = 0; j < m; ++j) {
      radix[j] = r;
      r *= (min_slots + 1);
    }

    std::vector<std::int64_t> dp(states, kInf), nxt(states);
    // choice[n][state] = -1 for idle, else user position in `users`
    std::vector<std::vector<int>> choice(num_slots,
                                         std::vector<int>(states, -2));
    std::vector<std::vector<int>> prev(num_slots,
                                       std::vector<int>(states, -1));
    dp[0] = 0;
    for (int n = 0; n < num_slots; ++n) {
      std::fill(nxt.begin(), nxt.end(), kInf);
      for (int st = 0; st < states; ++st) {
        if (dp[st] >= kInf) continue;
        if (fill == ScheduleFill::minimal && dp[st] < nxt[st]) {
          nxt[st] = dp[st];
          choice[n][st] = -1;
          prev[n][st] = st;
        }
        for (int j = 0; j < m; ++j) {
          const std::int64_t c =
              dp[st] + scaled_cost(w.at(users[j], d, n));
          const int digit = (st / radix[j]) % (min_slots + 1);
          const int st2 =
              digit < min_slots ? st + radix[j] : st;  // clamp at quota
          if (c < nxt[st2]) {
            nxt[st2] = c;
            choice[n][st2] = j;
            prev[n][st2] = st;
          }
        }
      }
      dp.swap(nxt);
    }
    const int full_state = states - 1;
    if (dp[full_state] >= kInf)
      throw model::InfeasibleError("scheduling: no feasible schedule");

    int st = full_state;
    for (int n = num_slots - 1; n >= 0; --n) {
      const int j = choice[n][st];
      if (j >= 0) k.at(users[j], d, n) = 1;
      st = prev[n][st];
    }
  }
  return k;
}

}  // namespace dctraj::assign
