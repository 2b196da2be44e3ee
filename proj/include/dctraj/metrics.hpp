#pragma once

// Per-user and aggregate pathloss statistics for evaluating solutions:
// per-user means over scheduled slots, dispersion across users, CDF
// samples, hover fractions and method-vs-method comparisons.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "dctraj/channel.hpp"
#include "dctraj/model.hpp"

namespace dctraj::metrics {

struct UserPathlossSummary {
  std::vector<double> user_mean_db;  // one entry per user
  double mean_per_user = 0.0;        // mean of the user means
  double mean_per_slot = 0.0;        // mean over all scheduled slots
  double stddev = 0.0;               // dispersion of the user means
  bool sample_stddev = false;        // population by default
  // (threshold dB, fraction of users with mean <= threshold), 1 dB apart
  std::vector<std::pair<double, double>> cdf;
};

inline UserPathlossSummary summarize(const model::Solution& sol,
                                     const model::Scenario& s,
                                     bool sample_stddev = false) {
  const int U = s.num_users();
  UserPathlossSummary out;
  out.sample_stddev = sample_stddev;
  out.user_mean_db.resize(U, 0.0);

  double slot_sum = 0.0;
  long slot_count = 0;
  for (int u = 0; u < U; ++u) {
    double sum = 0.0;
    int count = 0;
    for (int d = 0; d < s.num_dcs; ++d)
      for (int n = 0; n < s.num_slots; ++n) {
        if (!sol.sched.at(u, d, n)) continue;
        const Vec3& g = sol.traj.at(d, n);
        sum += channel::u2d_pathloss(distance(g.xy(), s.users[u]), g.h, s.u2d)
                   .db;
        ++count;
      }
    if (count == 0)
      throw std::invalid_argument("summarize: user " + std::to_string(u) +
                                  " has no scheduled slots");
    out.user_mean_db[u] = sum / count;
    slot_sum += sum;
    slot_count += count;
  }
  out.mean_per_slot = slot_sum / slot_count;

  double mean = 0.0;
  for (double v : out.user_mean_db) mean += v;
  mean /= U;
  out.mean_per_user = mean;

  double ss = 0.0;
  for (double v : out.user_mean_db) ss += (v - mean) * (v - mean);
  const int denom = sample_stddev ? std::max(1, U - 1) : U;
  out.stddev = std::sqrt(ss / denom);

  const double lo = std::floor(*std::min_element(out.user_mean_db.begin(),
                                                 out.user_mean_db.end()));
  const double hi = std::ceil(*std::max_element(out.user_mean_db.begin(),
                                                out.user_mean_db.end()));
  for (double x = lo; x <= hi + 0.5; x += 1.0) {
    int below = 0;
    for (double v : out.user_mean_db)
      if (v <= x) ++below;
    out.cdf.emplace_back(x, double(below) / U);
  }
  return out;
}

// Fraction of slots whose horizontal displacement to the next slot is
// below tol, per drone. A parked drone scores 1.
inline std::vector<double> hovering_fraction_per_dc(const model::Solution& sol,
                                                    const model::Scenario& s,
                                                    double tol = 1.0) {
  std::vector<double> out(s.num_dcs, 0.0);
  for (int d = 0; d < s.num_dcs; ++d) {
    int still = 0;
    for (int n = 0; n < s.num_slots; ++n) {
      const Vec3& cur = sol.traj.at(d, n);
      const Vec3& nxt = sol.traj.at(d, sol.traj.next_slot(n));
      if (distance(cur.xy(), nxt.xy()) < tol) ++still;
    }
    out[d] = double(still) / s.num_slots;
  }
  return out;
}

inline double hovering_fraction(const model::Solution& sol,
                                const model::Scenario& s, double tol = 1.0) {
  const auto per = hovering_fraction_per_dc(sol, s, tol);
  double sum = 0.0;
  for (double v : per) sum += v;
  return sum / per.size();
}

struct ComparisonReport {
  double mean_gap_db = 0.0;    // baseline mean minus trajectory mean
  double std_reduction = 0.0;  // (sigma_baseline - sigma_traj) / sigma_baseline
};

inline ComparisonReport compare(const UserPathlossSummary& trajectory,
                                const UserPathlossSummary& baseline) {
  ComparisonReport r;
  r.mean_gap_db = baseline.mean_per_user - trajectory.mean_per_user;
  r.std_reduction = baseline.stddev == 0.0
                        ? 0.0
                        : (baseline.stddev - trajectory.stddev) /
                              baseline.stddev;
  return r;
}

}  // namespace dctraj::metrics
