#pragma once

// Air-to-ground channel models: user-to-drone (U2D) pathloss driven by an
// elevation-angle LoS probability, and drone-to-base-station (D2B) pathloss
// with an angle-dependent excess term. All angles are handled in degrees
// inside this header; callers never deal with the conversion.
//
// Everything here is a pure function of its arguments and is safe to call
// concurrently.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace dctraj::channel {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kDegPerRad = 180.0 / 3.14159265358979323846;

// U2D model parameters. `a` and `b` shape the LoS-probability sigmoid,
// `eta_los`/`eta_nlos` are the dB offsets blended by that probability.
struct U2dParams {
  double a = 4.88;            // dimensionless sigmoid shape
  double b = 0.43;            // per-degree sigmoid shape
  double eta_los = 0.1;       // dB
  double eta_nlos = 21.0;     // dB
  double fc = 2.4e9;          // carrier frequency, Hz
  double c = kSpeedOfLight;   // propagation speed, m/s
};

// D2B model parameters: log-distance term plus an excess term
// A*(theta - theta0)*exp((theta0 - theta)/B) that depends on the elevation
// angle theta (degrees) of the drone as seen from the BS antenna.
struct D2bParams {
  double alpha = 3.04;    // pathloss exponent
  double A = -23.29;      // dB per degree
  double theta0 = -3.61;  // degrees
  double B = 4.14;        // degrees
  double eta0 = 20.7;     // dB
};

inline U2dParams suburban_u2d() { return U2dParams{}; }
inline D2bParams suburban_d2b() { return D2bParams{}; }

struct PathlossDb {
  double db = 0.0;
};

// Elevation angle in degrees seen from a ground point at horizontal
// distance r toward an aerial point at altitude h. r == 0 maps to the
// overhead limit of 90 degrees.
inline double elevation_deg(double r, double h) {
  if (r == 0.0 && h == 0.0)
    throw std::domain_error("elevation_deg: zero distance");
  if (r == 0.0) return 90.0;
  return std::atan(h / r) * kDegPerRad;
}

inline double los_probability(double r, double h, const U2dParams& p) {
  const double theta = elevation_deg(r, h);
  return 1.0 / (1.0 + p.a * std::exp(-p.b * (theta - p.a)));
}

// Free-space term of the U2D model at 3D distance d.
inline double u2d_free_space_db(double d, const U2dParams& p) {
  return 20.0 * std::log10(4.0 * M_PI * p.fc * d / p.c);
}

// U2D pathloss at horizontal distance r and altitude h:
// free-space term plus the LoS-probability blend of the two offsets.
inline PathlossDb u2d_pathloss(double r, double h, const U2dParams& p) {
  if (r == 0.0 && h == 0.0)
    throw std::domain_error("u2d_pathloss: zero distance");
  const double d = std::sqrt(r * r + h * h);
  const double plos = los_probability(r, h, p);
  return {u2d_free_space_db(d, p) + plos * p.eta_los +
          (1.0 - plos) * p.eta_nlos};
}

// First and second derivatives of the U2D pathloss with respect to
// altitude, used by the altitude optimizer's Newton steps. Requires r > 0
// (for r == 0 the pathloss is monotone in h and needs no derivative).
inline double u2d_pathloss_dh(double r, double h, const U2dParams& p) {
  const double s = r * r + h * h;
  const double delta = p.eta_los - p.eta_nlos;
  const double plos = los_probability(r, h, p);
  const double tprime = kDegPerRad * r / s;
  const double pprime = p.b * tprime * plos * (1.0 - plos);
  return (20.0 / std::log(10.0)) * h / s + delta * pprime;
}

inline double u2d_pathloss_d2h(double r, double h, const U2dParams& p) {
  const double s = r * r + h * h;
  const double delta = p.eta_los - p.eta_nlos;
  const double plos = los_probability(r, h, p);
  const double tprime = kDegPerRad * r / s;
  const double tsecond = -2.0 * kDegPerRad * r * h / (s * s);
  const double pprime = p.b * tprime * plos * (1.0 - plos);
  const double psecond =
      p.b * (tsecond * plos * (1.0 - plos) + tprime * pprime * (1.0 - 2.0 * plos));
  return (20.0 / std::log(10.0)) * (r * r - h * h) / (s * s) + delta * psecond;
}

// Horizontal distances below this are clamped before the D2B log term;
// a drone never flies through the BS mast.
inline constexpr double kD2bMinRadius = 1.0;  // m

// D2B pathloss evaluated at an explicit elevation angle (degrees).
inline PathlossDb d2b_pathloss_at_angle(double r, double theta_deg,
                                        const D2bParams& p) {
  if (r <= 0.0) throw std::domain_error("d2b_pathloss: r must be positive");
  const double rc = std::max(r, kD2bMinRadius);
  const double excess =
      p.A * (theta_deg - p.theta0) * std::exp((p.theta0 - theta_deg) / p.B);
  return {10.0 * p.alpha * std::log10(rc) + excess + p.eta0};
}

inline PathlossDb d2b_pathloss(double r, double h, const D2bParams& p) {
  if (r <= 0.0) throw std::domain_error("d2b_pathloss: r must be positive");
  const double rc = std::max(r, kD2bMinRadius);
  return d2b_pathloss_at_angle(rc, std::atan(h / rc) * kDegPerRad, p);
}

struct RadiusSearch {
  double r_min = kD2bMinRadius;
  double r_max = 10000.0;
};

// Largest horizontal distance r from the BS at which a drone flying at
// altitude h still meets the pathloss bound l_db. The excess term is not
// monotone in the angle, so the feasible set of radii can have gaps; the
// search samples densely, keeps the outermost feasible run, and bisects
// its boundary to 1e-3 m, always landing on the feasible side.
// Returns std::nullopt when no radius satisfies the bound.
inline std::optional<double> d2b_feasible_radius(double h, double l_db,
                                                 const D2bParams& p,
                                                 RadiusSearch lim = {}) {
  if (!std::isfinite(l_db)) {
    if (l_db > 0) return lim.r_max;  // unconstrained
    return std::nullopt;
  }
  auto ok = [&](double r) { return d2b_pathloss(r, h, p).db <= l_db; };
  if (ok(lim.r_max)) return lim.r_max;

  constexpr int kSamples = 512;
  int last_ok = -1;
  const double step = (lim.r_max - lim.r_min) / kSamples;
  for (int i = 0; i <= kSamples; ++i) {
    if (ok(lim.r_min + step * i)) last_ok = i;
  }
  if (last_ok < 0) return std::nullopt;

  double lo = lim.r_min + step * last_ok;
  double hi = std::min(lim.r_max, lo + step);
  while (hi - lo > 1e-3) {
    const double mid = 0.5 * (lo + hi);
    if (ok(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// All maximal altitude intervals [lo, hi] within [0, h_cap] where a drone
// at horizontal distance r from the BS meets the pathloss bound. Dense
// sampling (>= 1000 points) followed by bisection of each boundary to
// 1e-3 m; boundaries land on the feasible side. Empty result means the
// bound cannot be met at this radius.
inline std::vector<Interval> d2b_feasible_altitude_intervals(
    double r, double l_db, const D2bParams& p, double h_cap = 1000.0) {
  std::vector<Interval> out;
  if (!std::isfinite(l_db)) {
    if (l_db > 0) out.push_back({0.0, h_cap});
    return out;
  }
  auto ok = [&](double h) { return d2b_pathloss(r, h, p).db <= l_db; };
  auto refine = [&](double good, double bad) {
    while (std::abs(bad - good) > 1e-3) {
      const double mid = 0.5 * (good + bad);
      if (ok(mid))
        good = mid;
      else
        bad = mid;
    }
    return good;
  };

  constexpr int kSamples = 1024;
  const double step = h_cap / kSamples;
  bool prev = ok(0.0);
  double cur_lo = prev ? 0.0 : -1.0;
  for (int i = 1; i <= kSamples; ++i) {
    const double h = step * i;
    const bool now = ok(h);
    if (now && !prev) cur_lo = refine(h, h - step);
    if (!now && prev) {
      out.push_back({cur_lo, refine(h - step, h)});
      cur_lo = -1.0;
    }
    prev = now;
  }
  if (prev && cur_lo >= 0.0) out.push_back({cur_lo, h_cap});
  return out;
}

}  // namespace dctraj::channel
