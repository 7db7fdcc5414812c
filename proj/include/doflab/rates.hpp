#pragma once

// Sum-rate curves for the neutralization schemes and empirical DoF as the
// least-squares slope of sum rate against 1/2 log2 P.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "doflab/alignment.hpp"
#include "doflab/neutralization.hpp"
#include "doflab/scalar.hpp"

namespace doflab {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Inclusive grid min_db, min_db + step, ..., max_db.
inline std::vector<double> make_db_grid(double min_db, double max_db, double step_db) {
  if (!(step_db > 0) || max_db < min_db) throw std::invalid_argument("invalid dB grid");
  std::vector<double> out;
  const int n = static_cast<int>(std::floor((max_db - min_db) / step_db + 1e-9));
  for (int i = 0; i <= n; ++i) out.push_back(min_db + step_db * i);
  return out;
}

struct DofWindow {
  double min_db = 40.0;
  double max_db = 80.0;
  double step_db = 5.0;
};

struct RateCurve {
  std::string scheme_id;
  std::vector<double> p_db;
  std::vector<double> sum_rate_bits;
  std::vector<std::vector<double>> per_user_rates;  // [grid point][user]
};

struct DofEstimate {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
  double window_min_db = 0.0;
  double window_max_db = 0.0;
  int points = 0;
};

/// Per-node transmit powers [user 1 .. user K, relay] under the uniform power
/// rule: active users send p = P / max(1, sum c_k^2), the relay sum c_k^2 p,
/// silent users nothing.
template <class T>
std::vector<double> transmit_powers(const NeutralizationSolution<T>& sol, double power) {
  double csum = 0.0;
  for (const auto& c : sol.c) csum += to_double(c) * to_double(c);
  const double p = power / std::max(1.0, csum);
  std::vector<double> out(static_cast<std::size_t>(sol.num_users) + 1, 0.0);
  for (int u : sol.active) out[static_cast<std::size_t>(u)] = p;
  out.back() = csum * p;
  return out;
}

/// Rates of the active users (bits/channel use) with interference exactly
/// neutralized: R_k = 1/2 log2(1 + g_k^2 p).
template <class T>
std::vector<double> neutralized_sum_rate(const NeutralizationSolution<T>& sol, double power) {
  if (power < 0) throw std::invalid_argument("power must be nonnegative");
  for (std::size_t k = 0; k < sol.active.size(); ++k)
    if (sol.degenerate[k])
      throw std::invalid_argument("user " + std::to_string(sol.active[k] + 1) +
                                  " is degenerate (zero effective gain); drop it from the active set");
  const auto powers = transmit_powers(sol, power);
  std::vector<double> rates;
  for (std::size_t k = 0; k < sol.active.size(); ++k) {
    const double g = to_double(sol.g[k]);
    rates.push_back(0.5 * std::log2(1.0 + g * g * powers[static_cast<std::size_t>(sol.active[k])]));
  }
  return rates;
}

/// Rate curve averaged over per-slot solutions (one solution for constant
/// channels). Per-user columns cover all K users; silent users get 0.
template <class T>
RateCurve neutralization_rate_curve(const std::vector<NeutralizationSolution<T>>& per_slot,
                                    const std::vector<double>& p_db, std::string scheme_id) {
  if (per_slot.empty()) throw std::invalid_argument("no solutions to evaluate");
  RateCurve curve;
  curve.scheme_id = std::move(scheme_id);
  const auto k = static_cast<std::size_t>(per_slot.front().num_users);
  for (double db : p_db) {
    std::vector<double> users(k, 0.0);
    for (const auto& sol : per_slot) {
      auto r = neutralized_sum_rate(sol, db_to_linear(db));
      for (std::size_t a = 0; a < sol.active.size(); ++a)
        users[static_cast<std::size_t>(sol.active[a])] += r[a] / static_cast<double>(per_slot.size());
    }
    double sum = 0.0;
    for (double r : users) sum += r;
    curve.p_db.push_back(db);
    curve.per_user_rates.push_back(users);
    curve.sum_rate_bits.push_back(sum);
  }
  return curve;
}

/// Least squares of rate against x = 1/2 log2 P over grid points inside
/// [min_db, max_db]. Needs at least four points.
inline DofEstimate fit_dof_slope(const std::vector<double>& p_db, const std::vector<double>& rate_bits,
                                 double min_db, double max_db) {
  if (p_db.size() != rate_bits.size()) throw std::invalid_argument("grid and rate lengths differ");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < p_db.size(); ++i)
    if (p_db[i] >= min_db - 1e-9 && p_db[i] <= max_db + 1e-9) {
      xs.push_back(0.5 * std::log2(db_to_linear(p_db[i])));
      ys.push_back(rate_bits[i]);
    }
  if (xs.size() < 4)
    throw std::invalid_argument("DoF window holds " + std::to_string(xs.size()) + " grid points; need at least 4");
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  DofEstimate est;
  est.slope = sxy / sxx;
  est.intercept = my - est.slope * mx;
  for (std::size_t i = 0; i < xs.size(); ++i)
    est.max_residual = std::max(est.max_residual, std::abs(ys[i] - (est.slope * xs[i] + est.intercept)));
  est.window_min_db = min_db;
  est.window_max_db = max_db;
  est.points = static_cast<int>(xs.size());
  return est;
}

inline DofEstimate estimate_dof(const RateCurve& curve, const DofWindow& window = {}) {
  return fit_dof_slope(curve.p_db, curve.sum_rate_bits, window.min_db, window.max_db);
}

/// DoF of a verified alignment scheme. The relay forwards the sum of K
/// streams, so each virtual two-antenna node runs at P/K; that constant
/// factor leaves the DoF untouched, so the value comes from the verified
/// stream counts rather than from an SNR sweep.
struct MisoScaledDof {
  Rational achieved_dof;
  double power = 0.0;
  double per_node_power = 0.0;
  int power_scaling = 1;
};

inline MisoScaledDof miso_power_scaled_rate(const AlignmentReport& report, double power) {
  if (!report.evaluated) throw std::invalid_argument("alignment report was not produced by the verifier");
  if (power < 0) throw std::invalid_argument("power must be nonnegative");
  MisoScaledDof out;
  out.achieved_dof = report.achieved_dof;
  out.power = power;
  out.power_scaling = report.num_users;
  out.per_node_power = power / static_cast<double>(report.num_users);
  return out;
}

}  // namespace doflab
