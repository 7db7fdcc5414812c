#pragma once

// Upper bounds: closed-form sum-DoF formulas and the two-user Gaussian
// sum-rate bound
//
//   R1 + R2 <= max_A  I(X1,X2,Xr; Y1) + I(X2,Xr; Y2 | Y1, X1)
//
// over jointly Gaussian inputs whose covariance A has no X1-X2 correlation.
// All rates are in bits.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "doflab/channel.hpp"
#include "doflab/scalar.hpp"

namespace doflab {

// ---------------------------------------------------------------------------
// Closed-form DoF

/// 2 for K = 2, 2K/3 for K > 2. Holds for time-varying and constant channels.
inline Rational dof_upper(int num_users, bool /*time_varying*/ = true) {
  if (num_users < 2) throw std::invalid_argument("dof_upper requires K >= 2");
  if (num_users == 2) return Rational(2);
  Rational r(2 * num_users, 3);
  r.canonicalize();
  return r;
}

inline mpz_class binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  mpz_class out;
  mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return out;
}

/// Summing d_j + d_k + d_l <= 2 over all triples gives C(K-1,2) d_sum <= 2 C(K,3);
/// checks that this reproduces dof_upper(K).
inline bool counting_identity_check(int num_users) {
  if (num_users < 3) throw std::invalid_argument("counting identity needs K >= 3");
  Rational bound(mpz_class(2 * binomial(num_users, 3)), binomial(num_users - 1, 2));
  bound.canonicalize();
  return bound == dof_upper(num_users);
}

// ---------------------------------------------------------------------------
// Two-user channel gains and the Gaussian bound

/// hjk is the gain from transmitter j to receiver k.
struct TwoUserGains {
  double h11 = 0, h12 = 0, h21 = 0, h22 = 0, hr1 = 0, hr2 = 0;

  /// Users a and b of a constant channel at the given slot.
  template <class T>
  static TwoUserGains from_channel(const ChannelRealization<T>& chan, int a = 0, int b = 1, int slot = 0) {
    TwoUserGains g;
    g.h11 = to_double(chan.h(a, a, slot));
    g.h12 = to_double(chan.h(a, b, slot));
    g.h21 = to_double(chan.h(b, a, slot));
    g.h22 = to_double(chan.h(b, b, slot));
    g.hr1 = to_double(chan.relay(a, slot));
    g.hr2 = to_double(chan.relay(b, slot));
    return g;
  }

  /// Gains seen by receiver 1 from (X1, X2, Xr).
  Eigen::Vector3d to_rx1() const { return {h11, h21, hr1}; }
  Eigen::Vector3d to_rx2() const { return {h12, h22, hr2}; }
};

struct GaussianInputCovariance {
  double P1 = 0, P2 = 0, Pr = 0;
  double rho1 = 0, rho2 = 0;

  Eigen::Matrix3d matrix() const {
    Eigen::Matrix3d a = Eigen::Matrix3d::Zero();
    a(0, 0) = P1;
    a(1, 1) = P2;
    a(2, 2) = Pr;
    a(0, 2) = a(2, 0) = rho1 * std::sqrt(P1 * Pr);
    a(1, 2) = a(2, 1) = rho2 * std::sqrt(P2 * Pr);
    return a;
  }

  static constexpr double kPsdSlack = 1e-12;

  /// rho1^2 + rho2^2 <= 1, nonnegative powers, and smallest eigenvalue of A
  /// at least -1e-12 relative to max(1, trace A).
  bool is_psd() const {
    if (P1 < 0 || P2 < 0 || Pr < 0) return false;
    if (std::abs(rho1) > 1 || std::abs(rho2) > 1) return false;
    if (rho1 * rho1 + rho2 * rho2 > 1 + kPsdSlack) return false;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(matrix(), Eigen::EigenvaluesOnly);
    double scale = std::max(1.0, P1 + P2 + Pr);
    return es.eigenvalues().minCoeff() >= -kPsdSlack * scale;
  }

  bool within_power(double p) const { return P1 <= p && P2 <= p && Pr <= p; }
};

/// Evaluates the bound's two mutual-information terms in closed form for unit
/// noise at both receivers:
///   I(X1,X2,Xr;Y1)        = 1/2 log2 Var(Y1)
///   I(X2,Xr;Y2 | Y1,X1)   = 1/2 log2 [det Cov(X1,Y1,Y2) / det Cov(X1,Y1)]
/// (X1 is dropped from the conditioning set when P1 = 0).
inline double two_user_bound_value(const TwoUserGains& gains, const GaussianInputCovariance& cov) {
  if (!cov.is_psd()) throw std::invalid_argument("input covariance is not positive semidefinite");
  const Eigen::Matrix3d a = cov.matrix();
  const Eigen::Vector3d g1 = gains.to_rx1(), g2 = gains.to_rx2();
  const Eigen::Vector3d e1(1, 0, 0);

  const double var_y1 = g1.dot(a * g1) + 1.0;
  const double var_y2 = g2.dot(a * g2) + 1.0;
  const double c_y1y2 = g1.dot(a * g2);
  const double term1 = 0.5 * std::log2(var_y1);

  double cond_var;
  if (cov.P1 > 0) {
    const double c_x1y1 = e1.dot(a * g1), c_x1y2 = e1.dot(a * g2);
    Eigen::Matrix3d full;
    full << cov.P1, c_x1y1, c_x1y2, c_x1y1, var_y1, c_y1y2, c_x1y2, c_y1y2, var_y2;
    Eigen::Matrix2d given;
    given << cov.P1, c_x1y1, c_x1y1, var_y1;
    cond_var = full.determinant() / given.determinant();
  } else {
    Eigen::Matrix2d full;
    full << var_y1, c_y1y2, c_y1y2, var_y2;
    cond_var = full.determinant() / var_y1;
  }
  // Var(Z2 | Z1) = 1; rounding can push the ratio a hair below it.
  const double term2 = 0.5 * std::log2(std::max(cond_var, 1.0));
  return term1 + term2;
}

struct BoundOptimizerOptions {
  int power_points = 9;       // per power axis, log-spaced up to P
  double power_span_decades = 4.0;
  int rho_points = 17;        // per correlation axis on [-1, 1]
  int refine_rounds = 3;
  double shrink_factor = 4.0;
  int refine_points = 9;      // candidates per coordinate line search
  /// Evaluated before the grid (e.g. the previous sweep point's optimum).
  std::vector<GaussianInputCovariance> warm_start;
  /// Called with every covariance handed to the evaluator.
  std::function<void(const GaussianInputCovariance&)> observer;
};

struct BoundOptimum {
  GaussianInputCovariance cov;
  double value = 0.0;
  long evaluations = 0;
  std::string resolution;  // human-readable grid/refinement description
};

/// Grid search followed by coordinate-wise refinement. Returns the best
/// feasible point found, a lower bound on the true maximum.
inline BoundOptimum optimize_two_user_bound(const TwoUserGains& gains, double power,
                                            const BoundOptimizerOptions& opt = {}) {
  if (!(power > 0)) throw std::invalid_argument("optimize_two_user_bound requires P > 0");
  BoundOptimum best;
  best.value = -std::numeric_limits<double>::infinity();

  auto consider = [&](const GaussianInputCovariance& c) {
    if (!c.within_power(power * (1 + 1e-12)) || c.rho1 * c.rho1 + c.rho2 * c.rho2 > 1.0) return;
    if (opt.observer) opt.observer(c);
    ++best.evaluations;
    double v = two_user_bound_value(gains, c);
    if (v > best.value) {
      best.value = v;
      best.cov = c;
    }
  };

  for (const auto& c : opt.warm_start) consider(c);

  const double log_p = std::log10(power);
  std::vector<double> pgrid, rgrid;
  for (int i = 0; i < opt.power_points; ++i) {
    double frac = opt.power_points > 1 ? static_cast<double>(opt.power_points - 1 - i) / (opt.power_points - 1) : 0.0;
    pgrid.push_back(std::pow(10.0, log_p - frac * opt.power_span_decades));
  }
  pgrid.back() = power;
  for (int i = 0; i < opt.rho_points; ++i)
    rgrid.push_back(opt.rho_points > 1 ? -1.0 + 2.0 * i / (opt.rho_points - 1) : 0.0);

  for (double p1 : pgrid)
    for (double p2 : pgrid)
      for (double pr : pgrid)
        for (double r1 : rgrid)
          for (double r2 : rgrid) consider({p1, p2, pr, r1, r2});

  // Coordinates: log10 of the three powers, then the two correlations.
  double pstep = opt.power_points > 1 ? opt.power_span_decades / (opt.power_points - 1) : 1.0;
  double rstep = opt.rho_points > 1 ? 2.0 / (opt.rho_points - 1) : 0.5;
  for (int round = 0; round < opt.refine_rounds; ++round) {
    for (int coord = 0; coord < 5; ++coord) {
      const GaussianInputCovariance base = best.cov;
      const bool is_power = coord < 3;
      const double step = is_power ? pstep : rstep;
      for (int t = 0; t < opt.refine_points; ++t) {
        double offset = opt.refine_points > 1 ? -step + 2.0 * step * t / (opt.refine_points - 1) : 0.0;
        GaussianInputCovariance c = base;
        if (is_power) {
          double* field = coord == 0 ? &c.P1 : coord == 1 ? &c.P2 : &c.Pr;
          if (*field <= 0) continue;
          *field = std::min(power, std::pow(10.0, std::log10(*field) + offset));
        } else {
          double* field = coord == 3 ? &c.rho1 : &c.rho2;
          *field = std::clamp(*field + offset, -1.0, 1.0);
        }
        consider(c);
      }
    }
    pstep /= opt.shrink_factor;
    rstep /= opt.shrink_factor;
  }

  best.resolution = std::to_string(opt.power_points) + " log-spaced powers over " +
                    std::to_string(opt.power_span_decades) + " decades x " + std::to_string(opt.rho_points) +
                    " correlations per axis; " + std::to_string(opt.refine_rounds) +
                    " coordinate refinement rounds, shrink " + std::to_string(opt.shrink_factor);
  return best;
}

struct BoundCurve {
  std::vector<double> p_db;
  std::vector<double> values_bits;
  std::vector<BoundOptimum> optima;
};

/// Optimizes at each grid power, warm-starting from the previous optimum so
/// the curve is nondecreasing in P.
inline BoundCurve bound_sweep(const TwoUserGains& gains, const std::vector<double>& p_db,
                              BoundOptimizerOptions opt = {}) {
  BoundCurve curve;
  const auto base_warm = opt.warm_start;
  for (double db : p_db) {
    double p = std::pow(10.0, db / 10.0);
    opt.warm_start = base_warm;
    if (!curve.optima.empty()) opt.warm_start.push_back(curve.optima.back().cov);
    auto best = optimize_two_user_bound(gains, p, opt);
    curve.p_db.push_back(db);
    curve.values_bits.push_back(best.value);
    curve.optima.push_back(best);
  }
  return curve;
}

struct TwoUserDofOptions {
  double relative_tolerance = 1e-12;
};

/// 1 when either h11*hr2 - h12*hr1 or h22*hr1 - h21*hr2 vanishes, else 2.
template <class T>
int two_user_dof_from_channel(const ChannelRealization<T>& chan, const TwoUserDofOptions& opt = {}) {
  if (chan.num_users() != 2) throw std::invalid_argument("two-user DoF requires K = 2");
  if (chan.mode() != ChannelMode::Constant) throw std::invalid_argument("two-user DoF requires a constant channel");
  auto vanishes = [&](const T& x, const T& y) {
    if constexpr (ScalarTraits<T>::exact) {
      return x == y;
    } else {
      return std::abs(x - y) <= opt.relative_tolerance * std::max(std::abs(x), std::abs(y));
    }
  };
  const T& h11 = chan.h(0, 0, 0);
  const T& h12 = chan.h(0, 1, 0);
  const T& h21 = chan.h(1, 0, 0);
  const T& h22 = chan.h(1, 1, 0);
  const T& hr1 = chan.relay(0, 0);
  const T& hr2 = chan.relay(1, 0);
  if (vanishes(T(h11 * hr2), T(h12 * hr1)) || vanishes(T(h22 * hr1), T(h21 * hr2))) return 1;
  return 2;
}

}  // namespace doflab
