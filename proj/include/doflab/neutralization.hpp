#pragma once

// Interference neutralization through the cognitive relay. The relay sends
// X_r = sum_k c_k X_k; each c_k is chosen so the relay's copy of X_k cancels
// X_k's direct leak at the other active receiver(s).

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "doflab/channel.hpp"
#include "doflab/matrix.hpp"
#include "doflab/scalar.hpp"

namespace doflab {

/// A relay gain of zero at a receiver that needs cancellation.
class UnsolvableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The channel is off the set where the relay cancels all three users' interference.
class ConditionViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct NeutralizationOptions {
  /// |g| < degeneracy_tolerance * max|input gain| declares a float user degenerate.
  double degeneracy_tolerance = 1e-9;
};

template <class T>
struct NeutralizationSolution {
  int num_users = 0;
  int slot = 0;
  std::vector<int> active;  // 0-based user ids
  std::vector<T> c;         // relay coefficient per active user
  std::vector<T> g;         // effective direct gain per active user
  std::vector<bool> degenerate;
  /// residual(a, b): gain from active transmitter b to active receiver a after
  /// the relay's contribution; the diagonal holds g.
  Matrix<T> residual;

  bool any_degenerate() const { return std::find(degenerate.begin(), degenerate.end(), true) != degenerate.end(); }

  /// Largest off-diagonal residual magnitude.
  double max_residual_interference() const {
    double m = 0.0;
    for (std::size_t a = 0; a < residual.rows(); ++a)
      for (std::size_t b = 0; b < residual.cols(); ++b)
        if (a != b) m = std::max(m, ScalarTraits<T>::magnitude(residual(a, b)));
    return m;
  }
};

namespace detail {

template <class T>
double input_gain_scale(const ChannelRealization<T>& chan, const std::vector<int>& users, int slot) {
  double m = 0.0;
  for (int a : users) {
    m = std::max(m, ScalarTraits<T>::magnitude(chan.relay(a, slot)));
    for (int b : users) m = std::max(m, ScalarTraits<T>::magnitude(chan.h(a, b, slot)));
  }
  return m;
}

template <class T>
bool is_degenerate_gain(const T& g, double scale, const NeutralizationOptions& opt) {
  if constexpr (ScalarTraits<T>::exact) {
    return ScalarTraits<T>::is_zero(g, 0.0);
  } else {
    return std::abs(g) < opt.degeneracy_tolerance * scale;
  }
}

template <class T>
NeutralizationSolution<T> assemble(const ChannelRealization<T>& chan, std::vector<int> active, std::vector<T> c,
                                   int slot, const NeutralizationOptions& opt) {
  NeutralizationSolution<T> sol;
  sol.num_users = chan.num_users();
  sol.slot = slot;
  sol.active = std::move(active);
  sol.c = std::move(c);
  const std::size_t n = sol.active.size();
  sol.residual = Matrix<T>(n, n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const int rx = sol.active[a], tx = sol.active[b];
      sol.residual(a, b) = chan.h(tx, rx, slot) + chan.relay(rx, slot) * sol.c[b];
    }
  const double scale = input_gain_scale(chan, sol.active, slot);
  for (std::size_t a = 0; a < n; ++a) {
    sol.g.push_back(sol.residual(a, a));
    sol.degenerate.push_back(is_degenerate_gain(sol.g.back(), scale, opt));
  }
  return sol;
}

inline void check_user(int u, int k) {
  if (u < 0 || u >= k) throw std::invalid_argument("user index " + std::to_string(u + 1) + " out of range");
}

}  // namespace detail

/// Two active users a, b at one slot: c_a = -h(a->b)/hr_b, c_b = -h(b->a)/hr_a.
/// User a is degenerate exactly when h_aa*hr_b - h_ab*hr_a = 0.
template <class T>
NeutralizationSolution<T> solve_two_user(const ChannelRealization<T>& chan, int a, int b, int slot = 0,
                                         const NeutralizationOptions& opt = {}) {
  detail::check_user(a, chan.num_users());
  detail::check_user(b, chan.num_users());
  if (a == b) throw std::invalid_argument("two distinct users required");
  const T& hra = chan.relay(a, slot);
  const T& hrb = chan.relay(b, slot);
  if (ScalarTraits<T>::is_zero(hra, 0.0) || ScalarTraits<T>::is_zero(hrb, 0.0))
    throw UnsolvableError("relay gain is zero at receiver " + std::to_string(ScalarTraits<T>::is_zero(hra, 0.0) ? a + 1 : b + 1) +
                          "; interference cannot be neutralized");
  T ca = -chan.h(a, b, slot) / hrb;
  T cb = -chan.h(b, a, slot) / hra;
  return detail::assemble(chan, {a, b}, {ca, cb}, slot, opt);
}

/// Per-slot re-solve for time-varying channels.
template <class T>
std::vector<NeutralizationSolution<T>> solve_two_user_per_slot(const ChannelRealization<T>& chan, int a, int b,
                                                               const NeutralizationOptions& opt = {}) {
  std::vector<NeutralizationSolution<T>> out;
  for (int i = 0; i < chan.n_slots(); ++i) out.push_back(solve_two_user(chan, a, b, i, opt));
  return out;
}

/// Three users, one kept silent; the other two use the two-user scheme.
template <class T>
NeutralizationSolution<T> solve_three_user_pair(const ChannelRealization<T>& chan, int silent_user, int slot = 0,
                                                const NeutralizationOptions& opt = {}) {
  if (chan.num_users() != 3) throw std::invalid_argument("three-user scheme requires K = 3");
  detail::check_user(silent_user, 3);
  std::vector<int> act;
  for (int k = 0; k < 3; ++k)
    if (k != silent_user) act.push_back(k);
  return solve_two_user(chan, act[0], act[1], slot, opt);
}

struct FullCancellationReport {
  std::array<bool, 3> ratio_conditions{};
  std::array<bool, 3> nondegeneracy_conditions{};
  bool all_pass = false;

  /// Empty when all_pass.
  std::string first_failure() const {
    static const char* ratio_text[3] = {"h32*hr1 == hr2*h31", "h23*hr1 == hr3*h21", "h13*hr2 == hr3*h12"};
    static const char* nondeg_text[3] = {"h11*hr2 != hr1*h12", "h22*hr1 != hr2*h21", "h33*hr1 != hr3*h31"};
    for (int i = 0; i < 3; ++i)
      if (!ratio_conditions[i])
        return "ratio condition " + std::to_string(i + 1) + " violated (" + ratio_text[i] + " fails)";
    for (int i = 0; i < 3; ++i)
      if (!nondegeneracy_conditions[i])
        return "nondegeneracy condition " + std::to_string(i + 1) + " violated (" + nondeg_text[i] + " fails)";
    return {};
  }
};

struct FullCancellationOptions {
  /// Float mode: a == b when |a - b| <= tol * max(|a|, |b|).
  double relative_tolerance = 1e-12;
};

namespace detail {

template <class T>
bool products_equal(const T& lhs, const T& rhs, const FullCancellationOptions& opt) {
  if constexpr (ScalarTraits<T>::exact) {
    return lhs == rhs;
  } else {
    return std::abs(lhs - rhs) <= opt.relative_tolerance * std::max(std::abs(lhs), std::abs(rhs));
  }
}

}  // namespace detail

/// Checks, without division, the three ratio equalities and three
/// nondegeneracy inequalities under which the relay cancels all interference
/// for three users at once.
template <class T>
FullCancellationReport check_corollary_conditions(const ChannelRealization<T>& chan, int slot = 0,
                                                  const FullCancellationOptions& opt = {}) {
  if (chan.num_users() != 3) throw std::invalid_argument("full-cancellation check requires K = 3");
  // 1-based accessors to keep the conditions readable.
  auto h = [&](int tx, int rx) -> const T& { return chan.h(tx - 1, rx - 1, slot); };
  auto hr = [&](int rx) -> const T& { return chan.relay(rx - 1, slot); };
  auto eq = [&](const T& l, const T& r) { return detail::products_equal<T>(l, r, opt); };
  FullCancellationReport rep;
  rep.ratio_conditions = {eq(h(3, 2) * hr(1), hr(2) * h(3, 1)), eq(h(2, 3) * hr(1), hr(3) * h(2, 1)),
                          eq(h(1, 3) * hr(2), hr(3) * h(1, 2))};
  rep.nondegeneracy_conditions = {!eq(h(1, 1) * hr(2), hr(1) * h(1, 2)), !eq(h(2, 2) * hr(1), hr(2) * h(2, 1)),
                                  !eq(h(3, 3) * hr(1), hr(3) * h(3, 1))};
  rep.all_pass = std::all_of(rep.ratio_conditions.begin(), rep.ratio_conditions.end(), [](bool b) { return b; }) &&
                 std::all_of(rep.nondegeneracy_conditions.begin(), rep.nondegeneracy_conditions.end(),
                             [](bool b) { return b; });
  return rep;
}

/// c_user as required at `receiver`: -h(user -> receiver) / hr_receiver.
template <class T>
T full_cancellation_coefficient(const ChannelRealization<T>& chan, int user, int receiver, int slot = 0) {
  if (user == receiver) throw std::invalid_argument("coefficient is defined by a cross link");
  const T& hr = chan.relay(receiver, slot);
  if (ScalarTraits<T>::is_zero(hr, 0.0))
    throw UnsolvableError("relay gain is zero at receiver " + std::to_string(receiver + 1));
  return -chan.h(user, receiver, slot) / hr;
}

template <class T>
NeutralizationSolution<T> solve_three_user_full(const ChannelRealization<T>& chan, int slot = 0,
                                                const NeutralizationOptions& opt = {},
                                                const FullCancellationOptions& cond_opt = {}) {
  auto rep = check_corollary_conditions(chan, slot, cond_opt);
  if (!rep.all_pass) throw ConditionViolation("full cancellation unavailable: " + rep.first_failure());
  std::vector<T> c;
  for (int k = 0; k < 3; ++k) {
    // First other receiver with a usable relay gain; the ratio conditions make
    // every choice agree.
    int rx = k == 0 ? 1 : 0;
    if (ScalarTraits<T>::is_zero(chan.relay(rx, slot), 0.0)) rx = 3 - k - rx;
    c.push_back(full_cancellation_coefficient(chan, k, rx, slot));
  }
  return detail::assemble(chan, {0, 1, 2}, std::move(c), slot, opt);
}

// ---------------------------------------------------------------------------
// Three-user DoF region: d_k <= 1 and d1 + d2 + d3 <= 2.

struct DofPoint {
  std::vector<Rational> d;

  DofPoint() = default;
  explicit DofPoint(std::vector<Rational> v) : d(std::move(v)) {
    for (const auto& x : d)
      if (x < 0 || x > 1) throw std::invalid_argument("DoF components must lie in [0, 1]");
  }
  DofPoint(std::initializer_list<Rational> v) : DofPoint(std::vector<Rational>(v)) {}

  Rational sum() const { return std::accumulate(d.begin(), d.end(), Rational(0)); }
  friend bool operator==(const DofPoint& a, const DofPoint& b) { return a.d == b.d; }
};

inline bool dof_region_contains(const DofPoint& p) {
  if (p.d.size() != 3) throw std::invalid_argument("three-user region needs a 3-component point");
  for (const auto& x : p.d)
    if (x < 0 || x > 1) return false;
  return p.sum() <= 2;
}

/// Vertices of the three-user region: the origin, one user active, or two
/// users active through neutralization.
inline std::vector<DofPoint> dof_region_vertices() {
  return {DofPoint{0, 0, 0}, DofPoint{1, 0, 0}, DofPoint{0, 1, 0}, DofPoint{0, 0, 1},
          DofPoint{1, 1, 0}, DofPoint{1, 0, 1}, DofPoint{0, 1, 1}};
}

struct WeightedPoint {
  DofPoint point;
  Rational weight;
};

inline DofPoint time_share(const std::vector<WeightedPoint>& targets) {
  if (targets.empty()) throw std::invalid_argument("time sharing needs at least one target");
  const auto vertices = dof_region_vertices();
  Rational total(0);
  std::vector<Rational> acc(3, Rational(0));
  for (const auto& t : targets) {
    if (t.weight < 0) throw std::invalid_argument("time-sharing weights must be nonnegative");
    if (std::find(vertices.begin(), vertices.end(), t.point) == vertices.end())
      throw std::invalid_argument("time-sharing target is not an achievable corner of the region");
    total += t.weight;
    for (int k = 0; k < 3; ++k) acc[k] += t.weight * t.point.d[k];
  }
  if (total != 1) throw std::invalid_argument("time-sharing weights must sum to 1");
  return DofPoint(acc);
}

}  // namespace doflab
