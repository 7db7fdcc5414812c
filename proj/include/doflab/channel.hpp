#pragma once

// Channel realizations of the K-user interference channel with a cognitive
// relay, the two-antenna (transmitter + relay) vector lifting, and the
// block-diagonal symbol-extended matrices built from it.
//
// Indices are 0-based in code. Gains are stored as h(tx, rx, slot) and
// relay(rx, slot).

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "doflab/matrix.hpp"
#include "doflab/scalar.hpp"

namespace doflab {

enum class ChannelMode { TimeVarying, Constant };
enum class Arithmetic { Float, ExactRational };

/// Gains with |h| below this are resampled.
inline constexpr double kMinGainMagnitude = 1e-6;

struct NetworkConfig {
  int num_users = 2;
  ChannelMode mode = ChannelMode::Constant;
  std::uint64_t seed = 0;
  Arithmetic arithmetic = Arithmetic::Float;
  int rational_denominator_bound = 16;

  void validate() const {
    if (num_users < 2) throw std::invalid_argument("num_users must be >= 2");
    if (arithmetic == Arithmetic::ExactRational && rational_denominator_bound < 2)
      throw std::invalid_argument("rational_denominator_bound must be >= 2");
  }
};

template <class T>
class ChannelRealization {
 public:
  ChannelRealization() = default;
  ChannelRealization(int num_users, int n_slots, ChannelMode mode)
      : k_(num_users),
        n_(n_slots),
        mode_(mode),
        h_(static_cast<std::size_t>(num_users * num_users * n_slots), ScalarTraits<T>::zero()),
        hr_(static_cast<std::size_t>(num_users * n_slots), ScalarTraits<T>::zero()) {
    if (num_users < 2) throw std::invalid_argument("num_users must be >= 2");
    if (n_slots < 1) throw std::invalid_argument("n_slots must be >= 1");
  }

  /// Constant channel from a K x K gain table gains[tx][rx] and relay gains relay[rx].
  static ChannelRealization constant(const std::vector<std::vector<T>>& gains, const std::vector<T>& relay,
                                     int n_slots = 1) {
    const int k = static_cast<int>(gains.size());
    if (static_cast<int>(relay.size()) != k) throw std::invalid_argument("relay gain count must equal K");
    ChannelRealization out(k, n_slots, ChannelMode::Constant);
    for (int i = 0; i < n_slots; ++i) {
      for (int tx = 0; tx < k; ++tx) {
        if (static_cast<int>(gains[tx].size()) != k) throw std::invalid_argument("gain table must be K x K");
        for (int rx = 0; rx < k; ++rx) out.h(tx, rx, i) = gains[tx][rx];
      }
      for (int rx = 0; rx < k; ++rx) out.relay(rx, i) = relay[rx];
    }
    return out;
  }

  int num_users() const { return k_; }
  int n_slots() const { return n_; }
  ChannelMode mode() const { return mode_; }

  T& h(int tx, int rx, int slot) { return h_[index(tx, rx, slot)]; }
  const T& h(int tx, int rx, int slot) const { return h_[index(tx, rx, slot)]; }
  T& relay(int rx, int slot) { return hr_[relay_index(rx, slot)]; }
  const T& relay(int rx, int slot) const { return hr_[relay_index(rx, slot)]; }

  /// Largest gain magnitude over all entries.
  double max_abs_gain() const {
    double m = 0.0;
    for (const auto& x : h_) m = std::max(m, ScalarTraits<T>::magnitude(x));
    for (const auto& x : hr_) m = std::max(m, ScalarTraits<T>::magnitude(x));
    return m;
  }

  /// Copy restricted to the listed users (in the given order).
  ChannelRealization restrict_to(const std::vector<int>& users) const {
    ChannelRealization out(static_cast<int>(users.size()), n_, mode_);
    for (int i = 0; i < n_; ++i)
      for (std::size_t a = 0; a < users.size(); ++a) {
        out.relay(static_cast<int>(a), i) = relay(users[a], i);
        for (std::size_t b = 0; b < users.size(); ++b)
          out.h(static_cast<int>(a), static_cast<int>(b), i) = h(users[a], users[b], i);
      }
    return out;
  }

  friend bool operator==(const ChannelRealization& a, const ChannelRealization& b) {
    return a.k_ == b.k_ && a.n_ == b.n_ && a.mode_ == b.mode_ && a.h_ == b.h_ && a.hr_ == b.hr_;
  }

 private:
  std::size_t index(int tx, int rx, int slot) const {
    check(tx, k_, "transmitter");
    check(rx, k_, "receiver");
    check(slot, n_, "slot");
    return (static_cast<std::size_t>(tx) * k_ + rx) * n_ + slot;
  }
  std::size_t relay_index(int rx, int slot) const {
    check(rx, k_, "receiver");
    check(slot, n_, "slot");
    return static_cast<std::size_t>(rx) * n_ + slot;
  }
  static void check(int v, int bound, const char* what) {
    if (v < 0 || v >= bound) throw std::out_of_range(std::string(what) + " index out of range");
  }

  int k_ = 0;
  int n_ = 0;
  ChannelMode mode_ = ChannelMode::Constant;
  std::vector<T> h_;
  std::vector<T> hr_;
};

using FloatChannel = ChannelRealization<double>;
using RationalChannel = ChannelRealization<Rational>;
using AnyChannel = std::variant<FloatChannel, RationalChannel>;

namespace detail {

inline double draw_float_gain(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  double x;
  do {
    x = normal(rng);
  } while (!std::isfinite(x) || std::abs(x) < kMinGainMagnitude);
  return x;
}

inline Rational draw_rational_gain(std::mt19937_64& rng, int q) {
  std::uniform_int_distribution<long> num(-2L * q, 2L * q);
  long p;
  do {
    p = num(rng);
  } while (p == 0);  // |p/q| >= 1/q > 1e-6 for every other draw
  Rational r(p, q);
  r.canonicalize();
  return r;
}

template <class T, class Draw>
ChannelRealization<T> sample_with(const NetworkConfig& cfg, int n_slots, Draw&& draw) {
  ChannelRealization<T> chan(cfg.num_users, n_slots, cfg.mode);
  const int k = cfg.num_users;
  const int distinct = cfg.mode == ChannelMode::Constant ? 1 : n_slots;
  for (int tx = 0; tx < k; ++tx)
    for (int rx = 0; rx < k; ++rx)
      for (int i = 0; i < distinct; ++i) chan.h(tx, rx, i) = draw();
  for (int rx = 0; rx < k; ++rx)
    for (int i = 0; i < distinct; ++i) chan.relay(rx, i) = draw();
  for (int i = distinct; i < n_slots; ++i) {
    for (int tx = 0; tx < k; ++tx)
      for (int rx = 0; rx < k; ++rx) chan.h(tx, rx, i) = chan.h(tx, rx, 0);
    for (int rx = 0; rx < k; ++rx) chan.relay(rx, i) = chan.relay(rx, 0);
  }
  return chan;
}

}  // namespace detail

/// Deterministic in (config, n_slots). Float: i.i.d. standard normal. Exact:
/// p/q with q = rational_denominator_bound and p uniform in [-2q, 2q] \ {0}.
inline AnyChannel sample_channel(const NetworkConfig& cfg, int n_slots) {
  cfg.validate();
  if (n_slots < 1) throw std::invalid_argument("n_slots must be >= 1");
  std::mt19937_64 rng(cfg.seed);
  if (cfg.arithmetic == Arithmetic::Float)
    return detail::sample_with<double>(cfg, n_slots, [&] { return detail::draw_float_gain(rng); });
  const int q = cfg.rational_denominator_bound;
  return detail::sample_with<Rational>(cfg, n_slots, [&] { return detail::draw_rational_gain(rng, q); });
}

template <class T>
ChannelRealization<T> sample_channel_as(NetworkConfig cfg, int n_slots) {
  cfg.arithmetic = std::is_same_v<T, double> ? Arithmetic::Float : Arithmetic::ExactRational;
  return std::get<ChannelRealization<T>>(sample_channel(cfg, n_slots));
}

// ---------------------------------------------------------------------------
// Exact degenerate instances. Random sampling never lands on these sets.

template <class T>
ChannelRealization<T> make_all_ones(int num_users) {
  std::vector<std::vector<T>> g(num_users, std::vector<T>(num_users, ScalarTraits<T>::one()));
  return ChannelRealization<T>::constant(g, std::vector<T>(num_users, ScalarTraits<T>::one()));
}

/// Two-user instance with h11*hr2 = h12*hr1 and h22*hr1 = h21*hr2.
inline RationalChannel make_two_user_degenerate(std::uint64_t seed, int q = 16) {
  std::mt19937_64 rng(seed);
  auto d = [&] { return detail::draw_rational_gain(rng, q); };
  Rational h12 = d(), h21 = d(), hr1 = d(), hr2 = d();
  Rational h11 = h12 * hr1 / hr2;
  Rational h22 = h21 * hr2 / hr1;
  return RationalChannel::constant({{h11, h12}, {h21, h22}}, {hr1, hr2});
}

/// The fixed three-user instance on which the relay cancels all interference:
/// hr = (1,2,3), h31 = 1, h32 = 2, h21 = 1, h23 = 3, h12 = 2, h13 = 3, hkk = 5.
inline RationalChannel make_full_cancellation_instance() {
  // gains[tx][rx]
  std::vector<std::vector<Rational>> g = {
      {Rational(5), Rational(2), Rational(3)},
      {Rational(1), Rational(5), Rational(3)},
      {Rational(1), Rational(2), Rational(5)},
  };
  return RationalChannel::constant(g, {Rational(1), Rational(2), Rational(3)});
}

/// Random three-user instance on the full-cancellation set: cross gains are
/// h(tx, rx) = -c_tx * hr_rx for random nonzero c, direct gains random.
inline RationalChannel make_full_cancellation_random(std::uint64_t seed, int q = 16) {
  std::mt19937_64 rng(seed);
  auto d = [&] { return detail::draw_rational_gain(rng, q); };
  for (;;) {
    std::vector<Rational> hr = {d(), d(), d()};
    std::vector<Rational> c = {d(), d(), d()};
    std::vector<std::vector<Rational>> g(3, std::vector<Rational>(3));
    bool ok = true;
    for (int tx = 0; tx < 3; ++tx)
      for (int rx = 0; rx < 3; ++rx) g[tx][rx] = tx == rx ? d() : Rational(-c[tx] * hr[rx]);
    for (int k = 0; k < 3; ++k)
      if (g[k][k] + hr[k] * c[k] == 0) ok = false;
    if (ok) return RationalChannel::constant(g, hr);
  }
}

// ---------------------------------------------------------------------------
// Vector lifting: transmitter k and the relay form a virtual two-antenna node.

enum class LinkDirection { Miso, Simo };

/// vec(tx, rx, slot) = [h(tx, rx, slot), relay(rx, slot)] in MISO direction.
/// For a fixed receiver and slot, the second component is shared by every
/// transmitter.
template <class T>
class VectorChannel {
 public:
  using Vec2 = std::array<T, 2>;

  VectorChannel() = default;
  VectorChannel(int k, int n, LinkDirection dir)
      : k_(k), n_(n), dir_(dir), v_(static_cast<std::size_t>(k * k * n)) {}

  int num_users() const { return k_; }
  int n_slots() const { return n_; }
  LinkDirection direction() const { return dir_; }

  Vec2& at(int tx, int rx, int slot) { return v_[index(tx, rx, slot)]; }
  const Vec2& at(int tx, int rx, int slot) const { return v_[index(tx, rx, slot)]; }

  friend bool operator==(const VectorChannel& a, const VectorChannel& b) {
    return a.k_ == b.k_ && a.n_ == b.n_ && a.dir_ == b.dir_ && a.v_ == b.v_;
  }

 private:
  std::size_t index(int tx, int rx, int slot) const {
    if (tx < 0 || tx >= k_ || rx < 0 || rx >= k_ || slot < 0 || slot >= n_)
      throw std::out_of_range("vector channel index out of range");
    return (static_cast<std::size_t>(tx) * k_ + rx) * n_ + slot;
  }

  int k_ = 0;
  int n_ = 0;
  LinkDirection dir_ = LinkDirection::Miso;
  std::vector<Vec2> v_;
};

template <class T>
VectorChannel<T> lift_to_miso(const ChannelRealization<T>& chan) {
  VectorChannel<T> out(chan.num_users(), chan.n_slots(), LinkDirection::Miso);
  for (int tx = 0; tx < chan.num_users(); ++tx)
    for (int rx = 0; rx < chan.num_users(); ++rx)
      for (int i = 0; i < chan.n_slots(); ++i) out.at(tx, rx, i) = {chan.h(tx, rx, i), chan.relay(rx, i)};
  return out;
}

/// Reverses every link: the reciprocal network's channel from transmitter j
/// to receiver k is the original vector from k to j. Applying it twice is the
/// identity.
template <class T>
VectorChannel<T> reciprocal_channels(const VectorChannel<T>& in) {
  const auto dir = in.direction() == LinkDirection::Miso ? LinkDirection::Simo : LinkDirection::Miso;
  VectorChannel<T> out(in.num_users(), in.n_slots(), dir);
  for (int tx = 0; tx < in.num_users(); ++tx)
    for (int rx = 0; rx < in.num_users(); ++rx)
      for (int i = 0; i < in.n_slots(); ++i) out.at(rx, tx, i) = in.at(tx, rx, i);
  return out;
}

template <class T>
struct ExtendedChannelMatrix {
  int receiver = 0;
  int transmitter = 0;
  int mu = 0;
  Matrix<T> entries;  // 2mu x mu
};

/// 2mu x mu block-diagonal channel from `transmitter` to `receiver` of the
/// reciprocal network over the first mu slots. Column m carries the vector
/// from original transmitter `receiver` to original receiver `transmitter`
/// in rows 2m and 2m+1; everything else is exactly zero.
template <class T>
ExtendedChannelMatrix<T> extend(const VectorChannel<T>& miso, int mu, int receiver, int transmitter) {
  if (miso.direction() != LinkDirection::Miso) throw std::invalid_argument("extend expects the MISO lifting");
  if (mu < 1) throw std::invalid_argument("extension length must be >= 1");
  if (mu > miso.n_slots())
    throw std::invalid_argument("extension length " + std::to_string(mu) + " exceeds available slots (" +
                                std::to_string(miso.n_slots()) + ")");
  ExtendedChannelMatrix<T> out{receiver, transmitter, mu, Matrix<T>(2 * mu, mu)};
  for (int m = 0; m < mu; ++m) {
    const auto& v = miso.at(receiver, transmitter, m);
    out.entries(2 * m, m) = v[0];
    out.entries(2 * m + 1, m) = v[1];
  }
  return out;
}

/// H = H_hat + H_tilde, where H_hat keeps the direct-gain rows and H_tilde
/// the relay rows. Only defined for direct links.
template <class T>
std::pair<Matrix<T>, Matrix<T>> split_direct(const ExtendedChannelMatrix<T>& hkk) {
  if (hkk.receiver != hkk.transmitter) throw std::invalid_argument("split_direct requires a direct link (k == j)");
  const auto& e = hkk.entries;
  Matrix<T> hat(e.rows(), e.cols()), tilde(e.rows(), e.cols());
  for (int m = 0; m < hkk.mu; ++m) {
    hat(2 * m, m) = e(2 * m, m);
    tilde(2 * m + 1, m) = e(2 * m + 1, m);
  }
  return {hat, tilde};
}

}  // namespace doflab
