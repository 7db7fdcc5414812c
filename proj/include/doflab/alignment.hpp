#pragma once

// Interference alignment over mu symbol extensions of the reciprocal
// (one-input, two-output) network obtained from the transmitter+relay
// vector lifting.
//
// Users 1..3 (group A) share one precoder V_A with 2mu/3 columns; users 4..K
// (group B) share V_B with fewer columns. For every group-A receiver k and
// group-B interferer j the per-slot vector h_kj is written as
// f h_ka + g h_kb (a, b the other two group-A users), giving diagonal
// alignment matrices F_kj = diag(f), G_kj = diag(g). Columns of V_A are
// products T1^e1 ... TG^eG applied to two generator vectors with exponents
// in {0..n}; V_B uses exponents in {0..n-1}, so F_kj V_B and G_kj V_B land in
// the column set of V_A and the group-B interference collapses onto the
// group-A interference at every group-A receiver.
//
// The construction is a reconstruction, not a proof; verify_alignment is
// the source of truth for what a given instance achieves.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "doflab/channel.hpp"
#include "doflab/linalg.hpp"
#include "doflab/matrix.hpp"
#include "doflab/scalar.hpp"

namespace doflab {

inline constexpr int kGroupASize = 3;
inline constexpr int kDefaultMaxMu = 1536;

class SingularAlignmentSystem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PrecoderConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The interference at a receiver spans more than 2mu - d_k dimensions.
class InterferenceSpanError : public std::runtime_error {
 public:
  InterferenceSpanError(int receiver, std::size_t measured, std::size_t allowed)
      : std::runtime_error("interference at receiver " + std::to_string(receiver + 1) + " spans " +
                           std::to_string(measured) + " dimensions; at most " + std::to_string(allowed) +
                           " leave room for the desired streams"),
        receiver_(receiver),
        measured_(measured),
        allowed_(allowed) {}
  int receiver() const { return receiver_; }
  std::size_t measured_dimension() const { return measured_; }
  std::size_t allowed_dimension() const { return allowed_; }

 private:
  int receiver_;
  std::size_t measured_, allowed_;
};

struct AlignmentConfig {
  int num_users = 3;
  int n_level = 1;
  /// Extension length for K = 3 (any positive multiple of 3). Ignored for
  /// K > 3, where mu = 3 (n+1)^gamma.
  int mu_k3 = 3;
  /// Also fold the group-B receivers' alignment matrices into the products.
  bool absorb_group_b_receivers = false;
  std::uint64_t seed = 0;
  /// Larger than the channel default: with q = 16 roughly one per-slot 2x2
  /// system in a hundred comes out singular.
  int rational_denominator_bound = 1024;
  int max_mu = kDefaultMaxMu;

  /// Number of alignment matrices entering the column products.
  int gamma() const {
    const int b = num_users - kGroupASize;
    int g = 2 * kGroupASize * b;
    if (absorb_group_b_receivers) g += 2 * b * b;
    return g;
  }

  /// mu = 3 (n+1)^gamma for K > 3; throws when it exceeds max_mu.
  int mu() const {
    validate();
    if (num_users == kGroupASize) return mu_k3;
    long long m = 3;
    for (int i = 0; i < gamma(); ++i) {
      m *= (n_level + 1);
      if (m > max_mu)
        throw std::invalid_argument("extension length 3*(n+1)^gamma exceeds the cap of " + std::to_string(max_mu));
    }
    return static_cast<int>(m);
  }

  void validate() const {
    if (num_users < kGroupASize) throw std::invalid_argument("alignment requires K >= 3");
    if (n_level < 1) throw std::invalid_argument("n_level must be >= 1");
    if (num_users == kGroupASize && (mu_k3 < 3 || mu_k3 % 3 != 0))
      throw std::invalid_argument("mu must be a positive multiple of 3");
  }
};

/// (n/(n+1))^gamma.
inline Rational group_b_fraction(int n_level, int gamma) {
  Rational base(n_level, n_level + 1), out(1);
  base.canonicalize();
  for (int i = 0; i < gamma; ++i) out *= base;
  return out;
}

/// epsilon_n = (2/3)(1 - (n/(n+1))^gamma): the per-extension stream deficit of group B.
inline Rational alignment_epsilon(int n_level, int gamma) {
  return Rational(2, 3) * (Rational(1) - group_b_fraction(n_level, gamma));
}

/// Normalized sum DoF 2 + (2(K-3)/3) (n/(n+1))^gamma, exact. gamma < 0
/// selects the default 6(K-3).
inline Rational achieved_dof_formula(int num_users, int n_level, int gamma = -1) {
  if (num_users < kGroupASize) throw std::invalid_argument("formula requires K >= 3");
  if (n_level < 1) throw std::invalid_argument("formula requires n >= 1");
  if (gamma < 0) gamma = 2 * kGroupASize * (num_users - kGroupASize);
  Rational coeff(2 * (num_users - kGroupASize), 3);
  coeff.canonicalize();
  Rational out = Rational(2) + coeff * group_b_fraction(n_level, gamma);
  out.canonicalize();
  return out;
}

// ---------------------------------------------------------------------------
// Alignment matrices

template <class T>
struct AlignmentMatrix {
  int receiver = 0;
  int interferer = 0;
  int reference_a = 0;
  int reference_b = 0;
  char kind = 'F';  // 'F' multiplies h_ka, 'G' multiplies h_kb
  std::vector<T> diagonal;
};

template <class T>
struct AlignmentMatrixSet {
  std::vector<AlignmentMatrix<T>> group_a_receivers;
  std::vector<AlignmentMatrix<T>> group_b_receivers;

  /// The matrices that enter the column products, in product order.
  std::vector<const AlignmentMatrix<T>*> product_set(const AlignmentConfig& cfg) const {
    std::vector<const AlignmentMatrix<T>*> out;
    for (const auto& m : group_a_receivers) out.push_back(&m);
    if (cfg.absorb_group_b_receivers)
      for (const auto& m : group_b_receivers) out.push_back(&m);
    return out;
  }
};

namespace detail {

/// Reciprocal-network vector from transmitter tx to receiver rx at a slot.
template <class T>
const std::array<T, 2>& reciprocal_vector(const VectorChannel<T>& miso, int rx, int tx, int slot) {
  return miso.at(rx, tx, slot);
}

template <class T>
void solve_pair(const VectorChannel<T>& miso, int mu, int k, int j, int a, int b,
                std::vector<AlignmentMatrix<T>>& out) {
  AlignmentMatrix<T> f{k, j, a, b, 'F', {}}, g{k, j, a, b, 'G', {}};
  for (int i = 0; i < mu; ++i) {
    const auto& x = reciprocal_vector(miso, k, j, i);
    const auto& u = reciprocal_vector(miso, k, a, i);
    const auto& w = reciprocal_vector(miso, k, b, i);
    T det = u[0] * w[1] - u[1] * w[0];
    bool singular;
    if constexpr (ScalarTraits<T>::exact) {
      singular = ScalarTraits<T>::is_zero(det, 0.0);
    } else {
      singular = std::abs(det) <= 1e-12 * (std::abs(u[0] * w[1]) + std::abs(u[1] * w[0]));
    }
    if (singular)
      throw SingularAlignmentSystem("slot " + std::to_string(i + 1) + ": channels from users " +
                                    std::to_string(a + 1) + " and " + std::to_string(b + 1) + " at receiver " +
                                    std::to_string(k + 1) +
                                    " are parallel; resample the channel (this happens with probability zero)");
    f.diagonal.push_back(T((x[0] * w[1] - x[1] * w[0]) / det));
    g.diagonal.push_back(T((u[0] * x[1] - u[1] * x[0]) / det));
  }
  out.push_back(std::move(f));
  out.push_back(std::move(g));
}

}  // namespace detail

template <class T>
AlignmentMatrixSet<T> derive_alignment_matrices(const VectorChannel<T>& miso, const AlignmentConfig& cfg) {
  if (miso.num_users() != cfg.num_users) throw std::invalid_argument("channel and config disagree on K");
  const int k_users = cfg.num_users;
  const int mu = cfg.mu();
  if (mu > miso.n_slots()) throw std::invalid_argument("channel has fewer slots than the extension length");
  AlignmentMatrixSet<T> set;
  for (int k = 0; k < kGroupASize; ++k) {
    int a = (k + 1) % kGroupASize, b = (k + 2) % kGroupASize;
    if (a > b) std::swap(a, b);
    for (int j = kGroupASize; j < k_users; ++j) detail::solve_pair(miso, mu, k, j, a, b, set.group_a_receivers);
  }
  for (int k = kGroupASize; k < k_users; ++k)
    for (int j = 0; j < k_users; ++j)
      if (j != k && j != 0 && j != 1) detail::solve_pair(miso, mu, k, j, 0, 1, set.group_b_receivers);
  return set;
}

// ---------------------------------------------------------------------------
// Precoders

template <class T>
struct Precoders {
  int mu = 0;
  Matrix<T> group_a;  // mu x d_a
  Matrix<T> group_b;  // mu x d_b (empty for K = 3)
  Rational epsilon;
};

namespace detail {

template <class T>
T random_entry(std::mt19937_64& rng, int q) {
  Rational r = draw_rational_gain(rng, q);
  return ScalarTraits<T>::from_rational(r);
}

/// Columns (prod_t T_t^{e_t}) w for every exponent vector in {0..max_exp}^G,
/// lexicographic with the first matrix varying slowest.
template <class T>
void append_product_columns(const std::vector<const AlignmentMatrix<T>*>& mats, const std::vector<T>& generator,
                            int max_exp, std::vector<std::vector<T>>& cols) {
  const std::size_t gcount = mats.size();
  std::vector<int> e(gcount, 0);
  for (;;) {
    std::vector<T> col = generator;
    for (std::size_t t = 0; t < gcount; ++t)
      for (int p = 0; p < e[t]; ++p)
        for (std::size_t i = 0; i < col.size(); ++i) col[i] *= mats[t]->diagonal[i];
    cols.push_back(std::move(col));
    std::size_t pos = gcount;
    while (pos > 0) {
      --pos;
      if (e[pos] < max_exp) {
        ++e[pos];
        break;
      }
      e[pos] = 0;
      if (pos == 0) return;
    }
    if (gcount == 0) return;
  }
}

template <class T>
Matrix<T> columns_to_matrix(const std::vector<std::vector<T>>& cols, int mu) {
  Matrix<T> m(static_cast<std::size_t>(mu), cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (int r = 0; r < mu; ++r) m(static_cast<std::size_t>(r), c) = cols[c][static_cast<std::size_t>(r)];
  return m;
}

template <class T>
std::optional<std::pair<std::size_t, std::size_t>> find_duplicate_column(const std::vector<std::vector<T>>& cols) {
  for (std::size_t a = 0; a < cols.size(); ++a)
    for (std::size_t b = a + 1; b < cols.size(); ++b)
      if (cols[a] == cols[b]) return std::make_pair(a, b);
  return std::nullopt;
}

}  // namespace detail

/// K = 3: V_A is a random mu x 2mu/3 rational matrix. K > 3: product columns
/// over two generators (all-ones and a random vector), 2(n+1)^gamma columns
/// for V_A and 2n^gamma for V_B.
template <class T>
Precoders<T> build_precoders(const AlignmentMatrixSet<T>& set, const AlignmentConfig& cfg) {
  const int mu = cfg.mu();
  Precoders<T> out;
  out.mu = mu;
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  if (cfg.num_users == kGroupASize) {
    out.group_a = Matrix<T>(static_cast<std::size_t>(mu), static_cast<std::size_t>(2 * mu / 3));
    for (std::size_t r = 0; r < out.group_a.rows(); ++r)
      for (std::size_t c = 0; c < out.group_a.cols(); ++c)
        out.group_a(r, c) = detail::random_entry<T>(rng, cfg.rational_denominator_bound);
    out.epsilon = Rational(0);
    return out;
  }
  const auto mats = set.product_set(cfg);
  if (mats.empty()) throw PrecoderConstructionError("no alignment matrices available for K > 3");
  if (static_cast<int>(mats.size()) != cfg.gamma())
    throw PrecoderConstructionError("alignment matrix count does not match gamma");
  for (const auto* m : mats)
    if (static_cast<int>(m->diagonal.size()) < mu)
      throw PrecoderConstructionError("alignment matrix shorter than the extension length");

  std::vector<T> ones(static_cast<std::size_t>(mu), ScalarTraits<T>::one()), second(static_cast<std::size_t>(mu));
  for (auto& x : second) x = detail::random_entry<T>(rng, cfg.rational_denominator_bound);

  std::vector<std::vector<T>> a_cols, b_cols;
  for (const auto* gen : {&ones, &second}) detail::append_product_columns(mats, *gen, cfg.n_level, a_cols);
  for (const auto* gen : {&ones, &second}) detail::append_product_columns(mats, *gen, cfg.n_level - 1, b_cols);
  if (static_cast<int>(a_cols.size()) > mu)
    throw PrecoderConstructionError("V_A would need " + std::to_string(a_cols.size()) + " columns but mu = " +
                                    std::to_string(mu));
  if constexpr (ScalarTraits<T>::exact) {
    if (auto dup = detail::find_duplicate_column(a_cols))
      throw PrecoderConstructionError("V_A columns " + std::to_string(dup->first + 1) + " and " +
                                      std::to_string(dup->second + 1) +
                                      " coincide; the alignment matrices are degenerate (constant channel?)");
  }
  out.group_a = detail::columns_to_matrix(a_cols, mu);
  out.group_b = detail::columns_to_matrix(b_cols, mu);
  out.epsilon = alignment_epsilon(cfg.n_level, cfg.gamma());
  return out;
}

// ---------------------------------------------------------------------------
// Verification over a chosen field F

/// Per-user precoders and stream counts in the verification field.
template <class F>
struct PrecoderSet {
  int mu = 0;
  std::vector<Matrix<F>> v;  // per user
  std::vector<int> streams;  // d_k

  template <class T>
  static PrecoderSet from(const Precoders<T>& p, int num_users) {
    PrecoderSet s;
    s.mu = p.mu;
    for (int k = 0; k < num_users; ++k) {
      const Matrix<T>& src = k < kGroupASize ? p.group_a : p.group_b;
      if constexpr (std::is_same_v<T, F>) {
        s.v.push_back(src);
      } else {
        s.v.push_back(convert<F>(src));
      }
      s.streams.push_back(static_cast<int>(src.cols()));
    }
    return s;
  }
};

template <class F>
struct ExtendedChannels {
  int num_users = 0;
  int mu = 0;
  std::vector<ExtendedChannelMatrix<F>> m;  // [rx * K + tx]

  const ExtendedChannelMatrix<F>& at(int rx, int tx) const {
    return m[static_cast<std::size_t>(rx * num_users + tx)];
  }

  template <class T>
  static ExtendedChannels build(const VectorChannel<T>& miso, int mu) {
    ExtendedChannels out;
    out.num_users = miso.num_users();
    out.mu = mu;
    for (int rx = 0; rx < out.num_users; ++rx)
      for (int tx = 0; tx < out.num_users; ++tx) {
        auto e = extend(miso, mu, rx, tx);
        if constexpr (std::is_same_v<T, F>) {
          out.m.push_back(std::move(e));
        } else {
          out.m.push_back({e.receiver, e.transmitter, e.mu, convert<F>(e.entries)});
        }
      }
    return out;
  }
};

template <class F>
struct Postcoder {
  int user = 0;
  Matrix<F> matrix;  // rows: basis of the left null space of the interference
};

struct VerifyOptions {
  /// Float backend only.
  double svd_rank_tolerance = kDefaultSvdRankTolerance;
  double zero_forcing_tolerance = 1e-9;
};

/// [H_kj V_j] over j != k.
template <class F>
Matrix<F> interference_matrix(const ExtendedChannels<F>& ch, const PrecoderSet<F>& prec, int k) {
  std::vector<Matrix<F>> blocks;
  for (int j = 0; j < ch.num_users; ++j)
    if (j != k) blocks.push_back(ch.at(k, j).entries * prec.v[static_cast<std::size_t>(j)]);
  return hstack(blocks);
}

template <class F>
Postcoder<F> build_postcoder(const ExtendedChannels<F>& ch, const PrecoderSet<F>& prec, int k,
                             const VerifyOptions& opt = {}) {
  const Matrix<F> interf = interference_matrix(ch, prec, k);
  const std::size_t dim = rank(interf, opt.svd_rank_tolerance);
  const std::size_t allowed = static_cast<std::size_t>(2 * ch.mu - prec.streams[static_cast<std::size_t>(k)]);
  if (dim > allowed) throw InterferenceSpanError(k, dim, allowed);
  return {k, left_null_space(interf)};
}

struct UserAlignmentReport {
  int user = 0;  // 0-based
  int streams = 0;
  std::size_t rank_desired = 0;
  std::size_t rank_desired_direct_part = 0;
  std::size_t interference_dim = 0;
  std::size_t target_interference_dim = 0;
  bool postcoder_built = false;
  bool zero_forcing_ok = false;
  bool zero_forcing_exact = false;  // every entry of U H V is the field's exact zero
  double max_zero_forcing_residual = 0.0;
  bool desired_rank_ok = false;
  bool span_ok = false;
  bool passed = false;
  std::string failure;  // first failing condition, empty when passed
};

struct AlignmentReport {
  bool evaluated = false;
  int num_users = 0;
  int mu = 0;
  int n_level = 0;
  int gamma = 0;
  Rational epsilon;
  std::string field;
  std::vector<UserAlignmentReport> users;
  Rational achieved_dof;  // verified streams / mu
  Rational formula_dof;

  bool all_passed() const {
    for (const auto& u : users)
      if (!u.passed) return false;
    return !users.empty();
  }
};

/// Checks zero forcing (U_k H_kj V_j = 0), desired rank through both H_kk and
/// its direct-gain part, and that the interference spans exactly 2mu - d_k
/// dimensions. Failures are recorded, never thrown. A missing postcoder marks
/// the user failed.
template <class F>
AlignmentReport verify_alignment(const ExtendedChannels<F>& ch, const PrecoderSet<F>& prec,
                                 const std::vector<std::optional<Postcoder<F>>>& post, const VerifyOptions& opt = {}) {
  AlignmentReport rep;
  rep.evaluated = true;
  rep.num_users = ch.num_users;
  rep.mu = ch.mu;
  rep.field = ScalarTraits<F>::name();
  Rational verified(0);
  for (int k = 0; k < ch.num_users; ++k) {
    UserAlignmentReport u;
    u.user = k;
    u.streams = prec.streams[static_cast<std::size_t>(k)];
    u.target_interference_dim = static_cast<std::size_t>(2 * ch.mu - u.streams);
    const Matrix<F> interf = interference_matrix(ch, prec, k);
    u.interference_dim = rank(interf, opt.svd_rank_tolerance);
    u.span_ok = u.interference_dim == u.target_interference_dim;
    const auto& pc = post[static_cast<std::size_t>(k)];
    if (pc) {
      u.postcoder_built = true;
      const Matrix<F>& uk = pc->matrix;
      u.zero_forcing_ok = true;
      u.zero_forcing_exact = ScalarTraits<F>::exact;
      for (int j = 0; j < ch.num_users; ++j) {
        if (j == k) continue;
        const Matrix<F> hv = ch.at(k, j).entries * prec.v[static_cast<std::size_t>(j)];
        const Matrix<F> res = uk * hv;
        const double resid = res.max_abs();
        u.max_zero_forcing_residual = std::max(u.max_zero_forcing_residual, resid);
        double tol = 0.0;
        if constexpr (!ScalarTraits<F>::exact)
          tol = opt.zero_forcing_tolerance * std::max(1.0, uk.max_abs() * hv.max_abs() * static_cast<double>(uk.cols()));
        if (!res.is_zero(tol)) {
          u.zero_forcing_ok = false;
          u.zero_forcing_exact = false;
        }
      }
      const auto& hkk = ch.at(k, k);
      const Matrix<F>& vk = prec.v[static_cast<std::size_t>(k)];
      u.rank_desired = rank(uk * hkk.entries * vk, opt.svd_rank_tolerance);
      const auto parts = split_direct(hkk);
      u.rank_desired_direct_part = rank(uk * parts.first * vk, opt.svd_rank_tolerance);
      u.desired_rank_ok = u.rank_desired == static_cast<std::size_t>(u.streams) &&
                          u.rank_desired_direct_part == static_cast<std::size_t>(u.streams);
    }
    if (!u.postcoder_built)
      u.failure = "no postcoder: interference spans " + std::to_string(u.interference_dim) + " > " +
                  std::to_string(u.target_interference_dim) + " dimensions";
    else if (!u.zero_forcing_ok)
      u.failure = "zero forcing U_k H_kj V_j = 0 fails";
    else if (!u.span_ok)
      u.failure = "interference spans " + std::to_string(u.interference_dim) + " dimensions, expected " +
                  std::to_string(u.target_interference_dim);
    else if (!u.desired_rank_ok)
      u.failure = "desired signal rank " + std::to_string(u.rank_desired) + " (direct part " +
                  std::to_string(u.rank_desired_direct_part) + "), expected " + std::to_string(u.streams);
    u.passed = u.failure.empty();
    if (u.passed) verified += u.streams;
    rep.users.push_back(std::move(u));
  }
  rep.achieved_dof = verified / Rational(ch.mu);
  rep.achieved_dof.canonicalize();
  return rep;
}

// ---------------------------------------------------------------------------
// End-to-end pipeline

enum class VerificationField { Auto, Rational, Modular, Float };

struct AlignmentRunOptions {
  VerificationField field = VerificationField::Auto;
  /// Auto picks exact rationals up to this mu, the prime field above it.
  int rational_mu_limit = 24;
  /// K = 3: redraw V_A this many times if a check fails.
  int max_attempts = 8;
  VerifyOptions verify;
};

struct AlignmentRun {
  AlignmentReport report;
  int attempts = 0;
  int channel_draws = 1;
};

namespace detail {

template <class T, class F>
AlignmentReport align_once(const VectorChannel<T>& miso, const AlignmentConfig& cfg, const VerifyOptions& vopt) {
  const int mu = cfg.mu();
  const auto set = derive_alignment_matrices(miso, cfg);
  const auto prec_native = build_precoders(set, cfg);
  const auto prec = PrecoderSet<F>::from(prec_native, cfg.num_users);
  const auto ch = ExtendedChannels<F>::template build<T>(miso, mu);
  std::vector<std::optional<Postcoder<F>>> post;
  for (int k = 0; k < cfg.num_users; ++k) {
    try {
      post.emplace_back(build_postcoder(ch, prec, k, vopt));
    } catch (const InterferenceSpanError&) {
      post.emplace_back(std::nullopt);
    }
  }
  auto rep = verify_alignment(ch, prec, post, vopt);
  rep.n_level = cfg.n_level;
  rep.gamma = cfg.num_users == kGroupASize ? 0 : cfg.gamma();
  rep.epsilon = prec_native.epsilon;
  rep.formula_dof =
      cfg.num_users == kGroupASize ? Rational(2) : achieved_dof_formula(cfg.num_users, cfg.n_level, cfg.gamma());
  return rep;
}

template <class T, class F>
AlignmentRun align_with_retries(const ChannelRealization<T>& chan, AlignmentConfig cfg,
                                const AlignmentRunOptions& opt) {
  if (chan.num_users() != cfg.num_users) throw std::invalid_argument("channel and config disagree on K");
  const auto miso = lift_to_miso(chan);
  AlignmentRun run;
  const int attempts = cfg.num_users == kGroupASize ? std::max(1, opt.max_attempts) : 1;
  for (int a = 0; a < attempts; ++a) {
    run.attempts = a + 1;
    run.report = align_once<T, F>(miso, cfg, opt.verify);
    if (run.report.all_passed()) break;
    cfg.seed += 0x100000001ULL;  // fresh V_A draw
  }
  return run;
}

}  // namespace detail

/// Builds precoders and postcoders for the channel and verifies them. The
/// channel must have at least mu slots.
template <class T>
AlignmentRun align_and_verify(const ChannelRealization<T>& chan, const AlignmentConfig& cfg,
                              const AlignmentRunOptions& opt = {}) {
  if constexpr (std::is_same_v<T, double>) {
    if (opt.field != VerificationField::Auto && opt.field != VerificationField::Float)
      throw std::invalid_argument("float channels can only be verified in floating point");
    return detail::align_with_retries<double, double>(chan, cfg, opt);
  } else {
    VerificationField f = opt.field;
    if (f == VerificationField::Auto)
      f = cfg.mu() <= opt.rational_mu_limit ? VerificationField::Rational : VerificationField::Modular;
    switch (f) {
      case VerificationField::Rational:
        return detail::align_with_retries<Rational, Rational>(chan, cfg, opt);
      case VerificationField::Modular:
        return detail::align_with_retries<Rational, ModP>(chan, cfg, opt);
      default:
        return detail::align_with_retries<Rational, double>(chan, cfg, opt);
    }
  }
}

/// Samples a time-varying channel long enough for the configuration and runs
/// the pipeline. An exact draw that lands on a singular per-slot system or on
/// coinciding precoder columns is redrawn from the next seed, up to
/// max_attempts times.
inline AlignmentRun align_random_instance(const AlignmentConfig& cfg, Arithmetic arithmetic, std::uint64_t seed,
                                          const AlignmentRunOptions& opt = {}) {
  NetworkConfig net;
  net.num_users = cfg.num_users;
  net.mode = ChannelMode::TimeVarying;
  net.arithmetic = arithmetic;
  net.rational_denominator_bound = cfg.rational_denominator_bound;
  const int draws = std::max(1, opt.max_attempts);
  for (int d = 0;; ++d) {
    net.seed = seed + static_cast<std::uint64_t>(d) * 0x9e3779b97f4a7c15ULL;
    auto chan = sample_channel(net, cfg.mu());
    try {
      auto run = std::visit([&](const auto& c) { return align_and_verify(c, cfg, opt); }, chan);
      run.channel_draws = d + 1;
      return run;
    } catch (const SingularAlignmentSystem&) {
      if (d + 1 >= draws) throw;
    } catch (const PrecoderConstructionError&) {
      if (d + 1 >= draws) throw;
    }
  }
}

}  // namespace doflab
