#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "doflab/neutralization.hpp"

using namespace doflab;

namespace {

RationalChannel two_user(Rational h11, Rational h12, Rational h21, Rational h22, Rational hr1, Rational hr2) {
  return RationalChannel::constant({{h11, h12}, {h21, h22}}, {hr1, hr2});
}

// Oracle: the received gain from tx at rx once the relay adds c_tx * hr_rx.
Rational received(const RationalChannel& ch, const std::vector<Rational>& c, int tx, int rx) {
  return ch.h(tx, rx, 0) + ch.relay(rx, 0) * c[static_cast<std::size_t>(tx)];
}

}  // namespace

TEST(TwoUser, WorkedExample) {
  auto ch = two_user(1, 1, 1, 1, 1, 2);
  auto sol = solve_two_user(ch, 0, 1);
  EXPECT_EQ(sol.c[0], Rational(-1, 2));
  EXPECT_EQ(sol.c[1], Rational(-1));
  EXPECT_EQ(sol.g[0], Rational(1, 2));
  EXPECT_EQ(sol.g[1], Rational(-1));
  EXPECT_FALSE(sol.any_degenerate());
  EXPECT_EQ(received(ch, sol.c, 1, 0), 0);
  EXPECT_EQ(received(ch, sol.c, 0, 1), 0);
  EXPECT_EQ(sol.residual(0, 1), 0);
  EXPECT_EQ(sol.residual(1, 0), 0);
}

TEST(TwoUser, AllOnesIsDegenerateForBoth) {
  auto sol = solve_two_user(make_all_ones<Rational>(2), 0, 1);
  EXPECT_TRUE(sol.degenerate[0]);
  EXPECT_TRUE(sol.degenerate[1]);
  auto fsol = solve_two_user(make_all_ones<double>(2), 0, 1);
  EXPECT_TRUE(fsol.degenerate[0]);
  EXPECT_TRUE(fsol.degenerate[1]);
}

TEST(TwoUser, NoCrossGainNeedsNoRelay) {
  auto ch = two_user(Rational(3, 2), 0, 0, Rational(-5, 7), 2, 3);
  auto sol = solve_two_user(ch, 0, 1);
  EXPECT_EQ(sol.c[0], 0);
  EXPECT_EQ(sol.c[1], 0);
  EXPECT_EQ(sol.g[0], Rational(3, 2));
  EXPECT_EQ(sol.g[1], Rational(-5, 7));
}

TEST(TwoUser, ZeroRelayGainIsUnsolvable) {
  auto ch = two_user(1, 2, 3, 4, 0, 1);
  EXPECT_THROW(solve_two_user(ch, 0, 1), UnsolvableError);
}

// g_a == 0 exactly when the determinant h_aa hr_b - h_ab hr_a vanishes.
TEST(TwoUser, DegeneracyMatchesDeterminantProperty) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> d(-4, 4);
  int degenerate_seen = 0;
  for (int t = 0; t < 3000; ++t) {
    auto r = [&] {
      int v;
      do v = d(rng); while (v == 0);
      return Rational(v);
    };
    auto ch = two_user(r(), r(), r(), r(), r(), r());
    auto sol = solve_two_user(ch, 0, 1);
    Rational det1 = ch.h(0, 0, 0) * ch.relay(1, 0) - ch.h(0, 1, 0) * ch.relay(0, 0);
    Rational det2 = ch.h(1, 1, 0) * ch.relay(0, 0) - ch.h(1, 0, 0) * ch.relay(1, 0);
    EXPECT_EQ(bool(sol.degenerate[0]), det1 == 0);
    EXPECT_EQ(bool(sol.degenerate[1]), det2 == 0);
    EXPECT_EQ(sol.residual(0, 1), 0);
    EXPECT_EQ(sol.residual(1, 0), 0);
    degenerate_seen += sol.any_degenerate();
  }
  EXPECT_GT(degenerate_seen, 0);
}

TEST(TwoUser, FloatResidualNearZero) {
  NetworkConfig cfg;
  cfg.num_users = 2;
  for (std::uint64_t s = 0; s < 50; ++s) {
    cfg.seed = s;
    auto ch = sample_channel_as<double>(cfg, 1);
    auto sol = solve_two_user(ch, 0, 1);
    EXPECT_LE(sol.max_residual_interference(), 1e-12 * std::max(1.0, ch.max_abs_gain()));
    EXPECT_FALSE(sol.any_degenerate());
  }
}

TEST(TwoUser, PerSlotSolvesEachSlot) {
  NetworkConfig cfg;
  cfg.num_users = 2;
  cfg.mode = ChannelMode::TimeVarying;
  cfg.arithmetic = Arithmetic::ExactRational;
  auto ch = sample_channel_as<Rational>(cfg, 4);
  auto sols = solve_two_user_per_slot(ch, 0, 1);
  ASSERT_EQ(sols.size(), 4u);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(sols[static_cast<std::size_t>(i)].slot, i);
    EXPECT_EQ(sols[static_cast<std::size_t>(i)].c[0], -ch.h(0, 1, i) / ch.relay(1, i));
  }
}

TEST(ThreeUserPair, SilentUserGeneric) {
  NetworkConfig cfg;
  cfg.num_users = 3;
  cfg.arithmetic = Arithmetic::ExactRational;
  cfg.seed = 4;
  auto ch = sample_channel_as<Rational>(cfg, 1);
  auto sol = solve_three_user_pair(ch, 2);
  EXPECT_EQ(sol.active, (std::vector<int>{0, 1}));
  EXPECT_FALSE(sol.any_degenerate());
}

TEST(ThreeUserPair, AllOnesDegenerate) {
  auto sol = solve_three_user_pair(make_all_ones<Rational>(3), 0);
  EXPECT_TRUE(sol.any_degenerate());
  EXPECT_THROW(solve_three_user_pair(make_all_ones<Rational>(2), 0), std::invalid_argument);
}

TEST(FullCancellation, InstancePassesAllSix) {
  auto ch = make_full_cancellation_instance();
  auto rep = check_corollary_conditions(ch);
  EXPECT_TRUE(rep.all_pass);
  for (bool b : rep.ratio_conditions) EXPECT_TRUE(b);
  for (bool b : rep.nondegeneracy_conditions) EXPECT_TRUE(b);
  EXPECT_EQ(rep.first_failure(), "");
}

TEST(FullCancellation, SolutionValues) {
  auto ch = make_full_cancellation_instance();
  auto sol = solve_three_user_full(ch);
  for (int k = 0; k < 3; ++k) EXPECT_EQ(sol.c[static_cast<std::size_t>(k)], -1);
  EXPECT_EQ(sol.g, (std::vector<Rational>{4, 3, 2}));
  for (int tx = 0; tx < 3; ++tx)
    for (int rx = 0; rx < 3; ++rx)
      if (tx != rx) EXPECT_EQ(received(ch, sol.c, tx, rx), 0);
  EXPECT_EQ(sol.max_residual_interference(), 0.0);
}

TEST(FullCancellation, SingleViolationNamed) {
  auto ch = make_full_cancellation_instance();
  ch.h(2, 1, 0) = Rational(5, 2);  // h32
  auto rep = check_corollary_conditions(ch);
  EXPECT_FALSE(rep.ratio_conditions[0]);
  EXPECT_TRUE(rep.ratio_conditions[1]);
  EXPECT_TRUE(rep.ratio_conditions[2]);
  EXPECT_FALSE(rep.all_pass);
  try {
    solve_three_user_full(ch);
    FAIL() << "expected a violation";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("ratio condition 1 violated"), std::string::npos) << e.what();
  }
}

TEST(FullCancellation, GenericFails) {
  NetworkConfig cfg;
  cfg.num_users = 3;
  for (std::uint64_t s = 0; s < 20; ++s) {
    cfg.seed = s;
    auto f = sample_channel_as<double>(cfg, 1);
    EXPECT_FALSE(check_corollary_conditions(f).all_pass);
    EXPECT_THROW(solve_three_user_full(f), std::invalid_argument);
  }
}

// Whenever the conditions hold, every receiver implies the same coefficient.
TEST(FullCancellation, CoefficientsConsistentOnRandomFamily) {
  for (std::uint64_t s = 0; s < 200; ++s) {
    auto ch = make_full_cancellation_random(s);
    auto rep = check_corollary_conditions(ch);
    ASSERT_TRUE(rep.all_pass) << rep.first_failure();
    for (int k = 0; k < 3; ++k) {
      int r1 = (k + 1) % 3, r2 = (k + 2) % 3;
      EXPECT_EQ(full_cancellation_coefficient(ch, k, r1), full_cancellation_coefficient(ch, k, r2));
    }
    auto sol = solve_three_user_full(ch);
    EXPECT_EQ(sol.max_residual_interference(), 0.0);
    EXPECT_FALSE(sol.any_degenerate());
  }
}

TEST(Region, NamedPoints) {
  for (const auto& v : dof_region_vertices()) EXPECT_TRUE(dof_region_contains(v));
  EXPECT_TRUE(dof_region_contains(DofPoint{1, 1, 0}));
  EXPECT_FALSE(dof_region_contains(DofPoint{1, 1, 1}));
  Rational t(2, 3);
  EXPECT_TRUE(dof_region_contains(DofPoint{t, t, t}));
  EXPECT_THROW(DofPoint({Rational(3, 2), 0, 0}), std::invalid_argument);
}

TEST(Region, TimeSharing) {
  auto p = time_share({{DofPoint{1, 1, 0}, Rational(1, 2)}, {DofPoint{0, 1, 1}, Rational(1, 2)}});
  EXPECT_EQ(p, (DofPoint{Rational(1, 2), 1, Rational(1, 2)}));
  auto q = time_share({{DofPoint{1, 0, 1}, 1}, {DofPoint{0, 1, 1}, 0}});
  EXPECT_EQ(q, (DofPoint{1, 0, 1}));
  EXPECT_THROW(time_share({{DofPoint{1, 1, 0}, Rational(1, 2)}}), std::invalid_argument);
  EXPECT_THROW(time_share({{DofPoint{1, 1, 1}, 1}}), std::invalid_argument);
  EXPECT_THROW(time_share({{DofPoint{1, 1, 0}, 2}, {DofPoint{0, 1, 1}, -1}}), std::invalid_argument);
}

// Exhaustive grid of weights (multiples of 1/4) over the six nonzero corners.
TEST(Region, GridOfCombinationsStaysInside) {
  auto v = dof_region_vertices();
  std::vector<DofPoint> corners(v.begin() + 1, v.end());
  int count = 0;
  std::vector<int> w(6, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
    if (i == 5) {
      w[5] = left;
      std::vector<WeightedPoint> t;
      for (std::size_t j = 0; j < 6; ++j) t.push_back({corners[j], make_rational(w[j], 4)});
      EXPECT_TRUE(dof_region_contains(time_share(t)));
      ++count;
      return;
    }
    for (int x = 0; x <= left; ++x) {
      w[i] = x;
      rec(i + 1, left - x);
    }
  };
  rec(0, 4);
  EXPECT_EQ(count, 126);
}
