#include <gtest/gtest.h>

#include "doflab/rates.hpp"

using namespace doflab;

namespace {

NeutralizationSolution<Rational> worked_solution() {
  auto ch = RationalChannel::constant({{1, 1}, {1, 1}}, {1, 2});
  return solve_two_user(ch, 0, 1);
}

}  // namespace

TEST(Rates, WorkedExample) {
  auto sol = worked_solution();
  ASSERT_EQ(sol.g[0], Rational(1, 2));
  ASSERT_EQ(sol.c[0], Rational(-1, 2));
  auto powers = transmit_powers(sol, 80);
  EXPECT_DOUBLE_EQ(powers[0], 64);
  EXPECT_DOUBLE_EQ(powers[1], 64);
  EXPECT_DOUBLE_EQ(powers[2], 80);  // relay: (5/4) * 64
  auto r = neutralized_sum_rate(sol, 80);
  EXPECT_DOUBLE_EQ(r[0], 0.5 * std::log2(17.0));
  EXPECT_DOUBLE_EQ(r[1], 0.5 * std::log2(65.0));
}

TEST(Rates, ZeroPowerZeroRates) {
  for (double r : neutralized_sum_rate(worked_solution(), 0)) EXPECT_EQ(r, 0.0);
  EXPECT_THROW(neutralized_sum_rate(worked_solution(), -1), std::invalid_argument);
}

TEST(Rates, MonotoneInPower) {
  NetworkConfig cfg;
  cfg.num_users = 2;
  for (std::uint64_t s = 0; s < 10; ++s) {
    cfg.seed = s;
    auto sol = solve_two_user(sample_channel_as<double>(cfg, 1), 0, 1);
    for (double p = 0.1; p < 1e8; p *= 2) {
      auto a = neutralized_sum_rate(sol, p), b = neutralized_sum_rate(sol, 2 * p);
      for (std::size_t k = 0; k < a.size(); ++k) EXPECT_GT(b[k], a[k]);
    }
  }
}

TEST(Rates, DegenerateRejected) {
  auto sol = solve_two_user(make_all_ones<Rational>(2), 0, 1);
  try {
    neutralized_sum_rate(sol, 10);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("drop it"), std::string::npos);
  }
}

TEST(Rates, PowerAudit) {
  NetworkConfig cfg;
  cfg.num_users = 3;
  for (std::uint64_t s = 0; s < 20; ++s) {
    cfg.seed = s;
    auto sol = solve_three_user_pair(sample_channel_as<double>(cfg, 1), static_cast<int>(s % 3));
    for (double p : {1.0, 1e3, 1e8}) {
      auto pw = transmit_powers(sol, p);
      EXPECT_EQ(pw[s % 3], 0.0);  // silent user
      for (double x : pw) EXPECT_LE(x, p * (1 + 1e-12));
    }
  }
}

TEST(Rates, CurveSumsPerUser) {
  auto sol = worked_solution();
  auto curve = neutralization_rate_curve<Rational>({sol}, make_db_grid(0, 30, 10), "two_user");
  ASSERT_EQ(curve.p_db.size(), 4u);
  for (std::size_t i = 0; i < curve.p_db.size(); ++i) {
    double s = 0;
    for (double r : curve.per_user_rates[i]) {
      EXPECT_GE(r, 0.0);
      s += r;
    }
    EXPECT_DOUBLE_EQ(s, curve.sum_rate_bits[i]);
  }
}

TEST(Dof, SyntheticLine) {
  auto grid = make_db_grid(40, 80, 5);
  std::vector<double> r;
  for (double db : grid) r.push_back(2 * 0.5 * std::log2(db_to_linear(db)) + 3);
  auto e = fit_dof_slope(grid, r, 40, 80);
  EXPECT_NEAR(e.slope, 2.0, 1e-12);
  EXPECT_NEAR(e.intercept, 3.0, 1e-9);
  EXPECT_LT(e.max_residual, 1e-9);
  EXPECT_EQ(e.points, 9);
}

TEST(Dof, WindowTooSmall) {
  auto grid = make_db_grid(40, 80, 5);
  std::vector<double> r(grid.size(), 1.0);
  EXPECT_THROW(fit_dof_slope(grid, r, 40, 50), std::invalid_argument);
  EXPECT_THROW(make_db_grid(10, 0, 5), std::invalid_argument);
}

TEST(Dof, FullCancellationSlopeNearThree) {
  auto sol = solve_three_user_full(make_full_cancellation_instance());
  auto e = estimate_dof(neutralization_rate_curve<Rational>({sol}, make_db_grid(40, 80, 5), "three_user_full"));
  EXPECT_GE(e.slope, 2.92);
  EXPECT_LE(e.slope, 3.0);
}

TEST(Dof, SlopeCeiling) {
  NetworkConfig cfg;
  cfg.num_users = 2;
  for (std::uint64_t s = 0; s < 20; ++s) {
    cfg.seed = s;
    auto sol = solve_two_user(sample_channel_as<double>(cfg, 1), 0, 1);
    auto e = estimate_dof(neutralization_rate_curve<double>({sol}, make_db_grid(40, 80, 5), "two_user"));
    EXPECT_LE(e.slope, 2.0 + 0.05);
  }
}

TEST(MisoScaling, ReportsVerifiedDof) {
  AlignmentConfig cfg;
  auto run = align_random_instance(cfg, Arithmetic::ExactRational, 3);
  ASSERT_TRUE(run.report.all_passed());
  auto a = miso_power_scaled_rate(run.report, 1e4);
  auto b = miso_power_scaled_rate(run.report, 3 * 1e4);
  EXPECT_EQ(a.achieved_dof, 2);
  EXPECT_EQ(a.achieved_dof, b.achieved_dof);
  EXPECT_DOUBLE_EQ(a.per_node_power, 1e4 / 3);
  EXPECT_EQ(a.power_scaling, 3);
  EXPECT_THROW(miso_power_scaled_rate(AlignmentReport{}, 1), std::invalid_argument);
}

TEST(MisoScaling, UnverifiedUserExcluded) {
  AlignmentConfig cfg;
  NetworkConfig net;
  net.num_users = 3;
  net.mode = ChannelMode::TimeVarying;
  net.arithmetic = Arithmetic::ExactRational;
  net.seed = 5;
  net.rational_denominator_bound = 1024;
  const auto miso = lift_to_miso(sample_channel_as<Rational>(net, 3));
  auto prec = PrecoderSet<Rational>::from(build_precoders(derive_alignment_matrices(miso, cfg), cfg), 3);
  const auto ch = ExtendedChannels<Rational>::build(miso, 3);
  std::vector<std::optional<Postcoder<Rational>>> post;
  for (int k = 0; k < 3; ++k) post.emplace_back(build_postcoder(ch, prec, k));
  // User 2 switches to a precoder the postcoders were not built for.
  prec.v[1](0, 0) += 1;
  auto rep = verify_alignment(ch, prec, post);
  ASSERT_FALSE(rep.all_passed());
  EXPECT_LT(miso_power_scaled_rate(rep, 100).achieved_dof, 2);
}
