// Walks through the library on small instances: two-user neutralization on a
// sampled channel, the three-user full-cancellation instance, and a K = 3
// alignment run verified over the rationals.

#include <cstdio>

#include "doflab/doflab.hpp"

using namespace doflab;

int main() {
  NetworkConfig cfg;
  cfg.num_users = 2;
  cfg.seed = 42;
  auto ch = sample_channel_as<double>(cfg, 1);
  auto sol = solve_two_user(ch, 0, 1);
  std::printf("two users: c = (%.4f, %.4f), g = (%.4f, %.4f), residual interference %.2e\n", sol.c[0], sol.c[1],
              sol.g[0], sol.g[1], sol.max_residual_interference());
  auto est = estimate_dof(neutralization_rate_curve<double>({sol}, make_db_grid(40, 80, 5), "two_user"));
  std::printf("  sum-rate slope over 40-80 dB: %.4f\n", est.slope);

  auto full = solve_three_user_full(make_full_cancellation_instance());
  std::printf("three users, full cancellation: c = (%s, %s, %s), g = (%s, %s, %s)\n", format_rational(full.c[0]).c_str(),
              format_rational(full.c[1]).c_str(), format_rational(full.c[2]).c_str(),
              format_rational(full.g[0]).c_str(), format_rational(full.g[1]).c_str(),
              format_rational(full.g[2]).c_str());

  AlignmentConfig acfg;
  acfg.num_users = 3;
  auto run = align_random_instance(acfg, Arithmetic::ExactRational, 7);
  std::printf("alignment K=3, mu=%d over %s: %s, achieved DoF %s (upper bound %s)\n", run.report.mu,
              run.report.field.c_str(), run.report.all_passed() ? "verified" : "FAILED",
              format_rational(run.report.achieved_dof).c_str(), format_rational(dof_upper(3)).c_str());
  return run.report.all_passed() ? 0 : 1;
}
