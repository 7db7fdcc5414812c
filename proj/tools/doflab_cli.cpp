// doflab command-line runner.
//
//   doflab <subcommand> [options] [--config file]
//
// The config file holds flat key=value lines (no leading dashes); command-line
// flags override it. Exit codes: 0 success, 1 usage error, 2 verification
// failure.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "doflab/doflab.hpp"

using namespace doflab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerification = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Output helpers

class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw UsageError("cannot open '" + path + "' for writing");
  }
  std::ostream& out() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::string csv_number(double x) {
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

Json resolved_options(const CLI::App& sub, const std::string& config_path) {
  Json o = Json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    std::string name = opt->get_single_name();
    if (name == "help" || name.empty()) continue;
    if (opt->count() > 0) {
      auto r = opt->reduced_results();
      if (opt->get_expected_max() == 0) {
        o[name] = true;
      } else if (r.size() == 1) {
        o[name] = r.front();
      } else {
        o[name] = r;
      }
    } else if (opt->get_expected_max() == 0) {
      o[name] = false;
    } else {
      o[name] = opt->get_default_str();
    }
  }
  o["config"] = config_path;
  return o;
}

Json envelope(const std::string& subcommand, const Json& options, std::uint64_t seed, Json result) {
  return Json{{"tool", "doflab"},
              {"version", kVersion},
              {"subcommand", subcommand},
              {"seed", seed},
              {"options", options},
              {"result", std::move(result)}};
}

void write_json(const std::string& path, const Json& j) {
  Sink s(path);
  s.out() << j.dump(2) << "\n";
}

void csv_preamble(std::ostream& os, const std::string& subcommand, const Json& options, std::uint64_t seed) {
  os << "# doflab " << kVersion << " " << subcommand << " seed=" << seed << "\n";
  os << "# options " << options.dump() << "\n";
}

// ---------------------------------------------------------------------------
// Parsing helpers

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::vector<Rational> parse_point(const std::string& s) {
  std::vector<Rational> v;
  for (const auto& t : split(s, ',')) v.push_back(parse_rational(t));
  return v;
}

std::vector<int> parse_users(const std::string& s, int k) {
  std::vector<int> v;
  for (const auto& t : split(s, ',')) {
    int u = std::stoi(t);
    if (u < 1 || u > k) throw UsageError("user " + t + " out of range 1.." + std::to_string(k));
    v.push_back(u - 1);
  }
  return v;
}

Arithmetic parse_arithmetic(const std::string& s) {
  return s == "rational" ? Arithmetic::ExactRational : Arithmetic::Float;
}

// ---------------------------------------------------------------------------
// Channel sources shared by several subcommands

struct ChannelSource {
  std::string channel_path;
  std::string degenerate_factory;
  std::string factory;
  int num_users = 2;
  std::string mode = "constant";
  std::string arithmetic = "float";
  int q = 16;
  int slots = 1;

  void add_to(CLI::App* sub, bool sampling_flags = true) {
    sub->add_option("--channel", channel_path, "Channel JSON file")->check(CLI::ExistingFile);
    sub->add_option("--degenerate-factory", degenerate_factory, "Exact degenerate instance")
        ->check(CLI::IsMember({"two-user", "all-ones"}));
    sub->add_option("--factory", factory, "Exact named instance")->check(CLI::IsMember({"full-cancellation"}));
    if (!sampling_flags) return;
    sub->add_option("--K", num_users, "Number of users when sampling")->capture_default_str()->check(CLI::Range(2, 64));
    sub->add_option("--mode", mode, "Channel mode when sampling")
        ->capture_default_str()
        ->check(CLI::IsMember({"constant", "varying"}));
    sub->add_option("--arithmetic", arithmetic, "Scalar type when sampling")
        ->capture_default_str()
        ->check(CLI::IsMember({"float", "rational"}));
    sub->add_option("--q", q, "Rational denominator bound")->capture_default_str()->check(CLI::Range(2, 1 << 20));
    sub->add_option("--slots", slots, "Slots when sampling")->capture_default_str()->check(CLI::Range(1, 100000));
  }

  AnyChannel load(std::uint64_t seed) const {
    int sources = !channel_path.empty() + !degenerate_factory.empty() + !factory.empty();
    if (sources > 1) throw UsageError("give at most one of --channel, --degenerate-factory, --factory");
    if (!channel_path.empty()) {
      std::ifstream in(channel_path);
      Json j;
      try {
        j = Json::parse(in);
      } catch (const Json::exception& e) {
        throw UsageError("cannot parse '" + channel_path + "': " + e.what());
      }
      return channel_from_json(j);
    }
    if (degenerate_factory == "two-user") return make_two_user_degenerate(seed, q);
    if (degenerate_factory == "all-ones") return make_all_ones<Rational>(num_users);
    if (factory == "full-cancellation") return make_full_cancellation_instance();
    NetworkConfig cfg;
    cfg.num_users = num_users;
    cfg.mode = mode == "constant" ? ChannelMode::Constant : ChannelMode::TimeVarying;
    cfg.seed = seed;
    cfg.arithmetic = parse_arithmetic(arithmetic);
    cfg.rational_denominator_bound = q;
    return sample_channel(cfg, slots);
  }
};

int num_users_of(const AnyChannel& ch) {
  return std::visit([](const auto& c) { return c.num_users(); }, ch);
}

// ---------------------------------------------------------------------------
// Neutralization scheme selection

struct SchemeChoice {
  std::string scheme = "auto";
  std::string users;
  int silent = 0;

  void add_to(CLI::App* sub) {
    sub->add_option("--scheme", scheme, "auto, two-user, three-pair or three-full")
        ->capture_default_str()
        ->check(CLI::IsMember({"auto", "two-user", "three-pair", "three-full"}));
    sub->add_option("--users", users, "Active pair for two-user, e.g. 1,2");
    sub->add_option("--silent", silent, "Silent user for three-pair (1-based)");
  }

  template <class T>
  std::pair<std::string, NeutralizationSolution<T>> solve(const ChannelRealization<T>& ch, int slot) const {
    std::string s = scheme;
    const int k = ch.num_users();
    if (s == "auto") {
      if (k == 2) s = "two-user";
      else if (k == 3) s = check_corollary_conditions(ch, slot).all_pass ? "three-full" : "three-pair";
      else s = "two-user";
    }
    if (s == "two-user") {
      std::vector<int> pair = users.empty() ? std::vector<int>{0, 1} : parse_users(users, k);
      if (pair.size() != 2) throw UsageError("--users needs exactly two users");
      return {s, solve_two_user(ch, pair[0], pair[1], slot)};
    }
    if (k != 3) throw UsageError("scheme " + s + " requires K = 3");
    if (s == "three-pair") return {s, solve_three_user_pair(ch, silent > 0 ? silent - 1 : 2, slot)};
    return {s, solve_three_user_full(ch, slot)};
  }
};

// ---------------------------------------------------------------------------
// Subcommands

struct Common {
  std::uint64_t seed = 0;
  std::string out = "-";
  void add_to(CLI::App* sub, bool with_out = true) {
    sub->add_option("--seed", seed, "Random seed")->capture_default_str();
    if (with_out) sub->add_option("--out", out, "Output JSON path ('-' for stdout)")->capture_default_str();
  }
};

int run_sample(const CLI::App& sub, const Common& c, const ChannelSource& src, const std::string& cfg) {
  auto ch = src.load(c.seed);
  Json j = std::visit([](const auto& x) { return channel_to_json(x); }, ch);
  // The channel document itself is the artifact; provenance rides alongside.
  write_json(c.out, envelope("sample", resolved_options(sub, cfg), c.seed, j));
  return kExitOk;
}

int run_neutralize(const CLI::App& sub, const Common& c, const ChannelSource& src, const SchemeChoice& sc,
                   int slot, const std::string& cfg) {
  auto ch = src.load(c.seed);
  Json result = std::visit(
      [&](const auto& x) {
        auto [name, sol] = sc.solve(x, slot - 1);
        Json r = solution_to_json(sol);
        r["scheme"] = name;
        r["any_degenerate"] = sol.any_degenerate();
        Json powers = Json::array();
        for (double p : transmit_powers(sol, 1.0)) powers.push_back(p);
        r["transmit_powers_per_unit_P"] = powers;
        return r;
      },
      ch);
  write_json(c.out, envelope("neutralize", resolved_options(sub, cfg), c.seed, result));
  return kExitOk;
}

int run_corollary(const CLI::App& sub, const Common& c, const ChannelSource& src, int slot, const std::string& cfg) {
  auto ch = src.load(c.seed);
  auto rep = std::visit([&](const auto& x) { return check_corollary_conditions(x, slot - 1); }, ch);
  write_json(c.out, envelope("corollary-check", resolved_options(sub, cfg), c.seed, full_cancellation_report_to_json(rep)));
  if (!rep.all_pass) {
    std::cerr << "full cancellation unavailable: " << rep.first_failure() << "\n";
    return kExitVerification;
  }
  return kExitOk;
}

struct AlignArgs {
  int num_users = 3;
  int n_level = 1;
  int mu = 3;
  bool absorb = false;
  std::string arithmetic = "rational";
  std::string field = "auto";
  int q = 1024;
  int instances = 1;
  int max_attempts = 8;
};

int run_align(const CLI::App& sub, const Common& c, const AlignArgs& a, const std::string& cfg_path) {
  AlignmentConfig cfg;
  cfg.num_users = a.num_users;
  cfg.n_level = a.n_level;
  cfg.mu_k3 = a.mu;
  cfg.absorb_group_b_receivers = a.absorb;
  cfg.rational_denominator_bound = a.q;
  cfg.seed = c.seed;
  cfg.mu();  // validates and applies the cap before any work
  AlignmentRunOptions opt;
  opt.max_attempts = a.max_attempts;
  opt.field = a.field == "rational"  ? VerificationField::Rational
              : a.field == "modular" ? VerificationField::Modular
              : a.field == "float"   ? VerificationField::Float
                                     : VerificationField::Auto;
  std::vector<AlignmentRun> runs(static_cast<std::size_t>(a.instances));
  parallel_for(runs.size(), [&](std::size_t i) {
    AlignmentConfig ci = cfg;
    ci.seed = c.seed + i;
    runs[i] = align_random_instance(ci, parse_arithmetic(a.arithmetic), c.seed + i, opt);
  });
  Json reports = Json::array();
  bool all = true;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    Json r = alignment_report_to_json(runs[i].report);
    r["instance_seed"] = c.seed + i;
    r["precoder_attempts"] = runs[i].attempts;
    r["channel_draws"] = runs[i].channel_draws;
    r["dof_upper"] = format_rational(dof_upper(a.num_users));
    reports.push_back(r);
    all = all && runs[i].report.all_passed();
    if (!runs[i].report.all_passed())
      for (const auto& u : runs[i].report.users)
        if (!u.passed) std::cerr << "instance " << c.seed + i << " user " << u.user + 1 << ": " << u.failure << "\n";
  }
  Json result = a.instances == 1 ? reports[0] : Json{{"instances", reports}, {"all_passed", all}};
  write_json(c.out, envelope("align-verify", resolved_options(sub, cfg_path), c.seed, result));
  return all ? kExitOk : kExitVerification;
}

struct SweepArgs {
  double p_min = 0, p_max = 80, p_step = 5;
  double window_min = 40, window_max = 80;
  std::string csv = "-";
  std::string json;
  void add_to(CLI::App* sub, bool window) {
    sub->add_option("--p-min", p_min, "Lowest power in dB")->capture_default_str();
    sub->add_option("--p-max", p_max, "Highest power in dB")->capture_default_str();
    sub->add_option("--p-step", p_step, "Grid step in dB")->capture_default_str();
    if (window) {
      sub->add_option("--window-min", window_min, "DoF fit window start (dB)")->capture_default_str();
      sub->add_option("--window-max", window_max, "DoF fit window end (dB)")->capture_default_str();
    }
    sub->add_option("--csv", csv, "CSV output path ('-' for stdout)")->capture_default_str();
    sub->add_option("--json", json, "Optional JSON summary path");
  }
};

int run_bound_sweep(const CLI::App& sub, const Common& c, const ChannelSource& src, const SweepArgs& sw,
                    const BoundOptimizerOptions& bopt, int slot, const std::string& cfg) {
  auto ch = src.load(c.seed);
  if (num_users_of(ch) != 2) throw UsageError("bound-sweep needs a two-user channel");
  auto gains = std::visit([&](const auto& x) { return TwoUserGains::from_channel(x, 0, 1, slot - 1); }, ch);
  auto curve = bound_sweep(gains, make_db_grid(sw.p_min, sw.p_max, sw.p_step), bopt);
  const Json options = resolved_options(sub, cfg);
  {
    Sink s(sw.csv);
    csv_preamble(s.out(), "bound-sweep", options, c.seed);
    s.out() << "P_dB,bound_bits,P1,P2,Pr,rho1,rho2\n";
    for (std::size_t i = 0; i < curve.p_db.size(); ++i) {
      const auto& cv = curve.optima[i].cov;
      s.out() << csv_number(curve.p_db[i]) << "," << csv_number(curve.values_bits[i]) << "," << csv_number(cv.P1) << ","
              << csv_number(cv.P2) << "," << csv_number(cv.Pr) << "," << csv_number(cv.rho1) << ","
              << csv_number(cv.rho2) << "\n";
    }
  }
  if (!sw.json.empty()) {
    Json r{{"resolution", curve.optima.empty() ? "" : curve.optima.front().resolution},
           {"P_dB", curve.p_db},
           {"bound_bits", curve.values_bits}};
    if (curve.p_db.size() >= 4)
      r["slope"] = dof_estimate_to_json(fit_dof_slope(curve.p_db, curve.values_bits, sw.p_min, sw.p_max));
    write_json(sw.json, envelope("bound-sweep", options, c.seed, r));
  }
  return kExitOk;
}

int run_dof_sweep(const CLI::App& sub, const Common& c, const ChannelSource& src, const SchemeChoice& sc,
                  const SweepArgs& sw, const std::string& cfg) {
  auto ch = src.load(c.seed);
  const auto grid = make_db_grid(sw.p_min, sw.p_max, sw.p_step);
  RateCurve curve = std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x.h(0, 0, 0))>;
        std::vector<NeutralizationSolution<T>> sols;
        std::string name;
        for (int i = 0; i < x.n_slots(); ++i) {
          auto [n, sol] = sc.solve(x, i);
          name = n;
          sols.push_back(sol);
        }
        return neutralization_rate_curve(sols, grid, name);
      },
      ch);
  auto est = fit_dof_slope(curve.p_db, curve.sum_rate_bits, sw.window_min, sw.window_max);
  const Json options = resolved_options(sub, cfg);
  {
    Sink s(sw.csv);
    csv_preamble(s.out(), "dof-sweep", options, c.seed);
    s.out() << "P_dB";
    for (std::size_t k = 0; k < curve.per_user_rates.front().size(); ++k) s.out() << ",R" << k + 1;
    s.out() << ",Rsum\n";
    for (std::size_t i = 0; i < curve.p_db.size(); ++i) {
      s.out() << csv_number(curve.p_db[i]);
      for (double r : curve.per_user_rates[i]) s.out() << "," << csv_number(r);
      s.out() << "," << csv_number(curve.sum_rate_bits[i]) << "\n";
    }
  }
  Json r = dof_estimate_to_json(est);
  r["scheme"] = curve.scheme_id;
  r["dof_upper"] = format_rational(dof_upper(num_users_of(ch)));
  if (!sw.json.empty()) write_json(sw.json, envelope("dof-sweep", options, c.seed, r));
  else std::cerr << "slope " << csv_number(est.slope) << " over " << est.points << " points\n";
  return kExitOk;
}

int run_region(const CLI::App& sub, const Common& c, const std::vector<std::string>& points,
               const std::string& weights, int random_combos, const std::string& cfg) {
  Json result = Json::object();
  Json checked = Json::array();
  for (const auto& p : points) {
    auto v = parse_point(p);
    if (v.size() != 3) throw UsageError("--point needs three components");
    bool in_box = true;
    for (const auto& x : v) in_box = in_box && x >= 0 && x <= 1;
    const bool inside = in_box && dof_region_contains(DofPoint(v));
    checked.push_back(Json{{"point", p}, {"contains", inside}});
  }
  result["points"] = checked;
  const auto vertices = dof_region_vertices();
  const std::vector<DofPoint> corners(vertices.begin() + 1, vertices.end());
  auto show = [](const DofPoint& p) {
    return format_rational(p.d[0]) + "," + format_rational(p.d[1]) + "," + format_rational(p.d[2]);
  };
  if (!weights.empty()) {
    auto w = parse_point(weights);
    if (w.size() != corners.size()) throw UsageError("--time-share needs six weights, one per nonzero corner");
    std::vector<WeightedPoint> t;
    for (std::size_t i = 0; i < w.size(); ++i) t.push_back({corners[i], w[i]});
    auto p = time_share(t);
    result["time_share"] = Json{{"point", show(p)}, {"contains", dof_region_contains(p)}};
  }
  bool all_inside = true;
  if (random_combos > 0) {
    std::mt19937_64 rng(c.seed);
    std::uniform_int_distribution<int> d(0, 12);
    for (int n = 0; n < random_combos; ++n) {
      std::vector<int> raw(corners.size());
      int total = 0;
      for (auto& x : raw) total += x = d(rng);
      if (total == 0) raw[0] = total = 1;
      std::vector<WeightedPoint> t;
      for (std::size_t i = 0; i < corners.size(); ++i) t.push_back({corners[i], make_rational(raw[i], total)});
      all_inside = all_inside && dof_region_contains(time_share(t));
    }
    result["random_combinations"] = Json{{"count", random_combos}, {"all_contained", all_inside}};
  }
  write_json(c.out, envelope("region-check", resolved_options(sub, cfg), c.seed, result));
  return all_inside ? kExitOk : kExitVerification;
}

int run_formulas(const CLI::App& sub, const Common& c, int k, int n, bool absorb, const std::string& cfg) {
  Json r{{"K", k}, {"dof_upper", format_rational(dof_upper(k))}, {"dof_upper_value", dof_upper(k).get_d()}};
  if (k >= 3) {
    AlignmentConfig a;
    a.num_users = k;
    a.n_level = n;
    a.absorb_group_b_receivers = absorb;
    const int gamma = k == 3 ? 0 : a.gamma();
    r["counting_identity_check"] = counting_identity_check(k);
    r["n"] = n;
    r["gamma"] = gamma;
    r["epsilon"] = format_rational(k == 3 ? Rational(0) : alignment_epsilon(n, gamma));
    r["achieved_dof_formula"] = format_rational(k == 3 ? Rational(2) : achieved_dof_formula(k, n, gamma));
    try {
      r["mu"] = k == 3 ? 3 : a.mu();
    } catch (const std::invalid_argument&) {
      r["mu"] = nullptr;
      r["mu_note"] = "3*(n+1)^gamma exceeds the cap of " + std::to_string(a.max_mu);
    }
  }
  write_json(c.out, envelope("formulas", resolved_options(sub, cfg), c.seed, r));
  std::cout.flush();
  return kExitOk;
}

// Pulls --config out of argv and turns its key=value lines into flags placed
// right after the subcommand, ahead of the real flags so those win.
std::vector<std::string> expand_config(int argc, char** argv, std::string& config_path) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a path");
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (config_path.empty() || rest.empty()) return rest;
  std::ifstream in(config_path);
  if (!in) throw UsageError("cannot read config '" + config_path + "'");
  std::vector<std::string> injected;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError(config_path + ":" + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      auto a = s.find_first_not_of(" \t\r"), b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) throw UsageError(config_path + ":" + std::to_string(lineno) + ": empty key");
    injected.push_back("--" + key);
    if (value != "true") injected.push_back(value);
  }
  rest.insert(rest.begin() + 1, injected.begin(), injected.end());
  return rest;
}

}  // namespace

int main(int argc, char** argv) {
  std::string config_path;
  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv, config_path);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  CLI::App app{"Degrees-of-freedom experiments for the interference channel with a cognitive relay", "doflab"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Common common_sample, common_neut, common_cor, common_align, common_bound, common_dof, common_region, common_form;
  ChannelSource src_sample, src_neut, src_cor, src_bound, src_dof;
  SchemeChoice scheme_neut, scheme_dof;
  int slot_neut = 1, slot_cor = 1, slot_bound = 1;

  auto* sample = app.add_subcommand("sample", "Sample a channel realization and write it as JSON");
  common_sample.add_to(sample);
  src_sample.add_to(sample);

  auto* neut = app.add_subcommand("neutralize", "Solve for relay neutralization coefficients");
  common_neut.add_to(neut);
  src_neut.add_to(neut);
  scheme_neut.add_to(neut);
  neut->add_option("--slot", slot_neut, "Slot (1-based)")->capture_default_str();

  auto* cor = app.add_subcommand("corollary-check", "Check the three-user full-cancellation conditions");
  common_cor.add_to(cor);
  src_cor.add_to(cor);
  cor->add_option("--slot", slot_cor, "Slot (1-based)")->capture_default_str();

  AlignArgs align_args;
  auto* align = app.add_subcommand("align-verify", "Build and verify the alignment scheme on random instances");
  common_align.add_to(align);
  align->add_option("--K", align_args.num_users, "Number of users")->capture_default_str()->check(CLI::Range(3, 64));
  align->add_option("--n", align_args.n_level, "Exponent level n")->capture_default_str()->check(CLI::Range(1, 1000));
  align->add_option("--mu", align_args.mu, "Extension length for K = 3")->capture_default_str();
  align->add_flag("--absorb", align_args.absorb, "Fold group-B receivers into the products");
  align->add_option("--arithmetic", align_args.arithmetic, "Channel scalar type")
      ->capture_default_str()
      ->check(CLI::IsMember({"float", "rational"}));
  align->add_option("--field", align_args.field, "Verification field")
      ->capture_default_str()
      ->check(CLI::IsMember({"auto", "rational", "modular", "float"}));
  align->add_option("--q", align_args.q, "Rational denominator bound")->capture_default_str();
  align->add_option("--instances", align_args.instances, "Number of seeds (seed, seed+1, ...)")
      ->capture_default_str()
      ->check(CLI::Range(1, 100000));
  align->add_option("--max-attempts", align_args.max_attempts, "Redraws on measure-zero failures")
      ->capture_default_str();

  SweepArgs bound_args;
  BoundOptimizerOptions bopt;
  auto* bound = app.add_subcommand("bound-sweep", "Optimize the two-user sum-rate upper bound over a power grid");
  common_bound.add_to(bound, false);
  src_bound.add_to(bound);
  bound_args.add_to(bound, false);
  bound->add_option("--slot", slot_bound, "Slot (1-based)")->capture_default_str();
  bound->add_option("--power-points", bopt.power_points, "Grid points per power axis")->capture_default_str();
  bound->add_option("--rho-points", bopt.rho_points, "Grid points per correlation axis")->capture_default_str();
  bound->add_option("--refine-rounds", bopt.refine_rounds, "Coordinate refinement rounds")->capture_default_str();

  SweepArgs dof_args;
  auto* dof = app.add_subcommand("dof-sweep", "Sum-rate curve of a neutralization scheme and its DoF slope");
  common_dof.add_to(dof, false);
  src_dof.add_to(dof);
  scheme_dof.add_to(dof);
  dof_args.add_to(dof, true);

  std::vector<std::string> points;
  std::string weights;
  int random_combos = 0;
  auto* region = app.add_subcommand("region-check", "Membership in the three-user DoF region");
  common_region.add_to(region);
  region->add_option("--point", points, "d1,d2,d3 (rationals allowed); repeatable")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  region->add_option("--time-share", weights,
                     "Weights over (1,0,0),(0,1,0),(0,0,1),(1,1,0),(1,0,1),(0,1,1)");
  region->add_option("--random", random_combos, "Check this many random corner combinations")->capture_default_str();

  int form_k = 3, form_n = 1;
  bool form_absorb = false;
  auto* form = app.add_subcommand("formulas", "Closed-form DoF values");
  common_form.add_to(form);
  form->add_option("--K", form_k, "Number of users")->capture_default_str()->check(CLI::Range(2, 100000));
  form->add_option("--n", form_n, "Exponent level n")->capture_default_str()->check(CLI::Range(1, 1000000));
  form->add_flag("--absorb", form_absorb, "Count group-B receivers in gamma");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*sample) return run_sample(*sample, common_sample, src_sample, config_path);
    if (*neut) return run_neutralize(*neut, common_neut, src_neut, scheme_neut, slot_neut, config_path);
    if (*cor) return run_corollary(*cor, common_cor, src_cor, slot_cor, config_path);
    if (*align) return run_align(*align, common_align, align_args, config_path);
    if (*bound) return run_bound_sweep(*bound, common_bound, src_bound, bound_args, bopt, slot_bound, config_path);
    if (*dof) return run_dof_sweep(*dof, common_dof, src_dof, scheme_dof, dof_args, config_path);
    if (*region) return run_region(*region, common_region, points, weights, random_combos, config_path);
    if (*form) return run_formulas(*form, common_form, form_k, form_n, form_absorb, config_path);
  } catch (const ConditionViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerification;
  } catch (const UnsolvableError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerification;
  } catch (const SingularAlignmentSystem& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerification;
  } catch (const PrecoderConstructionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerification;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
