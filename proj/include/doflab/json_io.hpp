#pragma once

// JSON interchange. Channel documents look like
//
//   {"K": 3, "mode": "constant" | "varying", "slots": n,
//    "h": [[[...]]],   // h[tx][rx][slot]
//    "hr": [[...]],    // hr[rx][slot]
//    "arithmetic": "float" | "rational"}
//
// with rationals written as "p/q" strings. User indices in every document
// are 1-based.

#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "doflab/alignment.hpp"
#include "doflab/channel.hpp"
#include "doflab/matrix.hpp"
#include "doflab/neutralization.hpp"
#include "doflab/rates.hpp"
#include "doflab/scalar.hpp"

namespace doflab {

using Json = nlohmann::json;

inline Json scalar_to_json(double x) { return x; }
inline Json scalar_to_json(const Rational& x) { return format_rational(x); }

template <class T>
T scalar_from_json(const Json& j);

template <>
inline double scalar_from_json<double>(const Json& j) {
  if (!j.is_number()) throw std::invalid_argument("expected a number, got " + j.dump());
  return j.get<double>();
}

template <>
inline Rational scalar_from_json<Rational>(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  throw std::invalid_argument("expected a \"p/q\" string, got " + j.dump());
}

template <class T>
Json channel_to_json(const ChannelRealization<T>& chan) {
  const int k = chan.num_users(), n = chan.n_slots();
  Json h = Json::array(), hr = Json::array();
  for (int tx = 0; tx < k; ++tx) {
    Json row = Json::array();
    for (int rx = 0; rx < k; ++rx) {
      Json slots = Json::array();
      for (int i = 0; i < n; ++i) slots.push_back(scalar_to_json(chan.h(tx, rx, i)));
      row.push_back(slots);
    }
    h.push_back(row);
  }
  for (int rx = 0; rx < k; ++rx) {
    Json slots = Json::array();
    for (int i = 0; i < n; ++i) slots.push_back(scalar_to_json(chan.relay(rx, i)));
    hr.push_back(slots);
  }
  return Json{{"K", k},
              {"mode", chan.mode() == ChannelMode::Constant ? "constant" : "varying"},
              {"slots", n},
              {"h", h},
              {"hr", hr},
              {"arithmetic", ScalarTraits<T>::exact ? "rational" : "float"}};
}

namespace detail {

inline void reject_unknown_keys(const Json& j, const std::set<std::string>& known, const std::string& what) {
  if (!j.is_object()) throw std::invalid_argument(what + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw std::invalid_argument("unknown key '" + it.key() + "' in " + what);
}

template <class T>
ChannelRealization<T> channel_body_from_json(const Json& j, int k, int n, ChannelMode mode) {
  ChannelRealization<T> chan(k, n, mode);
  const Json& h = j.at("h");
  const Json& hr = j.at("hr");
  if (!h.is_array() || static_cast<int>(h.size()) != k) throw std::invalid_argument("h must have K entries");
  if (!hr.is_array() || static_cast<int>(hr.size()) != k) throw std::invalid_argument("hr must have K entries");
  for (int tx = 0; tx < k; ++tx) {
    if (static_cast<int>(h[tx].size()) != k) throw std::invalid_argument("h[tx] must have K entries");
    for (int rx = 0; rx < k; ++rx) {
      if (static_cast<int>(h[tx][rx].size()) != n) throw std::invalid_argument("h[tx][rx] must have one entry per slot");
      for (int i = 0; i < n; ++i) chan.h(tx, rx, i) = scalar_from_json<T>(h[tx][rx][i]);
    }
  }
  for (int rx = 0; rx < k; ++rx) {
    if (static_cast<int>(hr[rx].size()) != n) throw std::invalid_argument("hr[rx] must have one entry per slot");
    for (int i = 0; i < n; ++i) chan.relay(rx, i) = scalar_from_json<T>(hr[rx][i]);
  }
  if (mode == ChannelMode::Constant)
    for (int i = 1; i < n; ++i) {
      for (int tx = 0; tx < k; ++tx)
        for (int rx = 0; rx < k; ++rx)
          if (!(chan.h(tx, rx, i) == chan.h(tx, rx, 0)))
            throw std::invalid_argument("constant channel has slot-dependent gains");
      for (int rx = 0; rx < k; ++rx)
        if (!(chan.relay(rx, i) == chan.relay(rx, 0)))
          throw std::invalid_argument("constant channel has slot-dependent relay gains");
    }
  return chan;
}

}  // namespace detail

inline AnyChannel channel_from_json(const Json& j) {
  detail::reject_unknown_keys(j, {"K", "mode", "slots", "h", "hr", "arithmetic"}, "channel document");
  const int k = j.at("K").get<int>();
  const int n = j.at("slots").get<int>();
  const std::string mode = j.at("mode").get<std::string>();
  const std::string arith = j.at("arithmetic").get<std::string>();
  if (k < 2) throw std::invalid_argument("K must be >= 2");
  if (n < 1) throw std::invalid_argument("slots must be >= 1");
  ChannelMode m;
  if (mode == "constant") m = ChannelMode::Constant;
  else if (mode == "varying") m = ChannelMode::TimeVarying;
  else throw std::invalid_argument("mode must be \"constant\" or \"varying\"");
  if (arith == "float") return detail::channel_body_from_json<double>(j, k, n, m);
  if (arith == "rational") return detail::channel_body_from_json<Rational>(j, k, n, m);
  throw std::invalid_argument("arithmetic must be \"float\" or \"rational\"");
}

template <class T>
Json matrix_to_json(const Matrix<T>& m) {
  Json data = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(scalar_to_json(m(r, c)));
    data.push_back(row);
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

template <class T>
Matrix<T> matrix_from_json(const Json& j) {
  detail::reject_unknown_keys(j, {"rows", "cols", "data"}, "matrix document");
  const auto rows = j.at("rows").get<std::size_t>(), cols = j.at("cols").get<std::size_t>();
  Matrix<T> m(rows, cols);
  const Json& data = j.at("data");
  if (data.size() != rows) throw std::invalid_argument("matrix row count mismatch");
  for (std::size_t r = 0; r < rows; ++r) {
    if (data[r].size() != cols) throw std::invalid_argument("matrix column count mismatch");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = scalar_from_json<T>(data[r][c]);
  }
  return m;
}

template <class T>
Json solution_to_json(const NeutralizationSolution<T>& sol) {
  Json c = Json::array(), g = Json::array(), deg = Json::array(), act = Json::array();
  for (std::size_t a = 0; a < sol.active.size(); ++a) {
    c.push_back(scalar_to_json(sol.c[a]));
    g.push_back(scalar_to_json(sol.g[a]));
    deg.push_back(static_cast<bool>(sol.degenerate[a]));
    act.push_back(sol.active[a] + 1);
  }
  return Json{{"c", c},         {"g", g}, {"degenerate", deg}, {"active", act}, {"K", sol.num_users},
              {"slot", sol.slot + 1}, {"residual", matrix_to_json(sol.residual)}};
}

inline Json alignment_report_to_json(const AlignmentReport& rep) {
  Json users = Json::array();
  for (const auto& u : rep.users) {
    users.push_back(Json{{"user", u.user + 1},
                         {"streams", u.streams},
                         {"rank_desired", u.rank_desired},
                         {"rank_desired_direct_part", u.rank_desired_direct_part},
                         {"interference_dim", u.interference_dim},
                         {"target_interference_dim", u.target_interference_dim},
                         {"postcoder_built", u.postcoder_built},
                         {"zero_forcing_ok", u.zero_forcing_ok},
                         {"zero_forcing_exact", u.zero_forcing_exact},
                         {"max_zero_forcing_residual", u.max_zero_forcing_residual},
                         {"desired_rank_ok", u.desired_rank_ok},
                         {"span_ok", u.span_ok},
                         {"passed", u.passed},
                         {"failure", u.failure}});
  }
  return Json{{"K", rep.num_users},
              {"mu", rep.mu},
              {"n_level", rep.n_level},
              {"gamma", rep.gamma},
              {"epsilon", format_rational(rep.epsilon)},
              {"field", rep.field},
              {"users", users},
              {"achieved_dof", format_rational(rep.achieved_dof)},
              {"formula_dof", format_rational(rep.formula_dof)},
              {"all_passed", rep.all_passed()}};
}

inline Json full_cancellation_report_to_json(const FullCancellationReport& rep) {
  return Json{{"ratio_conditions", rep.ratio_conditions},
              {"nondegeneracy_conditions", rep.nondegeneracy_conditions},
              {"all_pass", rep.all_pass},
              {"first_failure", rep.first_failure()}};
}

inline Json dof_estimate_to_json(const DofEstimate& e) {
  return Json{{"slope", e.slope},
              {"intercept", e.intercept},
              {"max_residual", e.max_residual},
              {"window_db", {e.window_min_db, e.window_max_db}},
              {"points", e.points}};
}

}  // namespace doflab
