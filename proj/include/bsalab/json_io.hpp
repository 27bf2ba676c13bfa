#pragma once

// JSON serialization for states, decompositions, and reports, plus parsing of
// matrix and local-operation input files. Complex scalars travel as [re, im];
// doubles round-trip exactly through nlohmann's shortest-representation dump.

#include <fstream>
#include <string>

#include <json.hpp>

#include "bsalab/bdstate.hpp"
#include "bsalab/errors.hpp"
#include "bsalab/lqcc.hpp"
#include "bsalab/lsd.hpp"
#include "bsalab/matcore.hpp"
#include "bsalab/optimality.hpp"
#include "bsalab/oracle.hpp"

namespace bsalab {

using json = nlohmann::json;

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx cplx_from_json(const json& j) {
  if (j.is_number()) return cplx(j.get<double>(), 0);
  if (j.is_array() && j.size() == 2) return cplx(j[0].get<double>(), j[1].get<double>());
  fail(errc::invalid_input, "complex entries must be numbers or [re, im] pairs");
}

template <int N>
json to_json(const Ket<N>& k) {
  json a = json::array();
  for (int i = 0; i < N; ++i) a.push_back(to_json(k.a[i]));
  return a;
}

template <int N>
json to_json(const Mat<N>& m) {
  json rows = json::array();
  for (int i = 0; i < N; ++i) {
    json row = json::array();
    for (int j = 0; j < N; ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

template <int N>
Mat<N> mat_from_json(const json& j) {
  if (!j.is_array() || j.size() != N) fail(errc::invalid_input, "matrix must have 4 rows");
  Mat<N> m;
  for (int i = 0; i < N; ++i) {
    if (!j[i].is_array() || j[i].size() != N)
      fail(errc::invalid_input, "matrix rows must have 4 entries");
    for (int k = 0; k < N; ++k) m(i, k) = cplx_from_json(j[i][k]);
  }
  return m;
}

inline json to_json(const BDState& s) {
  json j;
  j["p"] = s.p;
  j["t"] = s.t;
  j["separable"] = is_separable(s);
  auto id = tetra_id(s);
  j["tetra_id"] = id ? json(*id) : json(nullptr);
  return j;
}

inline json to_json(const LSDecomposition& d) {
  json j;
  j["lambda"] = d.lambda;
  j["separable_part"] = to_json(d.rho_s);
  j["pure_part"] = to_json(d.pure_part);
  j["canonical_pauli"] = d.canonical_pauli;
  j["tetra_id"] = d.tetra ? json(*d.tetra) : json(nullptr);
  json ens = json::array();
  for (const auto& e : d.ensemble) {
    json row;
    row["weight"] = e.weight;
    row["ket_a"] = to_json(e.e);
    row["ket_b"] = to_json(e.f);
    ens.push_back(row);
  }
  j["ensemble"] = ens;
  return j;
}

inline json to_json(const VerificationReport& r) {
  json j;
  j["passed"] = r.passed;
  j["reconstruction_residual"] = r.reconstruction_residual;
  j["max_residual"] = r.max_residual;
  j["tolerance"] = r.tol;
  json singles = json::array();
  for (const auto& c : r.lemma1_checks) {
    json row;
    row["index"] = c.alpha;
    row["claimed"] = c.claimed_a;
    row["computed"] = c.computed_a;
    row["residual"] = c.residual;
    singles.push_back(row);
  }
  j["single_checks"] = singles;
  json pairs = json::array();
  for (const auto& c : r.pair_checks) {
    json row;
    row["index_a"] = c.alpha;
    row["index_b"] = c.beta;
    row["claimed_a"] = c.claimed_a;
    row["computed_a"] = c.computed_a;
    row["claimed_b"] = c.claimed_b;
    row["computed_b"] = c.computed_b;
    row["residual"] = c.residual;
    row["pair_case"] = std::string(1, c.pair_case);
    pairs.push_back(row);
  }
  j["pair_checks"] = pairs;
  return j;
}

inline json to_json(const RankReport& r) {
  json j;
  j["rank_partial_transpose"] = r.rank_pt;
  j["smallest_pt_eigenvalue_abs"] = r.lambda4_abs;
  j["kernel_ket"] = to_json(r.kernel);
  j["rank_separable_part"] = r.rank_rho_s;
  j["alignment"] = {{"alpha", r.alpha_i}, {"residual", r.residual_i}, {"holds", r.cond_i}};
  json second;
  second["evaluated"] = r.cond_ii_evaluated;
  if (r.cond_ii_evaluated) {
    second["nu"] = r.nu;
    second["alpha"] = r.alpha_ii;
    second["residual"] = r.residual_ii;
    second["holds"] = r.cond_ii;
  }
  j["kernel_condition"] = second;
  j["passed"] = r.passed;
  return j;
}

inline json to_json(const OracleResult& r) {
  json j;
  j["lambda"] = r.lambda;
  j["psi"] = to_json(r.psi);
  j["objective_history"] = r.objective_history;
  j["best_restart"] = r.best_restart;
  j["evaluations"] = r.evals;
  j["converged"] = r.converged;
  return j;
}

inline json to_json(const TransformedDecomposition& d) {
  json j;
  j["lambda"] = d.lambda;
  j["separable_part"] = to_json(d.rho_s);
  j["pure_part"] = to_json(d.pure);
  j["trace_factor"] = d.trace_factor;
  j["same_local_operation"] = d.same_ab;
  json ens = json::array();
  for (const auto& e : d.ensemble) {
    json row;
    row["weight"] = e.weight;
    row["ket_a"] = to_json(e.e);
    row["ket_b"] = to_json(e.f);
    ens.push_back(row);
  }
  j["ensemble"] = ens;
  return j;
}

// ------------------------------------------------------------- file input ----

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::invalid_input, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    fail(errc::invalid_input, std::string("malformed JSON in ") + path + ": " + e.what());
  }
  return j;
}

// A matrix file is either a bare 4x4 array or {"matrix": ...}.
inline Mat4 load_matrix_file(const std::string& path) {
  json j = load_json_file(path);
  if (j.is_object() && j.contains("matrix")) return mat_from_json<4>(j["matrix"]);
  return mat_from_json<4>(j);
}

// A local-operation pair file:
// {"a": {"unitary": 2x2, "filtration": {"mu":..,"a":..,"axis":[..]}}, "b": {...}}
// Either side may omit "unitary" (identity) or "filtration" (trivial filter).
inline LocalOperation local_op_from_json(const json& j) {
  Mat2 u = Mat2::identity();
  Filtration f;
  if (j.contains("unitary")) u = mat_from_json<2>(j["unitary"]);
  if (j.contains("filtration")) {
    const json& g = j["filtration"];
    double mu = g.value("mu", 1.0);
    double a = g.value("a", 0.0);
    std::array<double, 3> axis{0, 0, 1};
    if (g.contains("axis")) {
      if (!g["axis"].is_array() || g["axis"].size() != 3)
        fail(errc::invalid_input, "filtration axis must have 3 components");
      for (int k = 0; k < 3; ++k) axis[k] = g["axis"][k].get<double>();
    }
    f = Filtration::make(mu, a, axis);
  }
  return LocalOperation::make(u, f);
}

inline LqccPair load_pair_file(const std::string& path) {
  json j = load_json_file(path);
  if (!j.is_object() || !j.contains("a"))
    fail(errc::invalid_input, "pair file needs an \"a\" operation");
  LqccPair pair;
  pair.a = local_op_from_json(j["a"]);
  pair.b = j.contains("b") ? local_op_from_json(j["b"]) : pair.a;
  return pair;
}

}  // namespace bsalab
