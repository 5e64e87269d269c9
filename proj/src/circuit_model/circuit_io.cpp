// Copyright 2026 The obppp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "obppp/circuit_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "obppp/errors.hpp"

namespace obppp {

using nlohmann::json;

namespace {

const std::set<std::string> kChannelParams = {"lambda", "gamma", "t1", "t2", "t"};

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
  throw ValidationError(where + ": " + msg);
}

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) fail(where, std::string("missing field '") + key + "'");
  return j.at(key);
}

std::size_t as_index(const json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<long long>() < 0) fail(where, "expected a non-negative integer");
  return v.get<std::size_t>();
}

double as_real(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  return v.get<double>();
}

std::vector<std::size_t> as_index_list(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array of qubit indices");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_index(v[i], where + "/" + std::to_string(i)));
  return out;
}

std::string sparse_text(const PauliString& p) {
  std::string s;
  for (const auto& [q, c] : p.sparse()) {
    if (!s.empty()) s += ' ';
    s += code_char(c);
    s += std::to_string(q);
  }
  return s;
}

}  // namespace

json channel_to_json(const ChannelSpec& s) {
  json j;
  j["kind"] = s.kind;
  j["support"] = s.support;
  for (const auto& [k, v] : s.params) j[k] = v;
  if (s.kind == "thermal" && s.params.count("t1")) {
    j.erase("gamma");
    j.erase("lambda");
  }
  if (s.kind == "pauli") j["probs"] = s.pauli_probs;
  if (s.kind == "mmff") j["feedback"] = s.feedback;
  if (s.kind == "ptm") {
    std::size_t d = 1;
    while (d * d < s.raw_ptm.size()) ++d;
    json m = json::array();
    for (std::size_t i = 0; i < d; ++i) {
      json row = json::array();
      for (std::size_t k = 0; k < d; ++k) row.push_back(s.raw_ptm[i * d + k]);
      m.push_back(row);
    }
    j["matrix"] = m;
  }
  return j;
}

ChannelSpec channel_spec_from_json(const json& j, const std::string& where) {
  ChannelSpec s;
  const json& kind = field(j, "kind", where);
  if (!kind.is_string()) fail(where + "/kind", "expected a string");
  s.kind = kind.get<std::string>();
  s.support = as_index_list(field(j, "support", where), where + "/support");
  for (const auto& [k, v] : j.items()) {
    if (kChannelParams.count(k)) s.params[k] = as_real(v, where + "/" + k);
  }
  if (s.kind == "pauli") {
    const json& probs = field(j, "probs", where);
    if (!probs.is_object()) fail(where + "/probs", "expected an object keyed by Pauli words");
    for (const auto& [k, v] : probs.items()) s.pauli_probs[k] = as_real(v, where + "/probs/" + k);
  } else if (s.kind == "mmff") {
    const json& fb = field(j, "feedback", where);
    if (!fb.is_string()) fail(where + "/feedback", "expected a Pauli string");
    s.feedback = fb.get<std::string>();
  } else if (s.kind == "ptm") {
    const json& m = field(j, "matrix", where);
    if (!m.is_array()) fail(where + "/matrix", "expected a square array of rows");
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (!m[i].is_array() || m[i].size() != m.size()) {
        fail(where + "/matrix/" + std::to_string(i), "row length does not match row count");
      }
      for (std::size_t k = 0; k < m[i].size(); ++k) {
        s.raw_ptm.push_back(as_real(m[i][k], where + "/matrix/" + std::to_string(i)));
      }
    }
  }
  return s;
}

json problem_to_json(const Problem& p) {
  const Circuit& c = p.circuit;
  json j;
  j["format"] = 1;
  j["n"] = c.n();
  j["params"] = {{"count", c.n_params()}};
  json gates = json::array();
  for (const GateOp& op : c.ops()) {
    json g;
    g["gate"] = op.name;
    g["qubits"] = op.qubits;
    g["layer"] = op.layer;
    if (op.type == GateOp::Type::Rotation) {
      if (op.name == "rot") {
        std::string letters;
        for (std::size_t q : op.qubits) {
          char ch = 'I';
          for (const auto& [aq, code] : op.axis.ops) {
            if (aq == q) ch = code_char(code);
          }
          letters += ch;
        }
        g["axis"] = letters;
      }
      if (op.param >= 0) {
        g["param"] = op.param;
      } else {
        g["angle_k"] = op.fixed_k;
      }
    }
    gates.push_back(g);
  }
  j["gates"] = gates;
  json noise = json::array();
  for (const NoiseSite& s : c.noise_sites()) {
    json n = channel_to_json(s.channel.spec());
    n["after"] = s.position;
    n["layer"] = s.layer;
    n["element"] = s.element;
    if (!s.param_name.empty()) n["param"] = s.param_name;
    noise.push_back(n);
  }
  j["noise"] = noise;
  json obs = json::array();
  if (p.observable.offset() != 0.0) obs.push_back({{"coeff", p.observable.offset()}, {"ops", ""}});
  for (const auto& t : p.observable.terms()) obs.push_back({{"coeff", t.coeff}, {"ops", sparse_text(t.pauli)}});
  j["observable"] = obs;
  if (p.state.is_zero_state()) {
    j["initial_state"] = "zero";
  } else {
    json st = json::array();
    for (const auto& e : p.state.entries()) {
      st.push_back({{"row", basis_str(e.row, c.n())},
                    {"col", basis_str(e.col, c.n())},
                    {"re", e.amp.real()},
                    {"im", e.amp.imag()}});
    }
    j["initial_state"] = st;
  }
  return j;
}

Problem problem_from_json(const json& j) {
  if (!j.is_object()) fail("/", "circuit file must be a JSON object");
  if (j.contains("format") && (!j["format"].is_number_integer() || j["format"].get<int>() != 1)) {
    fail("/format", "unsupported format version (expected 1)");
  }
  const std::size_t n = as_index(field(j, "n", "/"), "/n");
  if (n == 0) fail("/n", "need at least one qubit");
  Circuit c(n);
  const json& gates = field(j, "gates", "/");
  if (!gates.is_array()) fail("/gates", "expected an array");
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const std::string where = "/gates/" + std::to_string(i);
    const json& g = gates[i];
    const json& name_j = field(g, "gate", where);
    if (!name_j.is_string()) fail(where + "/gate", "expected a string");
    std::string name = name_j.get<std::string>();
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char ch) { return std::tolower(ch); });
    const auto qubits = as_index_list(field(g, "qubits", where), where + "/qubits");
    const int layer = g.contains("layer") ? static_cast<int>(as_index(g["layer"], where + "/layer")) : static_cast<int>(i);
    try {
      const bool is_rot = name == "rot" || name == "rx" || name == "ry" || name == "rz" ||
                          name == "rxx" || name == "ryy" || name == "rzz";
      if (is_rot) {
        std::string letters;
        if (name == "rot") {
          const json& ax = field(g, "axis", where);
          if (!ax.is_string()) fail(where + "/axis", "expected a Pauli string");
          letters = ax.get<std::string>();
        } else {
          letters = std::string(name.size() - 1, static_cast<char>(std::toupper(name[1])));
        }
        SparseAxis axis = axis_for(letters, qubits);
        if (g.contains("angle_k")) {
          const std::size_t k = as_index(g["angle_k"], where + "/angle_k");
          c.add_rotation(name, qubits, std::move(axis), -1, layer, static_cast<uint8_t>(k % 4), true);
        } else {
          const int param = g.contains("param") ? static_cast<int>(as_index(g["param"], where + "/param")) : -1;
          c.add_rotation(name, qubits, std::move(axis), param, layer);
        }
      } else {
        c.add_clifford(parse_clifford(name), qubits, layer);
      }
    } catch (const ValidationError& e) {
      if (std::string(e.what()).rfind("/", 0) == 0) throw;
      fail(where, e.what());
    }
  }
  if (j.contains("params")) {
    const json& pj = j["params"];
    if (pj.is_object() && pj.contains("count")) {
      const std::size_t cnt = as_index(pj["count"], "/params/count");
      if (cnt < c.n_params()) fail("/params/count", "smaller than the largest parameter index + 1");
      c.set_n_params(cnt);
    }
  }
  if (j.contains("noise")) {
    const json& noise = j["noise"];
    if (!noise.is_array()) fail("/noise", "expected an array");
    for (std::size_t i = 0; i < noise.size(); ++i) {
      const std::string where = "/noise/" + std::to_string(i);
      const json& nj = noise[i];
      const std::size_t after = as_index(field(nj, "after", where), where + "/after");
      ChannelSpec spec = channel_spec_from_json(nj, where);
      try {
        PtmChannel ch = build_channel(spec);
        const int layer = nj.contains("layer") ? static_cast<int>(as_index(nj["layer"], where + "/layer")) : 0;
        const int element = nj.contains("element") ? static_cast<int>(as_index(nj["element"], where + "/element")) : static_cast<int>(i);
        std::string param = nj.contains("param") && nj["param"].is_string() ? nj["param"].get<std::string>() : "";
        c.add_noise(std::move(ch), after, layer, element, param);
      } catch (const ValidationError& e) {
        fail(where, e.what());
      }
    }
  }
  try {
    c.validate();
  } catch (const ValidationError& e) {
    fail("/", e.what());
  }
  std::vector<ObservableSum::Term> terms;
  const json& obs = field(j, "observable", "/");
  if (!obs.is_array()) fail("/observable", "expected an array of terms");
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const std::string where = "/observable/" + std::to_string(i);
    const double coeff = as_real(field(obs[i], "coeff", where), where + "/coeff");
    try {
      if (obs[i].contains("pauli")) {
        const std::string word = obs[i]["pauli"].get<std::string>();
        if (word.size() != n) fail(where + "/pauli", "length must equal n");
        terms.push_back({coeff, PauliString::parse(word)});
      } else {
        const json& ops = field(obs[i], "ops", where);
        if (!ops.is_string()) fail(where + "/ops", "expected sparse Pauli text like \"X0 Z3\"");
        ObservableSum one = ObservableSum::parse_sparse(n, ops.get<std::string>());
        if (one.terms().empty()) {
          terms.push_back({coeff, PauliString(n)});
        } else {
          terms.push_back({coeff * one.terms()[0].coeff, one.terms()[0].pauli});
        }
      }
    } catch (const ValidationError& e) {
      if (std::string(e.what()).rfind("/", 0) == 0) throw;
      fail(where, e.what());
    } catch (const json::exception& e) {
      fail(where, e.what());
    }
  }
  ObservableSum observable = ObservableSum::from_terms(n, std::move(terms));
  SparseState state;
  if (!j.contains("initial_state") || (j["initial_state"].is_string() && j["initial_state"] == "zero")) {
    state = SparseState::zero(n);
  } else {
    const json& st = j["initial_state"];
    if (!st.is_array()) fail("/initial_state", "expected \"zero\" or an array of entries");
    std::vector<SparseState::Entry> entries;
    for (std::size_t i = 0; i < st.size(); ++i) {
      const std::string where = "/initial_state/" + std::to_string(i);
      const json& e = st[i];
      const json& row = field(e, "row", where);
      const json& col = field(e, "col", where);
      if (!row.is_string() || row.get<std::string>().size() != n) fail(where + "/row", "expected an n-bit string");
      if (!col.is_string() || col.get<std::string>().size() != n) fail(where + "/col", "expected an n-bit string");
      const double re = e.contains("re") ? as_real(e["re"], where + "/re") : 0.0;
      const double im = e.contains("im") ? as_real(e["im"], where + "/im") : 0.0;
      try {
        entries.push_back({parse_basis(row.get<std::string>()), parse_basis(col.get<std::string>()), {re, im}});
      } catch (const ValidationError& ex) {
        fail(where, ex.what());
      }
    }
    try {
      state = SparseState::from_entries(n, std::move(entries));
    } catch (const ValidationError& ex) {
      fail("/initial_state", ex.what());
    }
  }
  return {std::move(c), std::move(observable), std::move(state)};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ValidationError(path + ":" + std::to_string(line) + ":" + std::to_string(col) +
                          ": JSON parse error: " + e.what());
  }
}

Problem load_problem(const std::string& path) {
  const json j = read_json_file(path);
  try {
    return problem_from_json(j);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void save_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

}  // namespace obppp
