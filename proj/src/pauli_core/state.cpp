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

#include "obppp/state.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <regex>
#include <sstream>

#include "obppp/errors.hpp"

namespace obppp {

BasisIndex parse_basis(std::string_view bits) {
  BasisIndex b((bits.size() + 63) / 64, 0);
  for (std::size_t q = 0; q < bits.size(); ++q) {
    if (bits[q] == '1') {
      b[q >> 6] |= uint64_t{1} << (q & 63);
    } else if (bits[q] != '0') {
      throw ValidationError("basis label must be a 0/1 string, got '" + std::string(bits) + "'");
    }
  }
  return b;
}

std::string basis_str(const BasisIndex& b, std::size_t n) {
  std::string s(n, '0');
  for (std::size_t q = 0; q < n; ++q) {
    if ((b[q >> 6] >> (q & 63)) & 1) s[q] = '1';
  }
  return s;
}

SparseState SparseState::zero(std::size_t n) {
  SparseState s;
  s.n_ = n;
  s.zero_ = true;
  const BasisIndex z((n + 63) / 64, 0);
  s.entries_.push_back({z, z, 1.0});
  return s;
}

SparseState SparseState::from_entries(std::size_t n, std::vector<Entry> entries) {
  const std::size_t nw = (n + 63) / 64;
  std::map<std::pair<BasisIndex, BasisIndex>, std::complex<double>> merged;
  for (auto& e : entries) {
    e.row.resize(nw, 0);
    e.col.resize(nw, 0);
    merged[{e.row, e.col}] += e.amp;
  }
  std::complex<double> tr = 0.0;
  for (const auto& [key, v] : merged) {
    auto it = merged.find({key.second, key.first});
    const std::complex<double> mirror = it == merged.end() ? 0.0 : it->second;
    if (std::abs(v - std::conj(mirror)) > 1e-12) {
      throw ValidationError("initial state is not Hermitian at (" + basis_str(key.first, n) +
                            ", " + basis_str(key.second, n) + ")");
    }
    if (key.first == key.second) tr += v;
  }
  if (std::abs(tr - 1.0) > 1e-12) {
    throw ValidationError("initial state trace is " + std::to_string(tr.real()) + ", expected 1");
  }
  SparseState s;
  s.n_ = n;
  bool all_zero_basis = true;
  for (const auto& [key, v] : merged) {
    if (v == 0.0) continue;
    s.entries_.push_back({key.first, key.second, v});
    for (std::size_t w = 0; w < nw; ++w) {
      if (key.first[w] | key.second[w]) all_zero_basis = false;
    }
  }
  s.zero_ = all_zero_basis && s.entries_.size() == 1;
  return s;
}

double SparseState::trace_unnormalized(const uint64_t* x, const uint64_t* z, uint8_t q) const {
  const std::size_t nw = (n_ + 63) / 64;
  if (zero_) {
    for (std::size_t w = 0; w < nw; ++w) {
      if (x[w]) return 0.0;
    }
    // <0|P|0> = i^q when P is a Z-type word.
    static const double re[4] = {1.0, 0.0, -1.0, 0.0};
    return re[q & 3];
  }
  // <b|P|a> = i^{q + |x&z|} (-1)^{|z&a|} [b == a^x]
  unsigned xz = 0;
  for (std::size_t w = 0; w < nw; ++w) xz += std::popcount(x[w] & z[w]);
  std::complex<double> acc = 0.0;
  for (const auto& e : entries_) {
    bool match = true;
    unsigned za = 0;
    for (std::size_t w = 0; w < nw && match; ++w) {
      match = e.col[w] == (e.row[w] ^ x[w]);
      za += std::popcount(z[w] & e.row[w]);
    }
    if (!match) continue;
    const unsigned power = (q + xz + 2 * za) & 3;
    static const std::complex<double> ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    acc += e.amp * ipow[power];
  }
  return acc.real();
}

double trace_with_sparse_state(const SignedPauli& p, const SparseState& rho) {
  if (p.pauli.n() != rho.n()) throw DimensionError("Pauli and state sizes differ");
  if (!p.is_real()) throw std::logic_error("trace requested for a Pauli with imaginary phase");
  const double t = rho.trace_unnormalized(p.pauli.x(), p.pauli.z(), p.phase_q);
  return t * std::exp2(-0.5 * static_cast<double>(rho.n()));
}

ObservableSum ObservableSum::from_terms(std::size_t n, std::vector<Term> terms) {
  std::map<PauliString, double> merged;
  ObservableSum o(n);
  for (auto& t : terms) {
    if (t.pauli.n() != n) throw DimensionError("observable term has wrong qubit count");
    if (!std::isfinite(t.coeff)) throw ValidationError("observable coefficient is not finite");
    if (t.pauli.is_identity()) {
      o.offset_ += t.coeff;
    } else {
      merged[t.pauli] += t.coeff;
    }
  }
  for (auto& [p, c] : merged) {
    if (c != 0.0) o.terms_.push_back({c, p});
  }
  return o;
}

ObservableSum ObservableSum::parse_sparse(std::size_t n, std::string_view text) {
  // Split on '+' / '-' that start a new term.
  std::vector<std::string> pieces;
  std::string cur;
  std::string s(text);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    const bool exp_sign = i > 0 && (s[i - 1] == 'e' || s[i - 1] == 'E') && i >= 2 &&
                          std::isdigit(static_cast<unsigned char>(s[i - 2]));
    if ((c == '+' || c == '-') && !exp_sign) {
      if (!cur.empty()) pieces.push_back(cur);
      cur = (c == '-') ? "-" : "";
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) pieces.push_back(cur);
  static const std::regex op_re("^([IXYZ])([0-9]+)$");
  std::vector<Term> terms;
  for (auto& piece : pieces) {
    double coeff = 1.0;
    std::string body = piece;
    bool neg = false;
    if (!body.empty() && body[0] == '-') {
      neg = true;
      body.erase(0, 1);
    }
    if (auto star = body.find('*'); star != std::string::npos) {
      const std::string num = body.substr(0, star);
      std::size_t used = 0;
      try {
        coeff = std::stod(num, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || num.find_first_not_of(" \t", used) != std::string::npos) {
        throw ValidationError("bad observable coefficient '" + num + "'");
      }
      body = body.substr(star + 1);
      std::replace(body.begin(), body.end(), '*', ' ');
    }
    if (neg) coeff = -coeff;
    PauliString p(n);
    std::istringstream in(body);
    std::string tok;
    bool any = false;
    while (in >> tok) {
      std::smatch m;
      if (!std::regex_match(tok, m, op_re)) {
        throw ValidationError("bad observable token '" + tok + "'");
      }
      const std::size_t q = std::stoul(m[2].str());
      if (q >= n) throw DimensionError("observable qubit " + m[2].str() + " out of range");
      if (p.get(q) != kI) throw ValidationError("qubit " + m[2].str() + " repeated in a term");
      p.set(q, std::string("IXYZ").find(m[1].str()[0]));
      any = true;
    }
    if (!any && body.find_first_not_of(" \t") != std::string::npos) {
      throw ValidationError("bad observable term '" + piece + "'");
    }
    terms.push_back({coeff, p});
  }
  return from_terms(n, std::move(terms));
}

double ObservableSum::pauli_l1() const {
  double s = 0.0;
  for (const auto& t : terms_) s += std::abs(t.coeff);
  return s;
}

double ObservableSum::coeff_sq_sum() const {
  double s = 0.0;
  for (const auto& t : terms_) s += t.coeff * t.coeff;
  return s;
}

std::string ObservableSum::str() const {
  std::ostringstream out;
  out.precision(17);
  bool first = true;
  for (const auto& t : terms_) {
    if (!first) out << " + ";
    first = false;
    out << t.coeff << "*";
    bool sp = false;
    for (const auto& [q, c] : t.pauli.sparse()) {
      if (sp) out << ' ';
      out << code_char(c) << q;
      sp = true;
    }
  }
  return out.str();
}

}  // namespace obppp
