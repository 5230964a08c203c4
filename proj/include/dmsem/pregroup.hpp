#pragma once

// Minimal pregroup types over basic types such as n and s, with single
// left/right adjoints, and a grammaticality check by contraction
// (x^l x -> 1, x x^r -> 1).

#include <map>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dmsem/errors.hpp"

namespace dmsem {

enum class Adjoint : int { left = -1, none = 0, right = 1 };

struct SimpleType {
  std::string base;
  Adjoint adjoint = Adjoint::none;

  friend bool operator==(const SimpleType&, const SimpleType&) = default;
};

/// `a b` contracts to 1: same base, and b is one adjoint step to the right
/// of a (x^l x, x x^r).
inline bool contracts(const SimpleType& a, const SimpleType& b) {
  return a.base == b.base && static_cast<int>(b.adjoint) == static_cast<int>(a.adjoint) + 1;
}

inline std::string to_string(const SimpleType& t) {
  switch (t.adjoint) {
    case Adjoint::left: return t.base + "^l";
    case Adjoint::right: return t.base + "^r";
    case Adjoint::none: break;
  }
  return t.base;
}

/// A word's type: a nonempty product of simple types, e.g. n^r s n^l.
class PregroupType {
 public:
  PregroupType() = default;
  explicit PregroupType(std::vector<SimpleType> factors) : factors_(std::move(factors)) {
    if (factors_.empty()) throw DataError("pregroup type must be nonempty");
  }

  /// Parses whitespace-separated factors such as "n^r s n^l".
  static PregroupType parse(std::string_view text) {
    std::vector<SimpleType> f;
    std::istringstream ss{std::string(text)};
    for (std::string tok; ss >> tok;) {
      SimpleType t;
      if (tok.size() > 2 && tok[tok.size() - 2] == '^') {
        const char adj = tok.back();
        if (adj == 'l')
          t.adjoint = Adjoint::left;
        else if (adj == 'r')
          t.adjoint = Adjoint::right;
        else
          throw DataError("pregroup type: bad adjoint in '" + tok + "'");
        tok.resize(tok.size() - 2);
      }
      if (tok.empty() || tok.find('^') != std::string::npos) throw DataError("pregroup type: bad factor '" + tok + "'");
      t.base = tok;
      f.push_back(std::move(t));
    }
    return PregroupType(std::move(f));
  }

  const std::vector<SimpleType>& factors() const noexcept { return factors_; }

  std::string str() const {
    std::string out;
    for (const auto& t : factors_) {
      if (!out.empty()) out += ' ';
      out += to_string(t);
    }
    return out;
  }

  friend bool operator==(const PregroupType&, const PregroupType&) = default;

 private:
  std::vector<SimpleType> factors_;
};

struct Reduction {
  bool grammatical = false;
  /// [s] when grammatical; otherwise the leftmost-first residue.
  std::vector<SimpleType> residual;

  std::string residual_str() const {
    std::string out;
    for (const auto& t : residual) {
      if (!out.empty()) out += ' ';
      out += to_string(t);
    }
    return out.empty() ? "1" : out;
  }
};

/// Decides whether some sequence of contractions reduces the concatenation
/// of `types` to exactly the sentence type. A string reduces to a single
/// simple type iff its contractions form a non-crossing linkage, so an
/// interval table of "reduces to 1" answers this for every order at once.
inline Reduction pregroup_reduce(std::span<const PregroupType> types, const std::string& sentence_base = "s") {
  if (types.empty()) throw DataError("pregroup_reduce: empty type list");
  std::vector<SimpleType> x;
  for (const auto& t : types) x.insert(x.end(), t.factors().begin(), t.factors().end());
  const std::size_t n = x.size();

  // empty[i][j]: x[i..j) reduces to 1.
  std::vector<std::vector<char>> empty(n + 1, std::vector<char>(n + 1, 0));
  for (std::size_t i = 0; i <= n; ++i) empty[i][i] = 1;
  for (std::size_t len = 2; len <= n; len += 2) {
    for (std::size_t i = 0; i + len <= n; ++i) {
      const std::size_t j = i + len;
      for (std::size_t k = i + 1; k < j; k += 2) {
        if (contracts(x[i], x[k]) && empty[i + 1][k] && empty[k + 1][j]) {
          empty[i][j] = 1;
          break;
        }
      }
    }
  }

  Reduction r;
  const SimpleType s{sentence_base, Adjoint::none};
  for (std::size_t p = 0; p < n; ++p) {
    if (x[p] == s && empty[0][p] && empty[p + 1][n]) {
      r.grammatical = true;
      r.residual = {s};
      return r;
    }
  }
  for (const auto& t : x) {
    if (!r.residual.empty() && contracts(r.residual.back(), t))
      r.residual.pop_back();
    else
      r.residual.push_back(t);
  }
  return r;
}

inline Reduction pregroup_reduce(std::initializer_list<PregroupType> types) {
  return pregroup_reduce(std::span<const PregroupType>(types.begin(), types.size()));
}

/// Role -> pregroup type table. Keys: subj, obj, noun, adj, verb_sv,
/// verb_vo, verb_svo (and any extra roles a TSV adds).
class PregroupLexicon {
 public:
  PregroupLexicon() {
    set("subj", "n");
    set("obj", "n");
    set("noun", "n");
    set("adj", "n n^l");
    set("verb_sv", "n^r s");
    set("verb_vo", "s n^l");
    set("verb_svo", "n^r s n^l");
  }

  void set(const std::string& role, std::string_view type) { types_[role] = PregroupType::parse(type); }

  bool contains(const std::string& role) const { return types_.count(role) != 0; }

  const PregroupType& at(const std::string& role) const {
    auto it = types_.find(role);
    if (it == types_.end()) throw DataError("pregroup lexicon: no type for role '" + role + "'");
    return it->second;
  }

  /// `role<TAB>type` lines override the defaults.
  static PregroupLexicon from_tsv(std::string_view text, const std::string& where = "lexicon") {
    PregroupLexicon lex;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
      std::size_t nl = text.find('\n', pos);
      if (nl == std::string_view::npos) nl = text.size();
      std::string_view line = text.substr(pos, nl - pos);
      pos = nl + 1;
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (line.empty() || line.front() == '#') continue;
      const auto tab = line.find('\t');
      if (tab == std::string_view::npos)
        throw DataError(where + ":" + std::to_string(line_no) + ": expected role<TAB>type");
      lex.set(std::string(line.substr(0, tab)), line.substr(tab + 1));
    }
    return lex;
  }

 private:
  std::map<std::string, PregroupType> types_;
};

}  // namespace dmsem
