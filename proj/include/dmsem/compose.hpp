#pragma once

// Composition of word density matrices into phrase and sentence meanings.
//
//   add     A + B
//   mult    A (.) B                      (entrywise)
//   fuzz    sum_g l_g P_g B P_g          (spectral projectors of A)
//   phaser  A^{1/2} B A^{1/2}
//
// with A the operator and B the argument; every result is renormalized to
// unit trace. Fragments compose as (subj (verb (adj obj))).

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "dmsem/errors.hpp"
#include "dmsem/pregroup.hpp"
#include "dmsem/psd_linalg.hpp"
#include "dmsem/store.hpp"
#include "dmsem/trainers.hpp"

namespace dmsem {

enum class Role { subj, verb, obj, adj, function };
enum class Form { short_form, long_form };

inline const char* to_string(Role r) {
  switch (r) {
    case Role::subj: return "subj";
    case Role::verb: return "verb";
    case Role::obj: return "obj";
    case Role::adj: return "adj";
    case Role::function: return "function";
  }
  return "?";
}

inline std::optional<Role> role_from_string(const std::string& s) {
  if (s == "subj") return Role::subj;
  if (s == "verb") return Role::verb;
  if (s == "obj") return Role::obj;
  if (s == "adj") return Role::adj;
  if (s == "function") return Role::function;
  return std::nullopt;
}

inline const char* to_string(Form f) { return f == Form::short_form ? "short" : "long"; }

inline std::optional<Form> form_from_string(const std::string& s) {
  if (s == "short") return Form::short_form;
  if (s == "long") return Form::long_form;
  return std::nullopt;
}

struct Token {
  std::string surface;
  std::string lemma;
  Role role = Role::function;

  friend bool operator==(const Token&, const Token&) = default;
};

inline bool is_noun(Role r) { return r == Role::subj || r == Role::obj; }

struct Fragment {
  std::vector<Token> tokens;
  Form form = Form::short_form;

  /// Exactly one verb and at least one subject or object.
  void validate() const {
    const auto verbs = std::count_if(tokens.begin(), tokens.end(), [](const Token& t) { return t.role == Role::verb; });
    if (verbs != 1) throw DataError("fragment must contain exactly one verb, found " + std::to_string(verbs));
    if (std::none_of(tokens.begin(), tokens.end(), [](const Token& t) { return is_noun(t.role); }))
      throw DataError("fragment needs a subject or an object");
    for (const auto& t : tokens)
      if (t.lemma.empty()) throw DataError("fragment token with empty lemma");
  }

  bool has(Role r) const {
    return std::any_of(tokens.begin(), tokens.end(), [r](const Token& t) { return t.role == r; });
  }

  /// "SV", "VO" or "SVO".
  std::string pattern() const {
    std::string p;
    if (has(Role::subj)) p += 'S';
    p += 'V';
    if (has(Role::obj)) p += 'O';
    return p;
  }

  const Token& verb() const {
    for (const auto& t : tokens)
      if (t.role == Role::verb) return t;
    throw DataError("fragment has no verb");
  }

  std::string text() const {
    std::string out;
    for (const auto& t : tokens) {
      if (!out.empty()) out += ' ';
      out += t.surface;
    }
    return out;
  }
};

/// Pregroup check over the content words; function words carry no type.
inline Reduction check_grammar(const Fragment& f, const PregroupLexicon& lex = {}) {
  std::vector<PregroupType> types;
  const std::string pattern = f.pattern();
  std::string verb_key = "verb_";
  for (char c : pattern) verb_key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (const auto& t : f.tokens) {
    switch (t.role) {
      case Role::subj: types.push_back(lex.at("subj")); break;
      case Role::obj: types.push_back(lex.at("obj")); break;
      case Role::adj: types.push_back(lex.at("adj")); break;
      case Role::verb: types.push_back(lex.at(verb_key)); break;
      case Role::function: break;
    }
  }
  return pregroup_reduce(types);
}

enum class ComposeMethod { verb_only, add, mult, fuzz, phaser };
enum class OperatorSide { verb, noun };

inline const char* to_string(ComposeMethod m) {
  switch (m) {
    case ComposeMethod::verb_only: return "verb_only";
    case ComposeMethod::add: return "add";
    case ComposeMethod::mult: return "mult";
    case ComposeMethod::fuzz: return "fuzz";
    case ComposeMethod::phaser: return "phaser";
  }
  return "?";
}
inline const char* to_string(OperatorSide s) { return s == OperatorSide::verb ? "verb" : "noun"; }

inline ComposeMethod compose_method_from_string(const std::string& s) {
  if (s == "verb_only" || s == "verb") return ComposeMethod::verb_only;
  if (s == "add") return ComposeMethod::add;
  if (s == "mult") return ComposeMethod::mult;
  if (s == "fuzz") return ComposeMethod::fuzz;
  if (s == "phaser") return ComposeMethod::phaser;
  throw UsageError("unknown composition method '" + s + "' (expected verb_only, add, mult, fuzz or phaser)");
}
inline OperatorSide operator_side_from_string(const std::string& s) {
  if (s == "verb") return OperatorSide::verb;
  if (s == "noun") return OperatorSide::noun;
  throw UsageError("unknown operator side '" + s + "' (expected verb or noun)");
}

inline bool uses_operator_side(ComposeMethod m) { return m == ComposeMethod::fuzz || m == ComposeMethod::phaser; }

struct ComposeConfig {
  ComposeMethod method = ComposeMethod::verb_only;
  OperatorSide operator_side = OperatorSide::verb;
  bool include_function_words = false;

  /// e.g. "mult", "fuzz_noun".
  std::string label() const {
    std::string l = to_string(method);
    if (uses_operator_side(method)) l += std::string("_") + to_string(operator_side);
    return l;
  }

  bool includes(Role r) const { return r != Role::function || include_function_words; }
};

/// Trace below which a composition is treated as having vanished.
inline constexpr double kDegenerateTrace = 1e-12;

namespace detail {

inline DensityMatrix renormalized(const Matrix& m, const char* what) {
  const double tr = m.trace();
  if (!(tr >= kDegenerateTrace))
    throw DegenerateComposition(std::string(what) + ": composed trace " + std::to_string(tr) +
                                " vanishes (operator and argument have disjoint support)");
  return DensityMatrix(detail::symmetrized(m) / tr);
}

}  // namespace detail

/// Binary composition with `op` acting on `arg`.
inline DensityMatrix compose_pair(const DensityMatrix& op, const DensityMatrix& arg, ComposeMethod method) {
  if (op.dim() != arg.dim()) throw DataError("compose_pair: dimension mismatch");
  switch (method) {
    case ComposeMethod::verb_only: return op;
    case ComposeMethod::add: return detail::renormalized(op.data() + arg.data(), "add");
    case ComposeMethod::mult: return detail::renormalized(op.data().cwiseProduct(arg.data()), "mult");
    case ComposeMethod::fuzz: {
      const EigenSystem es = eigendecompose(op);
      Matrix out = Matrix::Zero(op.dim(), op.dim());
      for (const auto& g : es.spaces) {
        if (g.value <= 0.0) continue;
        const Matrix p = g.projector();
        out.noalias() += g.value * (p * arg.data() * p);
      }
      return detail::renormalized(out, "fuzz");
    }
    case ComposeMethod::phaser: {
      const Matrix root = psd_sqrt(op);
      return detail::renormalized(root * arg.data() * root, "phaser");
    }
  }
  throw UsageError("compose_pair: unknown method");
}

/// n-ary add or mult with a single renormalization.
inline DensityMatrix compose_all(std::span<const DensityMatrix* const> parts, ComposeMethod method) {
  if (parts.empty()) throw DataError("compose: nothing to compose");
  if (method != ComposeMethod::add && method != ComposeMethod::mult)
    throw UsageError("compose_all: only add and mult are n-ary");
  Matrix acc = parts[0]->data();
  for (std::size_t i = 1; i < parts.size(); ++i) {
    if (parts[i]->dim() != parts[0]->dim()) throw DataError("compose: dimension mismatch");
    if (method == ComposeMethod::add)
      acc += parts[i]->data();
    else
      acc = acc.cwiseProduct(parts[i]->data());
  }
  return detail::renormalized(acc, to_string(method));
}

/// Lemmas of `f` that composition under `cfg` needs but `has` lacks, in
/// token order without repeats.
template <class Has>
std::vector<std::string> missing_lemmas(const Fragment& f, const ComposeConfig& cfg, Has&& has) {
  std::vector<std::string> out;
  for (const auto& t : f.tokens) {
    if (!cfg.includes(t.role) || has(t.lemma)) continue;
    if (std::find(out.begin(), out.end(), t.lemma) == out.end()) out.push_back(t.lemma);
  }
  return out;
}

/// Nesting plan for operator-style composition. Each modifier (adjective,
/// or included function word) attaches to the nearest following noun, else
/// the nearest preceding one; nearer modifiers apply first.
struct ParsePlan {
  struct NounPhrase {
    std::size_t head;                    // token index
    std::vector<std::size_t> modifiers;  // application order
  };
  std::size_t verb = 0;
  std::vector<NounPhrase> objects;   // token order
  std::vector<NounPhrase> subjects;  // nearest to the verb first
};

inline ParsePlan plan_fragment(const Fragment& f, const ComposeConfig& cfg) {
  f.validate();
  ParsePlan plan;
  std::vector<std::size_t> nouns;
  for (std::size_t i = 0; i < f.tokens.size(); ++i) {
    if (f.tokens[i].role == Role::verb) plan.verb = i;
    if (is_noun(f.tokens[i].role)) nouns.push_back(i);
  }
  std::map<std::size_t, std::vector<std::size_t>> mods;
  for (std::size_t i = 0; i < f.tokens.size(); ++i) {
    const Role r = f.tokens[i].role;
    if (r != Role::adj && !(r == Role::function && cfg.include_function_words)) continue;
    auto next = std::find_if(nouns.begin(), nouns.end(), [i](std::size_t n) { return n > i; });
    const std::size_t head = next != nouns.end() ? *next : nouns.back();
    mods[head].push_back(i);
  }
  auto phrase = [&](std::size_t head) {
    ParsePlan::NounPhrase np{head, mods[head]};
    std::stable_sort(np.modifiers.begin(), np.modifiers.end(), [head](std::size_t a, std::size_t b) {
      const auto da = a > head ? a - head : head - a;
      const auto db = b > head ? b - head : head - b;
      return da < db;
    });
    return np;
  };
  for (std::size_t n : nouns) {
    if (f.tokens[n].role == Role::obj)
      plan.objects.push_back(phrase(n));
    else
      plan.subjects.push_back(phrase(n));
  }
  std::stable_sort(plan.subjects.begin(), plan.subjects.end(), [&](const auto& a, const auto& b) {
    const auto da = a.head > plan.verb ? a.head - plan.verb : plan.verb - a.head;
    const auto db = b.head > plan.verb ? b.head - plan.verb : plan.verb - b.head;
    return da < db;
  });
  return plan;
}

/// Composes a fragment from the word matrices in `store`.
///
/// verb_only returns the verb's matrix; add/mult combine every included
/// word at once; fuzz/phaser nest as (subj (verb (adj obj))), with the
/// verb-containing side as operator for OperatorSide::verb and the noun
/// phrase as operator for OperatorSide::noun. Adjectives always act on
/// their noun.
inline DensityMatrix compose_fragment(const Fragment& f, const DensityStore& store, const ComposeConfig& cfg) {
  f.validate();
  if (cfg.method == ComposeMethod::verb_only) return store.at(f.verb().lemma);
  if (auto missing = missing_lemmas(f, cfg, [&](const std::string& l) { return store.contains(l); }); !missing.empty())
    throw OovError(std::move(missing));

  if (cfg.method == ComposeMethod::add || cfg.method == ComposeMethod::mult) {
    std::vector<const DensityMatrix*> parts;
    for (const auto& t : f.tokens)
      if (cfg.includes(t.role)) parts.push_back(store.find(t.lemma));
    return compose_all(parts, cfg.method);
  }

  const ParsePlan plan = plan_fragment(f, cfg);
  auto word = [&](std::size_t i) -> const DensityMatrix& { return store.at(f.tokens[i].lemma); };
  auto noun_phrase = [&](const ParsePlan::NounPhrase& np) {
    DensityMatrix m = word(np.head);
    for (std::size_t mod : np.modifiers) m = compose_pair(word(mod), m, cfg.method);
    return m;
  };
  auto attach = [&](const DensityMatrix& verbal, const DensityMatrix& nominal) {
    return cfg.operator_side == OperatorSide::verb ? compose_pair(verbal, nominal, cfg.method)
                                                   : compose_pair(nominal, verbal, cfg.method);
  };

  DensityMatrix out = word(plan.verb);
  for (const auto& np : plan.objects) out = attach(out, noun_phrase(np));
  for (const auto& np : plan.subjects) out = attach(out, noun_phrase(np));
  return out;
}

// ---------------------------------------------------------------------------
// Vector baselines: verb only, sum, or entrywise product of word vectors.

inline Vector compose_fragment(const Fragment& f, const WordVectors& vectors, const ComposeConfig& cfg) {
  f.validate();
  if (uses_operator_side(cfg.method))
    throw UsageError(std::string("vector models support verb_only, add and mult, not ") + to_string(cfg.method));
  auto lookup = [&](const std::string& lemma) {
    auto v = vectors.find(lemma);
    if (!v) throw OovError({lemma});
    return *v;
  };
  if (cfg.method == ComposeMethod::verb_only) return lookup(f.verb().lemma);
  if (auto missing = missing_lemmas(f, cfg, [&](const std::string& l) { return vectors.contains(l); }); !missing.empty())
    throw OovError(std::move(missing));
  std::optional<Vector> acc;
  for (const auto& t : f.tokens) {
    if (!cfg.includes(t.role)) continue;
    Vector v = lookup(t.lemma);
    if (!acc)
      acc = std::move(v);
    else if (cfg.method == ComposeMethod::add)
      *acc += v;
    else
      *acc = acc->cwiseProduct(v);
  }
  return *acc;
}

inline double cosine(const Vector& a, const Vector& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

}  // namespace dmsem
