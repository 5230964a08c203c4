#pragma once

// Metaphor paraphrase evaluation: triple datasets, model scoring,
// Spearman correlation with human ratings, paraphrase accuracy against the
// verb-only baseline, and entropy change under composition.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dmsem/compose.hpp"
#include "dmsem/io.hpp"
#include "dmsem/psd_linalg.hpp"
#include "dmsem/store.hpp"
#include "dmsem/trainers.hpp"

namespace dmsem {

struct Triple {
  std::string id;
  Form form = Form::short_form;
  double human_apt = 0.0;
  double human_inapt = 0.0;
  Fragment target;
  Fragment apt;
  Fragment inapt;
};

// ---------------------------------------------------------------------------
// Dataset I/O (JSONL, one triple per line)

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& j, const char* field, const std::string& ctx) {
  if (!j.is_object() || !j.contains(field)) throw DataError(ctx + ": missing field '" + field + "'");
  return j.at(field);
}

inline std::string require_string(const nlohmann::json& j, const char* field, const std::string& ctx) {
  const auto& v = require(j, field, ctx);
  if (!v.is_string()) throw DataError(ctx + ": field '" + field + "' must be a string");
  return v.get<std::string>();
}

inline double require_rating(const nlohmann::json& j, const char* field, const std::string& ctx) {
  const auto& v = require(j, field, ctx);
  if (!v.is_number()) throw DataError(ctx + ": field '" + field + "' must be a number");
  const double x = v.get<double>();
  if (!(x >= 0.0 && x <= 7.0)) throw DataError(ctx + ": rating '" + field + "' must lie in [0, 7]");
  return x;
}

inline Fragment parse_fragment(const nlohmann::json& j, Form form, const std::string& ctx) {
  const auto& toks = require(j, "tokens", ctx);
  if (!toks.is_array() || toks.empty()) throw DataError(ctx + ": field 'tokens' must be a nonempty array");
  Fragment f;
  f.form = form;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const std::string tctx = ctx + ".tokens[" + std::to_string(i) + "]";
    Token t;
    t.surface = require_string(toks[i], "surface", tctx);
    t.lemma = require_string(toks[i], "lemma", tctx);
    const auto role = require_string(toks[i], "role", tctx);
    const auto r = role_from_string(role);
    if (!r) throw DataError(tctx + ": unknown role '" + role + "'");
    t.role = *r;
    f.tokens.push_back(std::move(t));
  }
  try {
    f.validate();
  } catch (const DataError& e) {
    throw DataError(ctx + ": " + e.what());
  }
  return f;
}

inline nlohmann::ordered_json fragment_json(const Fragment& f) {
  nlohmann::ordered_json toks = nlohmann::ordered_json::array();
  for (const auto& t : f.tokens) {
    nlohmann::ordered_json tj;
    tj["surface"] = t.surface;
    tj["lemma"] = t.lemma;
    tj["role"] = to_string(t.role);
    toks.push_back(std::move(tj));
  }
  nlohmann::ordered_json out;
  out["tokens"] = std::move(toks);
  return out;
}

}  // namespace detail

inline Triple parse_triple(std::string_view line, const std::string& ctx) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(ctx + ": invalid JSON: " + e.what());
  }
  Triple t;
  t.id = detail::require_string(j, "id", ctx);
  const auto form = detail::require_string(j, "form", ctx);
  const auto f = form_from_string(form);
  if (!f) throw DataError(ctx + ": field 'form' must be \"short\" or \"long\"");
  t.form = *f;
  const auto& human = detail::require(j, "human", ctx);
  t.human_apt = detail::require_rating(human, "apt", ctx + ".human");
  t.human_inapt = detail::require_rating(human, "inapt", ctx + ".human");
  t.target = detail::parse_fragment(detail::require(j, "target", ctx), t.form, ctx + ".target");
  t.apt = detail::parse_fragment(detail::require(j, "apt", ctx), t.form, ctx + ".apt");
  t.inapt = detail::parse_fragment(detail::require(j, "inapt", ctx), t.form, ctx + ".inapt");
  if (t.target.pattern() != t.apt.pattern() || t.target.pattern() != t.inapt.pattern())
    throw DataError(ctx + ": target, apt and inapt fragments have different patterns (" + t.target.pattern() + ", " +
                    t.apt.pattern() + ", " + t.inapt.pattern() + ")");
  return t;
}

/// Validated triples, stably sorted by id.
inline std::vector<Triple> parse_triples(std::string_view text, const std::string& where = "dataset") {
  std::vector<Triple> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    out.push_back(parse_triple(line, where + ":" + std::to_string(line_no)));
  }
  std::stable_sort(out.begin(), out.end(), [](const Triple& a, const Triple& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i].id == out[i - 1].id) throw DataError(where + ": duplicate triple id '" + out[i].id + "'");
  return out;
}

inline std::vector<Triple> load_triples(const io::fs::path& path) {
  return parse_triples(io::read_file(path), path.string());
}

/// Canonical single-line JSON; inverse of parse_triple for canonical input.
inline std::string serialize_triple(const Triple& t) {
  nlohmann::ordered_json j;
  j["id"] = t.id;
  j["form"] = to_string(t.form);
  j["human"]["apt"] = t.human_apt;
  j["human"]["inapt"] = t.human_inapt;
  j["target"] = detail::fragment_json(t.target);
  j["apt"] = detail::fragment_json(t.apt);
  j["inapt"] = detail::fragment_json(t.inapt);
  return j.dump();
}

// ---------------------------------------------------------------------------
// Scoring

struct TripleScore {
  std::string id;
  double sim_apt = 0.0;
  double sim_inapt = 0.0;
  double human_apt = 0.0;
  double human_inapt = 0.0;

  bool correct() const { return sim_apt > sim_inapt; }
};

struct Exclusion {
  std::string id;
  std::string reason;

  friend bool operator==(const Exclusion&, const Exclusion&) = default;
};

struct ScoreSet {
  std::vector<TripleScore> scores;
  std::vector<Exclusion> excluded;
};

namespace detail {

/// Lemmas any of the three fragments needs but the model lacks. Checked
/// over the included roles regardless of method, so every method (and the
/// verb-only baseline) sees the same triples.
template <class Has>
std::vector<std::string> triple_oov(const Triple& t, const ComposeConfig& cfg, Has&& has) {
  ComposeConfig all = cfg;
  all.method = ComposeMethod::add;
  std::set<std::string> missing;
  for (const Fragment* f : {&t.target, &t.apt, &t.inapt})
    for (auto& l : missing_lemmas(*f, all, has)) missing.insert(std::move(l));
  return {missing.begin(), missing.end()};
}

inline std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += sep;
    out += p;
  }
  return out;
}

template <class Model, class Sim>
ScoreSet score_generic(std::span<const Triple> triples, const Model& model, const ComposeConfig& cfg, Sim&& sim) {
  ScoreSet out;
  for (const auto& t : triples) {
    const auto missing = triple_oov(t, cfg, [&](const std::string& l) { return model.contains(l); });
    if (!missing.empty()) {
      out.excluded.push_back({t.id, "oov:" + join(missing, ",")});
      continue;
    }
    const char* which = "target";
    try {
      const auto target = compose_fragment(t.target, model, cfg);
      which = "apt";
      const auto apt = compose_fragment(t.apt, model, cfg);
      which = "inapt";
      const auto inapt = compose_fragment(t.inapt, model, cfg);
      out.scores.push_back({t.id, sim(target, apt), sim(target, inapt), t.human_apt, t.human_inapt});
    } catch (const DegenerateComposition&) {
      out.excluded.push_back({t.id, std::string("degenerate:") + which});
    }
  }
  return out;
}

}  // namespace detail

/// Composes target, apt and inapt per triple and scores both paraphrases.
/// Triples with out-of-vocabulary lemmas or a vanishing composition are
/// excluded with a reason instead of failing.
inline ScoreSet score_model(std::span<const Triple> triples, const DensityStore& store, const ComposeConfig& cfg,
                            SimMode mode = SimMode::trace) {
  return detail::score_generic(triples, store, cfg, [mode](const DensityMatrix& a, const DensityMatrix& b) {
    return similarity(a, b, mode);
  });
}

/// Vector baseline scored by cosine similarity.
inline ScoreSet score_model(std::span<const Triple> triples, const WordVectors& vectors, const ComposeConfig& cfg) {
  return detail::score_generic(triples, vectors, cfg, [](const Vector& a, const Vector& b) { return cosine(a, b); });
}

/// Average ranks (1-based), ties share the mean rank.
inline std::vector<double> average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

/// Pearson correlation of average ranks; nullopt when either side is
/// constant.
inline std::optional<double> spearman_rho(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw DataError("spearman_rho: length mismatch");
  if (xs.size() < 2) throw DataError("spearman_rho: need at least two pairs");
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

struct RhoSummary {
  std::optional<double> pooled;  // over all apt and inapt pairs
  std::optional<double> apt;
  std::optional<double> inapt;
};

inline RhoSummary rho_against_humans(std::span<const TripleScore> scores) {
  RhoSummary out;
  std::vector<double> model_apt, model_inapt, human_apt, human_inapt;
  for (const auto& s : scores) {
    model_apt.push_back(s.sim_apt);
    model_inapt.push_back(s.sim_inapt);
    human_apt.push_back(s.human_apt);
    human_inapt.push_back(s.human_inapt);
  }
  if (scores.size() >= 1) {
    std::vector<double> mx = model_apt, hx = human_apt;
    mx.insert(mx.end(), model_inapt.begin(), model_inapt.end());
    hx.insert(hx.end(), human_inapt.begin(), human_inapt.end());
    out.pooled = spearman_rho(mx, hx);
  }
  if (scores.size() >= 2) {
    out.apt = spearman_rho(model_apt, human_apt);
    out.inapt = spearman_rho(model_inapt, human_inapt);
  }
  return out;
}

/// Triple counts by (verb-only correct?, composed correct?).
struct ChangeMatrix {
  std::int64_t both_correct = 0;           // stays correct
  std::int64_t verb_only_correct = 0;      // correct with the verb, undone by composition
  std::int64_t both_incorrect = 0;         // stays incorrect
  std::int64_t composed_only_correct = 0;  // fixed by composition

  std::int64_t total() const { return both_correct + verb_only_correct + both_incorrect + composed_only_correct; }
  std::array<std::int64_t, 4> as_array() const {
    return {both_correct, verb_only_correct, both_incorrect, composed_only_correct};
  }
  friend bool operator==(const ChangeMatrix&, const ChangeMatrix&) = default;
};

struct AccuracyResult {
  double accuracy = 0.0;       // composed
  double verb_accuracy = 0.0;  // verb-only baseline
  ChangeMatrix change;
  std::size_t n = 0;
};

/// Fraction of triples with sim_apt > sim_inapt (ties are incorrect), over
/// triples scored by both the composed model and the verb-only baseline.
inline AccuracyResult paraphrase_accuracy(std::span<const TripleScore> composed, std::span<const TripleScore> verb_only) {
  std::map<std::string, bool> verb_correct;
  for (const auto& s : verb_only) verb_correct[s.id] = s.correct();
  AccuracyResult out;
  for (const auto& s : composed) {
    auto it = verb_correct.find(s.id);
    if (it == verb_correct.end()) continue;
    const bool v = it->second;
    const bool c = s.correct();
    if (v && c)
      ++out.change.both_correct;
    else if (v)
      ++out.change.verb_only_correct;
    else if (c)
      ++out.change.composed_only_correct;
    else
      ++out.change.both_incorrect;
  }
  out.n = static_cast<std::size_t>(out.change.total());
  if (out.n == 0) throw DataError("paraphrase_accuracy: no scored triples");
  const double n = static_cast<double>(out.n);
  out.accuracy = static_cast<double>(out.change.both_correct + out.change.composed_only_correct) / n;
  out.verb_accuracy = static_cast<double>(out.change.both_correct + out.change.verb_only_correct) / n;
  return out;
}

// ---------------------------------------------------------------------------
// Entropy

struct EntropyRow {
  std::string method;
  std::size_t n_sentences = 0;
  double mean_entropy_verb = 0.0;
  double mean_entropy_composed = 0.0;
  /// composed / verb; 1 when both are zero, nullopt when only the verb is.
  std::optional<double> ratio;
  std::vector<Exclusion> excluded;
};

inline std::optional<double> entropy_ratio(double composed, double verb) {
  if (verb > 0.0) return composed / verb;
  if (composed == 0.0) return 1.0;
  return std::nullopt;
}

/// Mean von Neumann entropy of the verb matrices vs the composed sentence
/// matrices over the target, apt and inapt sentences of usable triples.
inline EntropyRow entropy_report(std::span<const Triple> triples, const DensityStore& store, const ComposeConfig& cfg) {
  EntropyRow row;
  row.method = cfg.label();
  double sum_verb = 0.0, sum_comp = 0.0;
  for (const auto& t : triples) {
    const auto missing = detail::triple_oov(t, cfg, [&](const std::string& l) { return store.contains(l); });
    if (!missing.empty()) {
      row.excluded.push_back({t.id, "oov:" + detail::join(missing, ",")});
      continue;
    }
    try {
      double v = 0.0, c = 0.0;
      for (const Fragment* f : {&t.target, &t.apt, &t.inapt}) {
        v += von_neumann_entropy(store.at(f->verb().lemma));
        c += von_neumann_entropy(compose_fragment(*f, store, cfg));
      }
      sum_verb += v;
      sum_comp += c;
      row.n_sentences += 3;
    } catch (const DegenerateComposition&) {
      row.excluded.push_back({t.id, "degenerate"});
    }
  }
  if (row.n_sentences > 0) {
    row.mean_entropy_verb = sum_verb / static_cast<double>(row.n_sentences);
    row.mean_entropy_composed = sum_comp / static_cast<double>(row.n_sentences);
  }
  row.ratio = entropy_ratio(row.mean_entropy_composed, row.mean_entropy_verb);
  return row;
}

inline std::vector<ComposeConfig> all_compose_configs() {
  return {{ComposeMethod::verb_only, OperatorSide::verb, false}, {ComposeMethod::add, OperatorSide::verb, false},
          {ComposeMethod::mult, OperatorSide::verb, false},      {ComposeMethod::fuzz, OperatorSide::verb, false},
          {ComposeMethod::fuzz, OperatorSide::noun, false},      {ComposeMethod::phaser, OperatorSide::verb, false},
          {ComposeMethod::phaser, OperatorSide::noun, false}};
}

// ---------------------------------------------------------------------------
// Reports

struct EvalReport {
  std::string model_id;
  std::string method;
  std::string sim;
  std::string form;
  std::size_t n_pairs_used = 0;
  std::size_t n_pairs_total = 0;
  RhoSummary rho;
  std::optional<double> accuracy;
  std::optional<double> verb_accuracy;
  std::optional<double> mean_entropy_verb;
  std::optional<double> mean_entropy_composed;
  std::optional<double> entropy_ratio;
  std::optional<ChangeMatrix> change;
  std::vector<Exclusion> excluded;
  std::vector<TripleScore> scores;
};

namespace detail {

inline std::vector<Triple> of_form(std::span<const Triple> triples, Form f) {
  std::vector<Triple> out;
  for (const auto& t : triples)
    if (t.form == f) out.push_back(t);
  return out;
}

inline void fill_scores(EvalReport& r, const ScoreSet& composed, std::size_t n_triples) {
  r.n_pairs_total = 2 * n_triples;
  r.n_pairs_used = 2 * composed.scores.size();
  r.excluded = composed.excluded;
  r.scores = composed.scores;
  if (!composed.scores.empty()) r.rho = rho_against_humans(composed.scores);
}

}  // namespace detail

/// One report per dataset form present (short first).
inline std::vector<EvalReport> evaluate(std::span<const Triple> triples, const DensityStore& store,
                                        const ComposeConfig& cfg, SimMode mode, const std::string& model_id) {
  std::vector<EvalReport> out;
  for (Form form : {Form::short_form, Form::long_form}) {
    const auto subset = detail::of_form(triples, form);
    if (subset.empty()) continue;
    EvalReport r;
    r.model_id = model_id;
    r.method = cfg.label();
    r.sim = to_string(mode);
    r.form = to_string(form);
    const ScoreSet composed = score_model(subset, store, cfg, mode);
    detail::fill_scores(r, composed, subset.size());
    if (!composed.scores.empty()) {
      ComposeConfig verb_cfg = cfg;
      verb_cfg.method = ComposeMethod::verb_only;
      const ScoreSet verb = score_model(subset, store, verb_cfg, mode);
      const auto acc = paraphrase_accuracy(composed.scores, verb.scores);
      r.accuracy = acc.accuracy;
      r.verb_accuracy = acc.verb_accuracy;
      r.change = acc.change;
      const EntropyRow ent = entropy_report(subset, store, cfg);
      r.mean_entropy_verb = ent.mean_entropy_verb;
      r.mean_entropy_composed = ent.mean_entropy_composed;
      r.entropy_ratio = ent.ratio;
    }
    out.push_back(std::move(r));
  }
  return out;
}

/// Vector-baseline evaluation (cosine similarity; no entropies).
inline std::vector<EvalReport> evaluate(std::span<const Triple> triples, const WordVectors& vectors,
                                        const ComposeConfig& cfg, const std::string& model_id) {
  std::vector<EvalReport> out;
  for (Form form : {Form::short_form, Form::long_form}) {
    const auto subset = detail::of_form(triples, form);
    if (subset.empty()) continue;
    EvalReport r;
    r.model_id = model_id;
    r.method = cfg.label();
    r.sim = "cosine";
    r.form = to_string(form);
    const ScoreSet composed = score_model(subset, vectors, cfg);
    detail::fill_scores(r, composed, subset.size());
    if (!composed.scores.empty()) {
      ComposeConfig verb_cfg = cfg;
      verb_cfg.method = ComposeMethod::verb_only;
      const auto acc = paraphrase_accuracy(composed.scores, score_model(subset, vectors, verb_cfg).scores);
      r.accuracy = acc.accuracy;
      r.verb_accuracy = acc.verb_accuracy;
      r.change = acc.change;
    }
    out.push_back(std::move(r));
  }
  return out;
}

/// Precomputed sentence similarities, CSV `id,sim_apt,sim_inapt` with an
/// optional header line.
inline std::map<std::string, std::pair<double, double>> parse_score_csv(std::string_view text,
                                                                        const std::string& where = "scores") {
  std::map<std::string, std::pair<double, double>> out;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string line(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    const std::string ctx = where + ":" + std::to_string(line_no);
    if (c2 == std::string::npos) throw DataError(ctx + ": expected id,sim_apt,sim_inapt");
    if (line_no == 1 && line.substr(0, c1) == "id") continue;
    out[line.substr(0, c1)] = {io::parse_double(line.substr(c1 + 1, c2 - c1 - 1), ctx),
                               io::parse_double(line.substr(c2 + 1), ctx)};
  }
  return out;
}

inline std::vector<EvalReport> evaluate_precomputed(std::span<const Triple> triples,
                                                    const std::map<std::string, std::pair<double, double>>& sims,
                                                    const std::string& model_id) {
  std::vector<EvalReport> out;
  for (Form form : {Form::short_form, Form::long_form}) {
    const auto subset = detail::of_form(triples, form);
    if (subset.empty()) continue;
    EvalReport r;
    r.model_id = model_id;
    r.method = "precomputed";
    r.sim = "precomputed";
    r.form = to_string(form);
    ScoreSet set;
    for (const auto& t : subset) {
      auto it = sims.find(t.id);
      if (it == sims.end())
        set.excluded.push_back({t.id, "missing_score"});
      else
        set.scores.push_back({t.id, it->second.first, it->second.second, t.human_apt, t.human_inapt});
    }
    detail::fill_scores(r, set, subset.size());
    if (!set.scores.empty()) {
      std::int64_t correct = 0;
      for (const auto& s : set.scores) correct += s.correct() ? 1 : 0;
      r.accuracy = static_cast<double>(correct) / static_cast<double>(set.scores.size());
    }
    out.push_back(std::move(r));
  }
  return out;
}

namespace detail {

template <class T>
nlohmann::ordered_json opt_json(const std::optional<T>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

inline std::string opt_csv(const std::optional<double>& v) { return v ? io::format_double(*v) : ""; }

}  // namespace detail

inline nlohmann::ordered_json to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["model"] = r.model_id;
  j["method"] = r.method;
  j["sim"] = r.sim;
  j["form"] = r.form;
  j["n_pairs_used"] = r.n_pairs_used;
  j["n_pairs_total"] = r.n_pairs_total;
  j["n_excluded"] = r.excluded.size();
  j["rho"] = detail::opt_json(r.rho.pooled);
  j["rho_apt"] = detail::opt_json(r.rho.apt);
  j["rho_inapt"] = detail::opt_json(r.rho.inapt);
  j["accuracy"] = detail::opt_json(r.accuracy);
  j["verb_accuracy"] = detail::opt_json(r.verb_accuracy);
  j["mean_entropy_verb"] = detail::opt_json(r.mean_entropy_verb);
  j["mean_entropy_composed"] = detail::opt_json(r.mean_entropy_composed);
  j["entropy_ratio"] = detail::opt_json(r.entropy_ratio);
  if (r.change) {
    nlohmann::ordered_json c;
    c["both_correct"] = r.change->both_correct;
    c["verb_only_correct"] = r.change->verb_only_correct;
    c["both_incorrect"] = r.change->both_incorrect;
    c["composed_only_correct"] = r.change->composed_only_correct;
    j["change_matrix"] = std::move(c);
  } else {
    j["change_matrix"] = nullptr;
  }
  nlohmann::ordered_json ex = nlohmann::ordered_json::array();
  for (const auto& e : r.excluded) ex.push_back({{"id", e.id}, {"reason", e.reason}});
  j["excluded"] = std::move(ex);
  nlohmann::ordered_json sc = nlohmann::ordered_json::array();
  for (const auto& s : r.scores)
    sc.push_back({{"id", s.id}, {"sim_apt", s.sim_apt}, {"sim_inapt", s.sim_inapt}, {"human_apt", s.human_apt},
                  {"human_inapt", s.human_inapt}});
  j["scores"] = std::move(sc);
  return j;
}

inline std::string reports_to_json(std::span<const EvalReport> reports) {
  nlohmann::ordered_json j;
  j["reports"] = nlohmann::ordered_json::array();
  for (const auto& r : reports) j["reports"].push_back(to_json(r));
  return j.dump(2) + "\n";
}

inline std::string reports_to_csv(std::span<const EvalReport> reports) {
  std::string out = "model,method,form,n_used,rho,accuracy,entropy_verb,entropy_composed\n";
  for (const auto& r : reports) {
    out += r.model_id + "," + r.method + "," + r.form + "," + std::to_string(r.n_pairs_used) + "," +
           detail::opt_csv(r.rho.pooled) + "," + detail::opt_csv(r.accuracy) + "," +
           detail::opt_csv(r.mean_entropy_verb) + "," + detail::opt_csv(r.mean_entropy_composed) + "\n";
  }
  return out;
}

}  // namespace dmsem
