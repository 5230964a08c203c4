#pragma once

// Command-line front end: argument parsing into a RunPlan and execution of
// the vocab / train / context2dm / contextual2dm / compose / eval /
// entropy / inspect pipelines.

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dmsem/compose.hpp"
#include "dmsem/corpus.hpp"
#include "dmsem/errors.hpp"
#include "dmsem/eval.hpp"
#include "dmsem/io.hpp"
#include "dmsem/pregroup.hpp"
#include "dmsem/sense_induction.hpp"
#include "dmsem/store.hpp"
#include "dmsem/trainers.hpp"

namespace dmsem::cli {

namespace fs = std::filesystem;

struct RunPlan {
  std::string command;
  std::string help;  // non-empty when --help was requested

  std::string corpus;
  std::string out;
  std::string dataset;
  std::string model;
  std::string vectors;
  std::string scores;
  std::string report;
  std::string csv;
  std::string instances;
  std::string lexicon;
  std::string fragment;
  std::string model_id;
  std::vector<std::string> words;
  std::vector<std::string> methods;

  std::int64_t min_count = 1;
  TrainConfig train;
  ComposeConfig compose;
  SimMode sim = SimMode::trace;
  StoreDtype dtype = StoreDtype::f64;

  int window = 5;
  ClusterOptions cluster;
  ContextCollection collection = ContextCollection::types;
  std::size_t max_contexts = 2000;

  ReduceMethod reduce = ReduceMethod::pca;
  int reduce_dim = 0;

  /// Paths that must exist before execution.
  std::vector<std::string> inputs() const {
    std::vector<std::string> in;
    for (const auto* p : {&corpus, &dataset, &model, &vectors, &scores, &instances, &lexicon})
      if (!p->empty()) in.push_back(*p);
    return in;
  }
};

namespace detail {

inline const std::vector<std::string> kComposeMethods{"verb_only", "add", "mult", "fuzz", "phaser"};

inline void add_seed_threads(CLI::App* sub, RunPlan& plan, bool threads) {
  sub->add_option("--seed", plan.train.seed, "Random seed (u64)")->capture_default_str();
  if (threads)
    sub->add_option("--threads", plan.train.threads, "Worker threads; 1 is the deterministic path")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
}

inline void add_compose_flags(CLI::App* sub, std::string& method, std::string& side, bool& include_fn,
                              bool method_required) {
  auto* m = sub->add_option("--method", method, "Composition: verb_only, add, mult, fuzz, phaser")
                ->check(CLI::IsMember(kComposeMethods));
  if (!method_required) m->capture_default_str();
  sub->add_option("--operator-side", side, "Operator for fuzz/phaser: verb or noun (default verb)")
      ->check(CLI::IsMember({"verb", "noun"}));
  sub->add_flag("--include-function-words", include_fn, "Compose function words as well as content words");
}

inline void require(const std::string& value, const char* flag, const std::string& cmd) {
  if (value.empty()) throw UsageError(cmd + ": " + flag + " is required");
}

}  // namespace detail

/// Parses argv (without the program name). Unknown flags, missing required
/// flags and conflicting flags are usage errors.
inline RunPlan parse_invocation(const std::vector<std::string>& args) {
  RunPlan plan;
  CLI::App app{"Density-matrix word meanings: training, composition and metaphor evaluation", "dmsem"};
  app.require_subcommand(1);

  std::string variant = "ms_word2dm", metric = "cosine", context_mode = "sum", dtype = "f64";
  std::string method, side, sim = "trace", reduce = "pca", linkage = "average", distance = "cosine";
  bool include_fn = false, per_occurrence = false;

  auto* vocab = app.add_subcommand("vocab", "Count tokens of a corpus into a vocabulary TSV");
  vocab->add_option("--corpus", plan.corpus, "Corpus, one sentence per line")->required();
  vocab->add_option("--min-count", plan.min_count, "Drop tokens seen fewer times")->capture_default_str();
  vocab->add_option("--out", plan.out, "Output vocabulary TSV")->required();

  auto* train = app.add_subcommand("train", "Train SGNS vectors or (multi-sense) Word2DM density matrices");
  train->add_option("--corpus", plan.corpus, "Corpus, one sentence per line")->required();
  train->add_option("--out", plan.out, "Output model directory")->required();
  train->add_option("--variant", variant, "sgns, word2dm or ms_word2dm")
      ->check(CLI::IsMember({"sgns", "word2dm", "ms_word2dm"}))
      ->capture_default_str();
  train->add_option("--dim", plan.train.dim, "Embedding dimension")->capture_default_str()->check(CLI::PositiveNumber);
  train->add_option("--senses", plan.train.senses, "Sense columns per word")->capture_default_str()->check(CLI::PositiveNumber);
  train->add_option("--negatives", plan.train.negatives, "Negative samples per step")->capture_default_str();
  train->add_option("--window", plan.train.window, "Context window radius")->capture_default_str()->check(CLI::PositiveNumber);
  train->add_option("--epochs", plan.train.epochs, "Passes over the corpus")->capture_default_str()->check(CLI::PositiveNumber);
  train->add_option("--lr", plan.train.lr_start, "Initial learning rate")->capture_default_str();
  train->add_option("--lr-min", plan.train.lr_end, "Final learning rate (linear decay)")->capture_default_str();
  train->add_option("--subsample", plan.train.subsample, "Frequent-word subsampling threshold")->capture_default_str();
  train->add_option("--min-count", plan.min_count, "Vocabulary minimum count")->capture_default_str();
  train->add_option("--metric", metric, "Sense selection: cosine or euclidean")
      ->check(CLI::IsMember({"cosine", "euclidean"}))
      ->capture_default_str();
  train->add_option("--context-mode", context_mode, "Context vector: sum or mean of the window")
      ->check(CLI::IsMember({"sum", "mean"}))
      ->capture_default_str();
  train->add_option("--dtype", dtype, "Density store precision: f32 or f64")
      ->check(CLI::IsMember({"f32", "f64"}))
      ->capture_default_str();
  detail::add_seed_threads(train, plan, true);

  auto* c2dm = app.add_subcommand("context2dm", "Density matrices from clustered context-word vectors");
  c2dm->add_option("--corpus", plan.corpus, "Corpus, one sentence per line")->required();
  c2dm->add_option("--vectors", plan.vectors, "Word vectors in text format")->required();
  c2dm->add_option("--out", plan.out, "Output model directory")->required();
  c2dm->add_option("--words", plan.words, "Target words (default: every corpus word with a vector)")->delimiter(',');
  c2dm->add_option("--min-count", plan.min_count, "Minimum corpus count of default target words")->capture_default_str();
  c2dm->add_option("--window", plan.window, "Context window radius")->capture_default_str()->check(CLI::PositiveNumber);
  c2dm->add_option("--k-min", plan.cluster.k_min, "Fewest clusters")->capture_default_str()->check(CLI::PositiveNumber);
  c2dm->add_option("--k-max", plan.cluster.k_max, "Most clusters")->capture_default_str()->check(CLI::PositiveNumber);
  c2dm->add_option("--linkage", linkage, "average, single or complete")
      ->check(CLI::IsMember({"average", "single", "complete"}))
      ->capture_default_str();
  c2dm->add_option("--distance", distance, "cosine or euclidean")
      ->check(CLI::IsMember({"cosine", "euclidean"}))
      ->capture_default_str();
  c2dm->add_flag("--per-occurrence", per_occurrence, "One instance per co-occurrence instead of per context type");
  c2dm->add_option("--max-contexts", plan.max_contexts, "Keep at most this many (most frequent) contexts per word")
      ->capture_default_str();
  c2dm->add_option("--dtype", dtype, "Density store precision: f32 or f64")
      ->check(CLI::IsMember({"f32", "f64"}))
      ->capture_default_str();

  auto* ctxl = app.add_subcommand("contextual2dm", "Density matrices from contextual token vectors (JSONL)");
  ctxl->add_option("--instances", plan.instances, "JSONL of {word, vector}")->required();
  ctxl->add_option("--method", reduce, "Reduction: pca or svd")->check(CLI::IsMember({"pca", "svd"}))->capture_default_str();
  ctxl->add_option("--dim", plan.reduce_dim, "Reduced dimension")->required()->check(CLI::PositiveNumber);
  ctxl->add_option("--out", plan.out, "Output model directory")->required();
  ctxl->add_option("--dtype", dtype, "Density store precision: f32 or f64")
      ->check(CLI::IsMember({"f32", "f64"}))
      ->capture_default_str();

  auto* comp = app.add_subcommand("compose", "Compose one fragment and print its spectrum");
  comp->add_option("--model", plan.model, "Model directory or dm1 manifest");
  comp->add_option("--fragment", plan.fragment, "Tokens as lemma/role, e.g. \"he/subj shower/verb present/obj\"");
  detail::add_compose_flags(comp, method, side, include_fn, true);
  comp->add_option("--lexicon", plan.lexicon, "Pregroup lexicon TSV (role<TAB>type)");
  comp->add_option("--out", plan.out, "Write the composed matrix to this dm1 manifest");

  auto* ev = app.add_subcommand("eval", "Score a model on a metaphor paraphrase dataset");
  ev->add_option("--dataset", plan.dataset, "Triple dataset (JSONL)")->required();
  ev->add_option("--model", plan.model, "Model directory or dm1 manifest");
  ev->add_option("--vectors", plan.vectors, "Word vectors in text format (vector baseline)");
  ev->add_option("--scores", plan.scores, "Precomputed similarities CSV id,sim_apt,sim_inapt");
  detail::add_compose_flags(ev, method, side, include_fn, false);
  ev->add_option("--sim", sim, "Density similarity: trace or cosine")
      ->check(CLI::IsMember({"trace", "cosine"}))
      ->capture_default_str();
  ev->add_option("--report", plan.report, "Output JSON report")->required();
  ev->add_option("--csv", plan.csv, "Output CSV summary");
  ev->add_option("--model-id", plan.model_id, "Model name recorded in the report");

  auto* ent = app.add_subcommand("entropy", "Entropy of verbs vs composed sentences for each method");
  ent->add_option("--dataset", plan.dataset, "Triple dataset (JSONL)")->required();
  ent->add_option("--model", plan.model, "Model directory or dm1 manifest")->required();
  ent->add_option("--methods", plan.methods, "Methods, e.g. mult,fuzz_noun (default: all)")->delimiter(',');
  ent->add_flag("--include-function-words", include_fn, "Compose function words as well as content words");
  ent->add_option("--report", plan.report, "Output JSON report")->required();
  ent->add_option("--csv", plan.csv, "Output CSV summary");

  auto* insp = app.add_subcommand("inspect", "Print the eigenvalue spectrum and entropy of words");
  insp->add_option("--model", plan.model, "Model directory or dm1 manifest")->required();
  insp->add_option("--word", plan.words, "Word to inspect (repeatable)")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    std::ostringstream ss;
    app.exit(e, ss, ss);
    plan.command = "help";
    plan.help = ss.str();
    return plan;
  } catch (const CLI::ParseError& e) {
    std::ostringstream ss;
    if (app.get_subcommands().size() == 1) ss << app.get_subcommands().front()->get_name() << ": ";
    ss << e.what();
    throw UsageError(ss.str());
  }

  plan.command = app.get_subcommands().front()->get_name();
  const std::string& cmd = plan.command;

  if (cmd == "compose" || cmd == "eval") {
    if (!side.empty() && (method.empty() || !uses_operator_side(compose_method_from_string(method))))
      throw UsageError(cmd + ": --operator-side conflicts with --method " + (method.empty() ? "verb_only" : method) +
                       " (only fuzz and phaser take an operator side)");
    if (cmd == "compose") {
      detail::require(plan.model, "--model", cmd);
      detail::require(plan.fragment, "--fragment", cmd);
      detail::require(method, "--method", cmd);
    }
    plan.compose.method = compose_method_from_string(method.empty() ? "verb_only" : method);
    plan.compose.operator_side = operator_side_from_string(side.empty() ? "verb" : side);
  }
  plan.compose.include_function_words = include_fn;

  if (cmd == "eval") {
    const int sources = !plan.model.empty() + !plan.vectors.empty() + !plan.scores.empty();
    if (sources != 1) throw UsageError("eval: give exactly one of --model, --vectors, --scores");
    if (!plan.vectors.empty() && uses_operator_side(plan.compose.method))
      throw UsageError("eval: vector models support verb_only, add and mult");
    if (!plan.scores.empty() && !method.empty())
      throw UsageError("eval: --method conflicts with --scores (scores are precomputed)");
  }
  if (cmd == "train") {
    plan.train.variant = variant_from_string(variant);
    plan.train.metric = metric_from_string(metric);
    plan.train.context_mode = context_mode_from_string(context_mode);
    plan.train.validate();
  }
  if (cmd == "context2dm") {
    if (plan.cluster.k_min > plan.cluster.k_max) throw UsageError("context2dm: --k-min exceeds --k-max");
    plan.cluster.linkage = linkage == "average" ? Linkage::average : linkage == "single" ? Linkage::single : Linkage::complete;
    plan.cluster.distance = distance == "cosine" ? Distance::cosine : Distance::euclidean;
    plan.collection = per_occurrence ? ContextCollection::occurrences : ContextCollection::types;
    if (plan.max_contexts < 2) throw UsageError("context2dm: --max-contexts must be >= 2");
  }
  if (cmd == "contextual2dm") plan.reduce = reduce_method_from_string(reduce);
  plan.sim = sim_mode_from_string(sim);
  plan.dtype = dtype == "f32" ? StoreDtype::f32 : StoreDtype::f64;
  if (plan.model_id.empty()) plan.model_id = !plan.model.empty() ? plan.model : plan.vectors.empty() ? plan.scores : plan.vectors;
  return plan;
}

// ---------------------------------------------------------------------------

namespace detail {

inline fs::path density_manifest(const std::string& model) {
  const fs::path p(model);
  if (fs::is_directory(p)) return p / "densities.json";
  return p;
}

inline DensityStore load_store(const std::string& model) {
  const fs::path manifest = density_manifest(model);
  if (!fs::exists(manifest)) throw DataError("no density store at '" + manifest.string() + "'");
  return read_dm1(manifest);
}

inline std::string fmt(std::optional<double> v) { return v ? io::format_double(*v) : "n/a"; }

inline Fragment parse_fragment_spec(const std::string& spec) {
  Fragment f;
  std::istringstream ss(spec);
  for (std::string tok; ss >> tok;) {
    const auto slash = tok.rfind('/');
    if (slash == std::string::npos || slash == 0) throw UsageError("--fragment: token '" + tok + "' is not lemma/role");
    const auto role = role_from_string(tok.substr(slash + 1));
    if (!role) throw UsageError("--fragment: unknown role in '" + tok + "'");
    f.tokens.push_back({tok.substr(0, slash), tok.substr(0, slash), *role});
  }
  try {
    f.validate();
  } catch (const DataError& e) {
    throw UsageError(std::string("--fragment: ") + e.what());
  }
  return f;
}

inline std::string spectrum_line(const DensityMatrix& m) {
  const EigenSystem es = eigendecompose(m);
  std::string out = io::format_double(von_neumann_entropy(m));
  out += '\t';
  for (Eigen::Index i = 0; i < es.eigenvalues.size(); ++i) {
    if (i) out += ' ';
    out += io::format_double(es.eigenvalues[i]);
  }
  return out;
}

inline void run_vocab(const RunPlan& p, std::ostream& out) {
  const auto sentences = read_sentences(p.corpus);
  const Vocabulary v = build_vocab(sentences, p.min_count);
  io::atomic_write(p.out, v.to_tsv());
  out << "vocabulary: " << v.size() << " types, " << v.total_count() << " tokens -> " << p.out << "\n";
}

inline void run_train(const RunPlan& p, std::ostream& out, std::ostream& err) {
  const auto sentences = read_sentences(p.corpus);
  const Vocabulary vocab = build_vocab(sentences, p.min_count);
  if (vocab.empty()) throw DataError("train: no token reaches --min-count " + std::to_string(p.min_count));
  const auto ids = encode(sentences, vocab);
  const fs::path dir(p.out);

  TrainStats stats;
  const TrainedModel model = train(ids, vocab, p.train, &err, &stats);
  io::atomic_write(dir / "vocab.tsv", vocab.to_tsv());
  io::atomic_write(dir / "config.json", p.train.to_json().dump(2) + "\n");
  if (const auto* emb = std::get_if<EmbeddingTable>(&model)) {
    io::atomic_write(dir / "vectors.txt", vectors_to_text(word_vectors(*emb, vocab)));
  } else {
    const auto& senses = std::get<SenseTable>(model);
    write_b1(dir / "senses.json", senses, vocab);
    write_dm1(dir / "densities.json", density_store(senses, vocab), p.dtype);
  }
  out << "trained " << to_string(p.train.variant) << ": " << vocab.size() << " words, dim " << p.train.dim
      << ", final mean objective " << io::format_double(stats.epoch_objective.back()) << " -> " << dir.string() << "\n";
}

inline void run_context2dm(const RunPlan& p, std::ostream& out, std::ostream& err) {
  const auto sentences = read_sentences(p.corpus);
  const WordVectors vectors = read_vectors(p.vectors);
  std::vector<std::string> targets = p.words;
  if (targets.empty()) {
    const Vocabulary vocab = build_vocab(sentences, p.min_count);
    for (const auto& e : vocab.entries())
      if (vectors.contains(e.token)) targets.push_back(e.token);
  }
  DensityStore store(vectors.dim());
  std::size_t skipped = 0;
  for (const auto& w : targets) {
    try {
      const ContextSet ctx = truncate_contexts(collect_contexts(sentences, vectors, w, p.window, p.collection), p.max_contexts);
      if (ctx.instances.size() < 2) throw DataError("'" + w + "' has fewer than two context vectors");
      store.insert(w, context2dm(ctx, p.cluster));
    } catch (const DataError& e) {
      err << "context2dm: skipping " << w << ": " << e.what() << "\n";
      ++skipped;
    } catch (const NumericError& e) {
      err << "context2dm: skipping " << w << ": " << e.what() << "\n";
      ++skipped;
    }
  }
  if (store.empty()) throw DataError("context2dm: no density matrices could be built");
  write_dm1(fs::path(p.out) / "densities.json", store, p.dtype);
  out << "context2dm: " << store.size() << " words (" << skipped << " skipped) -> " << p.out << "\n";
}

inline void run_contextual2dm(const RunPlan& p, std::ostream& out, std::ostream& err) {
  const auto inst = parse_contextual_instances(io::read_file(p.instances), p.instances);
  const auto all = inst.all();
  const Reducer reducer = fit_reducer(all, p.reduce, p.reduce_dim);
  DensityStore store(p.reduce_dim);
  for (const auto& w : inst.words) {
    try {
      store.insert(w, contextual2dm(inst.by_word.at(w), reducer));
    } catch (const NumericError& e) {
      err << "contextual2dm: skipping " << w << ": " << e.what() << "\n";
    }
  }
  if (store.empty()) throw NumericError("contextual2dm: no density matrices could be built");
  write_dm1(fs::path(p.out) / "densities.json", store, p.dtype);
  out << "contextual2dm: " << store.size() << " words from " << all.size() << " instances (" << to_string(p.reduce)
      << ", dim " << p.reduce_dim << ") -> " << p.out << "\n";
}

inline void run_compose(const RunPlan& p, std::ostream& out) {
  const Fragment f = parse_fragment_spec(p.fragment);
  const PregroupLexicon lex = p.lexicon.empty() ? PregroupLexicon{} : PregroupLexicon::from_tsv(io::read_file(p.lexicon), p.lexicon);
  const Reduction red = check_grammar(f, lex);
  const DensityStore store = load_store(p.model);
  const DensityMatrix m = compose_fragment(f, store, p.compose);
  out << "fragment\t" << f.text() << "\n";
  out << "pattern\t" << f.pattern() << "\t" << (red.grammatical ? "grammatical" : "ungrammatical") << "\t"
      << red.residual_str() << "\n";
  out << "method\t" << p.compose.label() << "\n";
  out << "spectrum\t" << spectrum_line(m) << "\n";
  if (!p.out.empty()) {
    DensityStore result(m.dim());
    result.insert(f.text(), m);
    write_dm1(p.out, result);
  }
}

inline void run_eval(const RunPlan& p, std::ostream& out) {
  const auto triples = load_triples(p.dataset);
  std::vector<EvalReport> reports;
  if (!p.scores.empty()) {
    reports = evaluate_precomputed(triples, parse_score_csv(io::read_file(p.scores), p.scores), p.model_id);
  } else if (!p.vectors.empty()) {
    reports = evaluate(triples, read_vectors(p.vectors), p.compose, p.model_id);
  } else {
    const fs::path manifest = density_manifest(p.model);
    if (!fs::exists(manifest) && fs::is_directory(p.model) && fs::exists(fs::path(p.model) / "vectors.txt")) {
      if (uses_operator_side(p.compose.method)) throw UsageError("eval: model has only vectors; use verb_only, add or mult");
      reports = evaluate(triples, read_vectors(fs::path(p.model) / "vectors.txt"), p.compose, p.model_id);
    } else {
      reports = evaluate(triples, load_store(p.model), p.compose, p.sim, p.model_id);
    }
  }
  io::atomic_write(p.report, reports_to_json(reports));
  if (!p.csv.empty()) io::atomic_write(p.csv, reports_to_csv(reports));
  for (const auto& r : reports) {
    out << r.form << "\t" << r.method << "\tsim=" << r.sim << "\tpairs=" << r.n_pairs_used << "/" << r.n_pairs_total
        << "\texcluded=" << r.excluded.size() << "\trho=" << fmt(r.rho.pooled) << "\taccuracy=" << fmt(r.accuracy)
        << "\n";
  }
}

inline ComposeConfig config_from_label(const std::string& label, bool include_fn) {
  ComposeConfig c;
  c.include_function_words = include_fn;
  const auto us = label.rfind('_');
  if (us != std::string::npos && (label.substr(us + 1) == "verb" || label.substr(us + 1) == "noun") &&
      label != "verb_only") {
    c.method = compose_method_from_string(label.substr(0, us));
    if (!uses_operator_side(c.method)) throw UsageError("method '" + label + "' takes no operator side");
    c.operator_side = operator_side_from_string(label.substr(us + 1));
  } else {
    c.method = compose_method_from_string(label);
  }
  return c;
}

inline void run_entropy(const RunPlan& p, std::ostream& out) {
  const auto triples = load_triples(p.dataset);
  const DensityStore store = load_store(p.model);
  std::vector<ComposeConfig> configs;
  if (p.methods.empty()) {
    configs = all_compose_configs();
    for (auto& c : configs) c.include_function_words = p.compose.include_function_words;
  } else {
    for (const auto& m : p.methods) configs.push_back(config_from_label(m, p.compose.include_function_words));
  }
  nlohmann::ordered_json j;
  j["model"] = p.model;
  j["rows"] = nlohmann::ordered_json::array();
  std::string csv = "method,n_sentences,entropy_verb,entropy_composed,ratio,n_excluded\n";
  for (const auto& c : configs) {
    const EntropyRow row = entropy_report(triples, store, c);
    nlohmann::ordered_json r;
    r["method"] = row.method;
    r["n_sentences"] = row.n_sentences;
    r["mean_entropy_verb"] = row.mean_entropy_verb;
    r["mean_entropy_composed"] = row.mean_entropy_composed;
    r["ratio"] = row.ratio ? nlohmann::ordered_json(*row.ratio) : nlohmann::ordered_json(nullptr);
    r["n_excluded"] = row.excluded.size();
    j["rows"].push_back(std::move(r));
    csv += row.method + "," + std::to_string(row.n_sentences) + "," + io::format_double(row.mean_entropy_verb) + "," +
           io::format_double(row.mean_entropy_composed) + "," + (row.ratio ? io::format_double(*row.ratio) : "") + "," +
           std::to_string(row.excluded.size()) + "\n";
    out << row.method << "\tverb=" << io::format_double(row.mean_entropy_verb)
        << "\tcomposed=" << io::format_double(row.mean_entropy_composed) << "\tratio=" << fmt(row.ratio) << "\n";
  }
  io::atomic_write(p.report, j.dump(2) + "\n");
  if (!p.csv.empty()) io::atomic_write(p.csv, csv);
}

inline void run_inspect(const RunPlan& p, std::ostream& out) {
  const DensityStore store = load_store(p.model);
  for (const auto& w : p.words) out << w << "\t" << spectrum_line(store.at(w)) << "\n";
}

}  // namespace detail

/// Runs a validated plan. Errors propagate as dmsem::Error.
inline void execute(const RunPlan& plan, std::ostream& out, std::ostream& err) {
  for (const auto& in : plan.inputs())
    if (!fs::exists(in)) throw DataError(plan.command + ": input '" + in + "' does not exist");
  const auto& c = plan.command;
  if (c == "help") out << plan.help;
  else if (c == "vocab") detail::run_vocab(plan, out);
  else if (c == "train") detail::run_train(plan, out, err);
  else if (c == "context2dm") detail::run_context2dm(plan, out, err);
  else if (c == "contextual2dm") detail::run_contextual2dm(plan, out, err);
  else if (c == "compose") detail::run_compose(plan, out);
  else if (c == "eval") detail::run_eval(plan, out);
  else if (c == "entropy") detail::run_entropy(plan, out);
  else if (c == "inspect") detail::run_inspect(plan, out);
  else throw UsageError("unknown command '" + c + "'");
}

/// parse + execute with errors mapped to exit codes (1 usage, 2 data,
/// 3 numeric).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    const RunPlan plan = parse_invocation(args);
    execute(plan, out, err);
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::bad_alloc&) {
    err << "error: out of memory\n";
    return static_cast<int>(ExitCode::numeric);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::data);
  }
}

}  // namespace dmsem::cli
