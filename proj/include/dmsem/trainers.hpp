#pragma once

// Skipgram negative sampling and its density-matrix extensions.
//
// SGNS maximizes   ln s(<v_t|v_c>) + sum_k ln s(-<v_t|v_k>)
// per (target, context) pair. The multi-sense density-matrix trainer keeps
// a d x m matrix B_w of sense columns per word plus one context vector v_w,
// picks the column b_t of B_t closest to the summed context c_t, and
// maximizes   ln s(<b_t|c_t>) + sum_k ln s(-<b_t|v_k>)   updating only b_t
// on the target side. Word meaning is A = B B^T, trace-normalized.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "dmsem/corpus.hpp"
#include "dmsem/io.hpp"
#include "dmsem/psd_linalg.hpp"
#include "dmsem/store.hpp"

namespace dmsem {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Variant { sgns, word2dm, ms_word2dm };
enum class SenseMetric { cosine, euclidean };
enum class ContextMode { sum, mean };

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::sgns: return "sgns";
    case Variant::word2dm: return "word2dm";
    case Variant::ms_word2dm: return "ms_word2dm";
  }
  return "?";
}
inline const char* to_string(SenseMetric m) { return m == SenseMetric::cosine ? "cosine" : "euclidean"; }
inline const char* to_string(ContextMode m) { return m == ContextMode::sum ? "sum" : "mean"; }

inline Variant variant_from_string(const std::string& s) {
  if (s == "sgns") return Variant::sgns;
  if (s == "word2dm") return Variant::word2dm;
  if (s == "ms_word2dm") return Variant::ms_word2dm;
  throw UsageError("unknown variant '" + s + "' (expected sgns, word2dm or ms_word2dm)");
}
inline SenseMetric metric_from_string(const std::string& s) {
  if (s == "cosine") return SenseMetric::cosine;
  if (s == "euclidean") return SenseMetric::euclidean;
  throw UsageError("unknown sense metric '" + s + "' (expected cosine or euclidean)");
}
inline ContextMode context_mode_from_string(const std::string& s) {
  if (s == "sum") return ContextMode::sum;
  if (s == "mean") return ContextMode::mean;
  throw UsageError("unknown context mode '" + s + "' (expected sum or mean)");
}

struct TrainConfig {
  Variant variant = Variant::ms_word2dm;
  int dim = 50;
  int senses = 5;
  int negatives = 5;
  int window = 5;
  int epochs = 5;
  double lr_start = 0.025;
  double lr_end = 0.0001;
  double subsample = 1e-5;
  double noise_power = 0.75;
  std::uint64_t seed = 1;
  SenseMetric metric = SenseMetric::cosine;
  ContextMode context_mode = ContextMode::sum;
  int threads = 1;

  void validate() const {
    if (dim < 1) throw UsageError("dim must be >= 1");
    if (senses < 1) throw UsageError("senses must be >= 1");
    if (negatives < 0) throw UsageError("negatives must be >= 0");
    if (window < 1) throw UsageError("window must be >= 1");
    if (epochs < 1) throw UsageError("epochs must be >= 1");
    if (!(lr_start > 0.0)) throw UsageError("learning rate must be > 0");
    if (!(lr_end > 0.0) || lr_end > lr_start) throw UsageError("final learning rate must be in (0, start]");
    if (lr_end < 1e-4 * lr_start) throw UsageError("final learning rate must be >= 1e-4 of the start rate");
    if (!(subsample > 0.0)) throw UsageError("subsample threshold must be > 0");
    if (threads < 1) throw UsageError("threads must be >= 1");
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["variant"] = to_string(variant);
    j["dim"] = dim;
    j["senses"] = senses;
    j["negatives"] = negatives;
    j["window"] = window;
    j["epochs"] = epochs;
    j["lr_start"] = lr_start;
    j["lr_end"] = lr_end;
    j["subsample"] = subsample;
    j["noise_power"] = noise_power;
    j["seed"] = seed;
    j["metric"] = to_string(metric);
    j["context_mode"] = to_string(context_mode);
    j["threads"] = threads;
    return j;
  }
};

/// Target and context embeddings, one row per vocabulary id.
struct EmbeddingTable {
  RowMatrix target;
  RowMatrix context;

  Eigen::Index dim() const noexcept { return target.cols(); }
  Eigen::Index size() const noexcept { return target.rows(); }
};

/// Per-word sense matrices B_w (d x m) and shared context vectors.
struct SenseTable {
  std::vector<Matrix> senses;
  RowMatrix context;

  Eigen::Index dim() const noexcept { return context.cols(); }
  Eigen::Index senses_per_word() const noexcept { return senses.empty() ? 0 : senses.front().cols(); }
  Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(senses.size()); }
};

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// ln s(x) without overflow.
inline double log_sigmoid(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

// ---------------------------------------------------------------------------
// SGNS

struct SgnsGradient {
  double objective = 0.0;
  Vector target;                  // dJ/dv_t
  Vector context;                 // dJ/dv_c
  std::vector<Vector> negatives;  // dJ/dv_k, one per negative draw
};

inline void check_id(WordId id, Eigen::Index n, const char* what) {
  if (id < 0 || id >= n) throw DataError(std::string(what) + ": word id " + std::to_string(id) + " out of range");
}

inline SgnsGradient sgns_gradient(const EmbeddingTable& t, WordId target, WordId context,
                                  std::span<const WordId> negatives) {
  check_id(target, t.size(), "sgns");
  check_id(context, t.size(), "sgns");
  const auto vt = t.target.row(target).transpose();
  const auto vc = t.context.row(context).transpose();

  SgnsGradient g;
  const double pos = vt.dot(vc);
  g.objective = log_sigmoid(pos);
  const double gpos = 1.0 - sigmoid(pos);
  g.target = gpos * vc;
  g.context = gpos * vt;
  g.negatives.reserve(negatives.size());
  for (WordId k : negatives) {
    check_id(k, t.size(), "sgns");
    const auto vk = t.context.row(k).transpose();
    const double neg = vt.dot(vk);
    g.objective += log_sigmoid(-neg);
    const double gneg = -sigmoid(neg);
    g.target += gneg * vk;
    g.negatives.push_back(gneg * vt);
  }
  return g;
}

/// One gradient-ascent step on a (target, context) pair; all gradients are
/// taken at the pre-step parameters. Returns the pre-step objective.
inline double sgns_step(EmbeddingTable& t, WordId target, WordId context, std::span<const WordId> negatives,
                        double lr) {
  const SgnsGradient g = sgns_gradient(t, target, context, negatives);
  t.target.row(target) += lr * g.target.transpose();
  t.context.row(context) += lr * g.context.transpose();
  for (std::size_t k = 0; k < negatives.size(); ++k) t.context.row(negatives[k]) += lr * g.negatives[k].transpose();
  return g.objective;
}

/// Skips pairs without context.
inline double sgns_step(EmbeddingTable& t, const ContextPair& pair, std::span<const WordId> negatives, double lr) {
  double obj = 0.0;
  for (WordId c : pair.context_ids) obj += sgns_step(t, pair.target_id, c, negatives, lr);
  return obj;
}

// ---------------------------------------------------------------------------
// Sense selection

/// Column of `senses` closest to `c`: largest cosine or smallest Euclidean
/// distance, lowest index on ties. Cosine against a zero context falls back
/// to Euclidean distance.
template <class Derived>
Eigen::Index select_sense(const Matrix& senses, const Eigen::MatrixBase<Derived>& c, SenseMetric metric) {
  if (senses.cols() < 1) throw DataError("select_sense: no sense columns");
  if (c.size() != senses.rows()) throw DataError("select_sense: context dimension mismatch");
  const double cnorm = c.norm();
  if (metric == SenseMetric::cosine && cnorm > 0.0) {
    Eigen::Index best = 0;
    double best_cos = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < senses.cols(); ++i) {
      const double bnorm = senses.col(i).norm();
      const double cos = bnorm > 0.0 ? senses.col(i).dot(c) / (bnorm * cnorm) : 0.0;
      if (cos > best_cos) {
        best_cos = cos;
        best = i;
      }
    }
    return best;
  }
  Eigen::Index best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < senses.cols(); ++i) {
    const double dist = (senses.col(i) - c).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = i;
    }
  }
  return best;
}

template <class Derived>
Eigen::Index select_sense(const SenseMatrix& b, const Eigen::MatrixBase<Derived>& c, SenseMetric metric) {
  return select_sense(b.columns(), c, metric);
}

// ---------------------------------------------------------------------------
// Density-matrix trainers

struct SenseGradient {
  double objective = 0.0;
  /// Selected column, or -1 when every column is updated (plain Word2DM).
  Eigen::Index column = -1;
  Matrix senses;                  // dJ/dB_t (d x m); zero outside the updated columns
  Vector per_context;             // dJ/dv_w for each context occurrence
  std::vector<Vector> negatives;  // dJ/dv_k
};

inline Vector summed_context(const SenseTable& t, std::span<const WordId> context, ContextMode mode) {
  Vector c = Vector::Zero(t.dim());
  for (WordId w : context) {
    check_id(w, t.size(), "context");
    c += t.context.row(w).transpose();
  }
  if (mode == ContextMode::mean && !context.empty()) c /= static_cast<double>(context.size());
  return c;
}

namespace detail {

/// Objective and gradients of one sense column b against (c, negatives),
/// accumulated into `g` with column index `col`.
inline void accumulate_sense_column(const SenseTable& t, const Vector& c, std::span<const WordId> negatives,
                                    const Matrix& b_t, Eigen::Index col, double context_scale, SenseGradient& g) {
  const auto b = b_t.col(col);
  const double pos = b.dot(c);
  g.objective += log_sigmoid(pos);
  const double gpos = 1.0 - sigmoid(pos);
  g.senses.col(col) += gpos * c;
  g.per_context += (gpos * context_scale) * b;
  for (std::size_t k = 0; k < negatives.size(); ++k) {
    const auto vk = t.context.row(negatives[k]).transpose();
    const double neg = b.dot(vk);
    g.objective += log_sigmoid(-neg);
    const double gneg = -sigmoid(neg);
    g.senses.col(col) += gneg * vk;
    g.negatives[k] += gneg * b;
  }
}

inline SenseGradient empty_gradient(const SenseTable& t, std::size_t n_negatives) {
  SenseGradient g;
  g.senses = Matrix::Zero(t.dim(), t.senses_per_word());
  g.per_context = Vector::Zero(t.dim());
  g.negatives.assign(n_negatives, Vector::Zero(t.dim()));
  return g;
}

inline void apply_sense_gradient(SenseTable& t, WordId target, std::span<const WordId> context,
                                 std::span<const WordId> negatives, const SenseGradient& g, double lr) {
  Matrix& b_t = t.senses[static_cast<std::size_t>(target)];
  if (g.column >= 0)
    b_t.col(g.column) += lr * g.senses.col(g.column);
  else
    b_t += lr * g.senses;
  for (WordId w : context) t.context.row(w) += lr * g.per_context.transpose();
  for (std::size_t k = 0; k < negatives.size(); ++k) t.context.row(negatives[k]) += lr * g.negatives[k].transpose();
}

}  // namespace detail

/// Gradient of the multi-sense objective at the current parameters. The
/// sense column is chosen against the summed context before differentiating.
inline SenseGradient ms_word2dm_gradient(const SenseTable& t, WordId target, std::span<const WordId> context,
                                         std::span<const WordId> negatives, SenseMetric metric,
                                         ContextMode mode = ContextMode::sum) {
  check_id(target, t.size(), "ms_word2dm");
  for (WordId k : negatives) check_id(k, t.size(), "ms_word2dm");
  const Vector c = summed_context(t, context, mode);
  const Matrix& b_t = t.senses[static_cast<std::size_t>(target)];
  SenseGradient g = detail::empty_gradient(t, negatives.size());
  g.column = select_sense(b_t, c, metric);
  const double scale = mode == ContextMode::mean && !context.empty() ? 1.0 / static_cast<double>(context.size()) : 1.0;
  detail::accumulate_sense_column(t, c, negatives, b_t, g.column, scale, g);
  return g;
}

/// Updates only the selected sense column of the target plus the context
/// vectors of the context words and negatives. Returns the pre-step
/// objective; empty contexts are skipped.
inline double ms_word2dm_step(SenseTable& t, WordId target, std::span<const WordId> context,
                              std::span<const WordId> negatives, double lr, SenseMetric metric,
                              ContextMode mode = ContextMode::sum) {
  if (context.empty()) return 0.0;
  const SenseGradient g = ms_word2dm_gradient(t, target, context, negatives, metric, mode);
  detail::apply_sense_gradient(t, target, context, negatives, g, lr);
  return g.objective;
}

/// Plain Word2DM: the same per-column objective summed over every column
/// of B_t, with no sense selection.
inline SenseGradient word2dm_gradient(const SenseTable& t, WordId target, std::span<const WordId> context,
                                      std::span<const WordId> negatives, ContextMode mode = ContextMode::sum) {
  check_id(target, t.size(), "word2dm");
  for (WordId k : negatives) check_id(k, t.size(), "word2dm");
  const Vector c = summed_context(t, context, mode);
  const Matrix& b_t = t.senses[static_cast<std::size_t>(target)];
  SenseGradient g = detail::empty_gradient(t, negatives.size());
  const double scale = mode == ContextMode::mean && !context.empty() ? 1.0 / static_cast<double>(context.size()) : 1.0;
  for (Eigen::Index col = 0; col < b_t.cols(); ++col) detail::accumulate_sense_column(t, c, negatives, b_t, col, scale, g);
  return g;
}

inline double word2dm_step(SenseTable& t, WordId target, std::span<const WordId> context,
                           std::span<const WordId> negatives, double lr, ContextMode mode = ContextMode::sum) {
  if (context.empty()) return 0.0;
  const SenseGradient g = word2dm_gradient(t, target, context, negatives, mode);
  detail::apply_sense_gradient(t, target, context, negatives, g, lr);
  return g.objective;
}

// ---------------------------------------------------------------------------
// Initialization

inline double init_uniform(Rng& rng, int dim) { return (uniform01(rng) - 0.5) / static_cast<double>(dim); }

inline EmbeddingTable init_embeddings(std::size_t vocab_size, int dim, std::uint64_t seed) {
  Rng rng(seed);
  EmbeddingTable t;
  t.target.resize(static_cast<Eigen::Index>(vocab_size), dim);
  for (Eigen::Index i = 0; i < t.target.rows(); ++i)
    for (Eigen::Index j = 0; j < dim; ++j) t.target(i, j) = init_uniform(rng, dim);
  t.context = RowMatrix::Zero(static_cast<Eigen::Index>(vocab_size), dim);
  return t;
}

inline SenseTable init_senses(std::size_t vocab_size, int dim, int senses, std::uint64_t seed) {
  Rng rng(seed);
  SenseTable t;
  t.senses.reserve(vocab_size);
  for (std::size_t w = 0; w < vocab_size; ++w) {
    Matrix b(dim, senses);
    for (Eigen::Index c = 0; c < senses; ++c)
      for (Eigen::Index r = 0; r < dim; ++r) b(r, c) = init_uniform(rng, dim);
    t.senses.push_back(std::move(b));
  }
  t.context = RowMatrix::Zero(static_cast<Eigen::Index>(vocab_size), dim);
  return t;
}

// ---------------------------------------------------------------------------
// Training loop

struct TrainStats {
  std::vector<double> epoch_objective;  // mean per-step objective
  std::int64_t steps = 0;
};

using TrainedModel = std::variant<EmbeddingTable, SenseTable>;

namespace detail {

struct Schedule {
  double start;
  double end;
  double total;
  double at(double done) const { return std::max(end, start - (start - end) * std::min(1.0, done / total)); }
};

/// Runs `epochs` passes over `sentences`. `visit(sentence_ids, position,
/// rng, lr)` performs the update for one position and returns
/// (objective, steps).
template <class Visit>
TrainStats run_epochs(const std::vector<std::vector<WordId>>& sentences, const Vocabulary& vocab,
                      const TrainConfig& cfg, std::ostream* progress, Visit&& visit) {
  std::int64_t positions = 0;
  for (const auto& s : sentences) positions += static_cast<std::int64_t>(s.size());
  if (positions == 0) throw DataError("train: corpus has no in-vocabulary tokens");

  const SubsampleFilter filter(vocab, cfg.subsample, cfg.seed);
  const Schedule lr{cfg.lr_start, cfg.lr_end, static_cast<double>(positions) * cfg.epochs};
  TrainStats stats;
  std::atomic<std::int64_t> done{0};

  const auto n_threads = static_cast<std::size_t>(std::max(1, cfg.threads));
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<double> obj(n_threads, 0.0);
    std::vector<std::int64_t> steps(n_threads, 0);

    auto worker = [&](std::size_t tid) {
      Rng rng(cfg.seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(epoch) * n_threads + tid + 1)));
      const std::size_t lo = sentences.size() * tid / n_threads;
      const std::size_t hi = sentences.size() * (tid + 1) / n_threads;
      std::vector<WordId> kept;
      for (std::size_t s = lo; s < hi; ++s) {
        kept.clear();
        for (WordId w : sentences[s])
          if (filter.keep(w, rng)) kept.push_back(w);
        for (std::size_t i = 0; i < kept.size(); ++i) {
          const double rate = lr.at(static_cast<double>(done.load(std::memory_order_relaxed)));
          auto [o, n] = visit(std::span<const WordId>(kept), i, rng, rate);
          obj[tid] += o;
          steps[tid] += n;
        }
        done.fetch_add(static_cast<std::int64_t>(sentences[s].size()), std::memory_order_relaxed);
      }
    };

    if (n_threads == 1) {
      worker(0);
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t tid = 0; tid < n_threads; ++tid) pool.emplace_back(worker, tid);
    }

    double total_obj = 0.0;
    std::int64_t total_steps = 0;
    for (std::size_t k = 0; k < n_threads; ++k) {
      total_obj += obj[k];
      total_steps += steps[k];
    }
    if (epoch == 0 && total_steps == 0) throw DataError("train: no training pairs left after subsampling");
    const double mean = total_steps > 0 ? total_obj / static_cast<double>(total_steps) : 0.0;
    stats.epoch_objective.push_back(mean);
    stats.steps += total_steps;
    if (progress) *progress << (epoch + 1) << '\t' << io::format_double(mean) << '\n';
  }
  return stats;
}

inline std::span<const WordId> window_around(std::span<const WordId> s, std::size_t i, int window,
                                             std::vector<WordId>& buf) {
  buf.clear();
  const std::size_t lo = i >= static_cast<std::size_t>(window) ? i - static_cast<std::size_t>(window) : 0;
  const std::size_t hi = std::min(s.size() - 1, i + static_cast<std::size_t>(window));
  for (std::size_t j = lo; j <= hi; ++j)
    if (j != i) buf.push_back(s[j]);
  return buf;
}

}  // namespace detail

inline EmbeddingTable train_sgns(const std::vector<std::vector<WordId>>& sentences, const Vocabulary& vocab,
                                 const TrainConfig& cfg, std::ostream* progress = nullptr,
                                 TrainStats* stats_out = nullptr) {
  cfg.validate();
  if (vocab.empty()) throw DataError("train: empty vocabulary");
  EmbeddingTable table = init_embeddings(vocab.size(), cfg.dim, cfg.seed);
  const NegativeSampler sampler(vocab, cfg.noise_power, cfg.seed);

  auto stats = detail::run_epochs(sentences, vocab, cfg, progress,
                                  [&](std::span<const WordId> s, std::size_t i, Rng& rng, double lr) {
                                    thread_local std::vector<WordId> ctx, negs;
                                    detail::window_around(s, i, cfg.window, ctx);
                                    double obj = 0.0;
                                    std::int64_t n = 0;
                                    for (WordId c : ctx) {
                                      negs.clear();
                                      for (int k = 0; k < cfg.negatives; ++k)
                                        if (WordId w = sampler.draw(rng); w != c) negs.push_back(w);
                                      obj += sgns_step(table, s[i], c, negs, lr);
                                      ++n;
                                    }
                                    return std::pair{obj, n};
                                  });
  if (stats_out) *stats_out = std::move(stats);
  return table;
}

inline SenseTable train_senses(const std::vector<std::vector<WordId>>& sentences, const Vocabulary& vocab,
                               const TrainConfig& cfg, std::ostream* progress = nullptr,
                               TrainStats* stats_out = nullptr) {
  cfg.validate();
  if (cfg.variant == Variant::sgns) throw UsageError("train_senses: variant sgns learns vectors, not senses");
  if (vocab.empty()) throw DataError("train: empty vocabulary");
  SenseTable table = init_senses(vocab.size(), cfg.dim, cfg.senses, cfg.seed);
  const NegativeSampler sampler(vocab, cfg.noise_power, cfg.seed);

  auto stats = detail::run_epochs(sentences, vocab, cfg, progress,
                                  [&](std::span<const WordId> s, std::size_t i, Rng& rng, double lr) {
                                    thread_local std::vector<WordId> ctx, negs;
                                    detail::window_around(s, i, cfg.window, ctx);
                                    if (ctx.empty()) return std::pair{0.0, std::int64_t{0}};
                                    negs.clear();
                                    for (int k = 0; k < cfg.negatives; ++k)
                                      if (WordId w = sampler.draw(rng); w != s[i]) negs.push_back(w);
                                    const double obj =
                                        cfg.variant == Variant::ms_word2dm
                                            ? ms_word2dm_step(table, s[i], ctx, negs, lr, cfg.metric, cfg.context_mode)
                                            : word2dm_step(table, s[i], ctx, negs, lr, cfg.context_mode);
                                    return std::pair{obj, std::int64_t{1}};
                                  });
  if (stats_out) *stats_out = std::move(stats);
  return table;
}

inline TrainedModel train(const std::vector<std::vector<WordId>>& sentences, const Vocabulary& vocab,
                          const TrainConfig& cfg, std::ostream* progress = nullptr, TrainStats* stats = nullptr) {
  if (cfg.variant == Variant::sgns) return train_sgns(sentences, vocab, cfg, progress, stats);
  return train_senses(sentences, vocab, cfg, progress, stats);
}

/// A = B B^T for `word`, trace-normalized.
inline DensityMatrix finalize_density(const SenseTable& t, const Vocabulary& vocab, const std::string& word) {
  const WordId id = vocab.id(word);
  if (id < 0 || id >= t.size()) throw OovError({word});
  return build_density(SenseMatrix(t.senses[static_cast<std::size_t>(id)]));
}

inline DensityStore density_store(const SenseTable& t, const Vocabulary& vocab) {
  DensityStore store(t.dim());
  for (std::size_t i = 0; i < vocab.size(); ++i)
    store.insert(vocab.entries()[i].token, build_density(SenseMatrix(t.senses[i])));
  return store;
}

// ---------------------------------------------------------------------------
// Word vectors in text form: optional "V d" header, then "word v1 ... vd".

class WordVectors {
 public:
  WordVectors() = default;
  WordVectors(std::vector<std::string> words, RowMatrix vectors) : words_(std::move(words)), vectors_(std::move(vectors)) {
    if (static_cast<Eigen::Index>(words_.size()) != vectors_.rows())
      throw DataError("WordVectors: word count does not match row count");
    for (std::size_t i = 0; i < words_.size(); ++i) index_.emplace(words_[i], i);
  }

  Eigen::Index dim() const noexcept { return vectors_.cols(); }
  std::size_t size() const noexcept { return words_.size(); }
  const std::vector<std::string>& words() const noexcept { return words_; }
  const RowMatrix& vectors() const noexcept { return vectors_; }
  bool contains(const std::string& w) const { return index_.count(w) != 0; }

  /// nullopt when absent.
  std::optional<Vector> find(const std::string& w) const {
    auto it = index_.find(w);
    if (it == index_.end()) return std::nullopt;
    return Vector(vectors_.row(static_cast<Eigen::Index>(it->second)).transpose());
  }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
  RowMatrix vectors_;
};

inline WordVectors word_vectors(const EmbeddingTable& t, const Vocabulary& vocab) {
  std::vector<std::string> words;
  for (const auto& e : vocab.entries()) words.push_back(e.token);
  return WordVectors(std::move(words), t.target);
}

inline std::string vectors_to_text(const WordVectors& v) {
  std::string out = std::to_string(v.size()) + " " + std::to_string(v.dim()) + "\n";
  for (std::size_t i = 0; i < v.size(); ++i) {
    out += v.words()[i];
    for (Eigen::Index j = 0; j < v.dim(); ++j) {
      out += ' ';
      out += io::format_double(v.vectors()(static_cast<Eigen::Index>(i), j));
    }
    out += '\n';
  }
  return out;
}

inline WordVectors vectors_from_text(std::string_view text, const std::string& where = "vectors") {
  std::vector<std::string> lines;
  {
    std::size_t pos = 0;
    while (pos < text.size()) {
      std::size_t nl = text.find('\n', pos);
      if (nl == std::string_view::npos) nl = text.size();
      std::string line(text.substr(pos, nl - pos));
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(std::move(line));
      pos = nl + 1;
    }
  }
  auto split = [](const std::string& line) {
    std::vector<std::string> f;
    std::istringstream ss(line);
    for (std::string tok; ss >> tok;) f.push_back(tok);
    return f;
  };

  std::size_t first = 0;
  long declared_rows = -1;
  long dim = -1;
  if (!lines.empty()) {
    const auto head = split(lines[0]);
    auto is_int = [](const std::string& s) { return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos; };
    if (head.size() == 2 && is_int(head[0]) && is_int(head[1])) {
      declared_rows = std::stol(head[0]);
      dim = std::stol(head[1]);
      first = 1;
    }
  }

  std::vector<std::string> words;
  std::vector<std::vector<double>> rows;
  for (std::size_t l = first; l < lines.size(); ++l) {
    const auto f = split(lines[l]);
    if (f.empty()) continue;
    const std::string ctx = where + ":" + std::to_string(l + 1);
    if (dim < 0) dim = static_cast<long>(f.size()) - 1;
    if (static_cast<long>(f.size()) != dim + 1 || dim < 1)
      throw DataError(ctx + ": expected a word and " + std::to_string(dim) + " values");
    std::vector<double> row;
    row.reserve(static_cast<std::size_t>(dim));
    for (std::size_t j = 1; j < f.size(); ++j) row.push_back(io::parse_double(f[j], ctx));
    words.push_back(f[0]);
    rows.push_back(std::move(row));
  }
  if (declared_rows >= 0 && declared_rows != static_cast<long>(rows.size()))
    throw DataError(where + ": header declares " + std::to_string(declared_rows) + " rows, found " +
                    std::to_string(rows.size()));
  if (rows.empty()) throw DataError(where + ": no vectors");
  RowMatrix m(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (long j = 0; j < dim; ++j) m(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
  return WordVectors(std::move(words), std::move(m));
}

inline WordVectors read_vectors(const io::fs::path& path) { return vectors_from_text(io::read_file(path), path.string()); }

// ---------------------------------------------------------------------------
// "b1" sense-table store: {"format":"b1","dim","senses","words"} manifest;
// blob = per word the d x m matrix B (row-major f64), then the V x d
// context matrix (row-major f64).

inline void write_b1(const io::fs::path& manifest_path, const SenseTable& t, const Vocabulary& vocab) {
  if (static_cast<std::size_t>(t.size()) != vocab.size()) throw DataError("write_b1: table and vocabulary sizes differ");
  nlohmann::ordered_json manifest;
  manifest["format"] = "b1";
  manifest["dim"] = t.dim();
  manifest["senses"] = t.senses_per_word();
  std::vector<std::string> words;
  for (const auto& e : vocab.entries()) words.push_back(e.token);
  manifest["words"] = words;

  std::string blob;
  for (const auto& b : t.senses)
    for (Eigen::Index r = 0; r < b.rows(); ++r)
      for (Eigen::Index c = 0; c < b.cols(); ++c) io::append_raw(blob, b(r, c));
  for (Eigen::Index r = 0; r < t.context.rows(); ++r)
    for (Eigen::Index c = 0; c < t.context.cols(); ++c) io::append_raw(blob, t.context(r, c));
  io::atomic_write(io::blob_path_for(manifest_path), blob);
  io::atomic_write(manifest_path, manifest.dump(2) + "\n");
}

struct LoadedSenseTable {
  std::vector<std::string> words;
  SenseTable table;
};

inline LoadedSenseTable read_b1(const io::fs::path& manifest_path) {
  const std::string where = manifest_path.string();
  try {
    const auto manifest = nlohmann::json::parse(io::read_file(manifest_path));
    if (manifest.at("format").get<std::string>() != "b1") throw DataError(where + ": expected format \"b1\"");
    const auto d = manifest.at("dim").get<Eigen::Index>();
    const auto m = manifest.at("senses").get<Eigen::Index>();
    if (d < 1 || m < 1) throw DataError(where + ": dim and senses must be positive");
    LoadedSenseTable out;
    out.words = manifest.at("words").get<std::vector<std::string>>();
    const std::string blob = io::read_file(io::blob_path_for(manifest_path));
    const auto v = static_cast<Eigen::Index>(out.words.size());
    if (blob.size() != static_cast<std::size_t>(v * d * m + v * d) * 8)
      throw DataError(where + ": blob size does not match manifest");
    std::size_t off = 0;
    for (Eigen::Index w = 0; w < v; ++w) {
      Matrix b(d, m);
      for (Eigen::Index r = 0; r < d; ++r)
        for (Eigen::Index c = 0; c < m; ++c, off += 8) b(r, c) = io::read_raw<double>(blob, off);
      out.table.senses.push_back(std::move(b));
    }
    out.table.context.resize(v, d);
    for (Eigen::Index r = 0; r < v; ++r)
      for (Eigen::Index c = 0; c < d; ++c, off += 8) out.table.context(r, c) = io::read_raw<double>(blob, off);
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(where + ": malformed manifest: " + e.what());
  }
}

}  // namespace dmsem
