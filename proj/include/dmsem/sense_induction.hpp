#pragma once

// Density matrices without matrix-valued training: cluster the vectors of
// the words a target co-occurs with and mix the cluster centroids, or mix
// dimensionality-reduced contextual token vectors.

#include <algorithm>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dmsem/corpus.hpp"
#include "dmsem/psd_linalg.hpp"
#include "dmsem/trainers.hpp"

namespace dmsem {

struct ContextSet {
  std::string word;
  std::vector<Vector> instances;
  /// Context word of each instance (parallel to `instances`).
  std::vector<std::string> context_words;
  /// Co-occurrence count of each instance's context word (1 per occurrence mode).
  std::vector<std::int64_t> counts;
};

enum class ContextCollection { types, occurrences };

/// Vectors of the words co-occurring with `word` within `window` positions.
/// In `types` mode each context word contributes once (sorted by word);
/// in `occurrences` mode once per co-occurrence, in corpus order. Context
/// words without a vector are skipped.
inline ContextSet collect_contexts(const std::vector<std::vector<std::string>>& sentences, const WordVectors& vectors,
                                   const std::string& word, int window,
                                   ContextCollection mode = ContextCollection::types) {
  if (window < 1) throw UsageError("collect_contexts: window must be >= 1");
  ContextSet out;
  out.word = word;
  std::map<std::string, std::int64_t> types;
  bool seen = false;
  for (const auto& s : sentences) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] != word) continue;
      seen = true;
      const std::size_t lo = i >= static_cast<std::size_t>(window) ? i - static_cast<std::size_t>(window) : 0;
      const std::size_t hi = std::min(s.size() - 1, i + static_cast<std::size_t>(window));
      for (std::size_t j = lo; j <= hi; ++j) {
        if (j == i || !vectors.contains(s[j])) continue;
        if (mode == ContextCollection::types) {
          ++types[s[j]];
        } else {
          out.instances.push_back(*vectors.find(s[j]));
          out.context_words.push_back(s[j]);
          out.counts.push_back(1);
        }
      }
    }
  }
  if (!seen) throw DataError("collect_contexts: '" + word + "' does not occur in the corpus");
  for (const auto& [w, c] : types) {
    out.instances.push_back(*vectors.find(w));
    out.context_words.push_back(w);
    out.counts.push_back(c);
  }
  if (out.instances.empty()) throw DataError("collect_contexts: '" + word + "' has no context words with vectors");
  return out;
}

/// Keeps the `max_instances` most frequent context words (ties by word).
inline ContextSet truncate_contexts(ContextSet ctx, std::size_t max_instances) {
  if (ctx.instances.size() <= max_instances) return ctx;
  std::vector<std::size_t> order(ctx.instances.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ctx.counts[a] != ctx.counts[b] ? ctx.counts[a] > ctx.counts[b] : ctx.context_words[a] < ctx.context_words[b];
  });
  order.resize(max_instances);
  std::sort(order.begin(), order.end());
  ContextSet out;
  out.word = ctx.word;
  for (std::size_t i : order) {
    out.instances.push_back(std::move(ctx.instances[i]));
    out.context_words.push_back(std::move(ctx.context_words[i]));
    out.counts.push_back(ctx.counts[i]);
  }
  return out;
}

enum class Linkage { average, single, complete };
enum class Distance { cosine, euclidean };

struct ClusterOptions {
  int k_min = 2;
  int k_max = 10;
  Linkage linkage = Linkage::average;
  Distance distance = Distance::cosine;
};

struct Cluster {
  Vector centroid;
  std::size_t size = 0;
  std::vector<std::size_t> members;  // indices into the input points
};

struct ClusterResult {
  int k = 0;
  std::vector<Cluster> clusters;
  std::vector<double> merge_distances;  // ascending, n - 1 entries
};

namespace detail {

inline double point_distance(const Vector& a, const Vector& b, Distance d) {
  if (d == Distance::euclidean) return (a - b).norm();
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return (na == 0.0 && nb == 0.0) ? 0.0 : 1.0;
  return std::max(0.0, 1.0 - a.dot(b) / (na * nb));
}

struct Merge {
  std::size_t a;
  std::size_t b;
  double distance;
};

/// Nearest-neighbour-chain agglomeration over a full distance matrix.
/// Slots are reused: a merged cluster lives in the smaller slot index.
inline std::vector<Merge> nn_chain(Matrix dist, Linkage linkage) {
  const std::size_t n = static_cast<std::size_t>(dist.rows());
  std::vector<bool> active(n, true);
  std::vector<double> size(n, 1.0);
  std::vector<std::size_t> chain;
  std::vector<Merge> merges;
  merges.reserve(n > 0 ? n - 1 : 0);
  std::size_t remaining = n;

  while (remaining > 1) {
    if (chain.empty()) {
      for (std::size_t i = 0; i < n; ++i)
        if (active[i]) {
          chain.push_back(i);
          break;
        }
    }
    const std::size_t a = chain.back();
    const std::size_t prev = chain.size() >= 2 ? chain[chain.size() - 2] : n;
    std::size_t b = n;
    double best = std::numeric_limits<double>::infinity();
    if (prev != n) {
      b = prev;
      best = dist(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(prev));
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (!active[j] || j == a) continue;
      const double dj = dist(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(j));
      if (dj < best) {
        best = dj;
        b = j;
      }
    }
    if (b == prev) {
      chain.pop_back();
      chain.pop_back();
      const std::size_t keep = std::min(a, b);
      const std::size_t drop = std::max(a, b);
      merges.push_back({keep, drop, best});
      for (std::size_t k = 0; k < n; ++k) {
        if (!active[k] || k == keep || k == drop) continue;
        const auto K = static_cast<Eigen::Index>(k);
        const double dk = dist(static_cast<Eigen::Index>(keep), K);
        const double ek = dist(static_cast<Eigen::Index>(drop), K);
        double v = 0.0;
        switch (linkage) {
          case Linkage::average: v = (size[keep] * dk + size[drop] * ek) / (size[keep] + size[drop]); break;
          case Linkage::single: v = std::min(dk, ek); break;
          case Linkage::complete: v = std::max(dk, ek); break;
        }
        dist(static_cast<Eigen::Index>(keep), K) = v;
        dist(K, static_cast<Eigen::Index>(keep)) = v;
      }
      size[keep] += size[drop];
      active[drop] = false;
      --remaining;
    } else {
      chain.push_back(b);
    }
  }
  return merges;
}

inline std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) x = parent[x] = parent[parent[x]];
  return x;
}

}  // namespace detail

/// Hierarchical agglomerative clustering; k in [k_min, k_max] is chosen at
/// the largest jump in the merge-distance sequence, normalized by the final
/// merge distance (smallest k on ties).
inline ClusterResult agglomerative_cluster(std::span<const Vector> points, const ClusterOptions& opt = {}) {
  const std::size_t n = points.size();
  if (n < 2) throw DataError("agglomerative_cluster: need at least 2 points, got " + std::to_string(n));
  if (opt.k_min < 1 || opt.k_max < opt.k_min) throw UsageError("agglomerative_cluster: need 1 <= k_min <= k_max");
  const Eigen::Index d = points[0].size();
  for (const auto& p : points) {
    if (p.size() != d) throw DataError("agglomerative_cluster: points have different dimensions");
    if (!p.allFinite()) throw NumericError("agglomerative_cluster: non-finite point");
  }

  // Canonical order: lexicographic by coordinates, so results do not
  // depend on input order.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(points[a].begin(), points[a].end(), points[b].begin(), points[b].end());
  });

  Matrix dist(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = detail::point_distance(points[order[i]], points[order[j]], opt.distance);
      dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      dist(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  }

  auto merges = detail::nn_chain(std::move(dist), opt.linkage);
  std::stable_sort(merges.begin(), merges.end(),
                   [](const detail::Merge& x, const detail::Merge& y) { return x.distance < y.distance; });

  ClusterResult out;
  for (const auto& m : merges) out.merge_distances.push_back(m.distance);

  const int k_hi = std::min<int>(opt.k_max, static_cast<int>(n));
  const int k_lo = std::min(opt.k_min, k_hi);
  const auto& h = out.merge_distances;
  const double h_max = h.back();
  int best_k = k_lo;
  double best_gap = -1.0;
  for (int k = k_lo; k <= k_hi; ++k) {
    double gap = 0.0;
    if (k >= 2 && h_max > 0.0) {
      const std::size_t next = n - static_cast<std::size_t>(k);
      const double before = next > 0 ? h[next - 1] : 0.0;
      gap = (h[next] - before) / h_max;
    }
    if (gap > best_gap) {
      best_gap = gap;
      best_k = k;
    }
  }
  out.k = best_k;

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  for (std::size_t m = 0; m < n - static_cast<std::size_t>(best_k); ++m) {
    const std::size_t ra = detail::find_root(parent, merges[m].a);
    const std::size_t rb = detail::find_root(parent, merges[m].b);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  // Clusters ordered by their first member in canonical order.
  std::map<std::size_t, std::size_t> slot;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = detail::find_root(parent, i);
    auto [it, fresh] = slot.emplace(r, out.clusters.size());
    if (fresh) out.clusters.push_back(Cluster{Vector::Zero(d), 0, {}});
    Cluster& c = out.clusters[it->second];
    c.centroid += points[order[i]];
    ++c.size;
    c.members.push_back(order[i]);
  }
  for (auto& c : out.clusters) c.centroid /= static_cast<double>(c.size);
  return out;
}

/// Mixture of unit-normalized cluster centroids weighted by cluster size.
inline DensityMatrix context2dm(const ContextSet& ctx, const ClusterOptions& opt = {}) {
  const ClusterResult res = agglomerative_cluster(ctx.instances, opt);
  std::vector<WeightedVector> parts;
  for (const auto& c : res.clusters) {
    const double nrm = c.centroid.norm();
    if (nrm > 0.0) parts.push_back({c.centroid / nrm, static_cast<double>(c.size)});
  }
  if (parts.empty()) throw NumericError("context2dm: every cluster centroid of '" + ctx.word + "' is zero");
  return build_density(parts);
}

// ---------------------------------------------------------------------------
// Dimensionality reduction

enum class ReduceMethod { pca, svd };

inline const char* to_string(ReduceMethod m) { return m == ReduceMethod::pca ? "pca" : "svd"; }
inline ReduceMethod reduce_method_from_string(const std::string& s) {
  if (s == "pca") return ReduceMethod::pca;
  if (s == "svd") return ReduceMethod::svd;
  throw UsageError("unknown reduction method '" + s + "' (expected pca or svd)");
}

/// Linear projection onto the leading right singular vectors of the
/// (mean-centered, for PCA) instance matrix.
struct Reducer {
  ReduceMethod method = ReduceMethod::pca;
  Vector mean;  // zero for svd
  Matrix axes;  // d_in x d_out, orthonormal columns

  Vector apply(const Vector& x) const {
    if (x.size() != axes.rows()) throw DataError("reducer: input dimension mismatch");
    return axes.transpose() * (x - mean);
  }
};

inline Reducer fit_reducer(std::span<const Vector> instances, ReduceMethod method, Eigen::Index d_out) {
  if (instances.empty()) throw DataError("reduce_dimensions: no instances");
  const Eigen::Index d = instances[0].size();
  if (d_out < 1 || d_out > d)
    throw DataError("reduce_dimensions: output dimension " + std::to_string(d_out) + " not in [1, " +
                    std::to_string(d) + "]");
  Matrix x(static_cast<Eigen::Index>(instances.size()), d);
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (instances[i].size() != d) throw DataError("reduce_dimensions: instances have different dimensions");
    x.row(static_cast<Eigen::Index>(i)) = instances[i].transpose();
  }
  if (!x.allFinite()) throw NumericError("reduce_dimensions: non-finite input");

  Reducer r;
  r.method = method;
  r.mean = method == ReduceMethod::pca ? Vector(x.colwise().mean().transpose()) : Vector::Zero(d);
  x.rowwise() -= r.mean.transpose();
  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeFullV);
  r.axes = svd.matrixV().leftCols(d_out);
  for (Eigen::Index c = 0; c < d_out; ++c) {
    Eigen::Index arg = 0;
    double big = -1.0;
    for (Eigen::Index i = 0; i < d; ++i)
      if (std::abs(r.axes(i, c)) > big + 1e-12) {
        big = std::abs(r.axes(i, c));
        arg = i;
      }
    if (r.axes(arg, c) < 0.0) r.axes.col(c) *= -1.0;
  }
  return r;
}

inline std::vector<Vector> reduce_dimensions(std::span<const Vector> instances, ReduceMethod method, Eigen::Index d_out) {
  const Reducer r = fit_reducer(instances, method, d_out);
  std::vector<Vector> out;
  out.reserve(instances.size());
  for (const auto& v : instances) out.push_back(r.apply(v));
  return out;
}

/// Uniform mixture of the unit-normalized reduced instances.
inline DensityMatrix contextual2dm(std::span<const Vector> instances, const Reducer& reducer) {
  if (instances.empty()) throw DataError("contextual2dm: no instances");
  std::vector<WeightedVector> parts;
  for (const auto& v : instances) {
    Vector y = reducer.apply(v);
    const double nrm = y.norm();
    if (nrm > 0.0) parts.push_back({y / nrm, 1.0});
  }
  if (parts.empty()) throw NumericError("contextual2dm: every reduced instance is zero");
  return build_density(parts);
}

inline DensityMatrix contextual2dm(std::span<const Vector> instances, ReduceMethod method, Eigen::Index d_out) {
  if (instances.empty()) throw DataError("contextual2dm: no instances");
  return contextual2dm(instances, fit_reducer(instances, method, d_out));
}

/// Contextual token vectors, JSONL `{"word": ..., "vector": [...]}`, grouped
/// by word in first-appearance order.
struct ContextualInstances {
  std::vector<std::string> words;
  std::map<std::string, std::vector<Vector>> by_word;

  std::vector<Vector> all() const {
    std::vector<Vector> out;
    for (const auto& w : words)
      for (const auto& v : by_word.at(w)) out.push_back(v);
    return out;
  }
};

inline ContextualInstances parse_contextual_instances(std::string_view text, const std::string& where = "instances") {
  ContextualInstances out;
  Eigen::Index dim = -1;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string ctx = where + ":" + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(ctx + ": invalid JSON: " + e.what());
    }
    if (!j.is_object() || !j.contains("word") || !j["word"].is_string())
      throw DataError(ctx + ": missing string field 'word'");
    if (!j.contains("vector") || !j["vector"].is_array()) throw DataError(ctx + ": missing array field 'vector'");
    const auto& arr = j["vector"];
    Vector v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_number()) throw DataError(ctx + ": non-numeric vector entry");
      v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
    }
    if (dim < 0) dim = v.size();
    if (v.size() != dim || dim == 0) throw DataError(ctx + ": vector dimension " + std::to_string(v.size()) +
                                                     " differs from " + std::to_string(dim));
    const auto word = j["word"].get<std::string>();
    auto [it, fresh] = out.by_word.try_emplace(word);
    if (fresh) out.words.push_back(word);
    it->second.push_back(std::move(v));
  }
  if (out.words.empty()) throw DataError(where + ": no instances");
  return out;
}

}  // namespace dmsem
