#pragma once

// Corpus ingestion for the trainers: tokenization, vocabulary, context
// windows, subsampling and unigram^power negative sampling.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dmsem/errors.hpp"
#include "dmsem/io.hpp"

namespace dmsem {

using WordId = std::int32_t;
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits of the engine output.
/// Unlike std::uniform_real_distribution this is identical on every
/// standard library.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Lowercases ASCII, removes ASCII punctuation and splits on whitespace.
inline std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    const auto u = static_cast<unsigned char>(ch);
    if (std::isspace(u)) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else if (u < 0x80 && std::ispunct(u)) {
      continue;
    } else {
      cur.push_back(u < 0x80 ? static_cast<char>(std::tolower(u)) : ch);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

/// One tokenized sentence per non-empty line.
inline std::vector<std::vector<std::string>> read_sentences(std::istream& in) {
  std::vector<std::vector<std::string>> out;
  std::string line;
  while (std::getline(in, line)) {
    auto toks = tokenize(line);
    if (!toks.empty()) out.push_back(std::move(toks));
  }
  return out;
}

inline std::vector<std::vector<std::string>> read_sentences(const io::fs::path& path) {
  std::istringstream in(io::read_file(path));
  return read_sentences(in);
}

struct VocabEntry {
  std::string token;
  std::int64_t count = 0;
};

/// Token -> dense id map ordered by descending count, ties by token.
class Vocabulary {
 public:
  Vocabulary() = default;

  /// Builds from (token, count) pairs; entries are re-sorted.
  explicit Vocabulary(std::vector<VocabEntry> entries) : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(), [](const VocabEntry& a, const VocabEntry& b) {
      return a.count != b.count ? a.count > b.count : a.token < b.token;
    });
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (!index_.emplace(entries_[i].token, static_cast<WordId>(i)).second)
        throw DataError("vocabulary: duplicate token '" + entries_[i].token + "'");
      total_ += entries_[i].count;
    }
  }

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::int64_t total_count() const noexcept { return total_; }
  const std::vector<VocabEntry>& entries() const noexcept { return entries_; }
  const std::string& token(WordId id) const { return entries_.at(static_cast<std::size_t>(id)).token; }
  std::int64_t count(WordId id) const { return entries_.at(static_cast<std::size_t>(id)).count; }

  /// -1 when absent.
  WordId id(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? -1 : it->second;
  }
  bool contains(const std::string& token) const { return index_.count(token) != 0; }

  /// `token<TAB>count` lines in id order.
  std::string to_tsv() const {
    std::string out;
    for (const auto& e : entries_) out += e.token + "\t" + std::to_string(e.count) + "\n";
    return out;
  }

  static Vocabulary from_tsv(std::string_view text, const std::string& where = "vocab") {
    std::vector<VocabEntry> entries;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
      std::size_t nl = text.find('\n', pos);
      if (nl == std::string_view::npos) nl = text.size();
      std::string_view line = text.substr(pos, nl - pos);
      pos = nl + 1;
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (line.empty()) continue;
      const auto tab = line.find('\t');
      if (tab == std::string_view::npos)
        throw DataError(where + ":" + std::to_string(line_no) + ": expected token<TAB>count");
      entries.push_back({std::string(line.substr(0, tab)),
                         io::parse_int<std::int64_t>(line.substr(tab + 1),
                                                     where + ":" + std::to_string(line_no))});
    }
    return Vocabulary(std::move(entries));
  }

 private:
  std::vector<VocabEntry> entries_;
  std::unordered_map<std::string, WordId> index_;
  std::int64_t total_ = 0;
};

/// Counts tokens and drops those seen fewer than `min_count` times.
template <class TokenRange>
Vocabulary build_vocab(const TokenRange& tokens, std::int64_t min_count) {
  std::map<std::string, std::int64_t, std::less<>> counts;
  std::size_t n = 0;
  for (const auto& t : tokens) {
    ++counts[std::string(t)];
    ++n;
  }
  if (n == 0) throw DataError("build_vocab: empty token stream");
  std::vector<VocabEntry> entries;
  for (auto& [tok, c] : counts)
    if (c >= min_count) entries.push_back({tok, c});
  return Vocabulary(std::move(entries));
}

inline Vocabulary build_vocab(const std::vector<std::vector<std::string>>& sentences, std::int64_t min_count) {
  std::vector<std::string_view> flat;
  for (const auto& s : sentences)
    for (const auto& t : s) flat.emplace_back(t);
  return build_vocab(flat, min_count);
}

/// Maps tokens to ids; out-of-vocabulary tokens are dropped.
inline std::vector<std::vector<WordId>> encode(const std::vector<std::vector<std::string>>& sentences,
                                               const Vocabulary& vocab) {
  std::vector<std::vector<WordId>> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) {
    std::vector<WordId> ids;
    ids.reserve(s.size());
    for (const auto& t : s)
      if (WordId id = vocab.id(t); id >= 0) ids.push_back(id);
    out.push_back(std::move(ids));
  }
  return out;
}

struct ContextPair {
  WordId target_id = 0;
  std::vector<WordId> context_ids;
};

/// One pair per position, context truncated at the sentence boundaries.
inline std::vector<ContextPair> context_windows(std::span<const WordId> sentence, int window) {
  if (window < 1) throw UsageError("context_windows: window must be >= 1");
  std::vector<ContextPair> out;
  out.reserve(sentence.size());
  const auto n = static_cast<std::ptrdiff_t>(sentence.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    ContextPair p;
    p.target_id = sentence[static_cast<std::size_t>(i)];
    const auto lo = std::max<std::ptrdiff_t>(0, i - window);
    const auto hi = std::min<std::ptrdiff_t>(n - 1, i + window);
    for (auto j = lo; j <= hi; ++j)
      if (j != i) p.context_ids.push_back(sentence[static_cast<std::size_t>(j)]);
    out.push_back(std::move(p));
  }
  return out;
}

/// Draws ids with probability count^power / sum(count^power).
class NegativeSampler {
 public:
  NegativeSampler(const Vocabulary& vocab, double power, std::uint64_t seed) : rng_(seed) {
    if (vocab.empty()) throw DataError("negative_sampler: empty vocabulary");
    probs_.reserve(vocab.size());
    double total = 0.0;
    for (const auto& e : vocab.entries()) {
      probs_.push_back(std::pow(static_cast<double>(e.count), power));
      total += probs_.back();
    }
    if (!(total > 0.0)) throw DataError("negative_sampler: all counts are zero");
    cumulative_.reserve(probs_.size());
    double run = 0.0;
    for (auto& p : probs_) {
      p /= total;
      run += p;
      cumulative_.push_back(run);
    }
    cumulative_.back() = 1.0;
  }

  double probability(WordId id) const { return probs_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const noexcept { return probs_.size(); }

  WordId operator()() { return draw(rng_); }

  /// Draw using an external engine (one per worker thread).
  WordId draw(Rng& rng) const {
    const double u = uniform01(rng);
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<WordId>(it - cumulative_.begin());
  }

 private:
  std::vector<double> probs_;
  std::vector<double> cumulative_;
  Rng rng_;
};

/// Frequent-word subsampling: keeps a token with probability
/// min(1, sqrt(threshold / relative_frequency)).
class SubsampleFilter {
 public:
  SubsampleFilter(const Vocabulary& vocab, double threshold, std::uint64_t seed) : rng_(seed) {
    if (!(threshold > 0.0)) throw UsageError("subsample_filter: threshold must be > 0");
    keep_.reserve(vocab.size());
    const double total = static_cast<double>(std::max<std::int64_t>(vocab.total_count(), 1));
    for (const auto& e : vocab.entries()) {
      const double f = static_cast<double>(e.count) / total;
      keep_.push_back(f <= threshold ? 1.0 : std::min(1.0, std::sqrt(threshold / f)));
    }
  }

  double keep_probability(WordId id) const { return keep_.at(static_cast<std::size_t>(id)); }

  bool operator()(WordId id) { return keep(id, rng_); }

  bool keep(WordId id, Rng& rng) const {
    const double p = keep_probability(id);
    return p >= 1.0 || uniform01(rng) < p;
  }

 private:
  std::vector<double> keep_;
  Rng rng_;
};

}  // namespace dmsem
