#pragma once

// "dm1" density-matrix store: a JSON manifest
//   {"format":"dm1","dim":d,"dtype":"f32"|"f64","words":[...]}
// next to a little-endian blob of row-major d x d matrices in word order.

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dmsem/io.hpp"
#include "dmsem/psd_linalg.hpp"

namespace dmsem {

enum class StoreDtype { f32, f64 };

class DensityStore {
 public:
  DensityStore() = default;
  explicit DensityStore(Eigen::Index dim) : dim_(dim) {}

  Eigen::Index dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return words_.size(); }
  bool empty() const noexcept { return words_.empty(); }
  const std::vector<std::string>& words() const noexcept { return words_; }

  /// Adds or replaces `word`; insertion order is the store order.
  void insert(const std::string& word, DensityMatrix m) {
    if (dim_ == 0) dim_ = m.dim();
    if (m.dim() != dim_)
      throw DataError("DensityStore: '" + word + "' has dimension " + std::to_string(m.dim()) +
                      ", store has " + std::to_string(dim_));
    if (auto it = index_.find(word); it != index_.end()) {
      matrices_[it->second] = std::move(m);
      return;
    }
    index_.emplace(word, words_.size());
    words_.push_back(word);
    matrices_.push_back(std::move(m));
  }

  bool contains(const std::string& word) const { return index_.count(word) != 0; }

  const DensityMatrix* find(const std::string& word) const {
    auto it = index_.find(word);
    return it == index_.end() ? nullptr : &matrices_[it->second];
  }

  const DensityMatrix& at(const std::string& word) const {
    if (const auto* m = find(word)) return *m;
    throw OovError({word});
  }

  const DensityMatrix& operator[](std::size_t i) const { return matrices_.at(i); }

 private:
  Eigen::Index dim_ = 0;
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<DensityMatrix> matrices_;
};

inline void write_dm1(const io::fs::path& manifest_path, const DensityStore& store,
                      StoreDtype dtype = StoreDtype::f64) {
  nlohmann::ordered_json manifest;
  manifest["format"] = "dm1";
  manifest["dim"] = store.dim();
  manifest["dtype"] = dtype == StoreDtype::f32 ? "f32" : "f64";
  manifest["words"] = store.words();

  std::string blob;
  const auto d = store.dim();
  blob.reserve(store.size() * static_cast<std::size_t>(d * d) * (dtype == StoreDtype::f32 ? 4 : 8));
  for (std::size_t w = 0; w < store.size(); ++w) {
    const Matrix& m = store[w].data();
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) {
        if (dtype == StoreDtype::f32)
          io::append_raw(blob, static_cast<float>(m(i, j)));
        else
          io::append_raw(blob, m(i, j));
      }
  }
  io::atomic_write(io::blob_path_for(manifest_path), blob);
  io::atomic_write(manifest_path, manifest.dump(2) + "\n");
}

inline DensityStore read_dm1(const io::fs::path& manifest_path) {
  const std::string where = manifest_path.string();
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(io::read_file(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(where + ": invalid JSON manifest: " + e.what());
  }
  try {
    if (manifest.at("format").get<std::string>() != "dm1")
      throw DataError(where + ": expected format \"dm1\"");
    const auto d = manifest.at("dim").get<Eigen::Index>();
    if (d <= 0) throw DataError(where + ": dim must be positive");
    const auto dtype_name = manifest.at("dtype").get<std::string>();
    if (dtype_name != "f32" && dtype_name != "f64")
      throw DataError(where + ": dtype must be f32 or f64");
    const bool f32 = dtype_name == "f32";
    const auto words = manifest.at("words").get<std::vector<std::string>>();

    const std::string blob = io::read_file(io::blob_path_for(manifest_path));
    const std::size_t elem = f32 ? 4 : 8;
    const std::size_t per = static_cast<std::size_t>(d * d) * elem;
    if (blob.size() != per * words.size())
      throw DataError(where + ": blob holds " + std::to_string(blob.size()) + " bytes, expected " +
                      std::to_string(per * words.size()));

    DensityStore store(d);
    for (std::size_t w = 0; w < words.size(); ++w) {
      Matrix m(d, d);
      std::size_t off = w * per;
      for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j, off += elem)
          m(i, j) = f32 ? static_cast<double>(io::read_raw<float>(blob, off)) : io::read_raw<double>(blob, off);
      store.insert(words[w], DensityMatrix(m));
    }
    return store;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(where + ": malformed manifest: " + e.what());
  }
}

}  // namespace dmsem
