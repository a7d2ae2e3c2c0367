#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "stylo/pvdm.hpp"

namespace stylo {

// u.v / (|u||v|), clamped to [-1, 1]. Throws on a zero vector.
float cosine(std::span<const float> u, std::span<const float> v);

struct SimilarityHit {
  std::string key;
  float score = 0.0f;
};

// Unit-normalized author fingerprints with exact top-k cosine retrieval.
// Ties break by ascending key; immutable after construction.
class SimilarityIndex {
 public:
  using Filter = std::function<bool(const std::string& key)>;

  // One fingerprint per document key, L2-normalized from W_doc. Throws
  // when a document vector has zero norm, naming the key.
  static SimilarityIndex build(const Model& model);

  SimilarityIndex(std::uint32_t dim) : dim_(dim) {}

  // Normalizes and stores a copy; throws on duplicate key or zero norm.
  void add(const std::string& key, std::span<const float> vector);

  std::size_t size() const { return keys_.size(); }
  std::uint32_t dim() const { return dim_; }
  const std::vector<std::string>& keys() const { return keys_; }
  bool contains(const std::string& key) const { return key_to_pos_.count(key) > 0; }
  std::span<const float> vector(const std::string& key) const;

  // Exact top-k by descending cosine over all fingerprints except the
  // query itself. `accept` further restricts the candidate pool.
  std::vector<SimilarityHit> most_similar(const std::string& query_key, std::size_t k,
                                          const Filter& accept = nullptr) const;

  // 1-based rank of `target_key` in the full ranking for `query_key`
  // (same ordering and pool as most_similar).
  std::size_t rank_of(const std::string& query_key, const std::string& target_key,
                      const Filter& accept = nullptr) const;

  // Post count carried over from the model, 0 when unknown.
  std::uint32_t post_count(const std::string& key) const;

 private:
  std::span<const float> row(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }

  std::uint32_t dim_;
  std::vector<std::string> keys_;
  std::vector<std::uint32_t> post_counts_;
  std::vector<float> data_;
  std::unordered_map<std::string, std::size_t> key_to_pos_;
};

}  // namespace stylo
