#include "stylo/index.hpp"

#include <algorithm>
#include <cmath>

#include "stylo/error.hpp"

namespace stylo {

float cosine(std::span<const float> u, std::span<const float> v) {
  if (u.size() != v.size()) throw Error("cosine: dimension mismatch");
  float dot = 0.0f, nu = 0.0f, nv = 0.0f;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0f || nv == 0.0f) throw Error("cosine: zero vector");
  const float c = dot / (std::sqrt(nu) * std::sqrt(nv));
  return std::clamp(c, -1.0f, 1.0f);
}

SimilarityIndex SimilarityIndex::build(const Model& model) {
  SimilarityIndex index(model.dim());
  for (std::uint32_t i = 0; i < model.n_docs(); ++i) {
    index.add(model.doc_keys[i], model.doc_row(i));
    index.post_counts_.back() = model.doc_post_counts[i];
  }
  return index;
}

void SimilarityIndex::add(const std::string& key, std::span<const float> vector) {
  if (key.empty()) throw Error("index: empty key");
  if (vector.size() != dim_) throw Error("index: dimension mismatch for key '" + key + "'");
  if (key_to_pos_.count(key) > 0) throw Error("index: duplicate key '" + key + "'");
  float norm_sq = 0.0f;
  for (float x : vector) norm_sq += x * x;
  if (norm_sq == 0.0f) throw Error("index: zero-norm vector for key '" + key + "'");
  const float inv = 1.0f / std::sqrt(norm_sq);
  key_to_pos_.emplace(key, keys_.size());
  keys_.push_back(key);
  post_counts_.push_back(0);
  data_.reserve(data_.size() + dim_);
  for (float x : vector) data_.push_back(x * inv);
}

std::span<const float> SimilarityIndex::vector(const std::string& key) const {
  auto it = key_to_pos_.find(key);
  if (it == key_to_pos_.end()) throw Error("index: unknown key '" + key + "'");
  return row(it->second);
}

std::uint32_t SimilarityIndex::post_count(const std::string& key) const {
  auto it = key_to_pos_.find(key);
  if (it == key_to_pos_.end()) throw Error("index: unknown key '" + key + "'");
  return post_counts_[it->second];
}

std::vector<SimilarityHit> SimilarityIndex::most_similar(const std::string& query_key,
                                                         std::size_t k,
                                                         const Filter& accept) const {
  if (k < 1) throw Error("most_similar: k must be >= 1");
  auto it = key_to_pos_.find(query_key);
  if (it == key_to_pos_.end()) throw Error("most_similar: unknown key '" + query_key + "'");
  const std::span<const float> q = row(it->second);

  std::vector<std::size_t> candidates;
  candidates.reserve(keys_.size());
  std::vector<float> scores(keys_.size());
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    if (i == it->second) continue;
    if (accept && !accept(keys_[i])) continue;
    scores[i] = cosine(q, row(i));
    candidates.push_back(i);
  }

  const auto better = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return keys_[a] < keys_[b];
  };
  const std::size_t take = std::min(k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                    candidates.end(), better);

  std::vector<SimilarityHit> hits;
  hits.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    hits.push_back(SimilarityHit{keys_[candidates[i]], scores[candidates[i]]});
  }
  return hits;
}

std::size_t SimilarityIndex::rank_of(const std::string& query_key, const std::string& target_key,
                                     const Filter& accept) const {
  auto qit = key_to_pos_.find(query_key);
  if (qit == key_to_pos_.end()) throw Error("rank_of: unknown key '" + query_key + "'");
  auto tit = key_to_pos_.find(target_key);
  if (tit == key_to_pos_.end()) throw Error("rank_of: unknown key '" + target_key + "'");
  if (qit->second == tit->second) throw Error("rank_of: target equals query");

  const std::span<const float> q = row(qit->second);
  const float target_score = cosine(q, row(tit->second));
  std::size_t rank = 1;
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    if (i == qit->second || i == tit->second) continue;
    if (accept && !accept(keys_[i])) continue;
    const float s = cosine(q, row(i));
    if (s > target_score || (s == target_score && keys_[i] < keys_[tit->second])) ++rank;
  }
  return rank;
}

}  // namespace stylo
