#include "stylo/vocab.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "stylo/error.hpp"

namespace stylo {

Vocabulary build_vocab(std::span<const AuthorDocument> documents, std::uint32_t min_count) {
  if (min_count < 1) throw Error("build_vocab: min_count must be >= 1");
  std::unordered_map<std::string, std::uint64_t> freq;
  for (const AuthorDocument& doc : documents) {
    for (const std::string& tok : doc.tokens) ++freq[tok];
  }

  std::vector<std::pair<std::string, std::uint64_t>> retained;
  retained.reserve(freq.size());
  for (auto& [word, count] : freq) {
    if (count >= min_count) retained.emplace_back(word, count);
  }
  if (retained.empty()) {
    throw Error("build_vocab: no word reaches min_count=" + std::to_string(min_count));
  }
  std::sort(retained.begin(), retained.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  Vocabulary vocab;
  vocab.min_count = min_count;
  vocab.id_to_word.reserve(retained.size());
  vocab.counts.reserve(retained.size());
  for (std::uint32_t id = 0; id < retained.size(); ++id) {
    vocab.word_to_id.emplace(retained[id].first, id);
    vocab.id_to_word.push_back(std::move(retained[id].first));
    vocab.counts.push_back(retained[id].second);
    vocab.total_tokens += retained[id].second;
  }
  return vocab;
}

double keep_probability(std::uint32_t word_id, const Vocabulary& vocab,
                        const SubsamplePolicy& policy) {
  if (!policy.enabled) return 1.0;
  const double z =
      static_cast<double>(vocab.counts.at(word_id)) / static_cast<double>(vocab.total_tokens);
  if (z <= policy.threshold) return 1.0;
  const double p = (std::sqrt(z / policy.threshold) + 1.0) * (policy.threshold / z);
  return std::min(p, 1.0);
}

NegativeSamplingTable::NegativeSamplingTable(const Vocabulary& vocab) {
  cumulative_.reserve(vocab.size());
  double running = 0.0;
  for (std::uint64_t count : vocab.counts) {
    running += std::pow(static_cast<double>(count), kDistortion);
    cumulative_.push_back(running);
  }
}

std::uint32_t NegativeSamplingTable::sample(Rng& rng) const {
  const double x = rng.next_double() * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
  if (it == cumulative_.end()) --it;  // x landed exactly on the total weight
  return static_cast<std::uint32_t>(it - cumulative_.begin());
}

void NegativeSamplingTable::sample_negatives(std::uint32_t k, std::uint32_t exclude, Rng& rng,
                                             std::vector<std::uint32_t>& out) const {
  out.clear();
  out.reserve(k);
  while (out.size() < k) {
    std::uint32_t id = sample(rng);
    if (id == exclude) continue;
    out.push_back(id);
  }
}

void export_vocab_tsv(const Vocabulary& vocab, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open vocab file for writing: " + path.string());
  for (std::uint32_t id = 0; id < vocab.size(); ++id) {
    out << vocab.id_to_word[id] << '\t' << vocab.counts[id] << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace stylo
