#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "stylo/corpus.hpp"
#include "stylo/rng.hpp"

namespace stylo {

// Dense-id vocabulary. Ids run 0..|V|-1 in descending corpus frequency,
// ties broken lexicographically.
struct Vocabulary {
  std::unordered_map<std::string, std::uint32_t> word_to_id;
  std::vector<std::string> id_to_word;
  std::vector<std::uint64_t> counts;
  std::uint64_t total_tokens = 0;  // sum of retained counts
  std::uint32_t min_count = 1;

  std::uint32_t size() const { return static_cast<std::uint32_t>(id_to_word.size()); }

  // Returns the id or -1 when the word is out of vocabulary.
  std::int64_t lookup(const std::string& word) const {
    auto it = word_to_id.find(word);
    return it == word_to_id.end() ? -1 : static_cast<std::int64_t>(it->second);
  }
};

// Retains words with corpus frequency >= min_count. Throws when nothing
// survives the threshold.
Vocabulary build_vocab(std::span<const AuthorDocument> documents, std::uint32_t min_count);

struct SubsamplePolicy {
  double threshold = 1e-3;
  bool enabled = true;

  static SubsamplePolicy disabled() { return {0.0, false}; }
};

// Keep probability for frequent-word subsampling. With z the word's corpus
// frequency: 1 when disabled or z <= t, otherwise (sqrt(z/t)+1)*(t/z),
// clipped to (0, 1].
double keep_probability(std::uint32_t word_id, const Vocabulary& vocab,
                        const SubsamplePolicy& policy);

// Draws negative samples proportionally to counts^0.75 by binary search
// over cumulative weights.
class NegativeSamplingTable {
 public:
  static constexpr double kDistortion = 0.75;

  explicit NegativeSamplingTable(const Vocabulary& vocab);

  std::uint32_t sample(Rng& rng) const;

  // K draws; any draw equal to `exclude` is redrawn.
  void sample_negatives(std::uint32_t k, std::uint32_t exclude, Rng& rng,
                        std::vector<std::uint32_t>& out) const;

  const std::vector<double>& cumulative_weights() const { return cumulative_; }
  double total_weight() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }

 private:
  std::vector<double> cumulative_;
};

// TSV export, "word<TAB>count" sorted by id.
void export_vocab_tsv(const Vocabulary& vocab, const std::filesystem::path& path);

}  // namespace stylo
