#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "stylo/corpus.hpp"

namespace stylo {

// Synthetic benchmark corpus: every author shares a Zipfian background
// vocabulary, mixed with an author-specific token distribution at rate
// `author_mix`. Deterministic given the seed.
struct SynthConfig {
  std::uint32_t n_authors = 100;
  std::uint32_t posts_per_author = 1000;
  std::uint32_t vocab_shared = 5000;
  std::uint32_t vocab_per_author = 50;
  double zipf_s = 1.07;
  double author_mix = 0.3;       // probability a token is author-specific
  std::uint32_t tokens_per_post = 15;  // +- 1/3 jitter
  double mention_rate = 0.0;     // probability of an extra @mention token
  std::uint32_t years = 1;       // posts spread evenly over consecutive years
  int base_year = 2014;
  std::uint64_t seed = 42;

  void validate() const;
};

std::vector<RawPost> generate_synthetic(const SynthConfig& config);

// JSONL writer for raw posts ({"author","ts","text"} per line).
void write_posts_jsonl(std::span<const RawPost> posts, const std::filesystem::path& path);

}  // namespace stylo
