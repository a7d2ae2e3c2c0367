#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace stylo {

// One authored message as read from disk.
struct RawPost {
  std::string author_id;   // nonempty after trimming
  std::string timestamp;   // ISO-8601
  int year = 0;            // extracted from the timestamp
  std::string text;
};

struct TokenizedPost {
  std::string author_id;
  int year = 0;
  std::vector<std::string> tokens;
};

// A keyed token sequence aggregating an author's posts under a split policy.
struct AuthorDocument {
  std::string key;
  std::vector<std::string> tokens;
  std::uint32_t post_count = 0;
};

struct SplitPolicy {
  enum class Kind { Whole, HalfAB, ByYear };
  Kind kind = Kind::Whole;
  std::uint64_t seed = 0;  // used by HalfAB only

  static SplitPolicy whole() { return {Kind::Whole, 0}; }
  static SplitPolicy half_ab(std::uint64_t seed) { return {Kind::HalfAB, seed}; }
  static SplitPolicy by_year() { return {Kind::ByYear, 0}; }
};

struct TokenizeOptions {
  bool drop_rt = false;  // drop exact-token "rt" (retweet marker)
};

// Whitespace-splits, lowercases, and removes tokens starting with '@'.
// Total function: empty input yields an empty sequence.
std::vector<std::string> tokenize(std::string_view text, const TokenizeOptions& opts = {});

// Tokenizes raw posts and drops posts that end up with no tokens.
std::vector<TokenizedPost> tokenize_posts(std::span<const RawPost> posts,
                                          const TokenizeOptions& opts = {});

// Seeded uniform shuffle followed by a ceil/floor cut; A gets the extra
// post when the count is odd. Throws on an empty post list.
std::pair<std::vector<TokenizedPost>, std::vector<TokenizedPost>> split_half(
    std::span<const TokenizedPost> posts, std::uint64_t seed);

struct AggregateResult {
  std::vector<AuthorDocument> documents;  // sorted by key
  std::size_t dropped_authors = 0;        // authors with an empty resulting half
};

// Groups posts into documents under the policy. Post token order is
// preserved and posts concatenate in input order. Throws on duplicate
// resulting keys.
AggregateResult aggregate(std::span<const TokenizedPost> posts, const SplitPolicy& policy);

enum class PostFormat { Jsonl, Tsv };

PostFormat parse_post_format(std::string_view name);

struct ReadResult {
  std::vector<RawPost> posts;
  std::size_t skipped = 0;  // malformed records
};

// Reads posts from JSONL ({"author","ts","text"}) or 3-column TSV.
// Malformed records are skipped and counted; more than 50% malformed
// is treated as a format error.
ReadResult read_posts(const std::filesystem::path& path, PostFormat format);

// Corpus file: one JSON object per line, {"key","post_count","tokens"}.
void save_corpus(std::span<const AuthorDocument> documents, const std::filesystem::path& path);
std::vector<AuthorDocument> load_corpus(const std::filesystem::path& path);

}  // namespace stylo
