#include "stylo/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"
#include "stylo/error.hpp"
#include "stylo/rng.hpp"

namespace stylo {

namespace {

// Cumulative Zipf weights 1/(i+1)^s over n ranks.
std::vector<double> zipf_cumulative(std::uint32_t n, double s) {
  std::vector<double> cum(n);
  double running = 0.0;
  for (std::uint32_t i = 0; i < n; ++i) {
    running += 1.0 / std::pow(static_cast<double>(i + 1), s);
    cum[i] = running;
  }
  return cum;
}

std::uint32_t draw(const std::vector<double>& cum, Rng& rng) {
  const double x = rng.next_double() * cum.back();
  auto it = std::upper_bound(cum.begin(), cum.end(), x);
  if (it == cum.end()) --it;
  return static_cast<std::uint32_t>(it - cum.begin());
}

}  // namespace

void SynthConfig::validate() const {
  if (n_authors < 1 || posts_per_author < 1 || vocab_shared < 1 || tokens_per_post < 1) {
    throw Error("synth: counts must be >= 1");
  }
  if (years < 1) throw Error("synth: years must be >= 1");
  if (author_mix < 0.0 || author_mix > 1.0) throw Error("synth: author_mix must be in [0,1]");
  if (mention_rate < 0.0 || mention_rate > 1.0) throw Error("synth: mention_rate must be in [0,1]");
  if (!(zipf_s > 0.0)) throw Error("synth: zipf_s must be > 0");
  if (vocab_per_author == 0 && author_mix > 0.0) {
    throw Error("synth: author_mix > 0 requires vocab_per_author >= 1");
  }
}

std::vector<RawPost> generate_synthetic(const SynthConfig& config) {
  config.validate();
  const std::vector<double> shared_cum = zipf_cumulative(config.vocab_shared, config.zipf_s);
  const std::vector<double> author_cum =
      config.vocab_per_author > 0 ? zipf_cumulative(config.vocab_per_author, config.zipf_s)
                                  : std::vector<double>{};

  std::vector<RawPost> posts;
  posts.reserve(static_cast<std::size_t>(config.n_authors) * config.posts_per_author);
  const std::uint32_t jitter = std::max(1u, config.tokens_per_post / 3);

  for (std::uint32_t a = 0; a < config.n_authors; ++a) {
    const std::string author = "u" + std::to_string(a);
    Rng rng(derive_seed(config.seed, a + 1));
    for (std::uint32_t p = 0; p < config.posts_per_author; ++p) {
      const std::uint32_t len =
          config.tokens_per_post - jitter + static_cast<std::uint32_t>(rng.next_below(2 * jitter + 1));
      std::string text;
      for (std::uint32_t t = 0; t < len; ++t) {
        if (!text.empty()) text += ' ';
        if (config.vocab_per_author > 0 && rng.next_double() < config.author_mix) {
          text += "u" + std::to_string(a) + "w" + std::to_string(draw(author_cum, rng));
        } else {
          text += "w" + std::to_string(draw(shared_cum, rng));
        }
      }
      if (config.mention_rate > 0.0 && rng.next_double() < config.mention_rate) {
        text += " @u" + std::to_string(rng.next_below(config.n_authors));
      }
      const int year = config.base_year + static_cast<int>(p % config.years);
      RawPost post;
      post.author_id = author;
      post.year = year;
      post.timestamp = std::to_string(year) + "-06-15T12:00:00Z";
      post.text = std::move(text);
      posts.push_back(std::move(post));
    }
  }
  return posts;
}

void write_posts_jsonl(std::span<const RawPost> posts, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open posts file for writing: " + path.string());
  for (const RawPost& p : posts) {
    nlohmann::json j{{"author", p.author_id}, {"ts", p.timestamp}, {"text", p.text}};
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace stylo
