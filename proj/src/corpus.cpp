#include "stylo/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <unordered_map>

#include "json.hpp"
#include "stylo/error.hpp"
#include "stylo/rng.hpp"
#include "stylo/unicode.hpp"

namespace stylo {

namespace {

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_ascii_space(s[b])) ++b;
  while (e > b && is_ascii_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

// Extracts the calendar year from an ISO-8601 timestamp. Returns 0 when
// the year cannot be parsed or is out of range.
int parse_year(std::string_view ts) {
  std::size_t end = 0;
  while (end < ts.size() && std::isdigit(static_cast<unsigned char>(ts[end]))) ++end;
  if (end == 0 || end > 4) return 0;
  if (end < ts.size() && ts[end] != '-') return 0;
  int year = 0;
  for (std::size_t i = 0; i < end; ++i) year = year * 10 + (ts[i] - '0');
  return (year >= 1 && year <= 9999) ? year : 0;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, const TokenizeOptions& opts) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_ascii_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_ascii_space(text[i])) ++i;
    if (i == start) break;
    std::string_view raw = text.substr(start, i - start);
    if (raw.front() == '@') continue;  // mention
    std::string tok = utf8_lower(raw);
    if (opts.drop_rt && tok == "rt") continue;
    tokens.push_back(std::move(tok));
  }
  return tokens;
}

std::vector<TokenizedPost> tokenize_posts(std::span<const RawPost> posts,
                                          const TokenizeOptions& opts) {
  std::vector<TokenizedPost> out;
  out.reserve(posts.size());
  for (const RawPost& p : posts) {
    std::vector<std::string> tokens = tokenize(p.text, opts);
    if (tokens.empty()) continue;  // nothing left after cleaning
    out.push_back(TokenizedPost{trim(p.author_id), p.year, std::move(tokens)});
  }
  return out;
}

std::pair<std::vector<TokenizedPost>, std::vector<TokenizedPost>> split_half(
    std::span<const TokenizedPost> posts, std::uint64_t seed) {
  if (posts.empty()) throw Error("split_half: author has no posts");
  std::vector<std::size_t> order(posts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  shuffle(order, rng);
  const std::size_t cut = (posts.size() + 1) / 2;  // extra post goes to A
  std::pair<std::vector<TokenizedPost>, std::vector<TokenizedPost>> result;
  result.first.reserve(cut);
  result.second.reserve(posts.size() - cut);
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < cut ? result.first : result.second).push_back(posts[order[i]]);
  }
  return result;
}

namespace {

AuthorDocument make_document(std::string key, std::span<const TokenizedPost* const> posts) {
  AuthorDocument doc;
  doc.key = std::move(key);
  doc.post_count = static_cast<std::uint32_t>(posts.size());
  std::size_t total = 0;
  for (const TokenizedPost* p : posts) total += p->tokens.size();
  doc.tokens.reserve(total);
  for (const TokenizedPost* p : posts) {
    doc.tokens.insert(doc.tokens.end(), p->tokens.begin(), p->tokens.end());
  }
  return doc;
}

AuthorDocument make_document(std::string key, std::span<const TokenizedPost> posts) {
  std::vector<const TokenizedPost*> ptrs;
  ptrs.reserve(posts.size());
  for (const TokenizedPost& p : posts) ptrs.push_back(&p);
  return make_document(std::move(key), ptrs);
}

}  // namespace

AggregateResult aggregate(std::span<const TokenizedPost> posts, const SplitPolicy& policy) {
  // Group per author, preserving input order within each group.
  std::unordered_map<std::string, std::vector<const TokenizedPost*>> by_author;
  std::vector<std::string> author_order;
  for (const TokenizedPost& p : posts) {
    auto [it, inserted] = by_author.try_emplace(p.author_id);
    if (inserted) author_order.push_back(p.author_id);
    it->second.push_back(&p);
  }

  AggregateResult result;
  for (const std::string& author : author_order) {
    const auto& group = by_author[author];
    switch (policy.kind) {
      case SplitPolicy::Kind::Whole: {
        AuthorDocument doc = make_document(author, group);
        if (doc.tokens.empty()) {
          ++result.dropped_authors;
          break;
        }
        result.documents.push_back(std::move(doc));
        break;
      }
      case SplitPolicy::Kind::HalfAB: {
        std::vector<TokenizedPost> owned;
        owned.reserve(group.size());
        for (const TokenizedPost* p : group) owned.push_back(*p);
        auto [a, b] = split_half(owned, policy.seed);
        AuthorDocument doc_a = make_document(author + "_A", a);
        AuthorDocument doc_b = make_document(author + "_B", b);
        if (doc_a.tokens.empty() || doc_b.tokens.empty()) {
          ++result.dropped_authors;  // unusable for the protocol
          break;
        }
        result.documents.push_back(std::move(doc_a));
        result.documents.push_back(std::move(doc_b));
        break;
      }
      case SplitPolicy::Kind::ByYear: {
        std::map<int, std::vector<const TokenizedPost*>> by_year;
        for (const TokenizedPost* p : group) by_year[p->year].push_back(p);
        bool emitted = false;
        for (const auto& [year, year_posts] : by_year) {
          AuthorDocument doc = make_document(author + "_" + std::to_string(year), year_posts);
          if (doc.tokens.empty()) continue;
          result.documents.push_back(std::move(doc));
          emitted = true;
        }
        if (!emitted) ++result.dropped_authors;
        break;
      }
    }
  }

  std::sort(result.documents.begin(), result.documents.end(),
            [](const AuthorDocument& x, const AuthorDocument& y) { return x.key < y.key; });
  for (std::size_t i = 1; i < result.documents.size(); ++i) {
    if (result.documents[i].key == result.documents[i - 1].key) {
      throw Error("aggregate: duplicate document key '" + result.documents[i].key +
                  "' (author ids collide with the reserved key suffixes)");
    }
  }
  return result;
}

PostFormat parse_post_format(std::string_view name) {
  if (name == "jsonl") return PostFormat::Jsonl;
  if (name == "tsv") return PostFormat::Tsv;
  throw Error("unknown post format '" + std::string(name) + "' (expected jsonl or tsv)");
}

namespace {

// Returns false when the record is malformed.
bool parse_jsonl_record(const std::string& line, RawPost* post) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return false;
  if (!j.contains("author") || !j["author"].is_string()) return false;
  if (!j.contains("ts") || !j["ts"].is_string()) return false;
  if (!j.contains("text") || !j["text"].is_string()) return false;
  post->author_id = trim(j["author"].get<std::string>());
  post->timestamp = j["ts"].get<std::string>();
  post->text = j["text"].get<std::string>();
  post->year = parse_year(post->timestamp);
  return !post->author_id.empty() && post->year != 0;
}

bool parse_tsv_record(const std::string& line, RawPost* post) {
  std::size_t t1 = line.find('\t');
  if (t1 == std::string::npos) return false;
  std::size_t t2 = line.find('\t', t1 + 1);
  if (t2 == std::string::npos) return false;
  post->author_id = trim(std::string_view(line).substr(0, t1));
  post->timestamp = line.substr(t1 + 1, t2 - t1 - 1);
  post->text = line.substr(t2 + 1);
  post->year = parse_year(post->timestamp);
  return !post->author_id.empty() && post->year != 0;
}

}  // namespace

ReadResult read_posts(const std::filesystem::path& path, PostFormat format) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open input file: " + path.string());
  ReadResult result;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    RawPost post;
    bool ok = format == PostFormat::Jsonl ? parse_jsonl_record(line, &post)
                                          : parse_tsv_record(line, &post);
    if (ok) {
      result.posts.push_back(std::move(post));
    } else {
      ++result.skipped;
    }
  }
  if (result.skipped > result.posts.size()) {
    throw Error("more than 50% malformed records in " + path.string() + " (" +
                std::to_string(result.skipped) + " skipped, " +
                std::to_string(result.posts.size()) + " read)");
  }
  return result;
}

void save_corpus(std::span<const AuthorDocument> documents, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open corpus file for writing: " + path.string());
  for (const AuthorDocument& doc : documents) {
    nlohmann::json j{{"key", doc.key}, {"post_count", doc.post_count}, {"tokens", doc.tokens}};
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<AuthorDocument> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus file: " + path.string());
  std::vector<AuthorDocument> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("key") || !j.contains("tokens")) {
      throw Error("corpus file " + path.string() + ": malformed record at line " +
                  std::to_string(line_no));
    }
    AuthorDocument doc;
    doc.key = j["key"].get<std::string>();
    doc.post_count = j.value("post_count", 1u);
    doc.tokens = j["tokens"].get<std::vector<std::string>>();
    if (doc.key.empty()) {
      throw Error("corpus file " + path.string() + ": empty key at line " + std::to_string(line_no));
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

}  // namespace stylo
