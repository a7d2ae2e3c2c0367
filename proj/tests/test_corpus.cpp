#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <set>

#include "stylo/corpus.hpp"
#include "stylo/error.hpp"
#include "stylo/rng.hpp"
#include "test_util.hpp"

using namespace stylo;
using testutil::post;

TEST_CASE("tokenize removes mentions and lowercases") {
  CHECK(tokenize("Hello @bob World") == std::vector<std::string>{"hello", "world"});
  CHECK(tokenize("") == std::vector<std::string>{});
  CHECK(tokenize("Καλημέρα ΚΟΣΜΕ @φίλε") == std::vector<std::string>{"καλημέρα", "κοσμε"});
  CHECK(tokenize("  a\t\tB \n c\r\n") == std::vector<std::string>{"a", "b", "c"});
  CHECK(tokenize("@") == std::vector<std::string>{});
  CHECK(tokenize("@@x @y@z") == std::vector<std::string>{});
  CHECK(tokenize("a@b") == std::vector<std::string>{"a@b"});  // not a leading @
  CHECK(tokenize("http://X.Y #Tag :)") == std::vector<std::string>{"http://x.y", "#tag", ":)"});
}

TEST_CASE("tokenize optionally drops the rt marker") {
  TokenizeOptions keep;
  CHECK(tokenize("RT @x hi", keep) == std::vector<std::string>{"rt", "hi"});
  TokenizeOptions drop;
  drop.drop_rt = true;
  CHECK(tokenize("RT @x hi", drop) == std::vector<std::string>{"hi"});
  CHECK(tokenize("artful rta", drop) == std::vector<std::string>{"artful", "rta"});
}

TEST_CASE("tokenize is idempotent over its own output") {
  Rng rng(99);
  const char* pieces[] = {"Word", "@mention", "ΛΈΞΗ", "x@y", "#tag", "HTTP://a.b", "@", "rt"};
  for (int trial = 0; trial < 300; ++trial) {
    std::string text;
    for (int i = 0; i < 8; ++i) {
      text += pieces[rng.next_below(std::size(pieces))];
      text += rng.next_below(2) == 0 ? " " : "\t";
    }
    auto tokens = tokenize(text);
    std::string joined;
    for (const auto& t : tokens) {
      if (!joined.empty()) joined += ' ';
      joined += t;
    }
    CHECK(tokenize(joined) == tokens);
    for (const auto& t : tokens) {
      CHECK(!t.empty());
      CHECK(t.front() != '@');
    }
  }
}

TEST_CASE("split_half balances sizes") {
  std::vector<TokenizedPost> ten, seven;
  for (int i = 0; i < 10; ++i) ten.push_back(post("u", 2015, {"t" + std::to_string(i)}));
  for (int i = 0; i < 7; ++i) seven.push_back(post("u", 2015, {"t" + std::to_string(i)}));

  auto [a10, b10] = split_half(ten, 1);
  CHECK(a10.size() == 5);
  CHECK(b10.size() == 5);
  auto [a7, b7] = split_half(seven, 77);
  CHECK(a7.size() == 4);  // the extra post goes to A
  CHECK(b7.size() == 3);
}

TEST_CASE("split_half is a seeded deterministic partition") {
  std::vector<TokenizedPost> posts;
  for (int i = 0; i < 100; ++i) posts.push_back(post("u", 2015, {"t" + std::to_string(i)}));

  auto [a1, b1] = split_half(posts, 1234);
  auto [a2, b2] = split_half(posts, 1234);
  REQUIRE(a1.size() == a2.size());
  for (std::size_t i = 0; i < a1.size(); ++i) CHECK(a1[i].tokens == a2[i].tokens);
  for (std::size_t i = 0; i < b1.size(); ++i) CHECK(b1[i].tokens == b2[i].tokens);

  // Disjoint and exhaustive for every n >= 1.
  for (std::size_t n = 1; n <= 40; ++n) {
    std::vector<TokenizedPost> ps;
    for (std::size_t i = 0; i < n; ++i) ps.push_back(post("u", 2015, {"t" + std::to_string(i)}));
    auto [a, b] = split_half(ps, n * 31 + 7);
    CHECK(a.size() + b.size() == n);
    CHECK(a.size() - b.size() <= 1);
    std::set<std::string> seen;
    for (const auto& p : a) seen.insert(p.tokens[0]);
    for (const auto& p : b) seen.insert(p.tokens[0]);
    CHECK(seen.size() == n);
  }
}

TEST_CASE("split_half rejects an empty post list") {
  std::vector<TokenizedPost> none;
  CHECK_THROWS_AS(split_half(none, 1), Error);
}

TEST_CASE("aggregate whole keeps one document per author") {
  std::vector<TokenizedPost> posts{
      post("u1", 2015, {"a", "b"}), post("u2", 2015, {"c"}),
      post("u1", 2016, {"d"}),      post("u3", 2015, {"e"}),
  };
  auto result = aggregate(posts, SplitPolicy::whole());
  REQUIRE(result.documents.size() == 3);
  CHECK(result.dropped_authors == 0);
  CHECK(result.documents[0].key == "u1");
  CHECK(result.documents[0].tokens == std::vector<std::string>{"a", "b", "d"});
  CHECK(result.documents[0].post_count == 2);
  CHECK(result.documents[1].key == "u2");
  CHECK(result.documents[2].key == "u3");

  // Token totals survive aggregation.
  std::size_t in_tokens = 0, out_tokens = 0;
  for (const auto& p : posts) in_tokens += p.tokens.size();
  for (const auto& d : result.documents) out_tokens += d.tokens.size();
  CHECK(in_tokens == out_tokens);
}

TEST_CASE("aggregate half_ab yields paired suffixed keys") {
  std::vector<TokenizedPost> posts;
  for (int a = 0; a < 3; ++a) {
    for (int p = 0; p < 6; ++p) {
      posts.push_back(post("u" + std::to_string(a), 2015, {"t" + std::to_string(p)}));
    }
  }
  auto result = aggregate(posts, SplitPolicy::half_ab(42));
  REQUIRE(result.documents.size() == 6);
  CHECK(result.documents[0].key == "u0_A");
  CHECK(result.documents[1].key == "u0_B");
  CHECK(result.documents[0].post_count == 3);
  CHECK(result.documents[1].post_count == 3);
  CHECK(result.documents[5].key == "u2_B");
}

TEST_CASE("aggregate half_ab drops single-post authors") {
  std::vector<TokenizedPost> posts{
      post("lonely", 2015, {"x"}),
      post("ok", 2015, {"a"}),
      post("ok", 2015, {"b"}),
  };
  auto result = aggregate(posts, SplitPolicy::half_ab(1));
  CHECK(result.documents.size() == 2);
  CHECK(result.dropped_authors == 1);
}

TEST_CASE("aggregate by_year splits on the post year") {
  std::vector<TokenizedPost> posts{
      post("u1", 2015, {"a"}), post("u1", 2016, {"b"}), post("u1", 2015, {"c"}),
  };
  auto result = aggregate(posts, SplitPolicy::by_year());
  REQUIRE(result.documents.size() == 2);
  CHECK(result.documents[0].key == "u1_2015");
  CHECK(result.documents[0].tokens == std::vector<std::string>{"a", "c"});
  CHECK(result.documents[0].post_count == 2);
  CHECK(result.documents[1].key == "u1_2016");
}

TEST_CASE("read_posts parses jsonl and tsv records") {
  testutil::TempDir tmp;

  SUBCASE("jsonl") {
    testutil::write_file(tmp.file("posts.jsonl"),
        "{\"author\": \"u1\", \"ts\": \"2015-03-01T10:00:00Z\", \"text\": \"hi\"}\n");
    auto result = read_posts(tmp.file("posts.jsonl"), PostFormat::Jsonl);
    REQUIRE(result.posts.size() == 1);
    CHECK(result.skipped == 0);
    CHECK(result.posts[0].author_id == "u1");
    CHECK(result.posts[0].year == 2015);
    CHECK(result.posts[0].text == "hi");
  }

  SUBCASE("tsv") {
    testutil::write_file(tmp.file("posts.tsv"), "u1\t2015-03-01T10:00:00Z\thi\n");
    auto result = read_posts(tmp.file("posts.tsv"), PostFormat::Tsv);
    REQUIRE(result.posts.size() == 1);
    CHECK(result.posts[0].author_id == "u1");
    CHECK(result.posts[0].year == 2015);
    CHECK(result.posts[0].text == "hi");
  }

  SUBCASE("malformed records are skipped and counted") {
    testutil::write_file(tmp.file("mixed.jsonl"),
        "{\"author\": \"u1\", \"ts\": \"2015-01-01T00:00:00Z\", \"text\": \"a\"}\n"
        "not json at all\n"
        "{\"author\": \"u2\", \"ts\": \"2016-01-01T00:00:00Z\", \"text\": \"b\"}\n");
    auto result = read_posts(tmp.file("mixed.jsonl"), PostFormat::Jsonl);
    CHECK(result.posts.size() == 2);
    CHECK(result.skipped == 1);
  }

  SUBCASE("mostly-malformed input is a format error") {
    testutil::write_file(tmp.file("bad.jsonl"),
        "{\"author\": \"u1\", \"ts\": \"2015-01-01T00:00:00Z\", \"text\": \"a\"}\n"
        "junk1\njunk2\n");
    CHECK_THROWS_AS(read_posts(tmp.file("bad.jsonl"), PostFormat::Jsonl), Error);
  }

  SUBCASE("missing file is an io error") {
    CHECK_THROWS_AS(read_posts(tmp.file("nope.jsonl"), PostFormat::Jsonl), IoError);
  }

  SUBCASE("bad timestamps and blank authors are malformed") {
    testutil::write_file(tmp.file("odd.tsv"),
        "u1\tnot-a-date\thello\n"
        "  \t2015-01-01T00:00:00Z\thello\n"
        "u2\t2015-01-01T00:00:00Z\tfine\n"
        "u3\t2016-02-02T00:00:00Z\tfine too\n");
    auto result = read_posts(tmp.file("odd.tsv"), PostFormat::Tsv);
    CHECK(result.posts.size() == 2);
    CHECK(result.skipped == 2);
  }
}

TEST_CASE("tokenize_posts drops posts that clean to nothing") {
  std::vector<RawPost> raw(3);
  raw[0] = {"u1", "2015-01-01T00:00:00Z", 2015, "Hello there"};
  raw[1] = {"u1", "2015-01-01T00:00:00Z", 2015, "@only @mentions"};
  raw[2] = {" u2 ", "2016-01-01T00:00:00Z", 2016, "Fine"};
  auto tokenized = tokenize_posts(raw);
  REQUIRE(tokenized.size() == 2);
  CHECK(tokenized[0].tokens == std::vector<std::string>{"hello", "there"});
  CHECK(tokenized[1].author_id == "u2");  // trimmed
}

TEST_CASE("corpus files round-trip") {
  testutil::TempDir tmp;
  std::vector<AuthorDocument> docs{
      {"u1_A", {"a", "b", "καλημέρα"}, 2},
      {"u1_B", {"c"}, 1},
  };
  save_corpus(docs, tmp.file("c.jsonl"));
  auto back = load_corpus(tmp.file("c.jsonl"));
  REQUIRE(back.size() == 2);
  CHECK(back[0].key == docs[0].key);
  CHECK(back[0].tokens == docs[0].tokens);
  CHECK(back[0].post_count == 2);
  CHECK(back[1].post_count == 1);

  testutil::write_file(tmp.file("broken.jsonl"), "{\"nope\": 1}\n");
  CHECK_THROWS_AS(load_corpus(tmp.file("broken.jsonl")), Error);
}
