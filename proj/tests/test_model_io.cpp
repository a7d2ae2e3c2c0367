#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "stylo/model_io.hpp"
#include "test_util.hpp"

using namespace stylo;

namespace {

Model trained_model() {
  auto docs = testutil::disjoint_corpus(3, 120, 10, 9);
  TrainConfig config;
  config.dim = 12;
  config.epochs = 2;
  config.min_count = 1;
  config.seed = 4;
  return train(docs, config);
}

}  // namespace

TEST_CASE("crc32 matches the reference check value") {
  const char* s = "123456789";
  CHECK(crc32(s, 9) == 0xCBF43926u);
  CHECK(crc32(s, 0) == 0u);
}

TEST_CASE("model save/load round-trips bit-exactly") {
  testutil::TempDir tmp;
  Model m = trained_model();
  save_model(m, tmp.file("m.pvdm"));
  Model back = load_model(tmp.file("m.pvdm"));

  CHECK(back.w_in == m.w_in);
  CHECK(back.w_out == m.w_out);
  CHECK(back.w_doc == m.w_doc);
  CHECK(back.doc_keys == m.doc_keys);
  CHECK(back.doc_post_counts == m.doc_post_counts);
  CHECK(back.vocab.id_to_word == m.vocab.id_to_word);
  CHECK(back.vocab.counts == m.vocab.counts);
  CHECK(back.vocab.total_tokens == m.vocab.total_tokens);
  CHECK(back.vocab.word_to_id.at(m.vocab.id_to_word[0]) == 0);
  CHECK(back.config.dim == m.config.dim);
  CHECK(back.config.lr0 == m.config.lr0);
  CHECK(back.config.subsample_t == m.config.subsample_t);
  CHECK(back.config.seed == m.config.seed);

  // Saving the loaded model reproduces the same bytes.
  save_model(back, tmp.file("m2.pvdm"));
  CHECK(testutil::read_file(tmp.file("m.pvdm")) == testutil::read_file(tmp.file("m2.pvdm")));
}

TEST_CASE("model loader distinguishes failure modes") {
  testutil::TempDir tmp;
  Model m = trained_model();
  save_model(m, tmp.file("m.pvdm"));
  std::string bytes = testutil::read_file(tmp.file("m.pvdm"));
  REQUIRE(bytes.size() > 64);

  SUBCASE("bad magic") {
    std::string corrupt = bytes;
    corrupt[0] = 'X';
    testutil::write_file(tmp.file("bad.pvdm"), corrupt);
    try {
      load_model(tmp.file("bad.pvdm"));
      FAIL("expected ModelIoError");
    } catch (const ModelIoError& e) {
      CHECK(e.code() == ModelIoCode::BadMagic);
    }
  }

  SUBCASE("version mismatch") {
    std::string corrupt = bytes;
    corrupt[4] = 9;  // format version field
    testutil::write_file(tmp.file("v9.pvdm"), corrupt);
    try {
      load_model(tmp.file("v9.pvdm"));
      FAIL("expected ModelIoError");
    } catch (const ModelIoError& e) {
      CHECK(e.code() == ModelIoCode::VersionMismatch);
    }
  }

  SUBCASE("truncation at several offsets") {
    for (std::size_t keep : {6ul, 40ul, bytes.size() / 2, bytes.size() - 3}) {
      testutil::write_file(tmp.file("t.pvdm"), bytes.substr(0, keep));
      try {
        load_model(tmp.file("t.pvdm"));
        FAIL("expected ModelIoError for keep=" << keep);
      } catch (const ModelIoError& e) {
        CHECK(e.code() == ModelIoCode::Truncated);
      }
    }
  }

  SUBCASE("checksum failure on a flipped payload byte") {
    std::string corrupt = bytes;
    corrupt[bytes.size() / 2] = static_cast<char>(corrupt[bytes.size() / 2] ^ 0x40);
    testutil::write_file(tmp.file("c.pvdm"), corrupt);
    try {
      load_model(tmp.file("c.pvdm"));
      FAIL("expected ModelIoError");
    } catch (const ModelIoError& e) {
      CHECK(e.code() == ModelIoCode::ChecksumMismatch);
    }
  }

  SUBCASE("missing file") {
    try {
      load_model(tmp.file("absent.pvdm"));
      FAIL("expected ModelIoError");
    } catch (const ModelIoError& e) {
      CHECK(e.code() == ModelIoCode::Io);
    }
  }
}

TEST_CASE("text export writes one header plus one line per author vector") {
  testutil::TempDir tmp;
  Model m = trained_model();
  export_text(m, tmp.file("authors.txt"), ExportWhat::Authors);

  std::ifstream in(tmp.file("authors.txt"));
  std::string header;
  REQUIRE(std::getline(in, header));
  std::istringstream hs(header);
  std::size_t rows = 0, dim = 0;
  hs >> rows >> dim;
  CHECK(rows == m.n_docs());
  CHECK(dim == m.dim());

  std::size_t lines = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++lines;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    const auto idx = m.doc_index(key);
    REQUIRE(idx >= 0);
    // Full float precision: parsing back must reproduce the exact values.
    for (std::uint32_t i = 0; i < m.dim(); ++i) {
      std::string num;
      REQUIRE(static_cast<bool>(ls >> num));
      CHECK(std::strtof(num.c_str(), nullptr) == m.doc_row(static_cast<std::uint32_t>(idx))[i]);
    }
  }
  CHECK(lines == m.n_docs());

  export_text(m, tmp.file("words.txt"), ExportWhat::Words);
  std::ifstream win(tmp.file("words.txt"));
  std::getline(win, header);
  std::istringstream ws(header);
  ws >> rows >> dim;
  CHECK(rows == m.vocab.size());
}

TEST_CASE("fingerprint export is unit-normalized") {
  testutil::TempDir tmp;
  Model m = trained_model();
  export_text(m, tmp.file("fp.txt"), ExportWhat::Fingerprints);

  std::ifstream in(tmp.file("fp.txt"));
  std::string line;
  REQUIRE(std::getline(in, line));  // header
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++lines;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    double norm_sq = 0.0, x = 0.0;
    while (ls >> x) norm_sq += x * x;
    CHECK(std::sqrt(norm_sq) == doctest::Approx(1.0).epsilon(1e-6));
  }
  CHECK(lines == m.n_docs());
}
