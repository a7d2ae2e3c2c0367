#include "stylo/model_io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace stylo {

namespace {

constexpr std::array<char, 4> kMagic = {'P', 'V', 'D', 'M'};
constexpr std::uint32_t kFormatVersion = 1;

std::uint32_t crc_table_entry(std::uint32_t i) {
  std::uint32_t c = i;
  for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
  return c;
}

const std::array<std::uint32_t, 256>& crc_table() {
  static const std::array<std::uint32_t, 256> table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) t[i] = crc_table_entry(i);
    return t;
  }();
  return table;
}

// Streaming writer that tracks the running checksum.
class CrcWriter {
 public:
  explicit CrcWriter(std::ostream& out) : out_(out) {}

  void bytes(const void* data, std::size_t len) {
    crc_ = crc32(data, len, crc_);
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(len));
  }
  void u8(std::uint8_t v) { bytes(&v, 1); }
  void u32(std::uint32_t v) { le(v); }
  void u64(std::uint64_t v) { le(v); }
  void f32(float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    le(bits);
  }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    le(bits);
  }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  void f32_array(std::span<const float> v) {
    if constexpr (std::endian::native == std::endian::little) {
      bytes(v.data(), v.size() * 4);
    } else {
      for (float x : v) f32(x);
    }
  }
  std::uint32_t crc() const { return crc_; }

 private:
  template <class T>
  void le(T v) {
    std::array<std::uint8_t, sizeof(T)> buf;
    for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<std::uint8_t>(v >> (8 * i));
    bytes(buf.data(), buf.size());
  }

  std::ostream& out_;
  std::uint32_t crc_ = 0;
};

class CrcReader {
 public:
  explicit CrcReader(std::istream& in) : in_(in) {}

  void bytes(void* data, std::size_t len) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(len));
    if (static_cast<std::size_t>(in_.gcount()) != len) {
      throw ModelIoError(ModelIoCode::Truncated, "model file is truncated");
    }
    crc_ = crc32(data, len, crc_);
  }
  std::uint8_t u8() {
    std::uint8_t v;
    bytes(&v, 1);
    return v;
  }
  std::uint32_t u32() { return le<std::uint32_t>(); }
  std::uint64_t u64() { return le<std::uint64_t>(); }
  float f32() {
    std::uint32_t bits = le<std::uint32_t>();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }
  double f64() {
    std::uint64_t bits = le<std::uint64_t>();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
  std::string str() {
    std::uint32_t len = u32();
    std::string s(len, '\0');
    bytes(s.data(), len);
    return s;
  }
  void f32_array(std::span<float> v) {
    if constexpr (std::endian::native == std::endian::little) {
      bytes(v.data(), v.size() * 4);
    } else {
      for (float& x : v) x = f32();
    }
  }
  std::uint32_t crc() const { return crc_; }

 private:
  template <class T>
  T le() {
    std::array<std::uint8_t, sizeof(T)> buf;
    bytes(buf.data(), buf.size());
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(buf[i]) << (8 * i);
    return v;
  }

  std::istream& in_;
  std::uint32_t crc_ = 0;
};

}  // namespace

std::uint32_t crc32(const void* data, std::size_t len, std::uint32_t seed) {
  const auto& table = crc_table();
  const auto* p = static_cast<const std::uint8_t*>(data);
  std::uint32_t c = seed ^ 0xFFFFFFFFu;
  for (std::size_t i = 0; i < len; ++i) c = table[(c ^ p[i]) & 0xFF] ^ (c >> 8);
  return c ^ 0xFFFFFFFFu;
}

void save_model(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ModelIoError(ModelIoCode::Io, "cannot open model file for writing: " + path.string());
  CrcWriter w(out);
  w.bytes(kMagic.data(), kMagic.size());
  w.u32(kFormatVersion);

  const TrainConfig& c = model.config;
  w.u32(c.dim);
  w.u32(c.window);
  w.u32(c.negatives);
  w.u32(c.epochs);
  w.f32(c.lr0);
  w.f32(c.lr_min);
  w.f64(c.subsample_t);
  w.u8(c.subsample_enabled ? 1 : 0);
  w.u32(c.min_count);
  w.u64(c.seed);
  w.u32(c.workers);

  const Vocabulary& v = model.vocab;
  w.u32(v.size());
  w.u64(v.total_tokens);
  w.u32(v.min_count);
  for (std::uint32_t id = 0; id < v.size(); ++id) {
    w.str(v.id_to_word[id]);
    w.u64(v.counts[id]);
  }

  w.u32(model.n_docs());
  for (std::uint32_t i = 0; i < model.n_docs(); ++i) {
    w.str(model.doc_keys[i]);
    w.u32(model.doc_post_counts[i]);
  }

  w.f32_array(model.w_in);
  w.f32_array(model.w_out);
  w.f32_array(model.w_doc);

  const std::uint32_t crc = w.crc();
  std::array<char, 4> trailer;
  for (int i = 0; i < 4; ++i) trailer[i] = static_cast<char>((crc >> (8 * i)) & 0xFF);
  out.write(trailer.data(), 4);
  if (!out) throw ModelIoError(ModelIoCode::Io, "write failed: " + path.string());
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelIoError(ModelIoCode::Io, "cannot open model file: " + path.string());
  CrcReader r(in);

  std::array<char, 4> magic;
  r.bytes(magic.data(), magic.size());
  if (magic != kMagic) throw ModelIoError(ModelIoCode::BadMagic, "not a PVDM model file");
  const std::uint32_t version = r.u32();
  if (version != kFormatVersion) {
    throw ModelIoError(ModelIoCode::VersionMismatch,
                       "unsupported model format version " + std::to_string(version));
  }

  Model m;
  TrainConfig& c = m.config;
  c.dim = r.u32();
  c.window = r.u32();
  c.negatives = r.u32();
  c.epochs = r.u32();
  c.lr0 = r.f32();
  c.lr_min = r.f32();
  c.subsample_t = r.f64();
  c.subsample_enabled = r.u8() != 0;
  c.min_count = r.u32();
  c.seed = r.u64();
  c.workers = r.u32();

  Vocabulary& v = m.vocab;
  const std::uint32_t vocab_size = r.u32();
  v.total_tokens = r.u64();
  v.min_count = r.u32();
  v.id_to_word.reserve(vocab_size);
  v.counts.reserve(vocab_size);
  for (std::uint32_t id = 0; id < vocab_size; ++id) {
    v.id_to_word.push_back(r.str());
    v.counts.push_back(r.u64());
    v.word_to_id.emplace(v.id_to_word.back(), id);
  }

  const std::uint32_t n_docs = r.u32();
  m.doc_keys.reserve(n_docs);
  m.doc_post_counts.reserve(n_docs);
  for (std::uint32_t i = 0; i < n_docs; ++i) {
    m.doc_keys.push_back(r.str());
    m.doc_post_counts.push_back(r.u32());
  }

  const std::size_t vd = static_cast<std::size_t>(vocab_size) * c.dim;
  const std::size_t ad = static_cast<std::size_t>(n_docs) * c.dim;
  m.w_in.resize(vd);
  m.w_out.resize(vd);
  m.w_doc.resize(ad);
  r.f32_array(m.w_in);
  r.f32_array(m.w_out);
  r.f32_array(m.w_doc);

  const std::uint32_t computed = r.crc();
  std::array<char, 4> trailer;
  in.read(trailer.data(), 4);
  if (in.gcount() != 4) throw ModelIoError(ModelIoCode::Truncated, "model file is truncated");
  std::uint32_t stored = 0;
  for (int i = 0; i < 4; ++i) {
    stored |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(trailer[i])) << (8 * i);
  }
  if (stored != computed) {
    throw ModelIoError(ModelIoCode::ChecksumMismatch, "model file checksum mismatch");
  }
  return m;
}

void export_text(const Model& model, const std::filesystem::path& path, ExportWhat what) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open export file for writing: " + path.string());
  const std::uint32_t d = model.dim();
  const bool words = what == ExportWhat::Words;
  const std::uint32_t rows = words ? model.vocab.size() : model.n_docs();

  char buf[64];
  std::vector<float> scratch(d);
  out << rows << ' ' << d << '\n';
  for (std::uint32_t i = 0; i < rows; ++i) {
    out << (words ? model.vocab.id_to_word[i] : model.doc_keys[i]);
    std::span<const float> row = words ? model.in_row(i) : model.doc_row(i);
    if (what == ExportWhat::Fingerprints) {
      float norm_sq = 0.0f;
      for (float x : row) norm_sq += x * x;
      if (norm_sq == 0.0f) {
        throw Error("export: zero-norm document vector for key '" + model.doc_keys[i] + "'");
      }
      const float inv = 1.0f / std::sqrt(norm_sq);
      for (std::uint32_t j = 0; j < d; ++j) scratch[j] = row[j] * inv;
      row = scratch;
    }
    for (float x : row) {
      std::snprintf(buf, sizeof(buf), " %.9g", static_cast<double>(x));
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace stylo
