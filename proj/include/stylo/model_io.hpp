#pragma once

#include <filesystem>

#include "stylo/error.hpp"
#include "stylo/pvdm.hpp"

namespace stylo {

enum class ModelIoCode {
  BadMagic,
  VersionMismatch,
  Truncated,
  ChecksumMismatch,
  Io,
};

class ModelIoError : public Error {
 public:
  ModelIoError(ModelIoCode code, const std::string& msg) : Error(msg), code_(code) {}
  ModelIoCode code() const { return code_; }

 private:
  ModelIoCode code_;
};

// Binary model file: magic "PVDM", format version, config block, vocabulary
// block, doc-key block, the three row-major little-endian float32 matrices,
// trailing CRC32 over everything before it.
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

// Text embedding format: first line "<rows> <dim>", then one
// "<key> <v1> ... <vD>" line per vector with round-trip float precision.
// Fingerprints are the unit-normalized author vectors.
enum class ExportWhat { Authors, Words, Fingerprints };
void export_text(const Model& model, const std::filesystem::path& path,
                 ExportWhat what = ExportWhat::Authors);

// CRC-32 (IEEE 802.3 polynomial), used for the model file trailer.
std::uint32_t crc32(const void* data, std::size_t len, std::uint32_t seed = 0);

}  // namespace stylo
