#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stylo/corpus.hpp"
#include "stylo/index.hpp"
#include "stylo/pvdm.hpp"

namespace stylo {

struct QueryOutcome {
  std::string query_key;
  std::string matched_key;      // rank-1 candidate
  std::size_t true_rank = 0;    // 1-based rank of the true counterpart
  bool positive = false;
  std::uint32_t post_count = 0; // author's total posts behind this query
};

struct EvalReport {
  std::string protocol;
  std::size_t n_authors = 0;  // number of queries
  std::size_t positives = 0;
  double accuracy = 0.0;
  unsigned top_k = 1;
  std::vector<QueryOutcome> outcomes;  // sorted by query key
  std::string config_echo;             // JSON string
  double wall_time_s = 0.0;
};

// The split-half protocol: for each author, query "<id>_A" against every
// other fingerprint (both halves of all other authors plus the author's
// own "_B"); positive when "<id>_B" ranks within the top k. Throws when
// any "_A"/"_B" key lacks its counterpart, listing the offenders.
EvalReport split_half_eval(const SimilarityIndex& index, unsigned k);

// The (user, year) stability protocol on "<id>_<year>" keys: each key with
// at least one strictly earlier-year document in the corpus is queried
// against the earlier-year pool only; positive when rank-1 belongs to the
// same author. Throws when no author spans two years.
EvalReport temporal_eval(const SimilarityIndex& index);

struct SweepEntry {
  std::uint32_t dim = 0;
  std::optional<EvalReport> report;  // empty when training failed
  std::string error;
};

// Trains one model per dimension (same seed and config otherwise) on a
// HalfAB corpus and runs split-half evaluation at k=1. Per-dimension
// failures are recorded, not propagated.
std::vector<SweepEntry> dimension_sweep(std::span<const AuthorDocument> documents,
                                        std::span<const std::uint32_t> dims,
                                        const TrainConfig& base_config, unsigned k = 1);

struct ActivityRow {
  std::uint32_t min_posts = 0;
  std::size_t n_authors = 0;
  std::optional<double> accuracy;  // empty bucket -> no value
};

// Accuracy over the subset of queries whose author has at least
// `threshold` posts, one row per threshold.
std::vector<ActivityRow> activity_breakdown(const EvalReport& report,
                                            std::span<const std::uint32_t> thresholds);

// Report serialization: JSON carries the full per-query detail, the TSV
// holds one summary row per query.
std::string report_to_json(const EvalReport& report);
void write_report_json(const EvalReport& report, const std::filesystem::path& path);
void write_report_tsv(const EvalReport& report, const std::filesystem::path& path);
void write_sweep_tsv(std::span<const SweepEntry> entries, const std::filesystem::path& path);

}  // namespace stylo
