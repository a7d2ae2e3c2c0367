#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "stylo/corpus.hpp"
#include "stylo/index.hpp"

namespace stylo {

struct Clustering {
  std::uint32_t k = 0;
  std::unordered_map<std::string, std::uint32_t> assignments;  // key -> cluster id
  std::vector<float> centroids;                                 // k x D, unit rows
  std::uint32_t dim = 0;
  double inertia = 0.0;  // sum of (1 - cosine) to the assigned centroid
  std::vector<double> inertia_history;  // one entry per assignment pass
  std::uint32_t iterations = 0;

  std::span<const float> centroid(std::uint32_t c) const {
    return {centroids.data() + static_cast<std::size_t>(c) * dim, dim};
  }
};

// Spherical k-means over the unit fingerprints: k-means++ seeding,
// assignment by maximum cosine, centroids renormalized means. Empty
// clusters are reseeded to the farthest point. Deterministic given seed.
Clustering spherical_kmeans(const SimilarityIndex& index, std::uint32_t k, std::uint64_t seed,
                            std::uint32_t max_iters = 100);

struct ClusterSummaryRow {
  std::uint32_t cluster_id = 0;
  std::size_t size = 0;
  std::string medoid;                    // member closest to the centroid
  std::vector<std::string> top_tokens;   // highest in-cluster/global frequency ratio
};

// Per-cluster summary. Distinguishing tokens need the corpus documents;
// tokens below `min_global_count` occurrences are ignored.
std::vector<ClusterSummaryRow> cluster_report(const Clustering& clustering,
                                              const SimilarityIndex& index,
                                              std::span<const AuthorDocument> documents,
                                              std::size_t top_tokens = 10,
                                              std::uint64_t min_global_count = 10);

void write_assignments_tsv(const Clustering& clustering, const std::filesystem::path& path);
std::string cluster_report_to_json(std::span<const ClusterSummaryRow> rows,
                                   const Clustering& clustering);

}  // namespace stylo
