#include "stylo/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "json.hpp"
#include "stylo/error.hpp"
#include "stylo/rng.hpp"

namespace stylo {

namespace {

float dot_f(std::span<const float> a, std::span<const float> b) {
  float s = 0.0f;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Renormalizes in place; returns false when the vector has zero norm.
bool normalize(std::span<float> v) {
  float norm_sq = 0.0f;
  for (float x : v) norm_sq += x * x;
  if (norm_sq == 0.0f) return false;
  const float inv = 1.0f / std::sqrt(norm_sq);
  for (float& x : v) x *= inv;
  return true;
}

}  // namespace

Clustering spherical_kmeans(const SimilarityIndex& index, std::uint32_t k, std::uint64_t seed,
                            std::uint32_t max_iters) {
  const std::size_t n = index.size();
  if (k < 1) throw Error("kmeans: k must be >= 1");
  if (k > n) {
    throw Error("kmeans: k=" + std::to_string(k) + " exceeds " + std::to_string(n) +
                " fingerprints");
  }
  const std::uint32_t d = index.dim();
  const std::vector<std::string>& keys = index.keys();
  std::vector<std::span<const float>> points(n);
  for (std::size_t i = 0; i < n; ++i) points[i] = index.vector(keys[i]);

  Clustering result;
  result.k = k;
  result.dim = d;
  result.centroids.assign(static_cast<std::size_t>(k) * d, 0.0f);
  auto centroid = [&](std::uint32_t c) {
    return std::span<float>(result.centroids.data() + static_cast<std::size_t>(c) * d, d);
  };

  Rng rng(seed);

  // k-means++ seeding with 1 - cosine as the distance.
  std::vector<double> dist(n, 2.0);
  std::vector<bool> chosen(n, false);
  {
    const std::size_t first = static_cast<std::size_t>(rng.next_below(n));
    std::copy(points[first].begin(), points[first].end(), centroid(0).begin());
    chosen[first] = true;
    for (std::uint32_t c = 1; c < k; ++c) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double dc = 1.0 - static_cast<double>(dot_f(points[i], centroid(c - 1)));
        dist[i] = std::min(dist[i], std::max(0.0, dc));
        if (chosen[i]) dist[i] = 0.0;
        total += dist[i];
      }
      std::size_t pick = n;
      if (total > 0.0) {
        const double x = rng.next_double() * total;
        double running = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          running += dist[i];
          if (x < running) {
            pick = i;
            break;
          }
        }
      }
      if (pick == n) {  // all remaining distances are zero; take the first unchosen
        for (std::size_t i = 0; i < n; ++i) {
          if (!chosen[i]) {
            pick = i;
            break;
          }
        }
      }
      std::copy(points[pick].begin(), points[pick].end(), centroid(c).begin());
      chosen[pick] = true;
    }
  }

  std::vector<std::uint32_t> assign(n, 0);
  std::vector<std::uint32_t> sizes(k, 0);
  std::vector<float> sums(static_cast<std::size_t>(k) * d);

  for (std::uint32_t iter = 0; iter < max_iters; ++iter) {
    // Assignment by maximum cosine; ties go to the lowest cluster id.
    bool changed = false;
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t best = 0;
      float best_sim = dot_f(points[i], centroid(0));
      for (std::uint32_t c = 1; c < k; ++c) {
        const float sim = dot_f(points[i], centroid(c));
        if (sim > best_sim) {
          best_sim = sim;
          best = c;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
      inertia += 1.0 - static_cast<double>(best_sim);
    }
    result.inertia = std::max(0.0, inertia);
    result.inertia_history.push_back(result.inertia);
    result.iterations = iter + 1;
    if (!changed && iter > 0) break;

    // Centroid update: renormalized member mean.
    std::fill(sums.begin(), sums.end(), 0.0f);
    std::fill(sizes.begin(), sizes.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      float* s = sums.data() + static_cast<std::size_t>(assign[i]) * d;
      for (std::uint32_t j = 0; j < d; ++j) s[j] += points[i][j];
      ++sizes[assign[i]];
    }
    for (std::uint32_t c = 0; c < k; ++c) {
      std::span<float> target = centroid(c);
      const float* s = sums.data() + static_cast<std::size_t>(c) * d;
      std::copy(s, s + d, target.begin());
      const bool ok = sizes[c] > 0 && normalize(target);
      if (!ok) {
        // Reseed an empty (or degenerate) cluster to the farthest point.
        std::size_t farthest = 0;
        float worst = 2.0f;
        for (std::size_t i = 0; i < n; ++i) {
          const float sim = dot_f(points[i], centroid(assign[i]));
          if (sim < worst) {
            worst = sim;
            farthest = i;
          }
        }
        std::copy(points[farthest].begin(), points[farthest].end(), target.begin());
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) result.assignments.emplace(keys[i], assign[i]);
  return result;
}

std::vector<ClusterSummaryRow> cluster_report(const Clustering& clustering,
                                              const SimilarityIndex& index,
                                              std::span<const AuthorDocument> documents,
                                              std::size_t top_tokens,
                                              std::uint64_t min_global_count) {
  const std::uint32_t k = clustering.k;
  std::vector<ClusterSummaryRow> rows(k);
  for (std::uint32_t c = 0; c < k; ++c) rows[c].cluster_id = c;

  // Medoids: the member with the highest cosine to its centroid.
  std::vector<float> best_sim(k, -2.0f);
  std::vector<std::string> sorted_keys(index.keys());
  std::sort(sorted_keys.begin(), sorted_keys.end());
  for (const std::string& key : sorted_keys) {
    const std::uint32_t c = clustering.assignments.at(key);
    ++rows[c].size;
    const float sim = dot_f(index.vector(key), clustering.centroid(c));
    if (sim > best_sim[c]) {
      best_sim[c] = sim;
      rows[c].medoid = key;
    }
  }

  if (!documents.empty()) {
    std::unordered_map<std::string, std::uint64_t> global;
    std::vector<std::unordered_map<std::string, std::uint64_t>> per_cluster(k);
    std::uint64_t global_total = 0;
    std::vector<std::uint64_t> cluster_totals(k, 0);
    for (const AuthorDocument& doc : documents) {
      auto it = clustering.assignments.find(doc.key);
      if (it == clustering.assignments.end()) continue;
      const std::uint32_t c = it->second;
      for (const std::string& tok : doc.tokens) {
        ++global[tok];
        ++per_cluster[c][tok];
        ++global_total;
        ++cluster_totals[c];
      }
    }
    for (std::uint32_t c = 0; c < k; ++c) {
      if (cluster_totals[c] == 0) continue;
      std::vector<std::pair<double, std::string>> scored;
      for (const auto& [tok, count] : per_cluster[c]) {
        const std::uint64_t g = global.at(tok);
        if (g < min_global_count) continue;
        const double in_rate =
            static_cast<double>(count) / static_cast<double>(cluster_totals[c]);
        const double g_rate = static_cast<double>(g) / static_cast<double>(global_total);
        scored.emplace_back(in_rate / g_rate, tok);
      }
      std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
      });
      for (std::size_t i = 0; i < std::min(top_tokens, scored.size()); ++i) {
        rows[c].top_tokens.push_back(scored[i].second);
      }
    }
  }
  return rows;
}

void write_assignments_tsv(const Clustering& clustering, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open assignments file for writing: " + path.string());
  std::map<std::string, std::uint32_t> ordered(clustering.assignments.begin(),
                                               clustering.assignments.end());
  for (const auto& [key, cluster] : ordered) out << key << '\t' << cluster << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

std::string cluster_report_to_json(std::span<const ClusterSummaryRow> rows,
                                   const Clustering& clustering) {
  nlohmann::json clusters = nlohmann::json::array();
  for (const ClusterSummaryRow& row : rows) {
    clusters.push_back({{"cluster_id", row.cluster_id},
                        {"size", row.size},
                        {"medoid", row.medoid},
                        {"top_tokens", row.top_tokens}});
  }
  nlohmann::json j{{"k", clustering.k},
                   {"inertia", clustering.inertia},
                   {"iterations", clustering.iterations},
                   {"clusters", std::move(clusters)}};
  return j.dump(2);
}

}  // namespace stylo
