#include "stylo/eval.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "stylo/error.hpp"

namespace stylo {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Splits "<id>_<year>"; returns false when the tail is not an integer year.
bool parse_year_key(const std::string& key, std::string* id, int* year) {
  const std::size_t pos = key.rfind('_');
  if (pos == std::string::npos || pos + 1 >= key.size()) return false;
  int y = 0;
  for (std::size_t i = pos + 1; i < key.size(); ++i) {
    const char c = key[i];
    if (c < '0' || c > '9') return false;
    y = y * 10 + (c - '0');
  }
  *id = key.substr(0, pos);
  *year = y;
  return true;
}

}  // namespace

EvalReport split_half_eval(const SimilarityIndex& index, unsigned k) {
  if (k < 1) throw Error("split_half_eval: k must be >= 1");
  const auto start = Clock::now();

  std::vector<std::string> authors;
  std::vector<std::string> offenders;
  for (const std::string& key : index.keys()) {
    if (ends_with(key, "_A")) {
      const std::string id = key.substr(0, key.size() - 2);
      if (index.contains(id + "_B")) {
        authors.push_back(id);
      } else {
        offenders.push_back(key);
      }
    } else if (ends_with(key, "_B")) {
      if (!index.contains(key.substr(0, key.size() - 2) + "_A")) offenders.push_back(key);
    } else {
      offenders.push_back(key);
    }
  }
  if (!offenders.empty()) {
    std::sort(offenders.begin(), offenders.end());
    std::string msg = "split_half_eval: unpaired keys:";
    for (const std::string& o : offenders) msg += " " + o;
    throw Error(msg);
  }
  if (authors.empty()) throw Error("split_half_eval: no _A/_B pairs in the index");
  std::sort(authors.begin(), authors.end());

  EvalReport report;
  report.protocol = "split_half";
  report.top_k = k;
  for (const std::string& id : authors) {
    const std::string query = id + "_A";
    const std::string truth = id + "_B";
    QueryOutcome o;
    o.query_key = query;
    o.true_rank = index.rank_of(query, truth);
    o.matched_key = index.most_similar(query, 1).front().key;
    o.positive = o.true_rank <= k;
    o.post_count = index.post_count(query) + index.post_count(truth);
    if (o.positive) ++report.positives;
    report.outcomes.push_back(std::move(o));
  }
  report.n_authors = authors.size();
  report.accuracy = static_cast<double>(report.positives) / static_cast<double>(report.n_authors);
  report.wall_time_s = seconds_since(start);
  return report;
}

EvalReport temporal_eval(const SimilarityIndex& index) {
  const auto start = Clock::now();

  struct KeyInfo {
    std::string id;
    int year = 0;
  };
  std::unordered_map<std::string, KeyInfo> info;
  std::unordered_map<std::string, std::unordered_set<int>> years_per_author;
  for (const std::string& key : index.keys()) {
    KeyInfo ki;
    if (!parse_year_key(key, &ki.id, &ki.year)) {
      throw Error("temporal_eval: key '" + key + "' is not of the form <id>_<year>");
    }
    years_per_author[ki.id].insert(ki.year);
    info.emplace(key, std::move(ki));
  }
  bool any_multi_year = false;
  for (const auto& [id, years] : years_per_author) {
    if (years.size() >= 2) {
      any_multi_year = true;
      break;
    }
  }
  if (!any_multi_year) throw Error("temporal_eval: no author has documents in two years");

  std::vector<std::string> queries(index.keys());
  std::sort(queries.begin(), queries.end());

  EvalReport report;
  report.protocol = "temporal";
  report.top_k = 1;
  for (const std::string& query : queries) {
    const KeyInfo& qi = info.at(query);
    const auto earlier = [&](const std::string& key) { return info.at(key).year < qi.year; };
    bool pool_nonempty = false;
    for (const auto& [key, ki] : info) {
      if (ki.year < qi.year) {
        pool_nonempty = true;
        break;
      }
    }
    if (!pool_nonempty) continue;

    QueryOutcome o;
    o.query_key = query;
    o.post_count = index.post_count(query);
    o.matched_key = index.most_similar(query, 1, earlier).front().key;
    o.positive = info.at(o.matched_key).id == qi.id;

    // Rank of the best earlier document by the same author, when one exists.
    std::size_t best_rank = 0;
    for (const auto& [key, ki] : info) {
      if (ki.id != qi.id || ki.year >= qi.year) continue;
      const std::size_t r = index.rank_of(query, key, earlier);
      if (best_rank == 0 || r < best_rank) best_rank = r;
    }
    o.true_rank = best_rank;
    if (o.positive) ++report.positives;
    report.outcomes.push_back(std::move(o));
  }
  if (report.outcomes.empty()) throw Error("temporal_eval: no query has an earlier-year pool");
  report.n_authors = report.outcomes.size();
  report.accuracy = static_cast<double>(report.positives) / static_cast<double>(report.n_authors);
  report.wall_time_s = seconds_since(start);
  return report;
}

std::vector<SweepEntry> dimension_sweep(std::span<const AuthorDocument> documents,
                                        std::span<const std::uint32_t> dims,
                                        const TrainConfig& base_config, unsigned k) {
  if (dims.empty()) throw Error("dimension_sweep: dims must be nonempty");
  std::vector<SweepEntry> entries;
  entries.reserve(dims.size());
  for (std::uint32_t d : dims) {
    SweepEntry entry;
    entry.dim = d;
    try {
      TrainConfig config = base_config;
      config.dim = d;
      Model model = train(documents, config);
      SimilarityIndex index = SimilarityIndex::build(model);
      entry.report = split_half_eval(index, k);
      entry.report->config_echo = nlohmann::json{{"dim", d}, {"k", k}}.dump();
    } catch (const std::exception& e) {
      entry.error = e.what();
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::vector<ActivityRow> activity_breakdown(const EvalReport& report,
                                            std::span<const std::uint32_t> thresholds) {
  std::vector<ActivityRow> rows;
  rows.reserve(thresholds.size());
  for (std::uint32_t threshold : thresholds) {
    ActivityRow row;
    row.min_posts = threshold;
    std::size_t positives = 0;
    for (const QueryOutcome& o : report.outcomes) {
      if (o.post_count < threshold) continue;
      ++row.n_authors;
      if (o.positive) ++positives;
    }
    if (row.n_authors > 0) {
      row.accuracy = static_cast<double>(positives) / static_cast<double>(row.n_authors);
    }
    rows.push_back(row);
  }
  return rows;
}

std::string report_to_json(const EvalReport& report) {
  nlohmann::json per_author = nlohmann::json::array();
  for (const QueryOutcome& o : report.outcomes) {
    per_author.push_back({{"query_key", o.query_key},
                          {"matched_key", o.matched_key},
                          {"true_rank", o.true_rank},
                          {"positive", o.positive},
                          {"post_count", o.post_count}});
  }
  nlohmann::json j{{"protocol", report.protocol},
                   {"n_authors", report.n_authors},
                   {"positives", report.positives},
                   {"accuracy", report.accuracy},
                   {"top_k", report.top_k},
                   {"wall_time_s", report.wall_time_s},
                   {"per_author", std::move(per_author)}};
  if (!report.config_echo.empty()) {
    nlohmann::json echo = nlohmann::json::parse(report.config_echo, nullptr, false);
    j["config"] = echo.is_discarded() ? nlohmann::json(report.config_echo) : echo;
  }
  return j.dump(2);
}

void write_report_json(const EvalReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open report file for writing: " + path.string());
  out << report_to_json(report) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

void write_report_tsv(const EvalReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open report file for writing: " + path.string());
  out << "query_key\tmatched_key\ttrue_rank\tpost_count\tpositive\n";
  for (const QueryOutcome& o : report.outcomes) {
    out << o.query_key << '\t' << o.matched_key << '\t' << o.true_rank << '\t' << o.post_count
        << '\t' << (o.positive ? 1 : 0) << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

void write_sweep_tsv(std::span<const SweepEntry> entries, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open sweep file for writing: " + path.string());
  for (const SweepEntry& e : entries) {
    out << e.dim << '\t';
    if (e.report.has_value()) {
      out << e.report->accuracy;
    } else {
      out << "error:" << e.error;
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace stylo
