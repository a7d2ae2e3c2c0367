// stylo: author-fingerprint toolkit CLI.
//
// Exit codes: 0 success, 2 bad flags, 3 missing file, 4 malformed config,
// 1 anything else. Errors print as a single "error: ..." line on stderr.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "stylo/cluster.hpp"
#include "stylo/error.hpp"
#include "stylo/eval.hpp"
#include "stylo/model_io.hpp"
#include "stylo/synth.hpp"

using nlohmann::json;

namespace {

class ConfigError : public stylo::Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Every tunable of every subcommand, so one JSON file can drive a whole
// run. Flags override file values; STYLO_SEED sits below both.
struct RunConfig {
  // io
  std::string input;
  std::string format = "jsonl";
  std::string split = "whole";
  std::string output;
  std::string corpus;
  std::string model;
  std::string report;
  std::string tsv;
  std::string activity_tsv;
  std::string assignments;
  std::string cluster_report_path;
  std::string vocab_tsv;
  std::string what = "authors";
  std::string key;
  bool drop_rt = false;
  // training
  stylo::TrainConfig train;
  // evaluation
  unsigned k = 1;
  std::vector<std::uint32_t> dims;
  std::vector<std::uint32_t> thresholds;
  unsigned top = 10;
  // clustering
  std::uint32_t cluster_k = 8;
  std::uint32_t max_iters = 100;
  // synthesis
  stylo::SynthConfig synth;
};

json to_json(const RunConfig& c) {
  return json{{"input", c.input},
              {"format", c.format},
              {"split", c.split},
              {"output", c.output},
              {"corpus", c.corpus},
              {"model", c.model},
              {"report", c.report},
              {"tsv", c.tsv},
              {"activity_tsv", c.activity_tsv},
              {"assignments", c.assignments},
              {"cluster_report", c.cluster_report_path},
              {"vocab_tsv", c.vocab_tsv},
              {"what", c.what},
              {"key", c.key},
              {"drop_rt", c.drop_rt},
              {"dim", c.train.dim},
              {"window", c.train.window},
              {"negatives", c.train.negatives},
              {"epochs", c.train.epochs},
              {"lr0", c.train.lr0},
              {"lr_min", c.train.lr_min},
              {"subsample_t", c.train.subsample_t},
              {"subsample_enabled", c.train.subsample_enabled},
              {"min_count", c.train.min_count},
              {"seed", c.train.seed},
              {"workers", c.train.workers},
              {"k", c.k},
              {"dims", c.dims},
              {"thresholds", c.thresholds},
              {"top", c.top},
              {"cluster_k", c.cluster_k},
              {"max_iters", c.max_iters},
              {"authors", c.synth.n_authors},
              {"posts", c.synth.posts_per_author},
              {"vocab_shared", c.synth.vocab_shared},
              {"vocab_author", c.synth.vocab_per_author},
              {"zipf_s", c.synth.zipf_s},
              {"author_mix", c.synth.author_mix},
              {"tokens_per_post", c.synth.tokens_per_post},
              {"mention_rate", c.synth.mention_rate},
              {"years", c.synth.years},
              {"base_year", c.synth.base_year}};
}

template <class T>
void pick(const json& j, const char* field, T* out) {
  if (!j.contains(field)) return;
  try {
    *out = j.at(field).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field '") + field + "' has the wrong type");
  }
}

void apply_config_file(const std::string& path, RunConfig* c) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw stylo::IoError("cannot open config file: " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ConfigError("config file is not a JSON object: " + path);
  }
  const json known = to_json(RunConfig{});
  for (const auto& [field, value] : j.items()) {
    if (!known.contains(field)) throw ConfigError("unknown config field '" + field + "'");
  }
  pick(j, "input", &c->input);
  pick(j, "format", &c->format);
  pick(j, "split", &c->split);
  pick(j, "output", &c->output);
  pick(j, "corpus", &c->corpus);
  pick(j, "model", &c->model);
  pick(j, "report", &c->report);
  pick(j, "tsv", &c->tsv);
  pick(j, "activity_tsv", &c->activity_tsv);
  pick(j, "assignments", &c->assignments);
  pick(j, "cluster_report", &c->cluster_report_path);
  pick(j, "vocab_tsv", &c->vocab_tsv);
  pick(j, "what", &c->what);
  pick(j, "key", &c->key);
  pick(j, "drop_rt", &c->drop_rt);
  pick(j, "dim", &c->train.dim);
  pick(j, "window", &c->train.window);
  pick(j, "negatives", &c->train.negatives);
  pick(j, "epochs", &c->train.epochs);
  pick(j, "lr0", &c->train.lr0);
  pick(j, "lr_min", &c->train.lr_min);
  pick(j, "subsample_t", &c->train.subsample_t);
  pick(j, "subsample_enabled", &c->train.subsample_enabled);
  pick(j, "min_count", &c->train.min_count);
  pick(j, "seed", &c->train.seed);
  pick(j, "workers", &c->train.workers);
  pick(j, "k", &c->k);
  pick(j, "dims", &c->dims);
  pick(j, "thresholds", &c->thresholds);
  pick(j, "top", &c->top);
  pick(j, "cluster_k", &c->cluster_k);
  pick(j, "max_iters", &c->max_iters);
  pick(j, "authors", &c->synth.n_authors);
  pick(j, "posts", &c->synth.posts_per_author);
  pick(j, "vocab_shared", &c->synth.vocab_shared);
  pick(j, "vocab_author", &c->synth.vocab_per_author);
  pick(j, "zipf_s", &c->synth.zipf_s);
  pick(j, "author_mix", &c->synth.author_mix);
  pick(j, "tokens_per_post", &c->synth.tokens_per_post);
  pick(j, "mention_rate", &c->synth.mention_rate);
  pick(j, "years", &c->synth.years);
  pick(j, "base_year", &c->synth.base_year);
}

// The --config file and STYLO_SEED are applied before CLI11 parses the
// remaining flags, so flags always win.
void apply_pre_parse(int argc, char** argv, RunConfig* c) {
  if (const char* env = std::getenv("STYLO_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') throw ConfigError("STYLO_SEED is not an integer");
    c->train.seed = v;
    c->synth.seed = v;
  }
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) {
      apply_config_file(argv[i + 1], c);
      return;
    }
    if (arg.rfind("--config=", 0) == 0) {
      apply_config_file(arg.substr(9), c);
      return;
    }
  }
}

stylo::SplitPolicy parse_split(const std::string& name, std::uint64_t seed) {
  if (name == "whole") return stylo::SplitPolicy::whole();
  if (name == "half") return stylo::SplitPolicy::half_ab(seed);
  if (name == "year") return stylo::SplitPolicy::by_year();
  throw ConfigError("unknown split policy '" + name + "' (expected whole|half|year)");
}

void register_train_flags(CLI::App* sub, RunConfig* c) {
  sub->add_option("--dim", c->train.dim, "embedding dimensionality");
  sub->add_option("--window", c->train.window, "context window radius");
  sub->add_option("--negatives", c->train.negatives, "negative samples per example");
  sub->add_option("--epochs", c->train.epochs, "training passes");
  sub->add_option("--lr0", c->train.lr0, "initial learning rate");
  sub->add_option("--lr-min", c->train.lr_min, "learning-rate floor");
  sub->add_option_function<double>(
      "--subsample",
      [c](const double& t) {
        c->train.subsample_t = t;
        c->train.subsample_enabled = true;
      },
      "frequent-word subsampling threshold");
  sub->add_flag_function(
      "--no-subsample", [c](std::int64_t) { c->train.subsample_enabled = false; },
      "disable frequent-word subsampling");
  sub->add_option("--min-count", c->train.min_count, "vocabulary frequency threshold");
  sub->add_option("--workers", c->train.workers, "training worker threads");
}

void print_config_and_exit(const RunConfig& c) {
  std::cout << to_json(c).dump(2) << std::endl;
  std::exit(0);
}

void maybe_print_config(bool flag, const RunConfig& c) {
  if (flag) print_config_and_exit(c);
}

stylo::Model load_model_checked(const std::string& path) {
  if (path.empty()) throw ConfigError("--model is required");
  return stylo::load_model(path);
}

std::vector<stylo::AuthorDocument> load_corpus_checked(const std::string& path) {
  if (path.empty()) throw ConfigError("--corpus is required");
  return stylo::load_corpus(path);
}

int run(int argc, char** argv) {
  RunConfig cfg;
  apply_pre_parse(argc, argv, &cfg);

  CLI::App app{"stylo: stylistic-fingerprint learning and retrieval"};
  app.require_subcommand(1);
  std::string config_path;
  bool print_config = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_flag("--print-config", print_config, "print the resolved config and exit");
    sub->add_option("--seed", cfg.train.seed, "random seed");
  };

  // ingest
  CLI::App* ingest = app.add_subcommand("ingest", "read raw posts into a corpus file");
  add_common(ingest);
  ingest->add_option("--input", cfg.input, "posts file (jsonl or tsv)");
  ingest->add_option("--format", cfg.format, "jsonl|tsv");
  ingest->add_option("--split", cfg.split, "whole|half|year");
  ingest->add_option("--output", cfg.output, "corpus file to write");
  ingest->add_flag("--drop-rt", cfg.drop_rt, "drop bare 'rt' retweet markers");
  ingest->callback([&] {
    maybe_print_config(print_config, cfg);
    if (cfg.input.empty() || cfg.output.empty()) {
      throw ConfigError("ingest needs --input and --output");
    }
    auto read = stylo::read_posts(cfg.input, stylo::parse_post_format(cfg.format));
    stylo::TokenizeOptions opts;
    opts.drop_rt = cfg.drop_rt;
    auto tokenized = stylo::tokenize_posts(read.posts, opts);
    auto result = stylo::aggregate(tokenized, parse_split(cfg.split, cfg.train.seed));
    stylo::save_corpus(result.documents, cfg.output);
    std::cout << "read=" << read.posts.size() << " skipped=" << read.skipped
              << " tokenized=" << tokenized.size() << " documents=" << result.documents.size()
              << " dropped_authors=" << result.dropped_authors << " output=" << cfg.output
              << std::endl;
  });

  // synth
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic benchmark corpus");
  add_common(synth);
  synth->add_option("--output", cfg.output, "posts file to write (jsonl)");
  synth->add_option("--authors", cfg.synth.n_authors, "number of authors");
  synth->add_option("--posts", cfg.synth.posts_per_author, "posts per author");
  synth->add_option("--vocab-shared", cfg.synth.vocab_shared, "shared vocabulary size");
  synth->add_option("--vocab-author", cfg.synth.vocab_per_author, "per-author vocabulary size");
  synth->add_option("--zipf", cfg.synth.zipf_s, "Zipf exponent");
  synth->add_option("--mix", cfg.synth.author_mix, "author-specific token probability");
  synth->add_option("--tokens", cfg.synth.tokens_per_post, "mean tokens per post");
  synth->add_option("--mention-rate", cfg.synth.mention_rate, "probability of an @mention");
  synth->add_option("--years", cfg.synth.years, "number of synthetic years");
  synth->add_option("--base-year", cfg.synth.base_year, "first synthetic year");
  synth->callback([&] {
    cfg.synth.seed = cfg.train.seed;
    maybe_print_config(print_config, cfg);
    if (cfg.output.empty()) throw ConfigError("synth needs --output");
    auto posts = stylo::generate_synthetic(cfg.synth);
    stylo::write_posts_jsonl(posts, cfg.output);
    std::cout << "posts=" << posts.size() << " output=" << cfg.output << std::endl;
  });

  // train
  CLI::App* train_cmd = app.add_subcommand("train", "train the paragraph-vector model");
  add_common(train_cmd);
  train_cmd->add_option("--corpus", cfg.corpus, "corpus file from ingest");
  train_cmd->add_option("--model", cfg.model, "model file to write");
  register_train_flags(train_cmd, &cfg);
  train_cmd->callback([&] {
    maybe_print_config(print_config, cfg);
    if (cfg.model.empty()) throw ConfigError("train needs --model");
    auto documents = load_corpus_checked(cfg.corpus);
    stylo::TrainStats stats;
    stylo::Model model =
        stylo::train(documents, cfg.train, &stats, [](std::uint32_t epoch, double loss) {
          std::cout << "epoch=" << epoch << " mean_loss=" << loss << std::endl;
        });
    stylo::save_model(model, cfg.model);
    std::cout << "model=" << cfg.model << " vocab=" << model.vocab.size()
              << " documents=" << model.n_docs() << std::endl;
  });

  // eval
  CLI::App* eval_cmd = app.add_subcommand("eval", "run an evaluation protocol");
  eval_cmd->require_subcommand(1);

  CLI::App* split_half_cmd = eval_cmd->add_subcommand("split-half", "A/B retrieval accuracy");
  add_common(split_half_cmd);
  split_half_cmd->add_option("--model", cfg.model, "trained model file");
  split_half_cmd->add_option("--k", cfg.k, "top-k relaxation");
  split_half_cmd->add_option("--report", cfg.report, "JSON report path");
  split_half_cmd->add_option("--tsv", cfg.tsv, "per-author TSV path");
  split_half_cmd->add_option("--thresholds", cfg.thresholds, "activity thresholds")
      ->delimiter(',');
  split_half_cmd->add_option("--activity-tsv", cfg.activity_tsv, "activity table TSV path");
  split_half_cmd->callback([&] {
    maybe_print_config(print_config, cfg);
    stylo::Model model = load_model_checked(cfg.model);
    auto index = stylo::SimilarityIndex::build(model);
    auto report = stylo::split_half_eval(index, cfg.k);
    report.config_echo = to_json(cfg).dump();
    std::cout << "accuracy=" << report.accuracy << std::endl;
    if (!cfg.report.empty()) stylo::write_report_json(report, cfg.report);
    if (!cfg.tsv.empty()) stylo::write_report_tsv(report, cfg.tsv);
    if (!cfg.thresholds.empty()) {
      auto rows = stylo::activity_breakdown(report, cfg.thresholds);
      std::ofstream activity_out;
      if (!cfg.activity_tsv.empty()) activity_out.open(cfg.activity_tsv, std::ios::binary);
      for (const auto& row : rows) {
        std::string acc = row.accuracy.has_value() ? std::to_string(*row.accuracy) : "undefined";
        std::cout << "activity min_posts=" << row.min_posts << " n=" << row.n_authors
                  << " accuracy=" << acc << std::endl;
        if (activity_out.is_open()) {
          activity_out << row.min_posts << '\t' << row.n_authors << '\t' << acc << '\n';
        }
      }
    }
  });

  CLI::App* temporal_cmd = eval_cmd->add_subcommand("temporal", "(user, year) stability");
  add_common(temporal_cmd);
  temporal_cmd->add_option("--model", cfg.model, "trained model file");
  temporal_cmd->add_option("--report", cfg.report, "JSON report path");
  temporal_cmd->add_option("--tsv", cfg.tsv, "per-query TSV path");
  temporal_cmd->callback([&] {
    maybe_print_config(print_config, cfg);
    stylo::Model model = load_model_checked(cfg.model);
    auto index = stylo::SimilarityIndex::build(model);
    auto report = stylo::temporal_eval(index);
    report.config_echo = to_json(cfg).dump();
    std::cout << "accuracy=" << report.accuracy << std::endl;
    if (!cfg.report.empty()) stylo::write_report_json(report, cfg.report);
    if (!cfg.tsv.empty()) stylo::write_report_tsv(report, cfg.tsv);
  });

  CLI::App* sweep_cmd = eval_cmd->add_subcommand("sweep", "accuracy across dimensionalities");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--corpus", cfg.corpus, "corpus file (half split)");
  sweep_cmd->add_option("--dims", cfg.dims, "dimensionalities to train")->delimiter(',');
  sweep_cmd->add_option("--k", cfg.k, "top-k relaxation");
  sweep_cmd->add_option("--tsv", cfg.tsv, "two-column D/accuracy TSV path");
  register_train_flags(sweep_cmd, &cfg);
  sweep_cmd->callback([&] {
    maybe_print_config(print_config, cfg);
    if (cfg.dims.empty()) throw ConfigError("sweep needs --dims");
    auto documents = load_corpus_checked(cfg.corpus);
    auto entries = stylo::dimension_sweep(documents, cfg.dims, cfg.train, cfg.k);
    for (const auto& e : entries) {
      if (e.report.has_value()) {
        std::cout << "D=" << e.dim << " accuracy=" << e.report->accuracy << std::endl;
      } else {
        std::cout << "D=" << e.dim << " error=" << e.error << std::endl;
      }
    }
    if (!cfg.tsv.empty()) stylo::write_sweep_tsv(entries, cfg.tsv);
  });

  // query
  CLI::App* query_cmd = app.add_subcommand("query", "retrieve the most similar authors");
  add_common(query_cmd);
  query_cmd->add_option("--model", cfg.model, "trained model file");
  query_cmd->add_option("--key", cfg.key, "document key to query");
  query_cmd->add_option("--top", cfg.top, "number of results");
  query_cmd->callback([&] {
    maybe_print_config(print_config, cfg);
    if (cfg.key.empty()) throw ConfigError("query needs --key");
    stylo::Model model = load_model_checked(cfg.model);
    auto index = stylo::SimilarityIndex::build(model);
    auto hits = index.most_similar(cfg.key, cfg.top);
    for (std::size_t i = 0; i < hits.size(); ++i) {
      std::printf("%zu %s %.6f\n", i + 1, hits[i].key.c_str(),
                  static_cast<double>(hits[i].score));
    }
  });

  // cluster
  CLI::App* cluster_cmd = app.add_subcommand("cluster", "sociolect clusters over fingerprints");
  add_common(cluster_cmd);
  cluster_cmd->add_option("--model", cfg.model, "trained model file");
  cluster_cmd->add_option("--k", cfg.cluster_k, "number of clusters");
  cluster_cmd->add_option("--max-iters", cfg.max_iters, "iteration cap");
  cluster_cmd->add_option("--assignments", cfg.assignments, "key/cluster TSV path");
  cluster_cmd->add_option("--report", cfg.cluster_report_path, "cluster summary JSON path");
  cluster_cmd->add_option("--corpus", cfg.corpus, "corpus file for distinguishing tokens");
  cluster_cmd->callback([&] {
    maybe_print_config(print_config, cfg);
    stylo::Model model = load_model_checked(cfg.model);
    auto index = stylo::SimilarityIndex::build(model);
    auto clustering = stylo::spherical_kmeans(index, cfg.cluster_k, cfg.train.seed, cfg.max_iters);
    std::cout << "clusters=" << clustering.k << " inertia=" << clustering.inertia
              << " iterations=" << clustering.iterations << std::endl;
    if (!cfg.assignments.empty()) stylo::write_assignments_tsv(clustering, cfg.assignments);
    if (!cfg.cluster_report_path.empty()) {
      std::vector<stylo::AuthorDocument> documents;
      if (!cfg.corpus.empty()) documents = stylo::load_corpus(cfg.corpus);
      auto rows = stylo::cluster_report(clustering, index, documents);
      std::ofstream out(cfg.cluster_report_path, std::ios::binary);
      if (!out) throw stylo::IoError("cannot write " + cfg.cluster_report_path);
      out << stylo::cluster_report_to_json(rows, clustering) << '\n';
    }
  });

  // export
  CLI::App* export_cmd = app.add_subcommand("export", "write vectors in the text format");
  add_common(export_cmd);
  export_cmd->add_option("--model", cfg.model, "trained model file");
  export_cmd->add_option("--output", cfg.output, "text vectors path");
  export_cmd->add_option("--what", cfg.what, "authors|words|fingerprints");
  export_cmd->add_option("--vocab", cfg.vocab_tsv, "also export the vocabulary TSV here");
  export_cmd->callback([&] {
    maybe_print_config(print_config, cfg);
    stylo::Model model = load_model_checked(cfg.model);
    if (!cfg.output.empty()) {
      stylo::ExportWhat what;
      if (cfg.what == "authors") {
        what = stylo::ExportWhat::Authors;
      } else if (cfg.what == "words") {
        what = stylo::ExportWhat::Words;
      } else if (cfg.what == "fingerprints") {
        what = stylo::ExportWhat::Fingerprints;
      } else {
        throw ConfigError("--what must be authors, words or fingerprints");
      }
      stylo::export_text(model, cfg.output, what);
      const std::size_t rows =
          what == stylo::ExportWhat::Words ? model.vocab.size() : model.n_docs();
      std::cout << "rows=" << rows << " output=" << cfg.output << std::endl;
    }
    if (!cfg.vocab_tsv.empty()) {
      stylo::export_vocab_tsv(model.vocab, cfg.vocab_tsv);
      std::cout << "vocab=" << model.vocab.size() << " output=" << cfg.vocab_tsv << std::endl;
    }
    if (cfg.output.empty() && cfg.vocab_tsv.empty()) {
      throw ConfigError("export needs --output or --vocab");
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints the help text, exits 0
  }
  return 0;
}

std::string one_line(std::string msg) {
  for (char& ch : msg) {
    if (ch == '\n' || ch == '\r') ch = ';';
  }
  return msg;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << one_line(e.what()) << std::endl;
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << one_line(e.what()) << std::endl;
    return 4;
  } catch (const stylo::ModelIoError& e) {
    std::cerr << "error: " << one_line(e.what()) << std::endl;
    return e.code() == stylo::ModelIoCode::Io ? 3 : 1;
  } catch (const stylo::IoError& e) {
    std::cerr << "error: " << one_line(e.what()) << std::endl;
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << one_line(e.what()) << std::endl;
    return 1;
  }
}
