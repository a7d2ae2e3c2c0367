#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "stylo/corpus.hpp"
#include "stylo/rng.hpp"
#include "stylo/vocab.hpp"

namespace stylo {

struct TrainConfig {
  std::uint32_t dim = 100;
  std::uint32_t window = 5;
  std::uint32_t negatives = 5;
  std::uint32_t epochs = 10;
  float lr0 = 0.025f;
  float lr_min = 0.0001f;
  double subsample_t = 1e-3;
  bool subsample_enabled = true;
  std::uint32_t min_count = 5;
  std::uint64_t seed = 1;
  std::uint32_t workers = 1;

  SubsamplePolicy subsample_policy() const {
    return SubsamplePolicy{subsample_t, subsample_enabled};
  }

  // Throws on any bound violation.
  void validate() const;
};

// The three trainable matrices, row-major. W_doc rows are the author
// (document) vectors; one row per key in doc_keys.
struct Model {
  Vocabulary vocab;
  std::vector<std::string> doc_keys;
  std::vector<std::uint32_t> doc_post_counts;  // parallel to doc_keys
  TrainConfig config;
  std::vector<float> w_in;   // |V| x D, word input vectors
  std::vector<float> w_out;  // |V| x D, word output vectors
  std::vector<float> w_doc;  // |A| x D

  std::uint32_t dim() const { return config.dim; }
  std::uint32_t n_docs() const { return static_cast<std::uint32_t>(doc_keys.size()); }

  std::span<float> in_row(std::uint32_t i) {
    return {w_in.data() + static_cast<std::size_t>(i) * dim(), dim()};
  }
  std::span<float> out_row(std::uint32_t i) {
    return {w_out.data() + static_cast<std::size_t>(i) * dim(), dim()};
  }
  std::span<float> doc_row(std::uint32_t i) {
    return {w_doc.data() + static_cast<std::size_t>(i) * dim(), dim()};
  }
  std::span<const float> in_row(std::uint32_t i) const {
    return {w_in.data() + static_cast<std::size_t>(i) * dim(), dim()};
  }
  std::span<const float> out_row(std::uint32_t i) const {
    return {w_out.data() + static_cast<std::size_t>(i) * dim(), dim()};
  }
  std::span<const float> doc_row(std::uint32_t i) const {
    return {w_doc.data() + static_cast<std::size_t>(i) * dim(), dim()};
  }

  std::int64_t doc_index(const std::string& key) const;
};

struct TrainingExample {
  std::uint32_t doc_index = 0;
  std::uint32_t target = 0;
  std::vector<std::uint32_t> context;  // nonempty; same-position target excluded
};

// W_in and W_doc drawn uniformly from [-0.5/D, +0.5/D) with the seeded
// generator (W_in rows first, then W_doc); W_out starts at zero.
Model init_model(Vocabulary vocab, std::vector<std::string> doc_keys, const TrainConfig& config);

// Maps tokens to ids (out-of-vocabulary dropped), applies frequent-word
// subsampling, then emits one example per surviving position using a
// reduced window b ~ Uniform{1..window}. Positions with no context are
// skipped.
std::vector<TrainingExample> extract_examples(std::span<const std::string> tokens,
                                              std::uint32_t doc_index, const Vocabulary& vocab,
                                              const SubsamplePolicy& policy, std::uint32_t window,
                                              Rng& rng);

// h = (sum of context-word input vectors + the document vector) / (|context|+1)
std::vector<float> forward_hidden(std::span<const std::uint32_t> context, std::uint32_t doc_index,
                                  const Model& model);

// Negative-sampling logistic loss; dot products clipped to +-6 before the
// logistic. Negatives must exclude the target.
double example_loss(std::span<const float> h, std::uint32_t target,
                    std::span<const std::uint32_t> negatives, const Model& model);

// Draws config.negatives samples, then applies one SGD update to the
// target/negative output rows, the context input rows, and the document
// row. Returns the example loss evaluated before the update.
double sgd_step(const TrainingExample& example, Model& model, const NegativeSamplingTable& table,
                float lr, Rng& rng);

struct TrainStats {
  std::vector<double> epoch_mean_loss;
  std::vector<std::uint64_t> epoch_examples;
};

using EpochCallback = std::function<void(std::uint32_t epoch, double mean_loss)>;

// Full training run: builds the vocabulary from the documents, initializes
// the model, and runs `epochs` passes with per-epoch document shuffling and
// a linearly decaying learning rate. Deterministic at workers=1.
Model train(std::span<const AuthorDocument> documents, const TrainConfig& config,
            TrainStats* stats = nullptr, const EpochCallback& on_epoch = nullptr);

// Trains a fresh document vector against the frozen model matrices.
// Throws when every token is out of vocabulary.
std::vector<float> infer_vector(std::span<const std::string> tokens, const Model& model,
                                std::uint32_t steps, float lr0_infer, std::uint64_t seed);

}  // namespace stylo
