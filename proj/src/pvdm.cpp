#include "stylo/pvdm.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "stylo/error.hpp"
#include "stylo/pvdm_math.hpp"

namespace stylo {

void TrainConfig::validate() const {
  if (dim < 2) throw Error("config: dim must be >= 2");
  if (window < 1) throw Error("config: window must be >= 1");
  if (negatives < 1) throw Error("config: negatives must be >= 1");
  if (epochs < 1) throw Error("config: epochs must be >= 1");
  if (!(lr0 > 0.0f)) throw Error("config: lr0 must be > 0");
  if (lr_min < 0.0f || !(lr_min < lr0)) throw Error("config: need 0 <= lr_min < lr0");
  if (subsample_enabled && !(subsample_t > 0.0)) throw Error("config: subsample threshold must be > 0");
  if (min_count < 1) throw Error("config: min_count must be >= 1");
  if (workers < 1) throw Error("config: workers must be >= 1");
}

std::int64_t Model::doc_index(const std::string& key) const {
  auto it = std::find(doc_keys.begin(), doc_keys.end(), key);
  return it == doc_keys.end() ? -1 : it - doc_keys.begin();
}

Model init_model(Vocabulary vocab, std::vector<std::string> doc_keys, const TrainConfig& config) {
  config.validate();
  if (vocab.size() < 2) throw Error("init_model: vocabulary must hold at least 2 words");
  if (doc_keys.empty()) throw Error("init_model: need at least one document key");

  Model m;
  m.config = config;
  m.vocab = std::move(vocab);
  m.doc_keys = std::move(doc_keys);
  m.doc_post_counts.assign(m.doc_keys.size(), 0);

  const std::size_t vd = static_cast<std::size_t>(m.vocab.size()) * config.dim;
  const std::size_t ad = m.doc_keys.size() * static_cast<std::size_t>(config.dim);
  m.w_in.resize(vd);
  m.w_out.assign(vd, 0.0f);
  m.w_doc.resize(ad);

  Rng rng(config.seed);
  const float d = static_cast<float>(config.dim);
  for (float& x : m.w_in) x = (rng.next_float() - 0.5f) / d;
  for (float& x : m.w_doc) x = (rng.next_float() - 0.5f) / d;
  return m;
}

namespace {

void map_to_ids(std::span<const std::string> tokens, const Vocabulary& vocab,
                std::vector<std::uint32_t>& out) {
  out.clear();
  for (const std::string& tok : tokens) {
    std::int64_t id = vocab.lookup(tok);
    if (id >= 0) out.push_back(static_cast<std::uint32_t>(id));
  }
}

void build_survivors(std::span<const std::uint32_t> ids, const Vocabulary& vocab,
                     const SubsamplePolicy& policy, Rng& rng, std::vector<std::uint32_t>& out) {
  out.clear();
  for (std::uint32_t id : ids) {
    const double keep = keep_probability(id, vocab, policy);
    if (keep >= 1.0 || rng.next_double() < keep) out.push_back(id);
  }
}

// Walks the surviving positions; for each one draws the reduced window
// b ~ Uniform{1..window} and invokes f(position, target, context) unless
// the context is empty. The b draw happens for every position so the
// generator stream does not depend on context emptiness.
template <class F>
void for_each_window(std::span<const std::uint32_t> survivors, std::uint32_t window, Rng& rng,
                     std::vector<std::uint32_t>& ctx_buf, F&& f) {
  const std::size_t n = survivors.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t b = 1 + static_cast<std::size_t>(rng.next_below(window));
    ctx_buf.clear();
    const std::size_t lo = i > b ? i - b : 0;
    const std::size_t hi = std::min(n - 1, i + b);
    for (std::size_t j = lo; j <= hi; ++j) {
      if (j != i) ctx_buf.push_back(survivors[j]);
    }
    if (ctx_buf.empty()) continue;
    f(i, survivors[i], std::span<const std::uint32_t>(ctx_buf));
  }
}

struct Scratch {
  std::vector<float> h, grad_h, g_scores;
  std::vector<std::uint32_t> ids, survivors, ctx, negatives;
};

void compute_hidden(const Model& m, std::span<const float> doc_vec,
                    std::span<const std::uint32_t> context, std::vector<float>& h) {
  const std::uint32_t d = m.dim();
  h.assign(d, 0.0f);
  for (std::uint32_t w : context) {
    std::span<const float> row = m.in_row(w);
    for (std::uint32_t i = 0; i < d; ++i) h[i] += row[i];
  }
  for (std::uint32_t i = 0; i < d; ++i) h[i] += doc_vec[i];
  const float inv = 1.0f / static_cast<float>(context.size() + 1);
  for (std::uint32_t i = 0; i < d; ++i) h[i] *= inv;
}

// Loss plus dL/dh and the per-row score gradients, all against the current
// (pre-update) rows.
double loss_and_grads(const Model& m, std::span<const float> h, std::uint32_t target,
                      std::span<const std::uint32_t> negatives, std::vector<float>& grad_h,
                      std::vector<float>& g_scores) {
  const std::uint32_t d = m.dim();
  g_scores.resize(1 + negatives.size());
  const double loss = detail::ns_loss<float>(
      h, target, negatives, [&](std::uint32_t r) { return m.out_row(r); },
      std::span<float>(g_scores));
  grad_h.assign(d, 0.0f);
  for (std::size_t j = 0; j < g_scores.size(); ++j) {
    const float g = g_scores[j];
    if (g == 0.0f) continue;
    std::span<const float> row = m.out_row(j == 0 ? target : negatives[j - 1]);
    for (std::uint32_t i = 0; i < d; ++i) grad_h[i] += g * row[i];
  }
  return loss;
}

void update_out_rows(Model& m, std::span<const float> h, std::uint32_t target,
                     std::span<const std::uint32_t> negatives, std::span<const float> g_scores,
                     float lr) {
  const std::uint32_t d = m.dim();
  for (std::size_t j = 0; j < g_scores.size(); ++j) {
    const float g = g_scores[j];
    if (g == 0.0f) continue;
    std::span<float> row = m.out_row(j == 0 ? target : negatives[j - 1]);
    for (std::uint32_t i = 0; i < d; ++i) row[i] -= lr * g * h[i];
  }
}

void update_vec(std::span<float> v, std::span<const float> grad_h, float scale, float lr) {
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= lr * scale * grad_h[i];
}

// One full SGD update; returns the pre-update loss.
double process_example(Model& m, std::uint32_t doc_idx, std::uint32_t target,
                       std::span<const std::uint32_t> context,
                       std::span<const std::uint32_t> negatives, float lr, Scratch& s) {
  compute_hidden(m, m.doc_row(doc_idx), context, s.h);
  const double loss = loss_and_grads(m, s.h, target, negatives, s.grad_h, s.g_scores);
  update_out_rows(m, s.h, target, negatives, s.g_scores, lr);
  const float scale = 1.0f / static_cast<float>(context.size() + 1);
  for (std::uint32_t w : context) update_vec(m.in_row(w), s.grad_h, scale, lr);
  update_vec(m.doc_row(doc_idx), s.grad_h, scale, lr);
  return loss;
}

}  // namespace

std::vector<TrainingExample> extract_examples(std::span<const std::string> tokens,
                                              std::uint32_t doc_index, const Vocabulary& vocab,
                                              const SubsamplePolicy& policy, std::uint32_t window,
                                              Rng& rng) {
  std::vector<TrainingExample> examples;
  std::vector<std::uint32_t> ids, survivors, ctx;
  map_to_ids(tokens, vocab, ids);
  build_survivors(ids, vocab, policy, rng, survivors);
  for_each_window(survivors, window, rng, ctx,
                  [&](std::size_t, std::uint32_t target, std::span<const std::uint32_t> context) {
                    examples.push_back(TrainingExample{
                        doc_index, target, {context.begin(), context.end()}});
                  });
  return examples;
}

std::vector<float> forward_hidden(std::span<const std::uint32_t> context, std::uint32_t doc_index,
                                  const Model& model) {
  if (context.empty()) throw Error("forward_hidden: empty context");
  std::vector<float> h;
  compute_hidden(model, model.doc_row(doc_index), context, h);
  return h;
}

double example_loss(std::span<const float> h, std::uint32_t target,
                    std::span<const std::uint32_t> negatives, const Model& model) {
  return detail::ns_loss<float>(h, target, negatives,
                                [&](std::uint32_t r) { return model.out_row(r); });
}

double sgd_step(const TrainingExample& example, Model& model, const NegativeSamplingTable& table,
                float lr, Rng& rng) {
  if (example.context.empty()) throw Error("sgd_step: empty context");
  Scratch s;
  table.sample_negatives(model.config.negatives, example.target, rng, s.negatives);
  return process_example(model, example.doc_index, example.target, example.context, s.negatives,
                         lr, s);
}

Model train(std::span<const AuthorDocument> documents, const TrainConfig& config,
            TrainStats* stats, const EpochCallback& on_epoch) {
  config.validate();
  if (documents.empty()) throw Error("train: no documents");

  Vocabulary vocab = build_vocab(documents, config.min_count);

  // Token ids per document, OOV dropped. Each in-vocabulary position is one
  // planned example for the learning-rate schedule.
  std::vector<std::vector<std::uint32_t>> doc_ids(documents.size());
  std::uint64_t total_positions = 0;
  bool trainable = false;
  for (std::size_t d = 0; d < documents.size(); ++d) {
    map_to_ids(documents[d].tokens, vocab, doc_ids[d]);
    total_positions += doc_ids[d].size();
    if (doc_ids[d].size() >= 2) trainable = true;
  }
  if (!trainable) {
    throw Error("train: degenerate corpus, no document has 2 in-vocabulary tokens");
  }

  std::vector<std::string> keys;
  keys.reserve(documents.size());
  for (const AuthorDocument& doc : documents) keys.push_back(doc.key);

  Model model = init_model(std::move(vocab), std::move(keys), config);
  for (std::size_t d = 0; d < documents.size(); ++d) {
    model.doc_post_counts[d] = documents[d].post_count;
  }

  const NegativeSamplingTable table(model.vocab);
  const SubsamplePolicy policy = config.subsample_policy();
  const std::uint64_t total_planned = std::max<std::uint64_t>(1, total_positions) * config.epochs;
  std::atomic<std::uint64_t> consumed{0};

  for (std::uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<std::uint32_t> order(documents.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng shuffle_rng(derive_seed(config.seed, 0xE70C5ULL, epoch));
    shuffle(order, shuffle_rng);

    const std::uint32_t workers =
        std::max<std::uint32_t>(1, std::min<std::uint32_t>(config.workers, order.size()));
    std::vector<double> loss_sums(workers, 0.0);
    std::vector<std::uint64_t> example_counts(workers, 0);

    auto run_chunk = [&](std::uint32_t w, std::size_t begin, std::size_t end) {
      Scratch s;
      double loss_sum = 0.0;
      std::uint64_t n_examples = 0;
      for (std::size_t oi = begin; oi < end; ++oi) {
        const std::uint32_t d = order[oi];
        const std::vector<std::uint32_t>& ids = doc_ids[d];
        if (ids.empty()) continue;
        const std::uint64_t base = consumed.fetch_add(ids.size(), std::memory_order_relaxed);
        // Independent stream per (document, epoch): identical draws no
        // matter which worker picks the document up.
        Rng rng(derive_seed(config.seed, d + 1, epoch + 1));
        build_survivors(ids, model.vocab, policy, rng, s.survivors);
        for_each_window(
            s.survivors, config.window, rng, s.ctx,
            [&](std::size_t pos, std::uint32_t target, std::span<const std::uint32_t> context) {
              const double progress =
                  static_cast<double>(base + pos) / static_cast<double>(total_planned);
              const float lr =
                  std::max(config.lr_min, config.lr0 * static_cast<float>(1.0 - progress));
              table.sample_negatives(config.negatives, target, rng, s.negatives);
              loss_sum += process_example(model, d, target, context, s.negatives, lr, s);
              ++n_examples;
            });
      }
      loss_sums[w] = loss_sum;
      example_counts[w] = n_examples;
    };

    if (workers == 1) {
      run_chunk(0, 0, order.size());
    } else {
      std::vector<std::thread> threads;
      threads.reserve(workers);
      const std::size_t per = (order.size() + workers - 1) / workers;
      for (std::uint32_t w = 0; w < workers; ++w) {
        const std::size_t begin = std::min(order.size(), static_cast<std::size_t>(w) * per);
        const std::size_t end = std::min(order.size(), begin + per);
        threads.emplace_back(run_chunk, w, begin, end);
      }
      for (std::thread& t : threads) t.join();
    }

    double sum = 0.0;
    std::uint64_t n = 0;
    for (std::uint32_t w = 0; w < workers; ++w) {
      sum += loss_sums[w];
      n += example_counts[w];
    }
    const double mean = n > 0 ? sum / static_cast<double>(n) : 0.0;
    if (stats != nullptr) {
      stats->epoch_mean_loss.push_back(mean);
      stats->epoch_examples.push_back(n);
    }
    if (on_epoch) on_epoch(epoch, mean);
  }
  return model;
}

std::vector<float> infer_vector(std::span<const std::string> tokens, const Model& model,
                                std::uint32_t steps, float lr0_infer, std::uint64_t seed) {
  std::vector<std::uint32_t> ids;
  map_to_ids(tokens, model.vocab, ids);
  if (ids.empty()) throw Error("infer_vector: every token is out of vocabulary");

  const std::uint32_t d = model.dim();
  Rng rng(seed);
  std::vector<float> vec(d);
  for (float& x : vec) x = (rng.next_float() - 0.5f) / static_cast<float>(d);

  const NegativeSamplingTable table(model.vocab);
  const SubsamplePolicy policy = model.config.subsample_policy();
  Scratch s;
  for (std::uint32_t step = 0; step < steps; ++step) {
    const float lr = lr0_infer + (model.config.lr_min - lr0_infer) *
                                     static_cast<float>(step) / static_cast<float>(steps);
    build_survivors(ids, model.vocab, policy, rng, s.survivors);
    for_each_window(
        s.survivors, model.config.window, rng, s.ctx,
        [&](std::size_t, std::uint32_t target, std::span<const std::uint32_t> context) {
          table.sample_negatives(model.config.negatives, target, rng, s.negatives);
          compute_hidden(model, vec, context, s.h);
          loss_and_grads(model, s.h, target, s.negatives, s.grad_h, s.g_scores);
          update_vec(vec, s.grad_h, 1.0f / static_cast<float>(context.size() + 1), lr);
        });
  }
  return vec;
}

}  // namespace stylo
