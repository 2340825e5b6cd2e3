#pragma once

#include <utility>
#include <vector>

#include "termlab/net/recurrent_model.hpp"

namespace termlab::net {

/// Optimization and schedule knobs. The learning rate halves (lr_decay)
/// after any epoch that fails to improve validation perplexity; training
/// stops after `patience` non-improving epochs and returns the best
/// checkpoint seen.
struct TrainConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.99;
    double weight_decay = 0.01;
    int batch_size = 32;
    int max_epochs = 70;
    int patience = 10;
    double lr_decay = 0.5;
    double dropout = 0.0;
    std::uint64_t seed = 1;
    int context_length = 10;
    double clip_norm = 1.0; // 0 disables clipping
};

void validate_train_config(const TrainConfig& cfg);

using Example = std::pair<Context, Sequence>;

struct EpochMetrics {
    int epoch = 0;
    double train_nll_per_token = 0.0;
    double val_perplexity = 0.0;
    double learning_rate = 0.0;
};

struct TrainResult {
    ModelParams params; // best-validation checkpoint
    std::vector<EpochMetrics> history;
    double best_val_perplexity = 0.0;
    int best_epoch = 0;
};

/// Mini-batch MLE over (context, target) pairs. Throws on divergence
/// (non-finite loss). Deterministic given cfg.seed.
TrainResult train(const Vocabulary& vocab, const Architecture& arch,
                  const std::vector<Example>& train_set, const std::vector<Example>& val_set,
                  const TrainConfig& cfg);

/// exp(total NLL / total continuation tokens) over the dataset.
double dataset_perplexity(const ConditionalModel& model, const std::vector<Example>& examples);

/// Splits each tokenized line into (first `context_length` tokens, rest +
/// eos). Lines with no remainder are dropped.
std::vector<Example> make_examples(const std::vector<std::vector<std::string>>& lines,
                                   const Vocabulary& vocab, int context_length);

/// Seeded shuffle + partition by fractions (must sum to 1).
struct CorpusSplit {
    std::vector<std::vector<std::string>> train, val, test;
};
CorpusSplit split_corpus(std::vector<std::vector<std::string>> lines, double train_frac,
                         double val_frac, double test_frac, std::uint64_t seed);

} // namespace termlab::net
