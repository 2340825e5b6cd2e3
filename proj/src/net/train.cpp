#include "termlab/net/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "termlab/net/adamw.hpp"
#include "termlab/net/loss.hpp"

namespace termlab::net {

void validate_train_config(const TrainConfig& cfg) {
    if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("train: learning_rate <= 0");
    if (cfg.patience < 1) throw std::invalid_argument("train: patience must be >= 1");
    if (cfg.batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
    if (cfg.max_epochs < 1) throw std::invalid_argument("train: max_epochs must be >= 1");
    if (cfg.context_length < 0) throw std::invalid_argument("train: context_length < 0");
    if (!(cfg.lr_decay > 0.0 && cfg.lr_decay <= 1.0))
        throw std::invalid_argument("train: lr_decay must lie in (0,1]");
    if (cfg.dropout < 0.0 || cfg.dropout >= 1.0)
        throw std::invalid_argument("train: dropout must lie in [0,1)");
}

double dataset_perplexity(const ConditionalModel& model, const std::vector<Example>& examples) {
    double total = 0.0;
    std::size_t tokens = 0;
    for (const auto& [ctx, target] : examples) {
        NllResult r = sequence_nll(model, ctx, target);
        total += r.total;
        tokens += r.tokens;
    }
    if (tokens == 0) throw std::invalid_argument("perplexity: no tokens");
    return std::exp(total / static_cast<double>(tokens));
}

namespace {

// Right-padded target matrix for one batch; the mask marks real positions.
struct PaddedBatch {
    std::vector<const Example*> rows;
    std::vector<std::vector<TokenId>> targets;
    std::vector<std::vector<std::uint8_t>> masks;
};

PaddedBatch pad_batch(const std::vector<Example>& set, std::span<const std::size_t> indices) {
    PaddedBatch batch;
    std::size_t width = 0;
    for (std::size_t idx : indices) width = std::max(width, set[idx].second.ids.size());
    for (std::size_t idx : indices) {
        const Example& ex = set[idx];
        batch.rows.push_back(&ex);
        std::vector<TokenId> ids(width, 0);
        std::vector<std::uint8_t> mask(width, 0);
        for (std::size_t t = 0; t < ex.second.ids.size(); ++t) {
            ids[t] = ex.second.ids[t];
            mask[t] = 1;
        }
        batch.targets.push_back(std::move(ids));
        batch.masks.push_back(std::move(mask));
    }
    return batch;
}

} // namespace

TrainResult train(const Vocabulary& vocab, const Architecture& arch,
                  const std::vector<Example>& train_set, const std::vector<Example>& val_set,
                  const TrainConfig& cfg) {
    validate_train_config(cfg);
    if (train_set.empty() || val_set.empty())
        throw std::invalid_argument("train: empty train or validation split");
    for (const auto& [ctx, target] : train_set)
        if (!target.terminated) throw std::invalid_argument("train: unterminated target");

    Rng init_rng(cfg.seed);
    ModelParams params(vocab, arch, init_rng);
    Rng shuffle_rng(Rng::mix(cfg.seed, 0x5u));
    Rng dropout_rng(Rng::mix(cfg.seed, 0xDu));

    AdamWConfig opt_cfg;
    opt_cfg.learning_rate = cfg.learning_rate;
    opt_cfg.beta1 = cfg.beta1;
    opt_cfg.beta2 = cfg.beta2;
    opt_cfg.weight_decay = cfg.weight_decay;
    AdamW opt(params.store(), opt_cfg);

    Tape tape(params.store());
    Gradients grads(params.store());

    TrainResult result{ModelParams(vocab, arch), {}, std::numeric_limits<double>::infinity(), 0};
    int bad_epochs = 0;

    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        // Fisher-Yates with the seeded stream.
        for (std::size_t i = order.size(); i > 1; --i) {
            std::size_t j = shuffle_rng.below(i);
            std::swap(order[i - 1], order[j]);
        }

        double epoch_nll = 0.0;
        std::size_t epoch_tokens = 0;
        for (std::size_t begin = 0; begin < order.size();
             begin += static_cast<std::size_t>(cfg.batch_size)) {
            std::size_t end =
                std::min(order.size(), begin + static_cast<std::size_t>(cfg.batch_size));
            PaddedBatch batch = pad_batch(
                train_set, std::span<const std::size_t>(order.data() + begin, end - begin));

            tape.reset();
            grads.zero();
            std::vector<int> nll_nodes;
            std::size_t batch_tokens = 0;
            for (std::size_t b = 0; b < batch.rows.size(); ++b) {
                SequenceLoss loss = build_sequence_nll(
                    tape, params, batch.rows[b]->first, batch.targets[b], batch.masks[b],
                    cfg.dropout, cfg.dropout > 0.0 ? &dropout_rng : nullptr);
                nll_nodes.push_back(loss.nll_node);
                batch_tokens += loss.tokens;
            }
            int mean_node = tape.scale_add(tape.sum(nll_nodes),
                                           1.0 / static_cast<double>(batch_tokens), 0.0);
            double batch_mean = tape.value(mean_node);
            if (!std::isfinite(batch_mean)) {
                std::ostringstream os;
                os << "training diverged: non-finite loss at epoch " << epoch;
                throw std::runtime_error(os.str());
            }
            tape.backward(mean_node, grads);
            if (cfg.clip_norm > 0.0) {
                double norm = std::sqrt(grads.squared_norm());
                if (norm > cfg.clip_norm) grads.scale(cfg.clip_norm / norm);
            }
            opt.step(params.store(), grads);
            epoch_nll += batch_mean * static_cast<double>(batch_tokens);
            epoch_tokens += batch_tokens;
        }

        RecurrentModel model(params);
        double val_ppl = dataset_perplexity(model, val_set);
        if (!std::isfinite(val_ppl))
            throw std::runtime_error("training diverged: non-finite validation perplexity");

        result.history.push_back(EpochMetrics{epoch,
                                              epoch_nll / static_cast<double>(epoch_tokens),
                                              val_ppl, opt.learning_rate()});

        if (val_ppl < result.best_val_perplexity) {
            result.best_val_perplexity = val_ppl;
            result.best_epoch = epoch;
            result.params = params;
            bad_epochs = 0;
        } else {
            bad_epochs += 1;
            opt.set_learning_rate(opt.learning_rate() * cfg.lr_decay);
            if (bad_epochs >= cfg.patience) break;
        }
    }

    if (result.best_epoch == 0) {
        // Every epoch diverged on validation without tripping a throw.
        result.params = params;
    }
    return result;
}

std::vector<Example> make_examples(const std::vector<std::vector<std::string>>& lines,
                                   const Vocabulary& vocab, int context_length) {
    if (context_length < 0) throw std::invalid_argument("make_examples: context_length < 0");
    std::vector<Example> out;
    for (const auto& line : lines) {
        if (line.size() <= static_cast<std::size_t>(context_length)) continue;
        std::span<const std::string> ctx_tokens(line.data(),
                                                static_cast<std::size_t>(context_length));
        std::span<const std::string> tail(line.data() + context_length,
                                          line.size() - static_cast<std::size_t>(context_length));
        Sequence ctx_seq = encode(vocab, ctx_tokens, /*append_eos=*/false);
        Context ctx = Context::from_ids(std::move(ctx_seq.ids), vocab.eos_id());
        Sequence target = encode(vocab, tail, /*append_eos=*/true);
        out.emplace_back(std::move(ctx), std::move(target));
    }
    return out;
}

CorpusSplit split_corpus(std::vector<std::vector<std::string>> lines, double train_frac,
                         double val_frac, double test_frac, std::uint64_t seed) {
    if (std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-9)
        throw std::invalid_argument("split_corpus: fractions must sum to 1");
    Rng rng(seed);
    for (std::size_t i = lines.size(); i > 1; --i) {
        std::size_t j = rng.below(i);
        std::swap(lines[i - 1], lines[j]);
    }
    CorpusSplit split;
    std::size_t n = lines.size();
    auto n_train = static_cast<std::size_t>(std::floor(train_frac * static_cast<double>(n)));
    auto n_val = static_cast<std::size_t>(std::floor(val_frac * static_cast<double>(n)));
    for (std::size_t i = 0; i < n; ++i) {
        if (i < n_train)
            split.train.push_back(std::move(lines[i]));
        else if (i < n_train + n_val)
            split.val.push_back(std::move(lines[i]));
        else
            split.test.push_back(std::move(lines[i]));
    }
    return split;
}

} // namespace termlab::net
