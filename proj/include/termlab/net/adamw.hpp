#pragma once

#include <cstdint>
#include <vector>

#include "termlab/net/tape.hpp"

namespace termlab::net {

struct AdamWConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.99;
    double eps = 1e-8;
    double weight_decay = 0.01;
};

/// AdamW with decoupled weight decay and bias-corrected moments. Frozen
/// (non-trainable) parameters are skipped entirely, decay included.
class AdamW {
public:
    AdamW(const ParameterStore& store, AdamWConfig cfg);

    void step(ParameterStore& store, const Gradients& grads);

    void set_learning_rate(double lr) { cfg_.learning_rate = lr; }
    double learning_rate() const { return cfg_.learning_rate; }
    std::int64_t steps() const { return t_; }

private:
    AdamWConfig cfg_;
    std::vector<std::vector<double>> m_, v_;
    std::int64_t t_ = 0;
};

} // namespace termlab::net
