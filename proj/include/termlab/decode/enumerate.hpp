#pragma once

#include <map>
#include <vector>

#include "termlab/core/model.hpp"
#include "termlab/decode/spec.hpp"

namespace termlab::decode {

/// Exact decoder-induced distribution over terminated sequences of length
/// <= max_len, plus the residual mass of runs still alive past max_len.
struct EnumeratedDistribution {
    std::map<std::vector<TokenId>, double> mass;
    double residual = 0.0;

    double total() const {
        double t = residual;
        for (const auto& [ids, p] : mass) t += p;
        return t;
    }
};

/// Depth-first expansion of step_support. Only meant for small models:
/// vocabulary size <= 8 and max_len <= 8 are enforced.
EnumeratedDistribution enumerate_decoder_distribution(const ConditionalModel& model,
                                                      const Context& context,
                                                      const DecoderSpec& spec, int max_len);

struct MapResult {
    Sequence sequence;
    double log_prob = 0.0;
};

/// Exhaustive argmax of the model probability over all terminated
/// sequences of length <= max_len. Same small-model limits as above.
MapResult map_oracle(const ConditionalModel& model, const Context& context, int max_len);

} // namespace termlab::decode
