#pragma once

#include <cstdint>
#include <span>

#include "termlab/core/rng.hpp"
#include "termlab/core/types.hpp"
#include "termlab/net/tape.hpp"

namespace termlab::net {

struct SequenceLoss {
    int nll_node = -1;      // scalar node: summed NLL over unmasked target positions
    std::size_t tokens = 0; // unmasked target positions
};

/// Builds the teacher-forced NLL graph for one (context, target) row.
/// `mask` (empty = all real) marks real target positions; right-padding is
/// a suffix of zeros and contributes no nodes, so its gradient is exactly
/// zero. `dropout` > 0 draws inverted-dropout masks from `dropout_rng`
/// between layers and before the head.
SequenceLoss build_sequence_nll(Tape& tape, const ModelParams& params, const Context& context,
                                std::span<const TokenId> target,
                                std::span<const std::uint8_t> mask, double dropout,
                                Rng* dropout_rng);

} // namespace termlab::net
