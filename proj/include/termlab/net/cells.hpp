#pragma once

#include <vector>

#include "termlab/net/params.hpp"

namespace termlab::net {

/// Per-layer recurrent state; `c` is used by lstm layers only.
/// Fresh states are all zeros.
struct BackboneState {
    std::vector<std::vector<double>> h;
    std::vector<std::vector<double>> c;
};

BackboneState initial_backbone_state(const Architecture& arch);

/// Feeds one token through the embedding and all recurrent layers,
/// updating `state` in place. Returns nothing; the top hidden vector is
/// state.h.back(). Gate order for lstm is i,f,g,o.
void backbone_consume(const ModelParams& params, TokenId token, BackboneState& state);

/// Value-semantic single step: (hidden after the step, advanced state).
std::pair<std::vector<double>, BackboneState> forward_step(const ModelParams& params,
                                                           TokenId token,
                                                           const BackboneState& state);

} // namespace termlab::net
