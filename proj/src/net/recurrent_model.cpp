#include "termlab/net/recurrent_model.hpp"

#include <stdexcept>

namespace termlab::net {

namespace {

struct RecState : ModelState {
    BackboneState backbone;
    heads::HeadState head;

    std::unique_ptr<ModelState> clone() const override {
        return std::make_unique<RecState>(*this);
    }
};

} // namespace

StatePtr RecurrentModel::start(const Context& context) const {
    auto state = std::make_unique<RecState>();
    state->backbone = initial_backbone_state(params_->arch());
    for (TokenId tok : context.ids) backbone_consume(*params_, tok, state->backbone);
    return state;
}

ConditionalDistribution RecurrentModel::next(const ModelState& state) const {
    const auto& s = static_cast<const RecState&>(state);
    const Architecture& arch = params_->arch();
    const Tensor& emb = params_->store().tensor(params_->head_param());
    return heads::head_distribution(emb, arch.head, params_->vocab().eos_id(), arch.epsilon,
                                    s.backbone.h.back(), s.head);
}

StatePtr RecurrentModel::advance(const ModelState& state, TokenId token) const {
    auto next_state = std::make_unique<RecState>(static_cast<const RecState&>(state));
    const Architecture& arch = params_->arch();
    const Tensor& emb = params_->store().tensor(params_->head_param());
    // The head state folds in the hidden vector that produced this step's
    // distribution, before the backbone consumes the chosen token.
    next_state->head =
        heads::advance_head_state(emb, arch.head, params_->vocab().eos_id(), arch.epsilon,
                                  next_state->backbone.h.back(), next_state->head);
    backbone_consume(*params_, token, next_state->backbone);
    return next_state;
}

NllResult sequence_nll(const ConditionalModel& model, const Context& context,
                       const Sequence& target) {
    if (!target.terminated) throw std::invalid_argument("sequence_nll: target not terminated");
    NllResult out;
    StatePtr state = model.start(context);
    for (std::size_t i = 0; i < target.ids.size(); ++i) {
        ConditionalDistribution d = model.next(*state);
        out.total -= d.log_probs[static_cast<std::size_t>(target.ids[i])];
        out.tokens += 1;
        if (i + 1 < target.ids.size()) state = model.advance(*state, target.ids[i]);
    }
    return out;
}

} // namespace termlab::net
