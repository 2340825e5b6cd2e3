#pragma once

#include "termlab/core/model.hpp"
#include "termlab/net/cells.hpp"
#include "termlab/net/params.hpp"

namespace termlab::net {

/// Inference view over a ModelParams: feeds the context through the
/// backbone, then serves per-step head distributions. The referenced
/// params must outlive the model and stay unmodified during use.
class RecurrentModel : public ConditionalModel {
public:
    explicit RecurrentModel(const ModelParams& params) : params_(&params) {}

    const Vocabulary& vocabulary() const override { return params_->vocab(); }
    StatePtr start(const Context& context) const override;
    ConditionalDistribution next(const ModelState& state) const override;
    StatePtr advance(const ModelState& state, TokenId token) const override;

    const ModelParams& params() const { return *params_; }

private:
    const ModelParams* params_;
};

struct NllResult {
    double total = 0.0;       // summed negative log-likelihood, continuation only
    std::size_t tokens = 0;   // continuation token count (includes the final eos)
};

/// Teacher-forced NLL of `target` given `context`. Context tokens condition
/// the model but contribute no loss terms. Requires a terminated target.
NllResult sequence_nll(const ConditionalModel& model, const Context& context,
                       const Sequence& target);

} // namespace termlab::net
