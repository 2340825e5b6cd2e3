#pragma once

#include <vector>

#include "termlab/core/model.hpp"
#include "termlab/core/rng.hpp"
#include "termlab/decode/spec.hpp"

namespace termlab::decode {

/// One step's candidate set and its renormalized distribution. kept_ids
/// are sorted ascending; q aligns with them and sums to 1.
struct StepSupport {
    std::vector<TokenId> kept_ids;
    std::vector<double> renormalized_probs;
};

/// Restricts a distribution per `spec`: greedy keeps the argmax, top-k
/// the k most probable ids, nucleus the smallest probability-descending
/// prefix whose mass reaches mu. Ties break by ascending token id.
StepSupport step_support(const ConditionalDistribution& d, const DecoderSpec& spec);

/// One decoded continuation. eos_trace holds p(eos | prefix) at each
/// generated step, including the step that emitted eos. score is the sum
/// of model log-probabilities along the sequence.
struct DecodeResult {
    Sequence sequence;
    bool terminated = false;
    std::vector<double> eos_trace;
    double score = 0.0;
};

DecodeResult decode_greedy(const ConditionalModel& model, const Context& context,
                           std::int64_t cap);

/// Samples each step from step_support's renormalized distribution via inverse CDF
/// over kept ids in ascending order.
DecodeResult decode_sampling(const ConditionalModel& model, const Context& context,
                             const DecoderSpec& spec, Rng& rng);

/// A beam hypothesis: prefix so far, its summed log-probability, and
/// whether it ended with eos.
struct BeamItem {
    std::vector<TokenId> ids;
    double score = 0.0;
    bool finished = false;
};

/// decode_beam's extras: the final set of finished sequences alongside the
/// returned best. If the cap fills before k sequences finish, the best
/// unfinished prefix competes for the return value flagged non-terminated.
struct BeamOutcome {
    DecodeResult best;
    std::vector<BeamItem> final_set;
};

BeamOutcome decode_beam(const ConditionalModel& model, const Context& context, int k,
                        std::int64_t cap);

/// Dispatches on spec.kind; sampling kinds draw their generator from
/// spec.seed.
DecodeResult decode(const ConditionalModel& model, const Context& context,
                    const DecoderSpec& spec);

} // namespace termlab::decode
