#include "termlab/decode/decoders.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace termlab::decode {

namespace {

// Token ids ordered by (probability descending, id ascending).
std::vector<TokenId> probability_order(const std::vector<double>& probs) {
    std::vector<TokenId> order(probs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](TokenId a, TokenId b) {
        double pa = probs[static_cast<std::size_t>(a)];
        double pb = probs[static_cast<std::size_t>(b)];
        if (pa != pb) return pa > pb;
        return a < b;
    });
    return order;
}

StepSupport finalize(const ConditionalDistribution& d, std::vector<TokenId> kept) {
    std::sort(kept.begin(), kept.end());
    double total = 0.0;
    for (TokenId id : kept) total += d.probs[static_cast<std::size_t>(id)];
    StepSupport s;
    s.kept_ids = std::move(kept);
    s.renormalized_probs.reserve(s.kept_ids.size());
    for (TokenId id : s.kept_ids)
        s.renormalized_probs.push_back(d.probs[static_cast<std::size_t>(id)] / total);
    return s;
}

} // namespace

StepSupport step_support(const ConditionalDistribution& d, const DecoderSpec& spec) {
    validate_spec(spec);
    if (d.probs.empty()) throw std::invalid_argument("step_support: empty distribution");
    auto order = probability_order(d.probs);

    std::vector<TokenId> kept;
    switch (spec.kind) {
        case DecoderKind::greedy:
            kept.push_back(order.front());
            break;
        case DecoderKind::top_k: {
            std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(spec.k), order.size());
            kept.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n));
            break;
        }
        case DecoderKind::nucleus: {
            double cum = 0.0;
            for (TokenId id : order) {
                kept.push_back(id);
                cum += d.probs[static_cast<std::size_t>(id)];
                if (cum >= spec.mu) break;
            }
            break;
        }
        case DecoderKind::beam:
            throw std::invalid_argument("step_support: beam operates on prefixes, not steps");
    }
    return finalize(d, std::move(kept));
}

DecodeResult decode_greedy(const ConditionalModel& model, const Context& context,
                           std::int64_t cap) {
    if (cap < 1) throw std::invalid_argument("decode_greedy: cap must be >= 1");
    const TokenId eos = model.vocabulary().eos_id();
    DecodeResult result;
    StatePtr state = model.start(context);
    for (std::int64_t t = 0; t < cap; ++t) {
        ConditionalDistribution d = model.next(*state);
        result.eos_trace.push_back(d.probs[static_cast<std::size_t>(eos)]);
        TokenId best = probability_order(d.probs).front();
        result.score += d.log_probs[static_cast<std::size_t>(best)];
        result.sequence.ids.push_back(best);
        if (best == eos) {
            result.terminated = true;
            break;
        }
        state = model.advance(*state, best);
    }
    result.sequence.terminated = result.terminated;
    return result;
}

DecodeResult decode_sampling(const ConditionalModel& model, const Context& context,
                             const DecoderSpec& spec, Rng& rng) {
    validate_spec(spec);
    if (spec.kind != DecoderKind::top_k && spec.kind != DecoderKind::nucleus)
        throw std::invalid_argument("decode_sampling: spec must be top-k or nucleus");
    const TokenId eos = model.vocabulary().eos_id();
    DecodeResult result;
    StatePtr state = model.start(context);
    for (std::int64_t t = 0; t < spec.cap; ++t) {
        ConditionalDistribution d = model.next(*state);
        result.eos_trace.push_back(d.probs[static_cast<std::size_t>(eos)]);
        StepSupport support = step_support(d, spec);
        double r = rng.next_double();
        double cum = 0.0;
        TokenId chosen = support.kept_ids.back();
        for (std::size_t i = 0; i < support.kept_ids.size(); ++i) {
            cum += support.renormalized_probs[i];
            if (r < cum) {
                chosen = support.kept_ids[i];
                break;
            }
        }
        result.score += d.log_probs[static_cast<std::size_t>(chosen)];
        result.sequence.ids.push_back(chosen);
        if (chosen == eos) {
            result.terminated = true;
            break;
        }
        state = model.advance(*state, chosen);
    }
    result.sequence.terminated = result.terminated;
    return result;
}

namespace {

struct BeamHyp {
    std::vector<TokenId> ids;
    double score = 0.0;
    StatePtr state; // state after consuming ids (null once finished)
};

bool hyp_before(double score_a, const std::vector<TokenId>& ids_a, double score_b,
                const std::vector<TokenId>& ids_b) {
    if (score_a != score_b) return score_a > score_b;
    return ids_a < ids_b;
}

// Teacher-forced eos trace and summed log-probability for a sequence.
DecodeResult replay(const ConditionalModel& model, const Context& context,
                    const std::vector<TokenId>& ids, bool terminated) {
    const TokenId eos = model.vocabulary().eos_id();
    DecodeResult result;
    StatePtr state = model.start(context);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        ConditionalDistribution d = model.next(*state);
        result.eos_trace.push_back(d.probs[static_cast<std::size_t>(eos)]);
        result.score += d.log_probs[static_cast<std::size_t>(ids[i])];
        if (i + 1 < ids.size()) state = model.advance(*state, ids[i]);
    }
    result.sequence.ids = ids;
    result.sequence.terminated = terminated;
    result.terminated = terminated;
    return result;
}

} // namespace

BeamOutcome decode_beam(const ConditionalModel& model, const Context& context, int k,
                        std::int64_t cap) {
    if (k < 1) throw std::invalid_argument("decode_beam: k must be >= 1");
    if (cap < 1) throw std::invalid_argument("decode_beam: cap must be >= 1");
    const TokenId eos = model.vocabulary().eos_id();
    const std::size_t width = static_cast<std::size_t>(k);

    std::vector<BeamHyp> active;
    {
        BeamHyp root;
        root.state = model.start(context);
        active.push_back(std::move(root));
    }
    std::vector<BeamItem> finals;

    for (std::int64_t round = 0; round < cap && finals.size() < width && !active.empty();
         ++round) {
        // Expand every active prefix to its k most probable tokens.
        struct Candidate {
            std::size_t parent;
            TokenId token;
            double score;
            std::vector<TokenId> ids;
        };
        std::vector<Candidate> pool;
        pool.reserve(active.size() * width);
        for (std::size_t a = 0; a < active.size(); ++a) {
            ConditionalDistribution d = model.next(*active[a].state);
            auto order = probability_order(d.probs);
            std::size_t expand = std::min(width, order.size());
            for (std::size_t j = 0; j < expand; ++j) {
                Candidate c;
                c.parent = a;
                c.token = order[j];
                c.score = active[a].score + d.log_probs[static_cast<std::size_t>(order[j])];
                c.ids = active[a].ids;
                c.ids.push_back(order[j]);
                pool.push_back(std::move(c));
            }
        }
        std::sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) {
            return hyp_before(a.score, a.ids, b.score, b.ids);
        });

        // Keep the k best candidates. Finished ones among them retire to the
        // final set and vacate their slots; the slots backfill with the next
        // best unfinished candidates so the search stays at full width.
        std::vector<const Candidate*> selected_unfinished;
        std::size_t take = std::min(width, pool.size());
        for (std::size_t i = 0; i < take && finals.size() < width; ++i) {
            const Candidate& c = pool[i];
            if (c.token == eos)
                finals.push_back(BeamItem{c.ids, c.score, true});
            else
                selected_unfinished.push_back(&c);
        }
        if (finals.size() >= width) break;
        for (std::size_t i = take; i < pool.size() && selected_unfinished.size() < width; ++i)
            if (pool[i].token != eos) selected_unfinished.push_back(&pool[i]);

        std::vector<BeamHyp> next_active;
        next_active.reserve(selected_unfinished.size());
        for (const Candidate* c : selected_unfinished) {
            BeamHyp h;
            h.ids = c->ids;
            h.score = c->score;
            h.state = model.advance(*active[c->parent].state, c->token);
            next_active.push_back(std::move(h));
        }
        active = std::move(next_active);
    }

    BeamOutcome outcome;
    outcome.final_set = finals;

    // Pick the best finished sequence; if the cap filled before k finished,
    // the best unfinished prefix competes, flagged non-terminated.
    const BeamItem* best_final = nullptr;
    for (const BeamItem& item : finals)
        if (!best_final || hyp_before(item.score, item.ids, best_final->score, best_final->ids))
            best_final = &item;

    const BeamHyp* best_active = nullptr;
    if (finals.size() < width) {
        for (const BeamHyp& hyp : active)
            if (!best_active ||
                hyp_before(hyp.score, hyp.ids, best_active->score, best_active->ids))
                best_active = &hyp;
    }

    if (best_final &&
        (!best_active ||
         hyp_before(best_final->score, best_final->ids, best_active->score, best_active->ids))) {
        outcome.best = replay(model, context, best_final->ids, true);
    } else if (best_active) {
        outcome.best = replay(model, context, best_active->ids, false);
    } else {
        throw std::runtime_error("decode_beam: no hypothesis survived");
    }
    return outcome;
}

DecodeResult decode(const ConditionalModel& model, const Context& context,
                    const DecoderSpec& spec) {
    validate_spec(spec);
    switch (spec.kind) {
        case DecoderKind::greedy: return decode_greedy(model, context, spec.cap);
        case DecoderKind::top_k:
        case DecoderKind::nucleus: {
            Rng rng(spec.seed);
            return decode_sampling(model, context, spec, rng);
        }
        case DecoderKind::beam: return decode_beam(model, context, spec.k, spec.cap).best;
    }
    throw std::logic_error("decode: bad kind");
}

} // namespace termlab::decode
