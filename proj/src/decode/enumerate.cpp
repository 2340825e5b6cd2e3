#include "termlab/decode/enumerate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "termlab/decode/decoders.hpp"

namespace termlab::decode {

namespace {

void check_limits(const ConditionalModel& model, int max_len) {
    if (model.vocabulary().size() > 8)
        throw std::invalid_argument("enumeration: vocabulary larger than 8");
    if (max_len < 1 || max_len > 8)
        throw std::invalid_argument("enumeration: max_len must lie in [1, 8]");
}

void enumerate_rec(const ConditionalModel& model, const DecoderSpec& spec, int max_len,
                   const ModelState& state, std::vector<TokenId>& prefix, double mass,
                   TokenId eos, EnumeratedDistribution& out) {
    ConditionalDistribution d = model.next(state);
    StepSupport support = step_support(d, spec);
    for (std::size_t i = 0; i < support.kept_ids.size(); ++i) {
        double q = support.renormalized_probs[i];
        if (q <= 0.0) continue;
        TokenId tok = support.kept_ids[i];
        double child_mass = mass * q;
        prefix.push_back(tok);
        if (tok == eos) {
            out.mass[prefix] += child_mass;
        } else if (static_cast<int>(prefix.size()) >= max_len) {
            out.residual += child_mass;
        } else {
            StatePtr child = model.advance(state, tok);
            enumerate_rec(model, spec, max_len, *child, prefix, child_mass, eos, out);
        }
        prefix.pop_back();
    }
}

} // namespace

EnumeratedDistribution enumerate_decoder_distribution(const ConditionalModel& model,
                                                      const Context& context,
                                                      const DecoderSpec& spec, int max_len) {
    validate_spec(spec);
    if (spec.kind == DecoderKind::beam)
        throw std::invalid_argument("enumeration: beam is not a per-step decoder");
    check_limits(model, max_len);

    EnumeratedDistribution out;
    std::vector<TokenId> prefix;
    StatePtr root = model.start(context);
    enumerate_rec(model, spec, max_len, *root, prefix, 1.0, model.vocabulary().eos_id(), out);
    return out;
}

namespace {

void map_rec(const ConditionalModel& model, int max_len, const ModelState& state,
             std::vector<TokenId>& prefix, double log_prob, TokenId eos, MapResult& best,
             bool& found) {
    ConditionalDistribution d = model.next(state);
    for (TokenId tok = 0; tok < static_cast<TokenId>(d.probs.size()); ++tok) {
        double p = d.probs[static_cast<std::size_t>(tok)];
        if (p <= 0.0) continue;
        double child_lp = log_prob + d.log_probs[static_cast<std::size_t>(tok)];
        prefix.push_back(tok);
        if (tok == eos) {
            // Strict improvement keeps the first (lexicographically
            // smallest) sequence on exact ties.
            if (!found || child_lp > best.log_prob) {
                best.sequence.ids = prefix;
                best.sequence.terminated = true;
                best.log_prob = child_lp;
                found = true;
            }
        } else if (static_cast<int>(prefix.size()) < max_len) {
            StatePtr child = model.advance(state, tok);
            map_rec(model, max_len, *child, prefix, child_lp, eos, best, found);
        }
        prefix.pop_back();
    }
}

} // namespace

MapResult map_oracle(const ConditionalModel& model, const Context& context, int max_len) {
    check_limits(model, max_len);
    MapResult best;
    best.log_prob = -std::numeric_limits<double>::infinity();
    bool found = false;
    std::vector<TokenId> prefix;
    StatePtr root = model.start(context);
    map_rec(model, max_len, *root, prefix, 0.0, model.vocabulary().eos_id(), best, found);
    if (!found)
        throw std::runtime_error("map_oracle: no terminated sequence within max_len has mass");
    return best;
}

} // namespace termlab::decode
