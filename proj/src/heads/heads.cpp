#include "termlab/heads/heads.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "termlab/core/logmath.hpp"

namespace termlab::heads {

HeadKind parse_head_kind(std::string_view name) {
    if (name == "va") return HeadKind::va;
    if (name == "st") return HeadKind::st;
    if (name == "nmst") return HeadKind::nmst;
    throw std::invalid_argument("unknown head kind: " + std::string(name));
}

std::string to_string(HeadKind kind) {
    switch (kind) {
        case HeadKind::va: return "va";
        case HeadKind::st: return "st";
        case HeadKind::nmst: return "nmst";
    }
    return "?";
}

void validate_head_params(const HeadParams& p) {
    if (p.kind == HeadKind::va) {
        if (p.epsilon != 0.0)
            throw std::invalid_argument("head: epsilon is meaningless for the va head");
    } else if (!(p.epsilon > 0.0 && p.epsilon < 1.0)) {
        throw std::invalid_argument("head: epsilon must lie in (0,1) for st/nmst");
    }
    if (p.eos_id < 0 || p.eos_id >= p.output_embeddings.rows)
        throw std::invalid_argument("head: eos_id out of range");
    if (p.output_embeddings.rows < 2) throw std::invalid_argument("head: need >= 2 rows");
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Log-softmax of emb * h over all rows except `excluded` (-1 for none).
// Excluded entries come back as -inf.
std::vector<double> masked_log_softmax(const Tensor& emb, std::span<const double> h,
                                       TokenId excluded) {
    const int v = emb.rows;
    std::vector<double> out(static_cast<std::size_t>(v));
    double max_logit = kNegInf;
    for (int r = 0; r < v; ++r) {
        if (r == excluded) {
            out[static_cast<std::size_t>(r)] = kNegInf;
            continue;
        }
        double z = dot(emb.row(r), h);
        out[static_cast<std::size_t>(r)] = z;
        if (z > max_logit) max_logit = z;
    }
    double total = 0.0;
    for (int r = 0; r < v; ++r)
        if (r != excluded) total += std::exp(out[static_cast<std::size_t>(r)] - max_logit);
    double lse = max_logit + std::log(total);
    for (int r = 0; r < v; ++r)
        if (r != excluded) out[static_cast<std::size_t>(r)] -= lse;
    return out;
}

// Spreads log(1-alpha) over the non-eos softmax and puts log(alpha) on eos.
ConditionalDistribution assemble(const Tensor& emb, std::span<const double> h, TokenId eos_id,
                                 double log_alpha, double log_one_minus_alpha) {
    auto log_probs = masked_log_softmax(emb, h, eos_id);
    for (int r = 0; r < emb.rows; ++r)
        if (r != eos_id) log_probs[static_cast<std::size_t>(r)] += log_one_minus_alpha;
    log_probs[static_cast<std::size_t>(eos_id)] = log_alpha;
    return ConditionalDistribution::from_log_probs(std::move(log_probs));
}

} // namespace

ConditionalDistribution va_distribution(const Tensor& emb, std::span<const double> h) {
    return ConditionalDistribution::from_log_probs(masked_log_softmax(emb, h, -1));
}

ConditionalDistribution st_distribution(const Tensor& emb, TokenId eos_id, double epsilon,
                                        std::span<const double> h, const HeadState& state) {
    double z = dot(emb.row(eos_id), h);
    double survival = state.log_survival + std::log1p(-epsilon) + log_sigmoid(z);
    // alpha_t = 1 - exp(survival); 1 - alpha_t = exp(survival) exactly.
    return assemble(emb, h, eos_id, log1mexp(survival), survival);
}

ConditionalDistribution nmst_distribution(const Tensor& emb, TokenId eos_id, double epsilon,
                                          std::span<const double> h, std::int64_t t) {
    if (t < 1) throw std::invalid_argument("nmst head: step index must be >= 1");
    double z = dot(emb.row(eos_id), h);
    double log_decay = static_cast<double>(t) * std::log1p(-epsilon); // log((1-eps)^t)
    // alpha = (1-sig) * f_lb + sig, so 1 - alpha = (1-sig) * (1-eps)^t;
    // the complement form keeps log(alpha) strictly negative as long as
    // exp(log_one_minus_alpha) is representable.
    double log_one_minus_alpha = log_sigmoid(-z) + log_decay;
    double log_alpha = log1mexp(log_one_minus_alpha);
    return assemble(emb, h, eos_id, log_alpha, log_one_minus_alpha);
}

HeadState advance_head_state(const Tensor& emb, HeadKind kind, TokenId eos_id, double epsilon,
                             std::span<const double> h, HeadState state) {
    if (kind == HeadKind::st) {
        double z = dot(emb.row(eos_id), h);
        state.log_survival += std::log1p(-epsilon) + log_sigmoid(z);
    }
    state.step += 1;
    return state;
}

ConditionalDistribution head_distribution(const Tensor& emb, HeadKind kind, TokenId eos_id,
                                          double epsilon, std::span<const double> h,
                                          const HeadState& state) {
    switch (kind) {
        case HeadKind::va: return va_distribution(emb, h);
        case HeadKind::st: return st_distribution(emb, eos_id, epsilon, h, state);
        case HeadKind::nmst:
            return nmst_distribution(emb, eos_id, epsilon, h, state.step + 1);
    }
    throw std::logic_error("head_distribution: bad kind");
}

ConditionalDistribution va_head(std::span<const double> h, const HeadParams& p) {
    validate_head_params(p);
    if (p.kind != HeadKind::va) throw std::invalid_argument("va_head: head_kind must be va");
    return va_distribution(p.output_embeddings, h);
}

std::pair<ConditionalDistribution, HeadState> st_head(std::span<const double> h,
                                                      const HeadParams& p, HeadState state) {
    validate_head_params(p);
    if (p.kind != HeadKind::st) throw std::invalid_argument("st_head: head_kind must be st");
    auto dist = st_distribution(p.output_embeddings, p.eos_id, p.epsilon, h, state);
    auto next = advance_head_state(p.output_embeddings, HeadKind::st, p.eos_id, p.epsilon, h,
                                   state);
    return {std::move(dist), next};
}

ConditionalDistribution nmst_head(std::span<const double> h, const HeadParams& p, std::int64_t t) {
    validate_head_params(p);
    if (p.kind != HeadKind::nmst) throw std::invalid_argument("nmst_head: head_kind must be nmst");
    return nmst_distribution(p.output_embeddings, p.eos_id, p.epsilon, h, t);
}

double eos_lower_bound(double epsilon, std::int64_t t) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("eos_lower_bound: epsilon must lie in (0,1)");
    if (t < 1) throw std::invalid_argument("eos_lower_bound: t must be >= 1");
    return -std::expm1(static_cast<double>(t) * std::log1p(-epsilon));
}

std::int64_t half_life(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("half_life: epsilon must lie in (0,1)");
    double ratio = std::log(0.5) / std::log1p(-epsilon);
    auto t = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(ratio)) - 2);
    while (!(eos_lower_bound(epsilon, t) > 0.5 + 1e-12)) ++t;
    return t;
}

} // namespace termlab::heads
