#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "termlab/core/distribution.hpp"
#include "termlab/core/tensor.hpp"
#include "termlab/core/types.hpp"

namespace termlab::heads {

/// Output-layer parametrization: vanilla softmax (va), self-terminating
/// (st) with a monotone eos probability, or non-monotonic self-terminating
/// (nmst) whose eos probability is a convex combination of the curve
/// 1-(1-eps)^t and 1.
enum class HeadKind { va, st, nmst };

HeadKind parse_head_kind(std::string_view name);
std::string to_string(HeadKind kind);

/// Output embedding matrix (one row per token) plus the head hyper-
/// parameters. epsilon must lie in (0,1) for st/nmst and is rejected for va.
struct HeadParams {
    Tensor output_embeddings;
    HeadKind kind = HeadKind::va;
    double epsilon = 0.0;
    TokenId eos_id = 0;
};

void validate_head_params(const HeadParams& p);

/// Per-trajectory head state. `step` counts generated tokens so far
/// (the upcoming token is step + 1; the context does not count).
/// `log_survival` accumulates the st head's running sum of
/// log((1-eps) * sigmoid(u_eos . h)) and stays <= 0, non-increasing.
struct HeadState {
    std::int64_t step = 0;
    double log_survival = 0.0;
};

// --------------------------------------------------------------------------
// Tensor-level head math (shared by the HeadParams wrappers below and by
// the recurrent model / training paths).
// --------------------------------------------------------------------------

ConditionalDistribution va_distribution(const Tensor& emb, std::span<const double> h);

ConditionalDistribution st_distribution(const Tensor& emb, TokenId eos_id, double epsilon,
                                        std::span<const double> h, const HeadState& state);

ConditionalDistribution nmst_distribution(const Tensor& emb, TokenId eos_id, double epsilon,
                                          std::span<const double> h, std::int64_t t);

/// Consumes one generated step: advances `step` and, for st, folds this
/// step's survival factor into `log_survival`.
HeadState advance_head_state(const Tensor& emb, HeadKind kind, TokenId eos_id, double epsilon,
                             std::span<const double> h, HeadState state);

ConditionalDistribution head_distribution(const Tensor& emb, HeadKind kind, TokenId eos_id,
                                          double epsilon, std::span<const double> h,
                                          const HeadState& state);

// --------------------------------------------------------------------------
// HeadParams-shaped entry points.
// --------------------------------------------------------------------------

ConditionalDistribution va_head(std::span<const double> h, const HeadParams& p);

std::pair<ConditionalDistribution, HeadState> st_head(std::span<const double> h,
                                                      const HeadParams& p, HeadState state);

ConditionalDistribution nmst_head(std::span<const double> h, const HeadParams& p, std::int64_t t);

/// The floor 1-(1-eps)^t under every nmst eos probability at step t.
double eos_lower_bound(double epsilon, std::int64_t t);

/// Smallest t with eos_lower_bound(epsilon, t) > 1/2. Values within 1e-12
/// of 1/2 count as the boundary itself so that exact-power epsilons
/// (eps = 1 - 2^(-1/k)) resolve to k + 1.
std::int64_t half_life(double epsilon);

} // namespace termlab::heads
