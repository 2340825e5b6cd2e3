#pragma once

#include <map>
#include <memory>
#include <vector>

#include "termlab/core/distribution.hpp"
#include "termlab/core/types.hpp"
#include "termlab/core/vocab.hpp"

namespace termlab {

/// Opaque, value-like decoding state. Cloning must be cheap enough for
/// beam search to fork prefixes freely.
struct ModelState {
    virtual ~ModelState() = default;
    virtual std::unique_ptr<ModelState> clone() const = 0;
};

using StatePtr = std::unique_ptr<ModelState>;

/// Conditional next-token model. Implementations must be deterministic:
/// identical (context, prefix) inputs produce bitwise-identical
/// distributions. All methods are const and safe to call concurrently.
class ConditionalModel {
public:
    virtual ~ConditionalModel() = default;

    virtual const Vocabulary& vocabulary() const = 0;

    /// Fresh state positioned after the context, before the first
    /// generated token.
    virtual StatePtr start(const Context& context) const = 0;

    /// Distribution over the next generated token.
    virtual ConditionalDistribution next(const ModelState& state) const = 0;

    /// State advanced by appending one generated token.
    virtual StatePtr advance(const ModelState& state, TokenId token) const = 0;
};

/// Table-driven model for oracle tests: maps each generated prefix to an
/// explicit next-token distribution, with a default row for prefixes not
/// listed. The context is ignored.
class TableModel : public ConditionalModel {
public:
    TableModel(Vocabulary vocab, std::vector<double> default_weights);

    void set_row(std::vector<TokenId> prefix, std::vector<double> weights);

    const Vocabulary& vocabulary() const override { return vocab_; }
    StatePtr start(const Context& context) const override;
    ConditionalDistribution next(const ModelState& state) const override;
    StatePtr advance(const ModelState& state, TokenId token) const override;

private:
    Vocabulary vocab_;
    ConditionalDistribution default_row_;
    std::map<std::vector<TokenId>, ConditionalDistribution> rows_;
};

} // namespace termlab
