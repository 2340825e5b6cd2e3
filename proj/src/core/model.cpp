#include "termlab/core/model.hpp"

#include <stdexcept>

namespace termlab {

namespace {

struct TableState : ModelState {
    std::vector<TokenId> prefix;
    std::unique_ptr<ModelState> clone() const override {
        return std::make_unique<TableState>(*this);
    }
};

} // namespace

TableModel::TableModel(Vocabulary vocab, std::vector<double> default_weights)
    : vocab_(std::move(vocab)) {
    if (default_weights.size() != vocab_.size())
        throw std::invalid_argument("TableModel: default row size != vocabulary size");
    default_row_ = ConditionalDistribution::from_weights(default_weights);
}

void TableModel::set_row(std::vector<TokenId> prefix, std::vector<double> weights) {
    if (weights.size() != vocab_.size())
        throw std::invalid_argument("TableModel: row size != vocabulary size");
    rows_[std::move(prefix)] = ConditionalDistribution::from_weights(weights);
}

StatePtr TableModel::start(const Context&) const { return std::make_unique<TableState>(); }

ConditionalDistribution TableModel::next(const ModelState& state) const {
    const auto& s = static_cast<const TableState&>(state);
    auto it = rows_.find(s.prefix);
    return it != rows_.end() ? it->second : default_row_;
}

StatePtr TableModel::advance(const ModelState& state, TokenId token) const {
    auto next_state = std::make_unique<TableState>(static_cast<const TableState&>(state));
    next_state->prefix.push_back(token);
    return next_state;
}

} // namespace termlab
