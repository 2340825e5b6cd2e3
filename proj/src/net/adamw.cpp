#include "termlab/net/adamw.hpp"

#include <cmath>
#include <stdexcept>

namespace termlab::net {

AdamW::AdamW(const ParameterStore& store, AdamWConfig cfg) : cfg_(cfg) {
    if (!(cfg_.learning_rate > 0.0)) throw std::invalid_argument("adamw: learning_rate <= 0");
    m_.resize(store.count());
    v_.resize(store.count());
    for (std::size_t i = 0; i < store.count(); ++i) {
        m_[i].assign(store.tensor(static_cast<int>(i)).size(), 0.0);
        v_[i].assign(store.tensor(static_cast<int>(i)).size(), 0.0);
    }
}

void AdamW::step(ParameterStore& store, const Gradients& grads) {
    if (grads.by_param.size() != store.count())
        throw std::invalid_argument("adamw: gradient shape mismatch");
    t_ += 1;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t p = 0; p < store.count(); ++p) {
        if (!store.trainable(static_cast<int>(p))) continue;
        auto& theta = store.tensor(static_cast<int>(p)).data;
        const auto& g = grads.by_param[p];
        auto& m = m_[p];
        auto& v = v_[p];
        for (std::size_t i = 0; i < theta.size(); ++i) {
            m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g[i];
            v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
            double m_hat = m[i] / bc1;
            double v_hat = v[i] / bc2;
            theta[i] -= cfg_.learning_rate *
                        (m_hat / (std::sqrt(v_hat) + cfg_.eps) + cfg_.weight_decay * theta[i]);
        }
    }
}

} // namespace termlab::net
