#include "termlab/core/distribution.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace termlab {

ConditionalDistribution ConditionalDistribution::from_log_probs(std::vector<double> log_probs) {
    ConditionalDistribution d;
    d.probs.resize(log_probs.size());
    for (std::size_t i = 0; i < log_probs.size(); ++i) d.probs[i] = std::exp(log_probs[i]);
    d.log_probs = std::move(log_probs);
    return d;
}

ConditionalDistribution ConditionalDistribution::from_weights(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("from_weights: negative or NaN weight");
        total += w;
    }
    if (total <= 0.0) throw std::invalid_argument("from_weights: zero total mass");
    ConditionalDistribution d;
    d.probs.resize(weights.size());
    d.log_probs.resize(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        d.probs[i] = weights[i] / total;
        d.log_probs[i] = d.probs[i] > 0.0 ? std::log(d.probs[i])
                                          : -std::numeric_limits<double>::infinity();
    }
    return d;
}

DistributionCheck validate_distribution(const ConditionalDistribution& d) {
    DistributionCheck check;
    if (d.probs.size() != d.log_probs.size() || d.probs.empty()) {
        check.detail = "size mismatch or empty";
        return check;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < d.probs.size(); ++i) {
        double p = d.probs[i];
        if (!(p >= 0.0) || !std::isfinite(p)) {
            check.detail = "negative or non-finite probability at index " + std::to_string(i);
            return check;
        }
        sum += p;
        double e = std::exp(d.log_probs[i]);
        double denom = std::max({p, e, 1e-300});
        double rel = std::abs(e - p) / denom;
        check.max_exp_mismatch = std::max(check.max_exp_mismatch, rel);
    }
    check.normalization_error = std::abs(sum - 1.0);
    check.ok = check.normalization_error <= 1e-9 && check.max_exp_mismatch <= 1e-9;
    if (!check.ok) {
        std::ostringstream os;
        os << "normalization error " << check.normalization_error << ", exp mismatch "
           << check.max_exp_mismatch;
        check.detail = os.str();
    }
    return check;
}

} // namespace termlab
