#pragma once

#include <string>
#include <vector>

namespace termlab {

/// Probability vector over the vocabulary at one step. Linear and log
/// space are stored side by side; log space is authoritative for losses,
/// linear for sampling.
struct ConditionalDistribution {
    std::vector<double> probs;
    std::vector<double> log_probs;

    std::size_t size() const { return probs.size(); }

    /// From log-probabilities that already sum (in exp) to 1.
    static ConditionalDistribution from_log_probs(std::vector<double> log_probs);

    /// From non-negative weights; normalizes and fills logs.
    static ConditionalDistribution from_weights(const std::vector<double>& weights);
};

struct DistributionCheck {
    bool ok = false;
    double normalization_error = 0.0; // |sum(probs) - 1|
    double max_exp_mismatch = 0.0;    // max relative |exp(log_probs[i]) - probs[i]|
    std::string detail;
};

/// Diagnoses the two distribution invariants: probabilities sum to 1
/// (absolute 1e-9) and exp(log_probs) matches probs (relative 1e-9).
DistributionCheck validate_distribution(const ConditionalDistribution& d);

} // namespace termlab
