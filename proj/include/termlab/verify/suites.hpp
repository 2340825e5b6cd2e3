#pragma once

#include <string>
#include <vector>

#include "termlab/decode/decoders.hpp"
#include "termlab/net/train.hpp"

namespace termlab::verify {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct SuiteResult {
    std::string suite;
    std::uint64_t seed = 0;
    std::vector<CheckResult> checks;

    bool passed() const {
        for (const CheckResult& c : checks)
            if (!c.pass) return false;
        return !checks.empty();
    }
    void add(std::string name, bool pass, std::string detail = "");
};

std::string suite_to_json(const SuiteResult& result);

/// Random next-token distribution for decoder fuzzing; mixes smooth,
/// sparse, near-tied, and point-mass shapes.
ConditionalDistribution random_fuzz_distribution(Rng& rng, std::size_t size);

/// Random recurrent model with the given head, with the eos output row
/// rescaled by a broad random factor so sigmoid(u_eos . h) sweeps both
/// extremes across draws.
net::ModelParams make_random_termination_model(heads::HeadKind kind, double epsilon,
                                               net::CellKind cell, int vocab_size, int hidden,
                                               Rng& rng);

/// Fuzzes the candidate-set axioms (renormalized mass 1, min-kept >=
/// max-dropped, no kept-token deflation) for one spec.
SuiteResult check_incomplete_probable(const decode::DecoderSpec& spec, int trials,
                                      std::uint64_t seed);

/// Normalization, nmst floor/ceiling, st monotonicity, achievable
/// non-monotonicity, and the alpha -> 1 limit, over random head draws.
SuiteResult check_head_conformance(int trials, std::uint64_t seed);

/// Constructed model plus the claim it demonstrates; claims re-verify on
/// demand rather than being trusted. The claim quantifies over states
/// reachable from `context`.
struct WitnessModel {
    net::ModelParams params;
    Context context;
    std::string claim;
    std::int64_t verify_cap = 100000;

    bool verify(std::string* detail = nullptr) const;
};

/// Vanilla-softmax weights whose eos probability trails some other token
/// at every reachable state, so greedy decoding never terminates.
WitnessModel build_vanilla_nontermination_witness(int vocab_size);

SuiteResult check_vanilla_witness(int vocab_size, std::int64_t cap);

/// Greedy length <= t_half, beam final lengths <= t_half + k, sampled
/// lengths <= t_half + 64 over random nmst models, plus a constructed
/// slow case per epsilon.
SuiteResult check_nmst_consistency(const std::vector<double>& eps_list, int trials,
                                   std::uint64_t seed);

/// Termination of st decoding under the cap t_half + 64 (+k for beam);
/// records first alpha > 1/2 crossings and observed maxima per epsilon.
SuiteResult check_st_consistency(const std::vector<double>& eps_list, int trials,
                                 std::uint64_t seed);

struct BranchConfig {
    int t0 = 4;
    double epsilon = 1e-3; // st/nmst only
    int hidden = 16;
    net::CellKind cell = net::CellKind::rnn;
    int max_epochs = 800;
    double learning_rate = 0.02;
    std::uint64_t seed = 7;
};

struct BranchResult {
    SuiteResult suite;
    std::vector<double> trace; // teacher-forced eos trace on the longer sequence
    double final_nll = 0.0;    // total dataset NLL of the trained model
};

/// Trains the two-sequence shared-prefix dataset (one sequence stops at
/// t0, the other continues) and checks the learned eos trace: a branch
/// probability near 1/2 at t0 and near 0 elsewhere before the end. The st
/// head instead gets its monotone trace recorded for loss comparison.
BranchResult branch_experiment(heads::HeadKind kind, const BranchConfig& cfg);

/// Named suite entry point for the CLI: heads, decoders, consistency,
/// branch, or all.
std::vector<SuiteResult> run_suite(const std::string& name, std::uint64_t seed, int trials);

} // namespace termlab::verify
