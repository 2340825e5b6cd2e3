#include "termlab/verify/suites.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "termlab/eval/metrics.hpp"
#include "termlab/core/logmath.hpp"
#include "termlab/heads/heads.hpp"

namespace termlab::verify {

using heads::HeadKind;

void SuiteResult::add(std::string name, bool pass, std::string detail) {
    checks.push_back(CheckResult{std::move(name), pass, std::move(detail)});
}

std::string suite_to_json(const SuiteResult& result) {
    nlohmann::json j;
    j["suite"] = result.suite;
    j["seed"] = result.seed;
    j["passed"] = result.passed();
    nlohmann::json checks = nlohmann::json::array();
    for (const CheckResult& c : result.checks)
        checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    j["checks"] = checks;
    return j.dump(2);
}

ConditionalDistribution random_fuzz_distribution(Rng& rng, std::size_t size) {
    std::vector<double> w(size, 0.0);
    switch (rng.below(5)) {
        case 0: // smooth
            for (double& x : w) x = std::exp(2.0 * rng.normal());
            break;
        case 1: // sparse
            for (double& x : w) x = rng.next_double() < 0.4 ? 0.0 : rng.next_double();
            if (std::all_of(w.begin(), w.end(), [](double x) { return x == 0.0; }))
                w[rng.below(size)] = 1.0;
            break;
        case 2: // near ties, gaps around 1e-15
            for (double& x : w) x = 1.0 + 1e-15 * static_cast<double>(rng.below(3));
            break;
        case 3: // point mass
            w[rng.below(size)] = 1.0;
            break;
        default: // exact ties in blocks
            for (std::size_t i = 0; i < size; ++i) w[i] = 1.0 + static_cast<double>(i % 2);
            break;
    }
    return ConditionalDistribution::from_weights(w);
}

net::ModelParams make_random_termination_model(HeadKind kind, double epsilon,
                                               net::CellKind cell, int vocab_size, int hidden,
                                               Rng& rng) {
    std::vector<std::string> tokens{Vocabulary::kEos};
    for (int i = 1; i < vocab_size; ++i) tokens.push_back(std::string(1, static_cast<char>('a' + i - 1)));
    Vocabulary vocab(std::move(tokens), 0);

    net::Architecture arch;
    arch.cell = cell;
    arch.layers = 1;
    arch.hidden = hidden;
    arch.embedding = hidden;
    arch.tied = true;
    arch.head = kind;
    arch.epsilon = kind == HeadKind::va ? 0.0 : epsilon;

    net::ModelParams params(std::move(vocab), arch, rng);
    // Sweep sigmoid(u_eos . h) across draws: scale the eos row broadly,
    // negative-heavy so slow terminators appear regularly.
    double multiplier = rng.uniform(-10.0, 4.0);
    auto eos_row = params.store().tensor(params.embedding_param()).row(0);
    for (double& x : eos_row) x *= multiplier;
    return params;
}

// --------------------------------------------------------------------------
// Decoder axioms
// --------------------------------------------------------------------------

SuiteResult check_incomplete_probable(const decode::DecoderSpec& spec, int trials,
                                      std::uint64_t seed) {
    SuiteResult result;
    result.suite = "incomplete_probable:" + decode::to_string(spec);
    result.seed = seed;
    Rng rng(seed);

    int violations = 0;
    int full_support = 0;
    std::string first_failure;
    for (int trial = 0; trial < trials; ++trial) {
        std::size_t size = 2 + rng.below(7); // 2..8
        ConditionalDistribution d = random_fuzz_distribution(rng, size);
        decode::StepSupport s = decode::step_support(d, spec);

        bool ok = !s.kept_ids.empty();
        if (s.kept_ids.size() == size) ++full_support;

        double kept_mass = 0.0;
        double min_kept_p = 1.0;
        for (std::size_t i = 0; i < s.kept_ids.size(); ++i) {
            double p = d.probs[static_cast<std::size_t>(s.kept_ids[i])];
            double q = s.renormalized_probs[i];
            kept_mass += q;
            min_kept_p = std::min(min_kept_p, p);
            if (q < p - 1e-12) ok = false; // no kept-token deflation
        }
        if (std::abs(kept_mass - 1.0) > 1e-9) ok = false;

        double max_dropped_p = 0.0;
        std::vector<bool> kept(size, false);
        for (TokenId id : s.kept_ids) kept[static_cast<std::size_t>(id)] = true;
        for (std::size_t v = 0; v < size; ++v)
            if (!kept[v]) max_dropped_p = std::max(max_dropped_p, d.probs[v]);
        if (min_kept_p < max_dropped_p) ok = false;

        if (spec.kind == decode::DecoderKind::nucleus && s.kept_ids.size() > 1 &&
            s.kept_ids.size() < size) {
            // Minimality: removing the least probable kept token must drop
            // the kept mass below mu.
            double total_kept_p = 0.0;
            for (TokenId id : s.kept_ids) total_kept_p += d.probs[static_cast<std::size_t>(id)];
            if (total_kept_p - min_kept_p >= spec.mu) ok = false;
        }

        if (!ok) {
            ++violations;
            if (first_failure.empty()) {
                std::ostringstream os;
                os << "trial " << trial << " size " << size;
                first_failure = os.str();
            }
        }
    }

    std::ostringstream detail;
    detail << trials << " trials, " << violations << " violations";
    if (full_support > 0) detail << "; " << full_support << " full-support cases (not proper subsets)";
    if (!first_failure.empty()) detail << "; first failure: " << first_failure;
    result.add("axioms", violations == 0, detail.str());
    return result;
}

// --------------------------------------------------------------------------
// Head conformance
// --------------------------------------------------------------------------

SuiteResult check_head_conformance(int trials, std::uint64_t seed) {
    SuiteResult result;
    result.suite = "head_conformance";
    result.seed = seed;
    Rng rng(seed);

    int norm_fail = 0, floor_fail = 0, ceiling_fail = 0, monotone_fail = 0;
    double worst_norm = 0.0, worst_floor = 0.0;

    for (int trial = 0; trial < trials; ++trial) {
        int vocab = 3 + static_cast<int>(rng.below(6));
        int hidden = 2 + static_cast<int>(rng.below(11));
        double eps = std::pow(10.0, rng.uniform(-5.0, -0.3));
        Tensor emb = Tensor::uniform(vocab, hidden, 2.0, rng);
        std::vector<double> h(static_cast<std::size_t>(hidden));
        for (double& x : h) x = rng.normal();
        TokenId eos = static_cast<TokenId>(rng.below(static_cast<std::uint64_t>(vocab)));

        auto check_norm = [&](const ConditionalDistribution& d) {
            DistributionCheck c = validate_distribution(d);
            worst_norm = std::max(worst_norm, c.normalization_error);
            if (!c.ok) ++norm_fail;
        };

        check_norm(heads::va_distribution(emb, h));

        auto t = static_cast<std::int64_t>(1 + rng.below(1000));
        ConditionalDistribution nm = heads::nmst_distribution(emb, eos, eps, h, t);
        check_norm(nm);
        double alpha = nm.probs[static_cast<std::size_t>(eos)];
        double floor = heads::eos_lower_bound(eps, t);
        worst_floor = std::max(worst_floor, floor - alpha);
        if (alpha < floor - 1e-12) ++floor_fail;
        // The strict ceiling is checked where doubles can represent the
        // gap: in log space while exp(log(1-alpha)) stays nonzero, and in
        // linear space while 1-alpha stays above one ulp.
        double log_gap = log_sigmoid(-dot(emb.row(eos), h)) +
                         static_cast<double>(t) * std::log1p(-eps);
        if (log_gap > -700.0 && !(nm.log_probs[static_cast<std::size_t>(eos)] < 0.0))
            ++ceiling_fail;
        if (log_gap > -34.0 && !(alpha < 1.0)) ++ceiling_fail;

        // st trajectory with fresh hiddens per step
        heads::HeadState state;
        double prev_alpha = -1.0;
        int steps = 1 + static_cast<int>(rng.below(30));
        for (int s = 0; s < steps; ++s) {
            for (double& x : h) x = rng.normal();
            ConditionalDistribution st = heads::st_distribution(emb, eos, eps, h, state);
            check_norm(st);
            double a = st.probs[static_cast<std::size_t>(eos)];
            if (a < prev_alpha - 1e-15) ++monotone_fail;
            prev_alpha = a;
            state = heads::advance_head_state(emb, HeadKind::st, eos, eps, h, state);
        }
    }

    {
        std::ostringstream os;
        os << trials << " draws, worst normalization error " << worst_norm;
        result.add("normalization", norm_fail == 0, os.str());
    }
    {
        std::ostringstream os;
        os << "worst floor slack " << worst_floor;
        result.add("nmst_lower_bound", floor_fail == 0, os.str());
    }
    result.add("nmst_below_one", ceiling_fail == 0);
    result.add("st_monotone", monotone_fail == 0);

    // Non-monotonicity is achievable: a high then low eos logit dips.
    {
        Rng wrng(Rng::mix(seed, 17));
        Tensor emb = Tensor::uniform(4, 3, 0.5, wrng);
        double eps = 0.01;
        std::vector<double> h1{2.5, 2.5, 2.5}, h2{-2.5, -2.5, -2.5};
        for (int c = 0; c < 3; ++c) emb.at(0, c) = 1.0;
        double a1 = heads::nmst_distribution(emb, 0, eps, h1, 1).probs[0];
        double a2 = heads::nmst_distribution(emb, 0, eps, h2, 2).probs[0];
        std::ostringstream os;
        os << "alpha_1 " << a1 << " alpha_2 " << a2;
        result.add("nmst_non_monotone_witness", a2 < a1, os.str());
    }

    // Limit: alpha_t pinned to 1 once the floor passes 1 - 1e-6.
    {
        Rng lrng(Rng::mix(seed, 23));
        double eps = 0.01;
        auto t_limit = static_cast<std::int64_t>(
            std::ceil(std::log(1e-6) / std::log1p(-eps)));
        Tensor emb = Tensor::uniform(5, 4, 1.0, lrng);
        bool ok = true;
        for (int rep = 0; rep < 50 && ok; ++rep) {
            std::vector<double> h(4);
            for (double& x : h) x = lrng.normal();
            double a =
                heads::nmst_distribution(emb, 0, eps, h, t_limit + rep).probs[0];
            ok = a >= 1.0 - 1e-6;
        }
        result.add("nmst_limit", ok, "threshold step " + std::to_string(t_limit));
    }
    return result;
}

// --------------------------------------------------------------------------
// Vanilla inconsistency witness
// --------------------------------------------------------------------------

bool WitnessModel::verify(std::string* detail) const {
    net::RecurrentModel model(params);
    const TokenId eos = params.vocab().eos_id();
    StatePtr state = model.start(context);
    for (std::int64_t t = 0; t < verify_cap; ++t) {
        ConditionalDistribution d = model.next(*state);
        double eos_p = d.probs[static_cast<std::size_t>(eos)];
        TokenId best = 0;
        double best_p = -1.0;
        for (std::size_t v = 0; v < d.probs.size(); ++v) {
            if (static_cast<TokenId>(v) == eos) continue;
            if (d.probs[v] > best_p) {
                best_p = d.probs[v];
                best = static_cast<TokenId>(v);
            }
        }
        if (!(eos_p < best_p)) {
            if (detail) {
                std::ostringstream os;
                os << "eos probability " << eos_p << " not below max " << best_p << " at step "
                   << t;
                *detail = os.str();
            }
            return false;
        }
        // Follow the greedy trajectory.
        state = model.advance(*state, best);
    }
    if (detail)
        *detail = "eos stayed below the best non-eos token for " + std::to_string(verify_cap) +
                  " greedy steps";
    return true;
}

WitnessModel build_vanilla_nontermination_witness(int vocab_size) {
    if (vocab_size < 2)
        throw std::invalid_argument("witness: vocab_size must be >= 2");
    std::vector<std::string> tokens{Vocabulary::kEos};
    for (int i = 1; i < vocab_size; ++i)
        tokens.push_back(std::string(1, static_cast<char>('a' + i - 1)));
    Vocabulary vocab(std::move(tokens), 0);

    net::Architecture arch;
    arch.cell = net::CellKind::rnn;
    arch.layers = 1;
    arch.hidden = 4;
    arch.embedding = 4;
    arch.tied = true;
    arch.head = HeadKind::va;

    net::ModelParams params(std::move(vocab), arch);
    // Zero recurrent weights and a positive bias pin the hidden state at
    // tanh(1) in every coordinate; the output rows then order every
    // reachable state's logits as token a > others > eos.
    params.store().tensor(params.layer_params()[0].b).fill(1.0);
    Tensor& emb = params.store().tensor(params.embedding_param());
    for (int c = 0; c < arch.embedding; ++c) {
        emb.at(0, c) = 0.0; // eos
        emb.at(1, c) = 0.5; // dominant token
        for (int r = 2; r < vocab_size; ++r) emb.at(r, c) = 0.1;
    }

    // A one-token context moves past the all-zero initial hidden state,
    // where every logit ties at zero.
    WitnessModel w{std::move(params), Context{{1}},
                   "eos probability below the best non-eos token at every reachable state; "
                   "greedy never terminates",
                   100000};
    return w;
}

SuiteResult check_vanilla_witness(int vocab_size, std::int64_t cap) {
    SuiteResult result;
    result.suite = "vanilla_witness";
    WitnessModel witness = build_vanilla_nontermination_witness(vocab_size);
    witness.verify_cap = cap;
    std::string detail;
    bool claim_ok = witness.verify(&detail);
    result.add("claim", claim_ok, detail);

    net::RecurrentModel model(witness.params);
    decode::DecodeResult greedy = decode::decode_greedy(model, witness.context, cap);
    result.add("greedy_hits_cap", !greedy.terminated &&
                                      static_cast<std::int64_t>(greedy.sequence.length()) == cap,
               "length " + std::to_string(greedy.sequence.length()));

    // Nucleus with mu at or below the dominant token's probability never
    // keeps eos.
    decode::DecoderSpec nucleus;
    nucleus.kind = decode::DecoderKind::nucleus;
    nucleus.mu = 0.4;
    nucleus.cap = cap;
    StatePtr state = model.start(witness.context);
    bool eos_never_kept = true;
    for (int t = 0; t < 50 && eos_never_kept; ++t) {
        ConditionalDistribution d = model.next(*state);
        decode::StepSupport s = decode::step_support(d, nucleus);
        for (TokenId id : s.kept_ids)
            if (id == witness.params.vocab().eos_id()) eos_never_kept = false;
        state = model.advance(*state, 1);
    }
    result.add("nucleus_excludes_eos", eos_never_kept);
    return result;
}

// --------------------------------------------------------------------------
// Termination bounds
// --------------------------------------------------------------------------

namespace {

// Constant-hidden model whose eos logit is a fixed large negative value, so
// the eos probability hugs its floor and termination happens as late as the
// parametrization allows.
net::ModelParams make_slow_terminator(HeadKind kind, double epsilon) {
    Vocabulary vocab({Vocabulary::kEos, "a", "b", "c", "d", "e"}, 0);
    net::Architecture arch;
    arch.cell = net::CellKind::rnn;
    arch.layers = 1;
    arch.hidden = 4;
    arch.embedding = 4;
    arch.tied = true;
    arch.head = kind;
    arch.epsilon = epsilon;
    net::ModelParams params(std::move(vocab), arch);
    params.store().tensor(params.layer_params()[0].b).fill(1.0);
    Tensor& emb = params.store().tensor(params.embedding_param());
    double h = std::tanh(1.0);
    double target_z = kind == HeadKind::st ? 12.0 : -12.0;
    for (int c = 0; c < arch.embedding; ++c) emb.at(0, c) = target_z / (4.0 * h);
    return params;
}

Context random_trial_context(const Vocabulary& vocab, Rng& rng) {
    std::vector<TokenId> ids;
    std::size_t len = rng.below(4);
    for (std::size_t i = 0; i < len; ++i)
        ids.push_back(static_cast<TokenId>(1 + rng.below(vocab.size() - 1)));
    return Context::from_ids(std::move(ids), vocab.eos_id());
}

struct BoundStats {
    std::int64_t max_greedy = 0;
    std::int64_t max_beam = 0;
    std::int64_t max_sampled = 0;
    int failures = 0;
    std::string first_failure;
};

void note_failure(BoundStats& stats, const std::string& what) {
    ++stats.failures;
    if (stats.first_failure.empty()) stats.first_failure = what;
}

void run_bound_trial(const ConditionalModel& model, const Context& context, std::int64_t t_half,
                     std::uint64_t seed, bool fixed_beam_bound, BoundStats& stats) {
    decode::DecodeResult greedy = decode::decode_greedy(model, context, t_half + 64);
    auto greedy_len = static_cast<std::int64_t>(greedy.sequence.length());
    stats.max_greedy = std::max(stats.max_greedy, greedy_len);
    if (!greedy.terminated || (fixed_beam_bound && greedy_len > t_half))
        note_failure(stats, "greedy length " + std::to_string(greedy_len));

    for (int k : {2, 4}) {
        std::int64_t cap = t_half + k + (fixed_beam_bound ? 0 : 64);
        decode::BeamOutcome beam = decode::decode_beam(model, context, k, cap);
        if (beam.final_set.size() != static_cast<std::size_t>(k))
            note_failure(stats, "beam-" + std::to_string(k) + " final set " +
                                    std::to_string(beam.final_set.size()));
        for (const decode::BeamItem& item : beam.final_set) {
            auto len = static_cast<std::int64_t>(item.ids.size());
            stats.max_beam = std::max(stats.max_beam, len);
            if (len > t_half + k)
                note_failure(stats, "beam-" + std::to_string(k) + " length " +
                                        std::to_string(len));
        }
    }

    int which = 0;
    for (const char* spec_text : {"top-k:2", "nucleus:0.4"}) {
        decode::DecoderSpec spec = decode::parse_decoder_spec(spec_text);
        spec.cap = t_half + 64;
        spec.seed = Rng::mix(seed, static_cast<std::uint64_t>(++which));
        decode::DecodeResult r = decode::decode(model, context, spec);
        auto len = static_cast<std::int64_t>(r.sequence.length());
        stats.max_sampled = std::max(stats.max_sampled, len);
        if (!r.terminated)
            note_failure(stats, std::string(spec_text) + " hit cap " + std::to_string(spec.cap));
    }
}

std::string bound_detail(const BoundStats& stats, std::int64_t t_half, int trials) {
    std::ostringstream os;
    os << trials << " models, t_half " << t_half << ", max lengths: greedy " << stats.max_greedy
       << ", beam " << stats.max_beam << ", sampled " << stats.max_sampled;
    if (!stats.first_failure.empty()) os << "; first failure: " << stats.first_failure;
    return os.str();
}

} // namespace

SuiteResult check_nmst_consistency(const std::vector<double>& eps_list, int trials,
                                   std::uint64_t seed) {
    SuiteResult result;
    result.suite = "nmst_consistency";
    result.seed = seed;
    for (std::size_t e = 0; e < eps_list.size(); ++e) {
        double eps = eps_list[e];
        std::int64_t t_half = heads::half_life(eps);
        BoundStats stats;
        Rng rng(Rng::mix(seed, e));
        for (int trial = 0; trial < trials; ++trial) {
            net::CellKind cell = trial % 2 == 0 ? net::CellKind::rnn : net::CellKind::lstm;
            net::ModelParams params =
                make_random_termination_model(HeadKind::nmst, eps, cell, 6, 4, rng);
            net::RecurrentModel model(params);
            run_bound_trial(model, random_trial_context(params.vocab(), rng), t_half,
                            Rng::mix(seed, 1000 + trial), /*fixed_beam_bound=*/true, stats);
        }
        {
            net::ModelParams params = make_slow_terminator(HeadKind::nmst, eps);
            net::RecurrentModel model(params);
            run_bound_trial(model, Context{{1}}, t_half, Rng::mix(seed, 31337),
                            /*fixed_beam_bound=*/true, stats);
        }
        std::ostringstream name;
        name << "bounds_eps_" << eps;
        result.add(name.str(), stats.failures == 0, bound_detail(stats, t_half, trials + 1));
    }
    return result;
}

SuiteResult check_st_consistency(const std::vector<double>& eps_list, int trials,
                                 std::uint64_t seed) {
    SuiteResult result;
    result.suite = "st_consistency";
    result.seed = seed;
    for (std::size_t e = 0; e < eps_list.size(); ++e) {
        double eps = eps_list[e];
        std::int64_t t_half = heads::half_life(eps);
        BoundStats stats;
        Rng rng(Rng::mix(seed, 100 + e));
        for (int trial = 0; trial < trials; ++trial) {
            net::CellKind cell = trial % 2 == 0 ? net::CellKind::rnn : net::CellKind::lstm;
            net::ModelParams params =
                make_random_termination_model(HeadKind::st, eps, cell, 6, 4, rng);
            net::RecurrentModel model(params);
            run_bound_trial(model, random_trial_context(params.vocab(), rng), t_half,
                            Rng::mix(seed, 2000 + trial), /*fixed_beam_bound=*/false, stats);
        }
        {
            // sigmoid near 1: survival decays only through (1-eps), the
            // slowest the st head allows (termination time ~ 1/eps).
            net::ModelParams params = make_slow_terminator(HeadKind::st, eps);
            net::RecurrentModel model(params);
            run_bound_trial(model, Context{{1}}, t_half, Rng::mix(seed, 31338),
                            /*fixed_beam_bound=*/false, stats);
        }
        std::ostringstream name;
        name << "termination_eps_" << eps;
        result.add(name.str(), stats.failures == 0, bound_detail(stats, t_half, trials + 1));
    }
    return result;
}

// --------------------------------------------------------------------------
// Two-sequence branch experiment
// --------------------------------------------------------------------------

BranchResult branch_experiment(HeadKind kind, const BranchConfig& cfg) {
    if (cfg.t0 < 2) throw std::invalid_argument("branch: t0 must be >= 2");
    Vocabulary vocab({Vocabulary::kEos, "a", "b"}, 0);
    const TokenId a = 1, b = 2;

    // Shared one-token context (the all-zero initial hidden state pins the
    // very first distribution, so condition past it), then a shared prefix
    // a^(t0-1); the short sequence stops at t0, the long one continues with
    // two more tokens before its eos.
    Context shared = Context::from_ids({a}, vocab.eos_id());
    std::vector<TokenId> short_ids(static_cast<std::size_t>(cfg.t0 - 1), a);
    short_ids.push_back(vocab.eos_id());
    std::vector<TokenId> long_ids(static_cast<std::size_t>(cfg.t0 - 1), a);
    long_ids.push_back(b);
    long_ids.push_back(b);
    long_ids.push_back(vocab.eos_id());

    std::vector<net::Example> dataset;
    dataset.emplace_back(shared, Sequence::from_ids(short_ids, vocab.eos_id()));
    dataset.emplace_back(shared, Sequence::from_ids(long_ids, vocab.eos_id()));

    net::Architecture arch;
    arch.cell = cfg.cell;
    arch.layers = 1;
    arch.hidden = cfg.hidden;
    arch.embedding = cfg.hidden;
    arch.tied = true;
    arch.head = kind;
    arch.epsilon = kind == HeadKind::va ? 0.0 : cfg.epsilon;

    net::TrainConfig tc;
    tc.learning_rate = cfg.learning_rate;
    tc.weight_decay = 0.0;
    tc.clip_norm = 0.0;
    tc.batch_size = 2;
    tc.max_epochs = cfg.max_epochs;
    tc.patience = cfg.max_epochs; // run the full budget; loss is the metric
    tc.lr_decay = 1.0;
    tc.seed = cfg.seed;
    tc.context_length = 0;

    net::TrainResult trained = net::train(vocab, arch, dataset, dataset, tc);
    net::RecurrentModel model(trained.params);

    BranchResult out;
    out.suite.suite = "branch:" + heads::to_string(kind);
    out.suite.seed = cfg.seed;
    out.trace = eval::eos_trace(model, dataset[1].first, dataset[1].second);
    for (const auto& [ctx, target] : dataset) out.final_nll += net::sequence_nll(model, ctx, target).total;

    std::ostringstream trace_os;
    for (double aT : out.trace) trace_os << aT << ' ';
    const auto t0 = static_cast<std::size_t>(cfg.t0);

    if (kind == HeadKind::st) {
        bool monotone = true;
        for (std::size_t i = 1; i < out.trace.size(); ++i)
            if (out.trace[i] < out.trace[i - 1] - 1e-12) monotone = false;
        out.suite.add("trace_monotone", monotone, trace_os.str());
        out.suite.add("final_nll", true, std::to_string(out.final_nll));
    } else {
        bool before_ok = true;
        for (std::size_t i = 0; i + 1 < t0; ++i)
            if (out.trace[i] > 0.1) before_ok = false;
        double at_t0 = out.trace[t0 - 1];
        double after_t0 = out.trace[t0];
        out.suite.add("trace_before_t0", before_ok, trace_os.str());
        out.suite.add("trace_branch_at_t0", at_t0 >= 0.4 && at_t0 <= 0.6,
                      "alpha_t0 " + std::to_string(at_t0));
        out.suite.add("trace_drop_after_t0", after_t0 <= 0.1,
                      "alpha_t0+1 " + std::to_string(after_t0));
        if (kind == HeadKind::nmst)
            out.suite.add("trace_non_monotone", at_t0 > after_t0);
        out.suite.add("final_nll", true, std::to_string(out.final_nll));
    }
    return out;
}

// --------------------------------------------------------------------------
// Named suites
// --------------------------------------------------------------------------

std::vector<SuiteResult> run_suite(const std::string& name, std::uint64_t seed, int trials) {
    std::vector<SuiteResult> results;
    bool all = name == "all";
    bool known = all;

    if (all || name == "heads") {
        known = true;
        results.push_back(check_head_conformance(trials, seed));
    }
    if (all || name == "decoders") {
        known = true;
        for (const char* text :
             {"greedy", "top-k:1", "top-k:2", "top-k:4", "nucleus:0.2", "nucleus:0.4",
              "nucleus:1.0"}) {
            results.push_back(
                check_incomplete_probable(decode::parse_decoder_spec(text), trials, seed));
        }
    }
    if (all || name == "consistency") {
        known = true;
        results.push_back(check_vanilla_witness(3, 100000));
        int bound_trials = std::max(1, trials / 10);
        results.push_back(
            check_nmst_consistency({1e-5, 5e-5, 1e-4, 5e-4, 0.1}, bound_trials, seed));
        results.push_back(check_st_consistency({1e-4, 0.1}, bound_trials, seed));
    }
    if (all || name == "branch" || name == "remark21") { // old alias accepted
        known = true;
        BranchConfig cfg;
        cfg.seed = seed;
        BranchResult va = branch_experiment(HeadKind::va, cfg);
        BranchResult nmst = branch_experiment(HeadKind::nmst, cfg);
        BranchResult st = branch_experiment(HeadKind::st, cfg);
        SuiteResult compare;
        compare.suite = "branch:comparison";
        compare.seed = seed;
        compare.add("st_nll_exceeds_nmst", st.final_nll > nmst.final_nll,
                    "st " + std::to_string(st.final_nll) + " vs nmst " +
                        std::to_string(nmst.final_nll));
        results.push_back(va.suite);
        results.push_back(nmst.suite);
        results.push_back(st.suite);
        results.push_back(compare);
    }
    if (!known) throw std::invalid_argument("unknown suite: " + name);
    return results;
}

} // namespace termlab::verify
