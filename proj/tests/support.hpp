#pragma once

// Shared test utilities: an independent chi-square tail probability
// (regularized incomplete gamma), a central finite-difference gradient
// harness, and small fixture builders.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "termlab/core/model.hpp"
#include "termlab/core/rng.hpp"
#include "termlab/net/loss.hpp"
#include "termlab/net/params.hpp"

namespace testsupport {

// Regularized upper incomplete gamma Q(a, x), series/continued-fraction
// split as in the classic numerical recipes.
inline double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        // lower series
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-15) break;
        }
        double p = sum * std::exp(-x + a * std::log(x) - gln);
        return 1.0 - p;
    }
    // continued fraction
    double b = x + 1.0 - a;
    double c = 1e300;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - gln) * h;
}

/// Chi-square upper tail probability with `dof` degrees of freedom.
inline double chi_square_p_value(double statistic, int dof) {
    return gamma_q(static_cast<double>(dof) / 2.0, statistic / 2.0);
}

/// Goodness-of-fit p-value for observed counts against expected counts.
/// Bins with expected mass below `min_expected` merge into a shared bin.
inline double chi_square_test(const std::vector<double>& expected,
                              const std::vector<std::int64_t>& observed,
                              double min_expected = 5.0) {
    if (expected.size() != observed.size())
        throw std::invalid_argument("chi_square_test: size mismatch");
    double merged_exp = 0.0;
    double merged_obs = 0.0;
    double stat = 0.0;
    int bins = 0;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (expected[i] < min_expected) {
            merged_exp += expected[i];
            merged_obs += static_cast<double>(observed[i]);
        } else {
            double d = static_cast<double>(observed[i]) - expected[i];
            stat += d * d / expected[i];
            ++bins;
        }
    }
    if (merged_exp > 0.0) {
        double d = merged_obs - merged_exp;
        stat += d * d / merged_exp;
        ++bins;
    }
    if (bins < 2) return 1.0;
    return chi_square_p_value(stat, bins - 1);
}

/// Max relative disagreement between tape gradients and central finite
/// differences of `loss_fn` (which must evaluate the same loss from the
/// current parameter values). Near-zero gradients fall back to an
/// absolute scale of 1e-6.
inline double gradcheck(termlab::net::ModelParams& params,
                        const std::function<double()>& loss_fn,
                        const termlab::net::Gradients& analytic, double step = 1e-4) {
    double worst = 0.0;
    auto& store = params.store();
    for (std::size_t p = 0; p < store.count(); ++p) {
        if (!store.trainable(static_cast<int>(p))) continue;
        auto& data = store.tensor(static_cast<int>(p)).data;
        for (std::size_t i = 0; i < data.size(); ++i) {
            double saved = data[i];
            data[i] = saved + step;
            double up = loss_fn();
            data[i] = saved - step;
            double down = loss_fn();
            data[i] = saved;
            double fd = (up - down) / (2.0 * step);
            double an = analytic.by_param[p][i];
            double denom = std::max(std::abs(fd) + std::abs(an), 1e-6);
            worst = std::max(worst, std::abs(fd - an) / denom);
        }
    }
    return worst;
}

/// Vocabulary {<eos>, a, b, ...} of the requested size.
inline termlab::Vocabulary letters_vocab(int size) {
    std::vector<std::string> tokens{termlab::Vocabulary::kEos};
    for (int i = 1; i < size; ++i)
        tokens.push_back(std::string(1, static_cast<char>('a' + i - 1)));
    return termlab::Vocabulary(std::move(tokens), 0);
}

/// Random table model over `vocab_size` tokens: every prefix up to `depth`
/// gets an independent random row; deeper prefixes fall back to an
/// eos-heavy default so decoding stays short.
inline termlab::TableModel random_table_model(int vocab_size, int depth, termlab::Rng& rng) {
    termlab::Vocabulary vocab = letters_vocab(vocab_size);
    std::vector<double> fallback(static_cast<std::size_t>(vocab_size), 0.02);
    fallback[0] = 0.9;
    termlab::TableModel model(std::move(vocab), fallback);

    std::function<void(std::vector<termlab::TokenId>&, int)> fill =
        [&](std::vector<termlab::TokenId>& prefix, int remaining) {
            std::vector<double> w(static_cast<std::size_t>(vocab_size));
            for (double& x : w) x = 0.05 + rng.next_double();
            model.set_row(prefix, w);
            if (remaining == 0) return;
            for (termlab::TokenId t = 1; t < vocab_size; ++t) {
                prefix.push_back(t);
                fill(prefix, remaining - 1);
                prefix.pop_back();
            }
        };
    std::vector<termlab::TokenId> prefix;
    fill(prefix, depth);
    return model;
}


// ---------------------------------------------------------------------
// Independent brute-force transcription of the documented beam-search
// semantics. No incremental state: prefix probabilities and per-prefix
// distributions are recomputed from scratch through the model interface
// every round.
// ---------------------------------------------------------------------

inline termlab::ConditionalDistribution dist_at(const termlab::ConditionalModel& model,
                                                const termlab::Context& ctx,
                                                const std::vector<termlab::TokenId>& prefix) {
    termlab::StatePtr s = model.start(ctx);
    for (termlab::TokenId t : prefix) s = model.advance(*s, t);
    return model.next(*s);
}

inline double logprob_of(const termlab::ConditionalModel& model, const termlab::Context& ctx,
                         const std::vector<termlab::TokenId>& ids) {
    double total = 0.0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        std::vector<termlab::TokenId> prefix(ids.begin(),
                                             ids.begin() + static_cast<std::ptrdiff_t>(i));
        total += dist_at(model, ctx, prefix).log_probs[static_cast<std::size_t>(ids[i])];
    }
    return total;
}

struct OracleBeam {
    std::vector<std::vector<termlab::TokenId>> final_set;
    std::vector<termlab::TokenId> best;
    double best_score = 0.0;
    bool terminated = false;
};

inline OracleBeam brute_force_beam(const termlab::ConditionalModel& model,
                                   const termlab::Context& ctx, int k, std::int64_t cap) {
    using termlab::TokenId;
    const TokenId eos = model.vocabulary().eos_id();
    const auto width = static_cast<std::size_t>(k);
    std::vector<std::vector<TokenId>> active{{}};
    std::vector<std::vector<TokenId>> finals;

    auto better = [&](const std::vector<TokenId>& a, const std::vector<TokenId>& b) {
        double sa = logprob_of(model, ctx, a);
        double sb = logprob_of(model, ctx, b);
        if (sa != sb) return sa > sb;
        return a < b;
    };

    for (std::int64_t round = 0; round < cap && finals.size() < width && !active.empty();
         ++round) {
        std::vector<std::vector<TokenId>> pool;
        for (const auto& prefix : active) {
            termlab::ConditionalDistribution d = dist_at(model, ctx, prefix);
            std::vector<TokenId> order(d.probs.size());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<TokenId>(i);
            std::sort(order.begin(), order.end(), [&](TokenId a, TokenId b) {
                if (d.probs[static_cast<std::size_t>(a)] !=
                    d.probs[static_cast<std::size_t>(b)])
                    return d.probs[static_cast<std::size_t>(a)] >
                           d.probs[static_cast<std::size_t>(b)];
                return a < b;
            });
            for (std::size_t j = 0; j < std::min(width, order.size()); ++j) {
                auto child = prefix;
                child.push_back(order[j]);
                pool.push_back(std::move(child));
            }
        }
        std::sort(pool.begin(), pool.end(), better);

        std::vector<std::vector<TokenId>> selected;
        std::size_t take = std::min(width, pool.size());
        for (std::size_t i = 0; i < take && finals.size() < width; ++i) {
            if (pool[i].back() == eos)
                finals.push_back(pool[i]);
            else
                selected.push_back(pool[i]);
        }
        if (finals.size() >= width) {
            active.clear();
            break;
        }
        for (std::size_t i = take; i < pool.size() && selected.size() < width; ++i)
            if (pool[i].back() != eos) selected.push_back(pool[i]);
        active = std::move(selected);
    }

    OracleBeam out;
    out.final_set = finals;
    const std::vector<TokenId>* best = nullptr;
    for (const auto& ids : finals)
        if (!best || better(ids, *best)) best = &ids;
    if (finals.size() < width)
        for (const auto& ids : active)
            if (!best || better(ids, *best)) best = &ids;
    if (!best) throw std::runtime_error("oracle beam: nothing survived");
    out.best = *best;
    out.terminated = out.best.back() == eos;
    out.best_score = logprob_of(model, ctx, out.best);
    return out;
}

/// Unique scratch path under the build tree.
inline std::filesystem::path temp_path(const std::string& stem) {
    auto dir = std::filesystem::temp_directory_path() / "termlab-tests";
    std::filesystem::create_directories(dir);
    static int counter = 0;
    return dir / (stem + "-" + std::to_string(counter++));
}

} // namespace testsupport
