#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "termlab/core/logmath.hpp"
#include "termlab/heads/heads.hpp"

using namespace termlab;
using heads::HeadKind;
using heads::HeadState;

namespace {

// Embedding whose logits U.h equal `logits` when h = (1).
Tensor column_embedding(const std::vector<double>& logits) {
    Tensor t(static_cast<int>(logits.size()), 1);
    for (std::size_t i = 0; i < logits.size(); ++i) t.at(static_cast<int>(i), 0) = logits[i];
    return t;
}

} // namespace

TEST_CASE("va head: uniform for equal logits") {
    Tensor emb = column_embedding({1.0, 1.0, 1.0});
    auto d = heads::va_distribution(emb, std::vector<double>{1.0});
    for (double p : d.probs) CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("va head: hand-computed softmax [ln2, 0, 0]") {
    Tensor emb = column_embedding({std::log(2.0), 0.0, 0.0});
    auto d = heads::va_distribution(emb, std::vector<double>{1.0});
    CHECK(d.probs[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(d.probs[1] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(d.probs[2] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("va head: shift invariance") {
    Tensor emb = column_embedding({0.3, -1.2, 2.0});
    Tensor shifted = column_embedding({0.3 + 1000.0, -1.2 + 1000.0, 2.0 + 1000.0});
    auto a = heads::va_distribution(emb, std::vector<double>{1.0});
    auto b = heads::va_distribution(shifted, std::vector<double>{1.0});
    for (std::size_t i = 0; i < a.probs.size(); ++i)
        CHECK(a.probs[i] == doctest::Approx(b.probs[i]).epsilon(1e-9));
}

TEST_CASE("st head: alpha follows the survival product by hand") {
    // sigmoid(z) = 0.5 at z = 0; eos row 0 gives z = 0 for any h.
    Tensor emb = column_embedding({0.0, 1.0, -1.0});
    double eps = 0.1;
    HeadState state;
    auto d1 = heads::st_distribution(emb, 0, eps, std::vector<double>{1.0}, state);
    CHECK(d1.probs[0] == doctest::Approx(0.55).epsilon(1e-12)); // 1 - 0.9 * 0.5
    state = heads::advance_head_state(emb, HeadKind::st, 0, eps, std::vector<double>{1.0}, state);
    auto d2 = heads::st_distribution(emb, 0, eps, std::vector<double>{1.0}, state);
    CHECK(d2.probs[0] == doctest::Approx(0.7975).epsilon(1e-12)); // 1 - 0.45^2
    CHECK(state.log_survival < 0.0);
}

TEST_CASE("st head: boundary where survival factors approach one") {
    // large eos logit -> sigmoid -> 1; tiny eps: alpha_1 -> 0
    Tensor emb = column_embedding({30.0, 1.0, -1.0});
    HeadState state;
    auto d = heads::st_distribution(emb, 0, 1e-9, std::vector<double>{1.0}, state);
    CHECK(d.probs[0] < 1e-8);
}

TEST_CASE("nmst head: hand evaluation at eps 0.1, sigma 0.5, t 2") {
    Tensor emb = column_embedding({0.0, 1.0, -1.0});
    auto d = heads::nmst_distribution(emb, 0, 0.1, std::vector<double>{1.0}, 2);
    CHECK(d.probs[0] == doctest::Approx(0.595).epsilon(1e-12)); // 0.5*0.19 + 0.5
}

TEST_CASE("nmst head: sigma limits give the two bounding curves") {
    double eps = 0.1;
    for (std::int64_t t : {1, 3, 9}) {
        Tensor low = column_embedding({-40.0, 1.0, -1.0});
        auto d_low = heads::nmst_distribution(low, 0, eps, std::vector<double>{1.0}, t);
        CHECK(d_low.probs[0] ==
              doctest::Approx(heads::eos_lower_bound(eps, t)).epsilon(1e-9));

        Tensor high = column_embedding({40.0, 1.0, -1.0});
        auto d_high = heads::nmst_distribution(high, 0, eps, std::vector<double>{1.0}, t);
        CHECK(d_high.probs[0] == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("eos_lower_bound hand values") {
    CHECK(heads::eos_lower_bound(0.1, 1) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(heads::eos_lower_bound(0.1, 7) ==
          doctest::Approx(1.0 - std::pow(0.9, 7)).epsilon(1e-12));
    CHECK(heads::eos_lower_bound(0.3, 200) == doctest::Approx(1.0));
    CHECK_THROWS(heads::eos_lower_bound(0.0, 1));
    CHECK_THROWS(heads::eos_lower_bound(0.1, 0));
}

TEST_CASE("half_life matches direct enumeration") {
    for (double eps : {0.9, 0.5, 0.37, 0.1, 0.03, 1e-3, 1e-4, 1e-5}) {
        std::int64_t scanned = 1;
        while (!(heads::eos_lower_bound(eps, scanned) > 0.5)) ++scanned;
        CHECK(heads::half_life(eps) == scanned);
    }
    CHECK(heads::half_life(0.5) == 2);
    CHECK(heads::half_life(0.1) == 7);
}

TEST_CASE("half_life resolves exact power boundaries upward") {
    for (int k : {1, 2, 3, 4, 6, 8, 16}) {
        double eps = 1.0 - std::exp2(-1.0 / static_cast<double>(k));
        CHECK(heads::half_life(eps) == k + 1);
    }
}

TEST_CASE("heads emit valid distributions over random draws") {
    Rng rng(123);
    for (int trial = 0; trial < 500; ++trial) {
        int vocab = 2 + static_cast<int>(rng.below(6));
        int hidden = 1 + static_cast<int>(rng.below(8));
        Tensor emb = Tensor::uniform(vocab, hidden, 1.5, rng);
        std::vector<double> h(static_cast<std::size_t>(hidden));
        for (double& x : h) x = rng.normal();
        CHECK(validate_distribution(heads::va_distribution(emb, h)).ok);
        double eps = std::pow(10.0, rng.uniform(-4.0, -0.5));
        CHECK(validate_distribution(
                  heads::nmst_distribution(emb, 0, eps, h, 1 + static_cast<std::int64_t>(rng.below(50))))
                  .ok);
        HeadState state;
        CHECK(validate_distribution(heads::st_distribution(emb, 0, eps, h, state)).ok);
    }
}

TEST_CASE("nmst alpha respects the floor for t up to 100") {
    Rng rng(321);
    for (int trial = 0; trial < 200; ++trial) {
        Tensor emb = Tensor::uniform(5, 4, 2.0, rng);
        std::vector<double> h(4);
        for (double& x : h) x = rng.normal();
        double eps = std::pow(10.0, rng.uniform(-5.0, -0.5));
        for (std::int64_t t = 1; t <= 100; t += 7) {
            auto d = heads::nmst_distribution(emb, 0, eps, h, t);
            CHECK(d.probs[0] >= heads::eos_lower_bound(eps, t) - 1e-12);
        }
    }
}

TEST_CASE("st alpha is non-decreasing along any trajectory") {
    Rng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        Tensor emb = Tensor::uniform(4, 3, 2.0, rng);
        double eps = 0.01;
        HeadState state;
        double prev = 0.0;
        for (int t = 0; t < 40; ++t) {
            std::vector<double> h(3);
            for (double& x : h) x = rng.normal();
            auto d = heads::st_distribution(emb, 0, eps, h, state);
            CHECK(d.probs[0] >= prev - 1e-15);
            prev = d.probs[0];
            state = heads::advance_head_state(emb, HeadKind::st, 0, eps, h, state);
            CHECK(state.log_survival <= 0.0);
        }
    }
}

TEST_CASE("nmst can decrease where st cannot") {
    Tensor emb = column_embedding({1.0, 0.4, -0.4});
    double eps = 0.01;
    double a1 = heads::nmst_distribution(emb, 0, eps, std::vector<double>{5.0}, 1).probs[0];
    double a2 = heads::nmst_distribution(emb, 0, eps, std::vector<double>{-5.0}, 2).probs[0];
    CHECK(a2 < a1);
}

TEST_CASE("head params validation") {
    heads::HeadParams p;
    p.output_embeddings = Tensor(3, 2);
    p.kind = HeadKind::va;
    p.epsilon = 0.1;
    CHECK_THROWS(heads::validate_head_params(p)); // epsilon with va
    p.epsilon = 0.0;
    CHECK_NOTHROW(heads::validate_head_params(p));
    p.kind = HeadKind::st;
    CHECK_THROWS(heads::validate_head_params(p)); // missing epsilon
    p.epsilon = 0.5;
    CHECK_NOTHROW(heads::validate_head_params(p));
}

TEST_CASE("HeadParams entry points agree with the tensor-level math") {
    Rng rng(5);
    Tensor emb = Tensor::uniform(4, 3, 1.0, rng);
    std::vector<double> h{0.2, -0.4, 1.1};

    heads::HeadParams va{emb, HeadKind::va, 0.0, 0};
    CHECK(heads::va_head(h, va).log_probs == heads::va_distribution(emb, h).log_probs);

    heads::HeadParams st{emb, HeadKind::st, 0.2, 0};
    HeadState state;
    auto [d, next] = heads::st_head(h, st, state);
    CHECK(d.log_probs == heads::st_distribution(emb, 0, 0.2, h, state).log_probs);
    CHECK(next.step == 1);

    heads::HeadParams nm{emb, HeadKind::nmst, 0.2, 0};
    CHECK(heads::nmst_head(h, nm, 3).log_probs ==
          heads::nmst_distribution(emb, 0, 0.2, h, 3).log_probs);
}
