#include <doctest.h>

#include <random>

#include "engage/model.hpp"

using namespace engage;

namespace {

ModelParams defaults() { return ModelParams{}; }

StepOutcome outcome(Decision y, Decision cf, std::optional<Adherence> z) {
    return {y, cf, z, 0.0};
}

}  // namespace

TEST_CASE("unassisted accuracy depends only on context") {
    ModelParams p = defaults();
    CHECK(prob_correct_no_ai(p, Context::low) == 0.3);
    CHECK(prob_correct_no_ai(p, Context::high) == 1.0);
    p.alpha_low = 0.0;
    CHECK(prob_correct_no_ai(p, Context::low) == 0.0);
}

TEST_CASE("assisted accuracy mixes adherence with the unassisted rate") {
    const ModelParams p = defaults();
    CHECK(prob_correct_with_ai(p, Context::low, 1.0) == 1.0);
    CHECK(prob_correct_with_ai(p, Context::low, 0.0) == 0.3);
    CHECK(prob_correct_with_ai(p, Context::low, 0.5) == doctest::Approx(0.65).epsilon(1e-15));

    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        ModelParams q;
        q.alpha_low = u(gen);
        const double a = u(gen), b = u(gen);
        const double lo = std::min(a, b), hi = std::max(a, b);
        const double plo = prob_correct_with_ai(q, Context::low, lo);
        const double phi = prob_correct_with_ai(q, Context::low, hi);
        CHECK(plo >= q.alpha_low - 1e-15);
        CHECK(phi <= 1.0 + 1e-15);
        CHECK(plo <= phi + 1e-15);
    }
}

TEST_CASE("engagement update cases") {
    const ModelParams p = defaults();
    using enum Decision;
    CHECK(update_engagement(p, 0.5, Action::on, outcome(correct, correct, Adherence::adhered)) ==
          doctest::Approx(0.35));
    CHECK(update_engagement(p, 0.5, Action::on, outcome(correct, correct, Adherence::ignored)) ==
          doctest::Approx(0.35));
    CHECK(update_engagement(p, 0.5, Action::on, outcome(correct, incorrect, Adherence::adhered)) ==
          doctest::Approx(0.65));
    CHECK(update_engagement(p, 0.5, Action::on, outcome(incorrect, incorrect, Adherence::ignored)) ==
          doctest::Approx(0.65));
    CHECK(update_engagement(p, 1.0, Action::off, outcome(incorrect, incorrect, std::nullopt)) == 1.0);
    CHECK(update_engagement(p, 0.5, Action::off, outcome(correct, correct, std::nullopt)) == 0.5);
    CHECK(update_engagement(p, 0.5, Action::off, outcome(incorrect, incorrect, std::nullopt)) ==
          doctest::Approx(0.65));
}

TEST_CASE("engagement update rejects tuples outside the case list") {
    const ModelParams p = defaults();
    using enum Decision;
    // ignored advice but counterfactual differs from the decision
    CHECK_THROWS_AS(update_engagement(p, 0.5, Action::on, outcome(correct, incorrect, Adherence::ignored)),
                    InvalidArgument);
    // adhered yet incorrect
    CHECK_THROWS_AS(update_engagement(p, 0.5, Action::on, outcome(incorrect, incorrect, Adherence::adhered)),
                    InvalidArgument);
    CHECK_THROWS_AS(update_engagement(p, 0.5, Action::on, outcome(correct, correct, std::nullopt)),
                    InvalidArgument);
    CHECK_THROWS_AS(update_engagement(p, 0.5, Action::off, outcome(correct, correct, Adherence::adhered)),
                    InvalidArgument);
    CHECK_THROWS_AS(update_engagement(p, 0.5, Action::off, outcome(correct, incorrect, std::nullopt)),
                    InvalidArgument);
    CHECK_THROWS_AS(update_engagement(p, 1.5, Action::off, outcome(correct, correct, std::nullopt)),
                    InvalidArgument);
}

TEST_CASE("parameter validation") {
    ModelParams p;
    CHECK_NOTHROW(p.validate());
    p.alpha_low = 1.2;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = {};
    p.r_incorrect = 1.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = {};
    p.grid_size = 1;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = {};
    p.horizon = 0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
}

TEST_CASE("sampled steps satisfy the outcome invariants") {
    const ModelParams p = defaults();
    Rng rng(11);
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 20000; ++i) {
        const double theta = u(gen);
        const Context c = i % 2 ? Context::low : Context::high;
        const Action a = i % 3 ? Action::on : Action::off;
        const StepOutcome s = sample_step(p, c, theta, a, rng);
        if (a == Action::off) {
            CHECK_FALSE(s.adherence.has_value());
            CHECK(s.counterfactual == s.decision);
        } else {
            REQUIRE(s.adherence.has_value());
            if (*s.adherence == Adherence::ignored) CHECK(s.counterfactual == s.decision);
            if (*s.adherence == Adherence::adhered) CHECK(s.decision == Decision::correct);
        }
        CHECK(s.theta_after == update_engagement(p, theta, a, s));
    }
}

TEST_CASE("sampled step degenerate cases") {
    ModelParams p = defaults();
    Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
        CHECK(sample_step(p, Context::low, 1.0, Action::on, rng).decision == Decision::correct);
        CHECK(sample_step(p, Context::high, 0.0, Action::on, rng).decision == Decision::correct);
    }
}

TEST_CASE("sampled decision frequencies converge to the marginals") {
    const ModelParams p = defaults();
    constexpr int kDraws = 1'000'000;
    struct Case {
        Context c;
        double theta;
        Action a;
        double expected;
    };
    const Case cases[] = {
        {Context::low, 0.5, Action::on, prob_correct_with_ai(p, Context::low, 0.5)},
        {Context::low, 0.2, Action::on, prob_correct_with_ai(p, Context::low, 0.2)},
        {Context::low, 0.5, Action::off, prob_correct_no_ai(p, Context::low)},
    };
    Rng rng(2024);
    for (const Case& k : cases) {
        int correct = 0;
        for (int i = 0; i < kDraws; ++i) {
            correct += sample_step(p, k.c, k.theta, k.a, rng).decision == Decision::correct;
        }
        CHECK(static_cast<double>(correct) / kDraws == doctest::Approx(k.expected).epsilon(0.005));
    }
}

TEST_CASE("context switching") {
    ModelParams p = defaults();
    Rng rng(9);
    p.phi = 0.0;
    for (int i = 0; i < 1000; ++i) CHECK(sample_context_transition(p, Context::low, rng) == Context::low);

    p.phi = 0.1;
    int switched = 0;
    constexpr int kDraws = 200000;
    for (int i = 0; i < kDraws; ++i) {
        switched += sample_context_transition(p, Context::low, rng) == Context::high;
    }
    CHECK(static_cast<double>(switched) / kDraws == doctest::Approx(0.1).epsilon(0.03));

    p.phi = 0.5;
    int high = 0;
    for (int i = 0; i < kDraws; ++i) high += sample_context_transition(p, Context::high, rng) == Context::high;
    CHECK(static_cast<double>(high) / kDraws == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("engagement update closure and fixed points over random inputs") {
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    using enum Decision;
    const StepOutcome tuples[] = {
        outcome(correct, correct, Adherence::adhered),
        outcome(correct, correct, Adherence::ignored),
        outcome(correct, incorrect, Adherence::adhered),
        outcome(incorrect, incorrect, Adherence::ignored),
    };
    ModelParams p;
    for (int i = 0; i < 100000; ++i) {
        p.eta = u(gen);
        const double a = u(gen), b = u(gen);
        const double lo = std::min(a, b), hi = std::max(a, b);
        for (const StepOutcome& o : tuples) {
            const double x = update_engagement(p, lo, Action::on, o);
            const double y = update_engagement(p, hi, Action::on, o);
            CHECK((x >= 0.0 && x <= 1.0));
            CHECK(x <= y);
        }
        const StepOutcome off_wrong = outcome(incorrect, incorrect, std::nullopt);
        const double z = update_engagement(p, lo, Action::off, off_wrong);
        CHECK((z >= 0.0 && z <= 1.0));
        CHECK(update_engagement(p, 0.0, Action::on, tuples[0]) == 0.0);
        CHECK(update_engagement(p, 1.0, Action::on, tuples[2]) == 1.0);
        CHECK(update_engagement(p, 1.0, Action::off, off_wrong) == 1.0);
    }
}
