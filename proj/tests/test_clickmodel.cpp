#include "doctest.h"

#include <cmath>

#include "interleave_lab/clickmodel.hpp"

using namespace ilab;

namespace {

std::vector<RelevanceGrade> grades(std::initializer_list<int> g) {
    std::vector<RelevanceGrade> out;
    for (int v : g) out.push_back(RelevanceGrade{v});
    return out;
}

// Exact P(click at each position) for a cascade, by propagating the
// probability of still scanning.
std::vector<double> click_marginals(const std::vector<RelevanceGrade>& g, const ClickModelSpec& spec) {
    std::vector<double> out;
    double scanning = 1.0;
    for (auto grade : g) {
        const double c = spec.click_prob(grade);
        out.push_back(scanning * c);
        scanning *= 1.0 - c * spec.stop_prob(grade);
    }
    return out;
}

}  // namespace

TEST_SUITE("click model spec") {
    TEST_CASE("builtin tables") {
        const auto p = perfect_spec();
        const auto n = navigational_spec();
        CHECK(p.click_table() == std::vector<double>{0.0, 0.5, 1.0});
        CHECK(p.stop_table() == std::vector<double>{0.0, 0.0, 0.0});
        CHECK(n.click_table() == std::vector<double>{0.0, 0.5, 1.0});
        CHECK(n.stop_table() == std::vector<double>{0.0, 0.5, 1.0});
        CHECK(builtin_click_model("navigational").name() == "navigational");
        CHECK(n.max_grade() == 2);
    }

    TEST_CASE("bad tables") {
        CHECK_THROWS_AS(ClickModelSpec("x", {0.1, 0.2}, {0.0}), Error);
        CHECK_THROWS_AS(ClickModelSpec("x", {0.1, 1.2}, {0.0, 0.0}), Error);
        CHECK_THROWS_AS(ClickModelSpec("x", {}, {}), Error);
        CHECK_THROWS_AS(builtin_click_model("informational"), Error);
    }

    TEST_CASE("grade outside the table") {
        try {
            perfect_spec().click_prob(RelevanceGrade{3});
            FAIL("expected GradeOutOfRange");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::GradeOutOfRange);
        }
    }
}

TEST_SUITE("cascade") {
    TEST_CASE("empty ranking") {
        RandomStream g(1);
        const std::vector<RelevanceGrade> none;
        CHECK_THROWS_AS(simulate_cascade(std::span(none), perfect_spec(), g), Error);
    }

    TEST_CASE("perfect model clicks every highly relevant item and nothing irrelevant") {
        RandomStream g(2);
        const auto r = grades({2, 0, 2, 0, 2});
        for (int i = 0; i < 200; ++i) {
            const auto c = simulate_cascade(std::span(std::as_const(r)), perfect_spec(), g);
            CHECK(c.positions() == std::vector<std::size_t>{1, 3, 5});
        }
    }

    TEST_CASE("navigational model leaves after a highly relevant click") {
        RandomStream g(3);
        const auto r = grades({0, 2, 2, 1});
        for (int i = 0; i < 200; ++i) {
            const auto t = simulate_cascade_traced(std::span(std::as_const(r)), navigational_spec(), g);
            CHECK(t.clicks.positions() == std::vector<std::size_t>{2});
            CHECK(t.stop_position == 2u);
        }
    }

    TEST_CASE("no click at or after the stop position other than the stop itself") {
        RandomStream g(4);
        const auto r = grades({1, 1, 2, 1, 0, 1, 2, 1});
        for (int i = 0; i < 5000; ++i) {
            const auto t = simulate_cascade_traced(std::span(std::as_const(r)), navigational_spec(), g);
            const auto& pos = t.clicks.positions();
            CHECK(std::is_sorted(pos.begin(), pos.end()));
            if (t.stop_position) {
                REQUIRE_FALSE(pos.empty());
                CHECK(pos.back() == *t.stop_position);
            }
        }
    }

    TEST_CASE("click frequencies match the exact cascade marginals") {
        for (const auto& spec : {perfect_spec(), navigational_spec()}) {
            CAPTURE(spec.name());
            RandomStream g(5);
            const auto r = grades({1, 1, 0, 2, 1});
            const auto exact = click_marginals(r, spec);
            constexpr int kDraws = 100000;
            std::vector<int> hits(r.size(), 0);
            for (int i = 0; i < kDraws; ++i) {
                const auto clicks = simulate_cascade(std::span(std::as_const(r)), spec, g);
                for (auto p : clicks.positions()) ++hits[p - 1];
            }
            for (std::size_t k = 0; k < r.size(); ++k) {
                const double f = static_cast<double>(hits[k]) / kDraws;
                const double se = std::sqrt(exact[k] * (1.0 - exact[k]) / kDraws);
                CHECK(std::abs(f - exact[k]) <= 4 * se + 1e-12);
            }
        }
    }

    TEST_CASE("hand-computed marginals") {
        // Two grade-1 items under the navigational model: the second is
        // reached unless the first was clicked and ended the session.
        const auto m = click_marginals(grades({1, 1}), navigational_spec());
        CHECK(m[0] == doctest::Approx(0.5));
        CHECK(m[1] == doctest::Approx(0.5 * (1.0 - 0.25)));
    }

    TEST_CASE("same stream, same clicks") {
        const auto r = grades({1, 2, 1, 0, 1});
        RandomStream g1(77), g2(77);
        for (int i = 0; i < 100; ++i) {
            CHECK(simulate_cascade(std::span(std::as_const(r)), navigational_spec(), g1) ==
                  simulate_cascade(std::span(std::as_const(r)), navigational_spec(), g2));
        }
    }
}
