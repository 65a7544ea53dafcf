#include "doctest.h"

#include <algorithm>
#include <set>

#include "interleave_lab/core.hpp"
#include "interleave_lab/random.hpp"

using namespace ilab;

namespace {

Ranking make_ranking(std::vector<std::pair<std::string, int>> items) {
    Ranking r{"q1", {}};
    for (auto& [id, g] : items) r.items.push_back({id, RelevanceGrade{g}});
    return r;
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an ilab::Error");
    return ErrorCode::IoError;
}

}  // namespace

TEST_SUITE("ranking") {
    TEST_CASE("valid ranking is returned unchanged") {
        const auto r = make_ranking({{"d1", 2}, {"d2", 0}, {"d3", 1}});
        const Ranking& back = validate_ranking(r);
        CHECK(&back == &r);
        CHECK(back.grades() == std::vector<RelevanceGrade>{{2}, {0}, {1}});
    }

    TEST_CASE("validation is idempotent") {
        const auto r = make_ranking({{"a", 1}, {"b", 2}});
        CHECK(validate_ranking(validate_ranking(r)) == r);
    }

    TEST_CASE("duplicate doc id") {
        const auto r = make_ranking({{"d1", 1}, {"d2", 0}, {"d1", 2}});
        CHECK(code_of([&] { validate_ranking(r); }) == ErrorCode::DuplicateItem);
    }

    TEST_CASE("empty ranking") {
        CHECK(code_of([] { validate_ranking(Ranking{}); }) == ErrorCode::EmptyRanking);
    }

    TEST_CASE("grade range") {
        CHECK(code_of([] { validate_ranking(make_ranking({{"d", 3}})); }) == ErrorCode::GradeOutOfRange);
        CHECK(code_of([] { validate_ranking(make_ranking({{"d", -1}})); }) == ErrorCode::GradeOutOfRange);
        CHECK_NOTHROW(validate_ranking(make_ranking({{"d", 4}}), 4));
    }
}

TEST_SUITE("click vector") {
    TEST_CASE("positions are sorted and deduplicated") {
        ClickVector c(5, {4, 1, 4});
        CHECK(c.positions() == std::vector<std::size_t>{1, 4});
        CHECK(c.count() == 2);
        CHECK(c.contains(4));
        CHECK_FALSE(c.contains(2));
    }

    TEST_CASE("out of range positions are rejected") {
        CHECK_THROWS_AS(ClickVector(3, {0}), Error);
        CHECK_THROWS_AS(ClickVector(3, {4}), Error);
    }

    TEST_CASE("push_back only appends below") {
        ClickVector c(3);
        c.push_back(1);
        c.push_back(3);
        CHECK_THROWS_AS(c.push_back(2), Error);
        CHECK_THROWS_AS(c.push_back(4), Error);
        c.reset(2);
        CHECK(c.empty());
        CHECK(c.display_length() == 2);
    }
}

TEST_CASE("enum names") {
    CHECK(to_string(Team::A) == "A");
    CHECK(to_string(Team::B) == "B");
    CHECK(to_string(Preference::Tie) == "Tie");
    CHECK(to_string(ErrorCode::ZeroVariance) == "ZeroVariance");
}

TEST_SUITE("random") {
    TEST_CASE("same seed, same stream") {
        RandomStream a(99), b(99);
        for (int i = 0; i < 100; ++i) CHECK(a() == b());
    }

    TEST_CASE("derived streams differ by path") {
        auto a = RandomStream::derive(5, {1, 2});
        auto b = RandomStream::derive(5, {2, 1});
        auto c = RandomStream::derive(5, {1, 2});
        const auto x = a();
        CHECK(x != b());
        CHECK(x == c());
    }

    TEST_CASE("uniform01 stays in [0, 1)") {
        RandomStream g(3);
        double lo = 1.0, hi = 0.0, sum = 0.0;
        for (int i = 0; i < 100000; ++i) {
            const double u = uniform01(g);
            lo = std::min(lo, u);
            hi = std::max(hi, u);
            sum += u;
        }
        CHECK(lo >= 0.0);
        CHECK(hi < 1.0);
        CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
    }

    TEST_CASE("uniform_index covers the range evenly") {
        RandomStream g(11);
        std::vector<int> counts(7, 0);
        for (int i = 0; i < 70000; ++i) ++counts[uniform_index(g, 7)];
        // Each bucket is Binomial(70000, 1/7): sd ~ 92.
        for (int c : counts) CHECK(std::abs(c - 10000) < 500);
        CHECK(uniform_index(g, 0) == 0);
        CHECK(uniform_index(g, 1) == 0);
    }

    TEST_CASE("bernoulli edge probabilities") {
        RandomStream g(12);
        for (int i = 0; i < 1000; ++i) {
            CHECK_FALSE(bernoulli(g, 0.0));
            CHECK(bernoulli(g, 1.0));
        }
    }

    TEST_CASE("splitmix64 reference value") {
        // First output of the reference generator seeded with 0.
        CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
    }
}
