#include <doctest.h>

#include <bit>

#include "oracles.hpp"
#include "spperm/launch.hpp"

using namespace spperm;

namespace {

std::vector<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>> asTuples(const LaunchPlan& plan) {
    std::vector<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>> out;
    for (const auto& s : plan.specs)
        out.emplace_back(s.start, s.delta, s.end);
    return out;
}

}  // namespace

TEST_SUITE("launch") {

TEST_CASE("hand-traced plans") {
    using T = std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>;
    CHECK(asTuples(generateLaunchParameters(2048, 12)) == std::vector<T>{{1, 1024, 2048}});
    CHECK(asTuples(generateLaunchParameters(4, 16)) ==
          std::vector<T>{{1, 4096, 32768}, {16385, 2048, 32768}, {24577, 1024, 32768}, {28673, 1024, 32768}});
}

TEST_CASE("exact cover and power-of-two chunks") {
    for (std::uint64_t tau : {1ULL, 3ULL, 4ULL, 32ULL, 100ULL, 1024ULL}) {
        for (int n : {2, 5, 12, 16, 20}) {
            const auto plan = generateLaunchParameters(tau, n);
            REQUIRE_FALSE(plan.specs.empty());
            const auto hits = oracles::coverCounts(plan);
            bool exact = hits[0] == 0;
            for (std::size_t g = 1; g < hits.size(); ++g)
                exact = exact && hits[g] == 1;
            CHECK(exact);
            for (const auto& s : plan.specs) {
                CHECK(std::has_single_bit(s.delta));
                CHECK(s.delta >= 1024);
                CHECK(s.end == (1ULL << (n - 1)));
            }
        }
    }
}

TEST_CASE("non-tail launches keep every thread fully loaded") {
    const auto plan = generateLaunchParameters(32, 22);
    const std::uint64_t last = (1ULL << 21) - 1;
    for (std::size_t l = 0; l + 1 < plan.specs.size(); ++l) {
        const auto& s = plan.specs[l];
        CHECK(s.start + 32 * s.delta - 1 <= last);
        for (std::uint64_t t = 0; t < 32; ++t) {
            auto r = chunkOf(plan, l, t);
            REQUIRE(r);
            CHECK(r->size() == s.delta);
        }
    }
}

TEST_CASE("chunkOf") {
    const auto plan = generateLaunchParameters(4, 16);
    auto first = chunkOf(plan, 0, 0);
    REQUIRE(first);
    CHECK(first->first == 1);
    CHECK(first->last == 4096);

    const auto tail = generateLaunchParameters(2048, 12);
    auto past = chunkOf(tail, 0, 5);
    CHECK_FALSE(past.has_value());
    auto clipped = chunkOf(tail, 0, 1);
    REQUIRE(clipped);
    CHECK(clipped->first == 1025);
    CHECK(clipped->last == 2047);
    CHECK_THROWS_AS(chunkOf(tail, 1, 0), Error);
    CHECK_THROWS_AS(chunkOf(tail, 0, 2048), Error);
}

TEST_CASE("argument checks and configurable minimum chunk") {
    CHECK_THROWS_AS(generateLaunchParameters(0, 10), Error);
    CHECK_THROWS_AS(generateLaunchParameters(4, 1), Error);
    CHECK_THROWS_AS(generateLaunchParameters(4, 64), Error);
    CHECK_THROWS_AS(generateLaunchParameters(4, 10, 1000), Error);
    const auto plan = generateLaunchParameters(8, 10, 16);
    const auto hits = oracles::coverCounts(plan);
    for (std::size_t g = 1; g < hits.size(); ++g)
        CHECK(hits[g] == 1);
    for (const auto& s : plan.specs)
        CHECK(s.delta >= 16);
}

TEST_CASE("large n stays overflow-safe") {
    const auto plan = generateLaunchParameters(221184, 63);
    CHECK_FALSE(plan.specs.empty());
    CHECK(plan.specs.front().start == 1);
    for (std::size_t l = 1; l < plan.specs.size(); ++l)
        CHECK(plan.specs[l].start == plan.specs[l - 1].start + 221184 * plan.specs[l - 1].delta);
}

}
