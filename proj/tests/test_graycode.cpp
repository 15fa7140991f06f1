#include <doctest.h>

#include <bit>

#include "oracles.hpp"
#include "spperm/graycode.hpp"

using namespace spperm;

namespace {

std::vector<ScbsEntry> parse(std::initializer_list<const char*> items) {
    std::vector<ScbsEntry> out;
    for (const char* s : items)
        out.push_back({std::atoi(s + 1), s[0] == '+' ? 1 : -1});
    return out;
}

}  // namespace

TEST_SUITE("graycode") {

TEST_CASE("grayCode values") {
    CHECK(grayCode(0) == 0b000);
    CHECK(grayCode(1) == 0b001);
    CHECK(grayCode(2) == 0b011);
    CHECK(grayCode(3) == 0b010);
    const auto list = oracles::reflectedGray(12);
    for (std::uint64_t g = 0; g < list.size(); ++g)
        CHECK(grayCode(g) == list[g]);
}

TEST_CASE("consecutive codes differ in one bit up to 2^20") {
    bool ok = true;
    for (std::uint64_t g = 1; g <= (std::uint64_t{1} << 20); ++g)
        ok = ok && std::popcount(grayCode(g) ^ grayCode(g - 1)) == 1;
    CHECK(ok);
}

TEST_CASE("scbsEntry examples") {
    CHECK(scbsEntry(1) == ScbsEntry{0, 1});
    CHECK(scbsEntry(12) == ScbsEntry{2, -1});
    CHECK(scbsEntry(8) == ScbsEntry{3, 1});
    CHECK_THROWS_AS(scbsEntry(0), Error);
}

TEST_CASE("scbsRecursive small sequences") {
    CHECK(scbsRecursive(1) == parse({"+0"}));
    CHECK(scbsRecursive(2) == parse({"+0", "+1", "-0"}));
    CHECK(scbsRecursive(3) == parse({"+0", "+1", "-0", "+2", "+0", "-1", "-0"}));
    std::vector<int> cols;
    for (const auto& e : scbsRecursive(4))
        cols.push_back(e.column);
    CHECK(cols == std::vector<int>{0, 1, 0, 2, 0, 1, 0, 3, 0, 1, 0, 2, 0, 1, 0});
    CHECK_THROWS_AS(scbsRecursive(0), Error);
    CHECK_THROWS_AS(scbsRecursive(25), Error);
}

TEST_CASE("closed form, recursion and Gray differences agree") {
    for (int k = 1; k <= 14; ++k) {
        const auto rec = scbsRecursive(k);
        const auto gray = oracles::changedBits(oracles::reflectedGray(k));
        REQUIRE(rec.size() == (std::size_t{1} << k) - 1);
        REQUIRE(gray.size() == rec.size());
        bool ok = true;
        for (std::size_t i = 0; i < rec.size(); ++i) {
            const auto e = scbsEntry(i + 1);
            ok = ok && e == rec[i] && e.column == gray[i].column && e.sign == gray[i].sign;
        }
        CHECK(ok);
    }
}

TEST_CASE("appearances of each column alternate in sign starting with +") {
    const auto seq = scbsRecursive(12);
    for (int j = 0; j < 12; ++j) {
        int expect = 1;
        std::uint64_t count = 0;
        for (const auto& e : seq) {
            if (e.column != j)
                continue;
            CHECK(e.sign == expect);
            expect = -expect;
            ++count;
        }
        CHECK(count == appearanceCount(13, j));
    }
}

TEST_CASE("appearanceCount") {
    CHECK(appearanceCount(4, 0) == 4);
    CHECK(appearanceCount(4, 2) == 1);
    CHECK_THROWS_AS(appearanceCount(4, 3), Error);
    CHECK_THROWS_AS(appearanceCount(4, -1), Error);
    for (int n = 2; n <= 40; ++n) {
        std::uint64_t sum = 0;
        for (int j = 0; j < n - 1; ++j)
            sum += appearanceCount(n, j);
        CHECK(sum == (std::uint64_t{1} << (n - 1)) - 1);
    }
    std::uint64_t fives = 0;
    for (const auto& e : scbsRecursive(20))
        fives += e.column == 5;
    CHECK(appearanceCount(21, 5) == fives);
}

TEST_CASE("updateProbability") {
    const std::vector<int> row2 = {0, 3, 4};
    const std::vector<int> row4 = {1, 2};
    const auto p2 = updateProbability(6, row2);
    CHECK(p2.approx == Ratio{19, 32});
    // 16 + 2 + 1 of 31 iterations.
    CHECK(p2.exact == Ratio{19, 31});
    const auto p4 = updateProbability(6, row4);
    CHECK(p4.approx == Ratio{3, 8});
    CHECK(p4.exact == Ratio{12, 31});
    const auto none = updateProbability(6, std::vector<int>{});
    CHECK(none.exact.num == 0);
    CHECK(none.approx.num == 0);
    CHECK_THROWS_AS(updateProbability(6, std::vector<int>{5}), Error);
    CHECK_THROWS_AS(updateProbability(6, std::vector<int>{1, 1}), Error);
}

TEST_CASE("makeRatio reduces") {
    CHECK(makeRatio(6, 8) == Ratio{3, 4});
    CHECK(makeRatio(0, 5) == Ratio{0, 1});
    CHECK(makeRatio(3, 4).value() == doctest::Approx(0.75));
}

}
