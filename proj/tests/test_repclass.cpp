#include "patchsim/errors.hpp"
#include "patchsim/repclass.hpp"

#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

using namespace patchsim;
using kernels::IndexPair;

namespace {

/// Random scheme on a quarter-unit value grid, so affine maps with
/// low-precision coefficients stay exact in floating point and the
/// classifier's comparisons are reproducible.
RepScheme random_grid_scheme(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> n_dist(2, 12);
    std::uniform_int_distribution<int> q_step(-100, 100);
    std::uniform_int_distribution<int> p_step(-400, 400);
    std::uniform_int_distribution<int> r_step(0, 20);

    const int n = n_dist(rng);
    std::vector<double> qs;
    while (static_cast<int>(qs.size()) < n) {
        const double q = 0.5 * q_step(rng);
        if (std::find(qs.begin(), qs.end(), q) == qs.end()) {
            qs.push_back(q);
        }
    }
    std::vector<double> ps(n);
    for (double& p : ps) {
        p = 0.25 * p_step(rng);
    }
    if (rng() % 2 == 0) {
        // Half the samples are genuinely monotone so both analog tags come up.
        std::sort(qs.begin(), qs.end());
        std::sort(ps.begin(), ps.end());
        if (rng() % 2 == 0) {
            std::reverse(ps.begin(), ps.end());
        }
    }
    std::vector<std::pair<double, double>> pairs(n);
    for (int i = 0; i < n; ++i) {
        pairs[i] = {qs[i], ps[i]};
    }
    return RepScheme(std::move(pairs), 0.25 * r_step(rng));
}

} // namespace

TEST_CASE("rationals stay reduced with a positive denominator") {
    CHECK(Rational(6, 4) == Rational(3, 2));
    CHECK(Rational(1, -2) == Rational(-1, 2));
    CHECK(Rational(1, -2).den() == 2);
    CHECK(Rational(-6, -4) == Rational(3, 2));
    CHECK(Rational(7).den() == 1);
    CHECK(Rational(0, 5) == Rational(0));
    CHECK_THROWS_AS(Rational(1, 0), const ContractError&);
}

TEST_CASE("rational arithmetic is exact") {
    CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
    CHECK(Rational(3, 10) * Rational(5, 9) == Rational(1, 6));
    CHECK(Rational(1, 2) - Rational(2, 3) == Rational(-1, 6));
    CHECK(Rational(-1, 3) + Rational(1, 3) == Rational(0));
    CHECK(Rational(1, 2).to_double() == 0.5);
    CHECK(Rational(314).to_string() == "314");
    CHECK(Rational(297, 10).to_string() == "297/10");
    CHECK(Rational(-3, 7).to_string() == "-3/7");
}

TEST_CASE("rational overflow is an error, not a wraparound") {
    const std::int64_t big = std::numeric_limits<std::int64_t>::max();
    CHECK_THROWS_AS(Rational(big) * Rational(2), const RangeError&);
    CHECK_THROWS_AS(Rational(big) + Rational(big), const RangeError&);
    CHECK_NOTHROW(Rational(big) - Rational(big));
}

TEST_CASE("place-value evaluation of the worked numerals") {
    CHECK(digital_value(NumeralString({3, 1, 4}, 10)) == Rational(314));
    CHECK(digital_value(NumeralString({1, 0, 0, 1}, 2)) == Rational(9));
    CHECK(digital_value(NumeralString({2, 9, 7}, 10, 2)) == Rational(297, 10));
    CHECK(digital_value(NumeralString({2, 9, 7}, 10, 2)).to_double() == 29.7);
    CHECK(digital_value(NumeralString({1, 1, 1, 1}, 1)) == Rational(4));
}

TEST_CASE("digits right of the point carry negative powers") {
    CHECK(digital_value(NumeralString({5}, 10, 0)) == Rational(1, 2));
    CHECK(digital_value(NumeralString({1, 1}, 2, 1)) == Rational(3, 2));
    CHECK(digital_value(NumeralString({0, 2, 5}, 10, 1)) == Rational(1, 4));
    // A point after the last digit is the same as no point at all.
    CHECK(digital_value(NumeralString({3, 1, 4}, 10, 3)) ==
          digital_value(NumeralString({3, 1, 4}, 10)));
}

TEST_CASE("a string of maximal digits evaluates to base^k - 1") {
    for (int base : {2, 10}) {
        std::int64_t expect = 1;
        std::vector<int> digits;
        for (int k = 1; k <= 8; ++k) {
            digits.push_back(base - 1);
            expect *= base;
            CHECK(digital_value(NumeralString(digits, base)) == Rational(expect - 1));
        }
    }
}

TEST_CASE("numeral construction rejects nonsense") {
    CHECK_THROWS_AS(NumeralString({}, 10), const ContractError&);
    CHECK_THROWS_AS(NumeralString({1}, 0), const ContractError&);
    CHECK_THROWS_AS(NumeralString({1, 2}, 10, 3), const ContractError&);
    CHECK_THROWS_AS(NumeralString({7}, 4), const MalformedDigitError&);
    CHECK_THROWS_AS(NumeralString({-1}, 10), const MalformedDigitError&);
    CHECK_THROWS_AS(NumeralString({1, 0}, 1), const MalformedDigitError&);
    CHECK_THROWS_AS(NumeralString({2}, 1), const MalformedDigitError&);
}

TEST_CASE("overlong positional numerals overflow loudly") {
    const std::vector<int> twenty_nines(20, 9);
    CHECK_THROWS_AS(digital_value(NumeralString(twenty_nines, 10)), const RangeError&);
}

TEST_CASE("unary value ignores the radix point entirely") {
    for (std::size_t k = 1; k <= 20; ++k) {
        CHECK(unary_point_invariance(k));
        for (std::size_t pos = 0; pos <= k; ++pos) {
            CHECK(digital_value(NumeralString(std::vector<int>(k, 1), 1, pos)) ==
                  Rational(static_cast<std::int64_t>(k)));
        }
    }
    const std::vector<std::size_t> spots{0, 2, 5};
    CHECK(unary_point_invariance(10, spots));
    CHECK_THROWS_AS(unary_point_invariance(0), const ContractError&);
}

TEST_CASE("scheme construction enforces its preconditions") {
    CHECK_THROWS_AS(RepScheme({{1.0, 2.0}}, 0.1), const ContractError&);
    CHECK_THROWS_AS(RepScheme({{1.0, 2.0}, {2.0, 3.0}}, -0.1), const ContractError&);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(RepScheme({{1.0, inf}, {2.0, 3.0}}, 0.1), const ContractError&);
}

TEST_CASE("a thermometer-style identity sample reads as increasing") {
    Verdict v = classify(RepScheme({{34.0, 34.0}, {34.8, 34.8}, {2.0, 2.0}}, 0.01));
    CHECK(v.tag == VerdictTag::AnalogIncreasing);
    CHECK(!v.degenerate);
    CHECK(v.witnesses.empty());
    CHECK(verdict_tag_name(v.tag) == std::string("analog_increasing"));
}

TEST_CASE("a coarse ticking display still reads as increasing") {
    // Two of the magnitudes tie, and the tie is below the resolution, so
    // only the cross-tie pairs constrain the ordering.
    Verdict v = classify(RepScheme({{0.5, 0.0}, {1.0, 6.0}, {1.4, 6.0}}, 6.0));
    CHECK(v.tag == VerdictTag::AnalogIncreasing);
    CHECK(!v.degenerate);
}

TEST_CASE("a single low bit breaks both orderings") {
    Verdict v = classify(RepScheme({{1.0, 5.0}, {2.0, 0.0}, {3.0, 5.0}, {4.0, 0.0}}, 1.0));
    CHECK(v.tag == VerdictTag::NotAnalog);
    const std::vector<IndexPair> expect{{0, 1}, {0, 3}, {1, 2}, {2, 3}};
    CHECK(v.witnesses == expect);
    CHECK(std::find(v.witnesses.begin(), v.witnesses.end(), IndexPair{0, 1}) !=
          v.witnesses.end());
}

TEST_CASE("an inverted thermometer reads as decreasing") {
    Verdict v = classify(RepScheme({{10.0, 90.0}, {20.0, 80.0}, {30.0, 70.0}}, 0.1));
    CHECK(v.tag == VerdictTag::AnalogDecreasing);
    CHECK(verdict_tag_name(v.tag) == std::string("analog_decreasing"));
}

TEST_CASE("a resolution wider than every gap is flagged degenerate") {
    Verdict v = classify(RepScheme({{1.0, 5.0}, {2.0, 5.2}, {3.0, 4.9}}, 1.0));
    CHECK(v.degenerate);
    CHECK(v.tag == VerdictTag::AnalogIncreasing);
    CHECK(v.witnesses.empty());
}

TEST_CASE("equal quantities with distinct magnitudes are ill-formed") {
    CHECK_THROWS_AS(classify(RepScheme({{5.0, 0.0}, {5.0, 10.0}}, 1.0)),
                    const ContractError&);
    // The same tie is harmless once it hides below the resolution.
    Verdict v = classify(RepScheme({{5.0, 0.0}, {5.0, 0.5}}, 1.0));
    CHECK(v.degenerate);
}

TEST_CASE("affine maps of the magnitudes behave as expected") {
    const RepScheme s({{0.0, 0.0}, {1.0, 100.0}, {2.0, 700.0}}, 5.0);
    CHECK(classify(s).tag == VerdictTag::AnalogIncreasing);

    RepScheme shrunk = affine_transform(s, 0.01, 0.0);
    CHECK(shrunk.pairs[2].second == 7.0);
    CHECK(shrunk.resolution == 0.05);
    CHECK(classify(shrunk).tag == VerdictTag::AnalogIncreasing);

    RepScheme flipped = affine_transform(s, -1.0, 0.0);
    CHECK(classify(flipped).tag == VerdictTag::AnalogDecreasing);
    CHECK(flipped.resolution == 5.0);

    CHECK_THROWS_AS(affine_transform(s, 0.0, 1.0), const ContractError&);
}

TEST_CASE("verdicts are invariant under order-preserving affine maps") {
    std::mt19937_64 rng(2026);
    std::uniform_int_distribution<int> a_pick(0, 5);
    std::uniform_int_distribution<int> c_step(-200, 200);
    const double a_choices[] = {0.5, 1.0, 1.5, 2.0, 3.0, 4.0};
    for (int trial = 0; trial < 500; ++trial) {
        RepScheme s = random_grid_scheme(rng);
        const double a = a_choices[a_pick(rng)];
        const double c = 0.25 * c_step(rng);
        Verdict before = classify(s);
        Verdict after = classify(affine_transform(s, a, c));
        REQUIRE(after.tag == before.tag);
        REQUIRE(after.degenerate == before.degenerate);
        REQUIRE(after.witnesses == before.witnesses);
    }
}

TEST_CASE("coarsening the resolution never breaks an analog verdict") {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> widen(1, 12);
    for (int trial = 0; trial < 500; ++trial) {
        RepScheme s = random_grid_scheme(rng);
        Verdict fine = classify(s);
        RepScheme wider(s.pairs, s.resolution + 0.25 * widen(rng));
        Verdict coarse = classify(wider);
        if (fine.tag != VerdictTag::NotAnalog) {
            REQUIRE(coarse.tag != VerdictTag::NotAnalog);
        } else {
            // Fewer constraints can only shrink the witness list.
            for (const IndexPair& w : coarse.witnesses) {
                REQUIRE(std::find(fine.witnesses.begin(), fine.witnesses.end(), w) !=
                        fine.witnesses.end());
            }
        }
    }
}

TEST_CASE("scheme files parse into classifiable samples") {
    std::istringstream good("Q,P\n34,34\n34.8,34.8\n2,2\n");
    RepScheme s = read_scheme_csv(good, 0.01);
    REQUIRE(s.pairs.size() == 3);
    CHECK(s.pairs[1] == std::pair<double, double>{34.8, 34.8});
    CHECK(classify(s).tag == VerdictTag::AnalogIncreasing);

    std::istringstream crlf("Q,P\r\n1,10\r\n\r\n2,20\r\n");
    CHECK(read_scheme_csv(crlf, 0.5).pairs.size() == 2);
}

TEST_CASE("scheme files reject malformed input with positions") {
    std::istringstream empty("");
    try {
        read_scheme_csv(empty, 0.1);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 1);
        CHECK(std::string(e.what()).find("empty scheme file") != std::string::npos);
    }

    std::istringstream bad_header("q;p\n1,2\n2,3\n");
    CHECK_THROWS_AS(read_scheme_csv(bad_header, 0.1), const ParseError&);

    std::istringstream three_fields("Q,P\n1,2,3\n4,5\n");
    CHECK_THROWS_AS(read_scheme_csv(three_fields, 0.1), const ParseError&);

    std::istringstream not_a_number("Q,P\n1,two\n3,4\n");
    CHECK_THROWS_AS(read_scheme_csv(not_a_number, 0.1), const ParseError&);

    std::istringstream too_short("Q,P\n1,2\n");
    CHECK_THROWS_AS(read_scheme_csv(too_short, 0.1), const ParseError&);
}
