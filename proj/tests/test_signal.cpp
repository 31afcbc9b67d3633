#include "patchsim/errors.hpp"
#include "patchsim/signal.hpp"

#include <doctest.h>

#include <cstdlib>
#include <random>
#include <sstream>

using namespace patchsim;

namespace {

Trace linear_trace(double slope, double offset, const TimeGrid& grid) {
    std::vector<double> values;
    values.reserve(grid.n_samples());
    for (std::size_t k = 0; k < grid.n_samples(); ++k) {
        values.push_back(slope * grid.time_at(k) + offset);
    }
    return Trace(grid, std::move(values), "lin");
}

} // namespace

TEST_CASE("time grid places samples by multiplication") {
    TimeGrid grid(0.0, 1e-3, 10000);
    CHECK(grid.n_samples() == 10001);
    CHECK(grid.time_at(0) == 0.0);
    CHECK(grid.time_at(4000) == 0.0 + 4000.0 * 1e-3);
    CHECK(grid.t_end() == doctest::Approx(10.0).epsilon(1e-12));
    for (std::size_t k = 1; k <= 10000; ++k) {
        REQUIRE(grid.time_at(k) > grid.time_at(k - 1));
    }
}

TEST_CASE("time grid rejects degenerate shapes") {
    CHECK_THROWS_AS(TimeGrid(0.0, 0.0, 10), ContractError);
    CHECK_THROWS_AS(TimeGrid(0.0, -1e-3, 10), ContractError);
    CHECK_THROWS_AS(TimeGrid(0.0, 1e-3, 0), ContractError);
}

TEST_CASE("trace validates length and finiteness") {
    TimeGrid grid(0.0, 0.5, 2);
    CHECK_THROWS_AS(Trace(grid, {1.0, 2.0}, "short"), ContractError);
    CHECK_THROWS_AS(Trace(grid, {1.0, 2.0, 1.0 / 0.0}, "inf"), ContractError);
    Trace ok(grid, {1.0, 2.0, 3.0}, "ok");
    CHECK(ok.size() == 3);
    CHECK(ok[2] == 3.0);
}

TEST_CASE("trace sampling is exact at grid points and linear between") {
    TimeGrid grid(0.0, 0.25, 40);
    Trace tr = linear_trace(3.0, 1.0, grid);
    for (std::size_t k = 0; k <= 40; ++k) {
        REQUIRE(trace_sample(tr, grid.time_at(k)) == tr[k]);
    }
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> dist(0.0, 10.0);
    for (int i = 0; i < 200; ++i) {
        const double t = dist(rng);
        REQUIRE(trace_sample(tr, t) == doctest::Approx(3.0 * t + 1.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(trace_sample(tr, -0.01), RangeError);
    CHECK_THROWS_AS(trace_sample(tr, 10.01), RangeError);
}

TEST_CASE("amplitude scaling multiplies samples and nothing else") {
    TimeGrid grid(0.0, 1.0, 2);
    Trace tr(grid, {700.0, -50.0, 0.0}, "v");
    Trace scaled = apply_scale(tr, ScaleMap(0.01));
    CHECK(scaled[0] == 7.0);
    CHECK(scaled[1] == -0.5);
    CHECK(scaled[2] == 0.0);
    CHECK(scaled.name() == "v");
    CHECK(scaled.grid() == grid);
    CHECK_THROWS_AS(ScaleMap(0.0), ContractError);

    Trace undone = apply_scale(scaled, ScaleMap(100.0));
    CHECK(undone[0] == 700.0);
}

TEST_CASE("overload check is strict and keeps time order") {
    TimeGrid grid(0.0, 1.0, 3);
    Trace tr(grid, {100.0, -100.0000001, 101.0, 99.9}, "v");
    auto violations = check_overload(tr, MachineLimits(100.0));
    REQUIRE(violations.size() == 2);
    CHECK(violations[0].time == 1.0);
    CHECK(violations[0].value == -100.0000001);
    CHECK(violations[1].time == 2.0);
    CHECK_THROWS_AS(MachineLimits(0.0), ContractError);
}

TEST_CASE("format_double survives a strtod round trip") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> dist(-1e6, 1e6);
    auto roundtrip = [](double v) { return std::strtod(format_double(v).c_str(), nullptr); };
    for (int i = 0; i < 500; ++i) {
        const double v = dist(rng);
        REQUIRE(roundtrip(v) == v);
    }
    CHECK(roundtrip(0.001) == 0.001);
    CHECK(roundtrip(1.0 / 3.0) == 1.0 / 3.0);
    CHECK(format_double(10.0) == "10");
    CHECK(format_double(-80.0) == "-80");
}

TEST_CASE("csv write and read are mutually inverse") {
    TimeGrid grid(0.0, 0.001, 4);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(-100.0, 100.0);
    auto column = [&] {
        std::vector<double> v(grid.n_samples());
        for (double& x : v) {
            x = dist(rng);
        }
        return v;
    };
    std::vector<Trace> traces;
    traces.emplace_back(grid, column(), "X");
    traces.emplace_back(grid, column(), "XDOT");

    std::ostringstream out;
    write_csv(out, traces);
    const std::string text = out.str();
    CHECK(text.rfind("t,X,XDOT\n", 0) == 0);

    std::istringstream in(text);
    auto back = read_csv(in);
    REQUIRE(back.size() == 2);
    CHECK(back[0].name() == "X");
    CHECK(back[1].name() == "XDOT");
    for (std::size_t c = 0; c < 2; ++c) {
        REQUIRE(back[c].size() == traces[c].size());
        for (std::size_t k = 0; k < back[c].size(); ++k) {
            REQUIRE(back[c][k] == traces[c][k]);
        }
    }
}

TEST_CASE("csv writer rejects mixed grids and empty input") {
    TimeGrid a(0.0, 1.0, 2), b(0.0, 0.5, 2);
    std::vector<Trace> mixed;
    mixed.emplace_back(a, std::vector<double>{0.0, 1.0, 2.0}, "A");
    mixed.emplace_back(b, std::vector<double>{0.0, 1.0, 2.0}, "B");
    std::ostringstream out;
    CHECK_THROWS_AS(write_csv(out, mixed), ContractError);
    CHECK_THROWS_AS(write_csv(out, {}), ContractError);
}

TEST_CASE("csv reader rejects ragged and senseless input") {
    auto reject = [](const std::string& text) {
        std::istringstream in(text);
        CHECK_THROWS_AS(read_csv(in), Error);
    };
    reject("");
    reject("x,Y\n0,1\n1,2\n");
    reject("t,Y\n0,1\n1\n");
    reject("t,Y\n0,abc\n1,2\n");
    reject("t,Y\n0,1\n");
}
