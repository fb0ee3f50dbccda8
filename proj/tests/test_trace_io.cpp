#include <doctest.h>

#include "flowtrace/simulator.hpp"
#include "flowtrace/trace.hpp"
#include "oracles.hpp"

using namespace flowtrace;
using namespace flowtrace::testing;

TEST_CASE("round trip of a simulated trace is bit exact") {
    const TestWorld& w = world();
    SimConfig config;
    config.seed = 42;
    config.budgetPerBlock = 3;
    auto [trace, gt] = simulate(w.catalog, w.flows, w.enc, config);
    SignalTrace back = traceFromString(traceToString(trace));
    REQUIRE(back.stepCount() == trace.stepCount());
    for (std::size_t h = 0; h < trace.stepCount(); ++h)
        for (std::size_t k = 0; k < trace.channelCount(); ++k)
            CHECK(back.steps[h][k] == trace.steps[h][k]);
    CHECK(back.matches(w.catalog));
}

TEST_CASE("empty trace round trips") {
    SignalTrace empty = SignalTrace::forCatalog(world().catalog);
    SignalTrace back = traceFromString(traceToString(empty));
    CHECK(back.stepCount() == 0);
    CHECK(back.matches(world().catalog));
}

TEST_CASE("malformed traces are rejected with position info") {
    SUBCASE("state wider than the declared link") {
        std::string text =
            "links:\nlink A->B 8\nstep 0: ffff\n";
        CHECK_THROWS_WITH_AS(traceFromString(text), doctest::Contains(":3:"), TraceError);
    }
    SUBCASE("missing channel state") {
        std::string text = "links:\nlink A->B 8\nlink B->A 8\nstep 0: 00\n";
        CHECK_THROWS_AS(traceFromString(text), TraceError);
    }
    SUBCASE("out-of-order step index") {
        std::string text = "links:\nlink A->B 8\nstep 1: 00\n";
        CHECK_THROWS_AS(traceFromString(text), TraceError);
    }
}

TEST_CASE("mask files round trip and reject bad indices") {
    const TestWorld& w = world();
    SelectionMask mask = SelectionMask::none(w.catalog);
    mask.observize(0, 0);
    mask.observeRange(0, 1, 8);
    mask.observeRange(3, 9, 8);
    for (int b = 0; b < mask.observed[5].width(); ++b) mask.observed[5].set(b, true);

    SelectionMask back = maskFromString(maskToString(mask, w.catalog), w.catalog);
    REQUIRE(back.observed.size() == mask.observed.size());
    for (std::size_t i = 0; i < mask.observed.size(); ++i) CHECK(back.observed[i] == mask.observed[i]);

    CHECK_THROWS_AS(maskFromString("mask CPU_0->Cache_0: 1000\n", w.catalog), MaskError);
    CHECK_THROWS_AS(maskFromString("mask NoSuch->Link: all\n", w.catalog), MaskError);
}
