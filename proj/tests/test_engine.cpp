#include <doctest.h>

#include <algorithm>

#include "flowtrace/engine.hpp"
#include "flowtrace/selection.hpp"
#include "flowtrace/truth.hpp"
#include "oracles.hpp"

using namespace flowtrace;
using namespace flowtrace::testing;

namespace {

// The two-activation write sequence walked in the worked example: both
// instances started by CPU_0, all events carrying no tag/sid information.
const std::vector<std::pair<std::string, std::string>> kCleanSequence = {
    {"mem_write[X=0]", "t1"}, {"mem_write[X=0]", "t2"}, {"mem_write[X=0]", "t1"},
    {"mem_write[X=0]", "t2"}, {"mem_write[X=0]", "t3"}, {"mem_write[X=0]", "t3"},
    {"mem_write[X=0]", "t4"}, {"mem_write[X=0]", "t4"}, {"mem_write[X=0]", "t5"},
    {"mem_write[X=0]", "t6"}, {"mem_write[X=0]", "t5"}, {"mem_write[X=0]", "t6"},
};

FlowEvent eventOf(const std::string& flowId, const std::string& trans) {
    const ConcreteFlow& flow = world().flow(flowId);
    const ConcreteEvent& ev = flow.events[flow.lpn.transitionIndex(trans)];
    return {ev.link, ev.cmd, {}, {}};
}

ScenarioEngine fullEngine() {
    const TestWorld& w = world();
    return ScenarioEngine(w.catalog, w.flows, w.enc, SelectionMask::full(w.catalog));
}

Marking markingOf(const Lpn& lpn, const char* place) {
    return Marking{1} << lpn.placeIndex(place);
}

// Multiset of instance markings of one scenario restricted to a flow.
std::vector<Marking> markings(const Scenario& s, const InstancePool& pool) {
    std::vector<Marking> out;
    for (std::uint32_t id : s.instances) out.push_back(pool.at(id).marking);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("analysis forks over ambiguous instances") {
    const TestWorld& w = world();
    ScenarioEngine engine = fullEngine();
    InstancePool pool;
    const Lpn& lpn = w.flow("mem_write[X=0]").lpn;

    // two instances both at p3 (started at steps 0 and 2)
    Scenario scen = Scenario::fromIds({});
    for (const FlowEvent& e :
         {eventOf("mem_write[X=0]", "t1"), eventOf("mem_write[X=0]", "t2")}) {
        auto next = engine.analysis(pool, scen, e, 0);
        REQUIRE(next.size() == 1);
        scen = next[0];
    }
    {
        auto next = engine.analysis(pool, scen, eventOf("mem_write[X=0]", "t1"), 2);
        REQUIRE(next.size() == 1);
        scen = next[0];
        next = engine.analysis(pool, scen, eventOf("mem_write[X=0]", "t2"), 3);
        REQUIRE(next.size() == 1);
        scen = next[0];
    }
    REQUIRE(scen.instances.size() == 2);
    for (std::uint32_t id : scen.instances) CHECK(pool.at(id).marking == markingOf(lpn, "p3"));

    // the probe event can belong to either instance
    auto forked = engine.analysis(pool, scen, eventOf("mem_write[X=0]", "t3"), 4);
    REQUIRE(forked.size() == 2);
    for (const Scenario& s : forked) {
        auto ms = markings(s, pool);
        CHECK(ms == std::vector<Marking>{markingOf(lpn, "p3"), markingOf(lpn, "p4")});
    }
    CHECK_FALSE(forked[0] == forked[1]);
}

TEST_CASE("analysis on an empty scenario with a non-initial event is empty") {
    ScenarioEngine engine = fullEngine();
    InstancePool pool;
    auto out = engine.analysis(pool, Scenario::fromIds({}), eventOf("mem_write[X=0]", "t5"), 0);
    CHECK(out.empty());
}

TEST_CASE("analysis initiates new instances from initial states") {
    const TestWorld& w = world();
    ScenarioEngine engine = fullEngine();
    InstancePool pool;
    auto out = engine.analysis(pool, Scenario::fromIds({}), eventOf("mem_write[X=0]", "t1"), 0);
    REQUIRE(out.size() == 1);  // unique among all 34 flows
    const FlowInstance& inst = pool.at(out[0].instances[0]);
    CHECK(w.flows[inst.flow].id == "mem_write[X=0]");
    CHECK(inst.start == 0);
    CHECK(inst.end == -1);
    CHECK(inst.marking == markingOf(w.flow("mem_write[X=0]").lpn, "p2"));
}

TEST_CASE("worked example: clean trace reduces to one scenario") {
    const TestWorld& w = world();
    SignalTrace trace = traceOfEvents(w, kCleanSequence);
    ScenarioEngine engine = fullEngine();
    AnalysisOutcome outcome = engine.checkCompliance(trace, Limits{});

    CHECK(outcome.status == RunStatus::Completed);
    CHECK(outcome.haltStep == -1);
    CHECK(outcome.haltLink == -1);
    CHECK(outcome.metrics.finalCount == 1);
    CHECK(outcome.metrics.peak == 2);

    const Lpn& lpn = w.flow("mem_write[X=0]").lpn;
    REQUIRE(outcome.scenarios.size() == 1);
    auto ms = markings(outcome.scenarios[0], outcome.pool);
    CHECK(ms == std::vector<Marking>{markingOf(lpn, "p7"), markingOf(lpn, "p7")});
    std::vector<std::int32_t> starts;
    for (std::uint32_t id : outcome.scenarios[0].instances) {
        starts.push_back(outcome.pool.at(id).start);
        CHECK(outcome.pool.at(id).end == -1);  // neither instance has completed
    }
    std::sort(starts.begin(), starts.end());
    CHECK(starts == std::vector<std::int32_t>{0, 2});
}

TEST_CASE("worked example: foreign read response halts the analysis") {
    const TestWorld& w = world();
    auto buggy = kCleanSequence;
    buggy[11] = {"mem_read[X=0]", "t8"};  // cache-to-CPU read response
    SignalTrace trace = traceOfEvents(w, buggy);
    ScenarioEngine engine = fullEngine();
    AnalysisOutcome outcome = engine.checkCompliance(trace, Limits{});

    CHECK(outcome.status == RunStatus::Inconsistent);
    CHECK(outcome.haltStep == 11);
    CHECK(outcome.haltLink ==
          static_cast<std::int32_t>(*w.catalog.findLink("Cache_0", "CPU_0")));

    // exactly the two pre-halt interpretations: one instance at p7, one at p6
    const Lpn& lpn = w.flow("mem_write[X=0]").lpn;
    REQUIRE(outcome.scenarios.size() == 2);
    for (const Scenario& s : outcome.scenarios) {
        auto ms = markings(s, outcome.pool);
        CHECK(ms == std::vector<Marking>{markingOf(lpn, "p6"), markingOf(lpn, "p7")});
    }
    CHECK_FALSE(outcome.scenarios[0] == outcome.scenarios[1]);
}

TEST_CASE("zero-length trace returns the empty scenario") {
    const TestWorld& w = world();
    SignalTrace trace = SignalTrace::forCatalog(w.catalog);
    ScenarioEngine engine = fullEngine();
    AnalysisOutcome outcome = engine.checkCompliance(trace, Limits{});
    CHECK(outcome.status == RunStatus::Completed);
    CHECK(outcome.haltStep == -1);
    CHECK(outcome.haltLink == -1);
    CHECK(outcome.metrics.peak == 1);
    CHECK(outcome.metrics.finalCount == 1);
    REQUIRE(outcome.scenarios.size() == 1);
    CHECK(outcome.scenarios[0].instances.empty());
}

TEST_CASE("scenario cap aborts the run") {
    const TestWorld& w = world();
    SignalTrace trace = traceOfEvents(w, kCleanSequence);
    ScenarioEngine engine = fullEngine();
    AnalysisOutcome outcome = engine.checkCompliance(trace, Limits{1, 0.0});
    CHECK(outcome.status == RunStatus::ComplexityExceeded);
    CHECK(outcome.haltStep == 4);  // the first fork
    CHECK(outcome.metrics.peak == 2);
}

TEST_CASE("identical inputs give identical outcomes") {
    const TestWorld& w = world();
    SimConfig config;
    config.seed = 21;
    config.budgetPerBlock = 4;
    auto [trace, gt] = simulate(w.catalog, w.flows, w.enc, config);
    Strategy strategy = Strategy::parse("S3+cmd+sid");
    SelectionMask mask = buildStrategyMask(w.catalog, w.flows, w.enc, strategy);

    auto run = [&] {
        ScenarioEngine engine(w.catalog, w.flows, w.enc, mask);
        return engine.checkCompliance(trace, Limits{});
    };
    AnalysisOutcome a = run();
    AnalysisOutcome b = run();
    CHECK(a.status == b.status);
    CHECK(a.metrics.peak == b.metrics.peak);
    CHECK(a.metrics.finalCount == b.metrics.finalCount);
    REQUIRE(a.scenarios.size() == b.scenarios.size());
    for (std::size_t i = 0; i < a.scenarios.size(); ++i) {
        auto ka = markings(a.scenarios[i], a.pool);
        auto kb = markings(b.scenarios[i], b.pool);
        CHECK(ka == kb);
    }
}

TEST_CASE("every analysis result differs by one advance or one initiation") {
    const TestWorld& w = world();
    ScenarioEngine engine = fullEngine();
    InstancePool pool;
    Scenario scen = Scenario::fromIds({});
    Rng rng(3);
    // random walk over the clean sequence, checking the delta invariant
    for (std::size_t i = 0; i < kCleanSequence.size(); ++i) {
        auto results =
            engine.analysis(pool, scen, eventOf(kCleanSequence[i].first, kCleanSequence[i].second),
                            static_cast<std::int32_t>(i));
        if (results.empty()) break;
        for (const Scenario& s : results) {
            if (s.instances.size() == scen.instances.size() + 1) {
                // one added instance: all previous ids still present
                for (std::uint32_t id : scen.instances)
                    CHECK(std::find(s.instances.begin(), s.instances.end(), id) !=
                          s.instances.end());
            } else {
                REQUIRE(s.instances.size() == scen.instances.size());
                std::size_t differing = 0;
                for (std::uint32_t id : s.instances)
                    if (std::find(scen.instances.begin(), scen.instances.end(), id) ==
                        scen.instances.end())
                        ++differing;
                CHECK(differing == 1);
            }
        }
        scen = results[rng.below(results.size())];
    }
}

TEST_CASE("full-mask run on a simulated trace reproduces ground truth exactly") {
    const TestWorld& w = world();
    SimConfig config;
    config.seed = 77;
    config.budgetPerBlock = 3;
    auto [trace, gt] = simulate(w.catalog, w.flows, w.enc, config);
    ScenarioEngine engine = fullEngine();
    AnalysisOutcome outcome = engine.checkCompliance(trace, Limits{});
    REQUIRE(outcome.status == RunStatus::Completed);
    REQUIRE(outcome.metrics.finalCount == 1);
    Scenario expected = buildTruthScenario(outcome.pool, gt, w.flows);
    CHECK(outcome.scenarios[0] == expected);
}
