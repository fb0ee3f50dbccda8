#include <doctest.h>

#include <set>

#include "flowtrace/catalog.hpp"
#include "oracles.hpp"

using namespace flowtrace;
using namespace flowtrace::testing;

TEST_CASE("instantiate substitutes parameters and derived parameters") {
    const FlowTemplate& tmpl = world().catalog.templateByName("mem_write");
    Lpn lpn = tmpl.instantiate({{"X", "0"}});
    std::set<std::string> components;
    for (const Transition& t : lpn.transitions) {
        components.insert(t.label.src);
        components.insert(t.label.dest);
    }
    CHECK(components.count("CPU_0"));
    CHECK(components.count("Cache_0"));
    CHECK(components.count("Cache_1"));  // peer cache via the derived parameter
    CHECK(!components.count("CPU_1"));
    // structure is untouched by substitution
    CHECK(lpn.places.size() == tmpl.base.places.size());
    CHECK(lpn.transitions.size() == tmpl.base.transitions.size());
}

TEST_CASE("instantiate with no parameters is the identity") {
    FlowTemplate plain;
    plain.base = world().catalog.templateByName("write_back").instantiate({{"X", "1"}});
    plain.base.name = "fixed";
    Lpn out = plain.instantiate({});
    CHECK(out.transitions.size() == plain.base.transitions.size());
    for (std::size_t t = 0; t < out.transitions.size(); ++t)
        CHECK(out.transitions[t].label == plain.base.transitions[t].label);
}

TEST_CASE("instantiate rejects bad bindings") {
    const FlowTemplate& up = world().catalog.templateByName("upstream_read");
    SUBCASE("domain violation") {
        CHECK_THROWS_AS(up.instantiate({{"I", "CPU_0"}, {"T", "Mem"}}), LpnError);
    }
    SUBCASE("a block cannot read itself") {
        CHECK_THROWS_AS(up.instantiate({{"I", "GFX"}, {"T", "GFX"}}), LpnError);
    }
    SUBCASE("legal binding passes") {
        CHECK_NOTHROW(up.instantiate({{"I", "GFX"}, {"T", "Mem"}}));
    }
}

TEST_CASE("legal bindings match the nested-loop oracle") {
    std::size_t total = 0;
    for (const FlowTemplate& tmpl : world().catalog.templates) {
        std::size_t oracle = bindingCountOracle(tmpl);
        CHECK(tmpl.legalBindings().size() == oracle);
        total += oracle;
    }
    // pinned expansion of the bundled catalog (regression value)
    CHECK(total == 34);
    CHECK(world().flows.size() == 34);
}

TEST_CASE("distinct bindings give distinct event sets when parameters are used") {
    for (const FlowTemplate& tmpl : world().catalog.templates) {
        auto bindings = tmpl.legalBindings();
        std::set<std::set<std::string>> eventSets;
        for (const Binding& b : bindings) {
            Lpn lpn = tmpl.instantiate(b);
            std::set<std::string> events;
            for (const Transition& t : lpn.transitions) events.insert(t.label.str());
            eventSets.insert(std::move(events));
        }
        CHECK(eventSets.size() == bindings.size());
    }
}
