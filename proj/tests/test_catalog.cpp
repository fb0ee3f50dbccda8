#include <doctest.h>

#include <algorithm>
#include <map>

#include "flowtrace/catalog.hpp"
#include "oracles.hpp"

using namespace flowtrace;
using namespace flowtrace::testing;

TEST_CASE("bundled catalog loads with the expected protocol suite") {
    const Catalog& cat = world().catalog;
    CHECK(cat.templates.size() >= 6);
    for (const char* name :
         {"mem_write", "mem_read", "write_back", "upstream_read", "upstream_write", "power_mgmt"})
        CHECK_NOTHROW(cat.templateByName(name));
    CHECK(cat.components.size() == 11);
    CHECK(cat.links.size() == 22);
    CHECK(cat.statuses.size() == 4);
}

TEST_CASE("empty catalog is valid") {
    Catalog cat = parseManifest("component A\ncomponent B\n", "<inline>");
    CHECK(cat.templates.empty());
    CHECK(expandCatalog(cat).empty());
}

TEST_CASE("loader rejects broken inputs") {
    SUBCASE("transition on an undeclared link names the link") {
        std::map<std::string, std::string> specs{
            {"f.flow",
             "flow f\nplace a init\nplace b terminal\ntrans t: a -> b emits (A, C, go)\n"}};
        std::string manifest =
            "component A\ncomponent B\ncomponent C\n"
            "link A -> B fields Val:1 Cmd:8 Tag:8 Sid:8 Addr:32 Data:32\n"
            "cmd go 0x01\nflowspec f.flow\n";
        CHECK_THROWS_WITH_AS(parseManifest(manifest, "<inline>", &specs),
                             doctest::Contains("A->C"), CatalogError);
    }

    SUBCASE("undeclared cmd") {
        std::map<std::string, std::string> specs{
            {"f.flow",
             "flow f\nplace a init\nplace b terminal\ntrans t: a -> b emits (A, B, zap)\n"}};
        std::string manifest =
            "component A\ncomponent B\n"
            "link A -> B fields Val:1 Cmd:8 Tag:8 Sid:8 Addr:32 Data:32\n"
            "cmd go 0x01\nflowspec f.flow\n";
        CHECK_THROWS_WITH_AS(parseManifest(manifest, "<inline>", &specs),
                             doctest::Contains("zap"), CatalogError);
    }

    SUBCASE("terminal place with an outgoing transition") {
        std::string spec =
            "flow f\nplace a init\nplace b terminal\nplace c terminal\n"
            "trans t: a -> b emits (A, B, go)\ntrans u: b -> c emits (A, B, go)\n";
        CHECK_THROWS_AS(parseFlowSpec(spec, "<flow>"), CatalogError);
    }

    SUBCASE("parse error carries line and column") {
        std::string spec = "flow f\nplace a init\ntrans t a -> b emits (A, B, go)\n";
        CHECK_THROWS_WITH_AS(parseFlowSpec(spec, "<flow>"), doctest::Contains("<flow>:3:"),
                             CatalogError);
    }

    SUBCASE("duplicate cmd pattern") {
        CHECK_THROWS_AS(parseManifest("cmd a 0x01\ncmd b 0x01\n", "<inline>"), CatalogError);
    }
}

TEST_CASE("expansion is deterministic and well ordered") {
    auto again = expandCatalog(world().catalog);
    REQUIRE(again.size() == world().flows.size());
    for (std::size_t i = 0; i < again.size(); ++i) CHECK(again[i].id == world().flows[i].id);
    CHECK(std::is_sorted(again.begin(), again.end(),
                         [](const ConcreteFlow& a, const ConcreteFlow& b) {
                             return std::tie(a.lpn.name) < std::tie(b.lpn.name);
                         }));
}

TEST_CASE("expansion counts per template") {
    std::map<std::string, std::size_t> counts;
    for (const ConcreteFlow& flow : world().flows)
        counts[world().catalog.templates[flow.templateIdx].name()]++;
    CHECK(counts["mem_write"] == 2);  // one per CPU
    CHECK(counts["mem_read"] == 2);
    CHECK(counts["write_back"] == 2);
    CHECK(counts["upstream_read"] == 16);   // 4 initiators x 5 targets minus self-reads
    CHECK(counts["upstream_write"] == 8);   // 2 initiators x 5 targets minus self-writes
    CHECK(counts["power_mgmt"] == 4);
}

TEST_CASE("every concrete event uses a declared link") {
    for (const ConcreteFlow& flow : world().flows)
        for (const ConcreteEvent& ev : flow.events) CHECK(ev.link < world().catalog.links.size());
}
