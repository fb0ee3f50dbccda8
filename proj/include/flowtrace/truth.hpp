#pragma once

#include <optional>

#include "flowtrace/engine.hpp"
#include "flowtrace/scenario.hpp"
#include "flowtrace/simulator.hpp"

namespace flowtrace {

/// What the analysis should reconstruct for a ground-truth run under a given
/// observability: per instance, the path prefix up to its last observable
/// transition, the marking after it, and the steps of the first/last observed
/// events. Instances with no observable transition are invisible and omitted.
struct TruthProjection {
    struct Item {
        std::uint32_t flow;
        Marking marking;
        std::int32_t start;
        std::int32_t end;
        std::vector<std::uint16_t> path;
        auto key() const { return std::tie(flow, start, end, marking, path); }
        bool operator<(const Item& o) const { return key() < o.key(); }
        bool operator==(const Item& o) const = default;
    };
    std::vector<Item> items;  // sorted
};

TruthProjection projectTruth(const GroundTruth& gt, const std::vector<ConcreteFlow>& flows,
                             const ScenarioEngine& engine);

/// The exact scenario a fully observed run must reconstruct, including the
/// Tag/Sid attributes every message carries.
Scenario buildTruthScenario(InstancePool& pool, const GroundTruth& gt,
                            const std::vector<ConcreteFlow>& flows);

/// Attr-insensitive comparison of a reconstructed scenario against the
/// projected truth: same multiset of (flow, marking, start, end, path).
bool scenarioMatchesTruth(const Scenario& scen, const InstancePool& pool,
                          const TruthProjection& truth);

std::optional<std::size_t> findTruthScenario(const AnalysisOutcome& outcome,
                                             const TruthProjection& truth);

}  // namespace flowtrace
