#include "flowtrace/truth.hpp"

#include <algorithm>

namespace flowtrace {

TruthProjection projectTruth(const GroundTruth& gt, const std::vector<ConcreteFlow>& flows,
                             const ScenarioEngine& engine) {
    TruthProjection out;
    for (const GtInstance& inst : gt.instances) {
        const Lpn& lpn = flows[inst.flow].lpn;
        std::ptrdiff_t lastObs = -1;
        for (std::size_t i = 0; i < inst.path.size(); ++i)
            if (engine.transitionObservable(inst.flow, inst.path[i]))
                lastObs = static_cast<std::ptrdiff_t>(i);
        if (lastObs < 0) continue;  // invisible instance

        std::ptrdiff_t firstObs = 0;
        while (!engine.transitionObservable(inst.flow, inst.path[firstObs])) ++firstObs;

        TruthProjection::Item item;
        item.flow = inst.flow;
        Marking m = lpn.initial;
        for (std::ptrdiff_t i = 0; i <= lastObs; ++i) {
            m = lpn.fireUnchecked(m, inst.path[i]);
            item.path.push_back(inst.path[i]);
        }
        item.marking = m;
        item.start = inst.cycles[firstObs];
        item.end = lpn.isTerminal(m) ? inst.cycles[lastObs] : -1;
        out.items.push_back(std::move(item));
    }
    std::sort(out.items.begin(), out.items.end());
    return out;
}

Scenario buildTruthScenario(InstancePool& pool, const GroundTruth& gt,
                            const std::vector<ConcreteFlow>& flows) {
    std::vector<std::uint32_t> ids;
    std::vector<FlowInstance> made;
    for (const GtInstance& gi : gt.instances) {
        FlowInstance inst;
        inst.flow = gi.flow;
        const Lpn& lpn = flows[gi.flow].lpn;
        Marking m = lpn.initial;
        for (std::uint16_t t : gi.path) m = lpn.fireUnchecked(m, t);
        inst.marking = m;
        inst.start = gi.start;
        inst.end = lpn.isTerminal(m) ? gi.end : -1;
        inst.tag = BitConstraint::exact(gi.initiatorTag);
        inst.sid = BitConstraint::exact(gi.sid);
        inst.path = gi.path;
        std::uint16_t ordinal = 0;
        for (const FlowInstance& other : made)
            if (other.flow == inst.flow && other.start == inst.start) ++ordinal;
        inst.ordinal = ordinal;
        made.push_back(inst);
        ids.push_back(pool.intern(inst));
    }
    return Scenario::fromIds(std::move(ids));
}

bool scenarioMatchesTruth(const Scenario& scen, const InstancePool& pool,
                          const TruthProjection& truth) {
    if (scen.instances.size() != truth.items.size()) return false;
    std::vector<TruthProjection::Item> got;
    for (std::uint32_t id : scen.instances) {
        const FlowInstance& inst = pool.at(id);
        got.push_back({inst.flow, inst.marking, inst.start, inst.end, inst.path});
    }
    std::sort(got.begin(), got.end());
    return got == truth.items;
}

std::optional<std::size_t> findTruthScenario(const AnalysisOutcome& outcome,
                                             const TruthProjection& truth) {
    for (std::size_t i = 0; i < outcome.scenarios.size(); ++i)
        if (scenarioMatchesTruth(outcome.scenarios[i], outcome.pool, truth)) return i;
    return std::nullopt;
}

}  // namespace flowtrace
