#pragma once

#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "flowtrace/abstraction.hpp"
#include "flowtrace/catalog.hpp"
#include "flowtrace/scenario.hpp"

namespace flowtrace {

struct EngineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Limits {
    std::size_t maxScenarios = 1'000'000;
    double timeLimitSec = 0.0;  // 0 = unlimited
};

enum class RunStatus {
    Completed,           // trace exhausted, every observed message explained
    Inconsistent,        // some observed message no scenario could absorb
    ComplexityExceeded,  // scenario set outgrew limits.maxScenarios
    TimeLimitExceeded,
};

struct RunMetrics {
    std::size_t peak = 1;      // largest scenario-set size encountered
    std::size_t finalCount = 0;
    std::int64_t stepsProcessed = 0;
    double wallMs = 0.0;
};

struct AnalysisOutcome {
    RunStatus status = RunStatus::Completed;
    std::int32_t haltStep = -1;  // -1 iff haltLink is -1
    std::int32_t haltLink = -1;
    RunMetrics metrics;
    std::vector<Scenario> scenarios;  // set at return (pre-halt set on inconsistency)
    InstancePool pool;

    bool halted() const { return status != RunStatus::Completed; }
};

/// A candidate flow event extracted from one link at one step.
struct FlowEvent {
    std::uint16_t link = 0;
    std::uint8_t cmd = 0;
    BitConstraint tag, sid;
};

/// Scenario reconstruction over a partially observed trace.
///
/// A transition is observable iff its link's Val bit is in the mask; events of
/// unobservable transitions never appear in the abstracted trace, so instance
/// states advance through them silently when the next observable event is
/// matched (both when advancing existing instances and when a new instance is
/// initiated). Under the full mask this degenerates to plain single-step
/// acceptance.
///
/// Per step, links whose Val bit reads 1 are processed in declared order;
/// every surviving scenario must absorb exactly one candidate event of each
/// such link (a link observably carried one message). Links with no observed
/// message contribute nothing. If some carrying link has candidates but no
/// scenario absorbs any of them, the run halts with that step and link.
///
/// One engine instance serves one thread; catalog, expansion, encoding and
/// mask are bound at construction and never mutated afterwards.
class ScenarioEngine {
public:
    ScenarioEngine(const Catalog& catalog, const std::vector<ConcreteFlow>& flows,
                   const MessageEncoding& enc, SelectionMask mask);

    AnalysisOutcome checkCompliance(const SignalTrace& trace, const Limits& limits);

    /// Set of scenarios consistent with absorbing e at step h: copies of scen
    /// with one instance advanced, plus copies extended by one newly initiated
    /// instance. Empty means e is inconsistent with scen.
    std::vector<Scenario> analysis(InstancePool& pool, const Scenario& scen, const FlowEvent& e,
                                   std::int32_t h);
    std::vector<Scenario> analysis(InstancePool& pool, const Scenario& scen, const FlowEvent& e,
                                   std::int32_t h, const std::vector<StatusObs>& statuses);

    bool transitionObservable(std::uint32_t flow, std::size_t t) const {
        return observable_[flow][t];
    }

    const SelectionMask& mask() const { return mask_; }

private:
    struct AcceptEntry {
        std::uint16_t transition = 0;  // the observable transition matched
        Marking next = 0;
        std::vector<std::uint16_t> segment;  // silent prefix + transition
    };

    void appendAdvanced(InstancePool& pool, const Scenario& scen, std::size_t idx,
                        const FlowEvent& e, std::int32_t h, const std::vector<StatusObs>& statuses,
                        std::vector<Scenario>& out);
    void appendInitiated(InstancePool& pool, const Scenario& scen, const FlowEvent& e,
                         std::int32_t h, const std::vector<StatusObs>& statuses,
                         std::vector<Scenario>& out);

    const std::vector<AcceptEntry>& acceptEntries(std::uint32_t flow, Marking marking,
                                                  std::uint16_t link, std::uint8_t cmd);
    void computeMarking(std::uint32_t flow, Marking marking);
    bool statusOk(std::uint32_t flow, std::uint16_t transition,
                  const std::vector<StatusObs>& statuses) const;

    static std::uint64_t tableKey(Marking m, std::uint16_t link, std::uint8_t cmd) {
        return (std::uint64_t(m) << 24) | (std::uint64_t(link) << 8) | cmd;
    }

    const Catalog& catalog_;
    const std::vector<ConcreteFlow>& flows_;
    const MessageEncoding& enc_;
    SelectionMask mask_;

    std::vector<std::vector<bool>> observable_;  // [flow][transition]

    struct FlowTables {
        std::unordered_set<Marking> computed;
        std::unordered_map<std::uint64_t, std::vector<AcceptEntry>> accepts;
    };
    std::vector<FlowTables> tables_;

    struct InitEntry {
        std::uint32_t flow = 0;
        AcceptEntry acc;
        std::uint8_t initiatorTag = 0;
    };
    std::unordered_map<std::uint32_t, std::vector<InitEntry>> initiations_;  // (link<<8)|cmd
};

}  // namespace flowtrace
