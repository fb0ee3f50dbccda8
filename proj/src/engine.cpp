#include "flowtrace/engine.hpp"

#include <algorithm>
#include <chrono>

namespace flowtrace {

namespace {
constexpr std::size_t kMaxSilentPaths = 1024;
}

ScenarioEngine::ScenarioEngine(const Catalog& catalog, const std::vector<ConcreteFlow>& flows,
                               const MessageEncoding& enc, SelectionMask mask)
    : catalog_(catalog), flows_(flows), enc_(enc), mask_(std::move(mask)) {
    if (mask_.observed.size() != catalog.channelCount())
        throw EngineError("mask does not match catalog channel layout");

    observable_.resize(flows_.size());
    tables_.resize(flows_.size());
    for (std::size_t f = 0; f < flows_.size(); ++f) {
        const ConcreteFlow& flow = flows_[f];
        observable_[f].resize(flow.lpn.transitions.size());
        for (std::size_t t = 0; t < flow.lpn.transitions.size(); ++t) {
            std::uint16_t link = flow.events[t].link;
            observable_[f][t] = mask_.observed[link].get(enc_.link(link).valBit);
        }
    }

    // Initiation table: everything reachable from s0 through silent
    // transitions up to one observable transition.
    for (std::size_t f = 0; f < flows_.size(); ++f) {
        const ConcreteFlow& flow = flows_[f];
        computeMarking(static_cast<std::uint32_t>(f), flow.lpn.initial);
        for (const auto& [key, entries] : tables_[f].accepts) {
            if ((key >> 24) != flow.lpn.initial) continue;
            for (const AcceptEntry& acc : entries) {
                InitEntry init;
                init.flow = static_cast<std::uint32_t>(f);
                init.acc = acc;
                init.initiatorTag = flow.srcTag[acc.segment.front()];
                initiations_[static_cast<std::uint32_t>(key & 0xffffff)].push_back(
                    std::move(init));
            }
        }
    }
}

void ScenarioEngine::computeMarking(std::uint32_t flowIdx, Marking marking) {
    FlowTables& tables = tables_[flowIdx];
    if (!tables.computed.insert(marking).second) return;
    const ConcreteFlow& flow = flows_[flowIdx];
    const Lpn& lpn = flow.lpn;

    // Enumerate silent paths from `marking` (including the empty one), then
    // record every observable transition enabled at each endpoint.
    std::size_t emitted = 0;
    std::vector<std::uint16_t> prefix;
    auto visit = [&](auto&& self, Marking m) -> void {
        if (++emitted > kMaxSilentPaths)
            throw EngineError(flow.id + ": silent-path explosion at marking " +
                              lpn.markingStr(marking));
        for (std::size_t t = 0; t < lpn.transitions.size(); ++t) {
            if (!lpn.enabled(m, t)) continue;
            Marking next = lpn.fireUnchecked(m, t);
            if (observable_[flowIdx][t]) {
                AcceptEntry acc;
                acc.transition = static_cast<std::uint16_t>(t);
                acc.next = next;
                acc.segment = prefix;
                acc.segment.push_back(static_cast<std::uint16_t>(t));
                const ConcreteEvent& ev = flow.events[t];
                tables.accepts[tableKey(marking, ev.link, ev.cmd)].push_back(std::move(acc));
            } else {
                prefix.push_back(static_cast<std::uint16_t>(t));
                self(self, next);
                prefix.pop_back();
            }
        }
    };
    visit(visit, marking);
}

const std::vector<ScenarioEngine::AcceptEntry>& ScenarioEngine::acceptEntries(
    std::uint32_t flow, Marking marking, std::uint16_t link, std::uint8_t cmd) {
    static const std::vector<AcceptEntry> kEmpty;
    computeMarking(flow, marking);
    auto it = tables_[flow].accepts.find(tableKey(marking, link, cmd));
    return it == tables_[flow].accepts.end() ? kEmpty : it->second;
}

bool ScenarioEngine::statusOk(std::uint32_t flow, std::uint16_t transition,
                              const std::vector<StatusObs>& statuses) const {
    if (statuses.empty()) return true;
    for (const auto& [channel, value] : flows_[flow].statusAsserts[transition]) {
        StatusObs obs = statuses[channel];
        if (obs == StatusObs::Present0 && value) return false;
        if (obs == StatusObs::Present1 && !value) return false;
        // Unknown/Idle/PresentUnknown impose nothing: idle status pulses are
        // legal on traces not produced by the simulator.
    }
    return true;
}

void ScenarioEngine::appendAdvanced(InstancePool& pool, const Scenario& scen, std::size_t idx,
                                    const FlowEvent& e, std::int32_t h,
                                    const std::vector<StatusObs>& statuses,
                                    std::vector<Scenario>& out) {
    // by value: interning below may reallocate the pool's storage
    const FlowInstance inst = pool.at(scen.instances[idx]);
    for (const AcceptEntry& acc : acceptEntries(inst.flow, inst.marking, e.link, e.cmd)) {
        if (!statusOk(inst.flow, acc.transition, statuses)) continue;
        if (!inst.tag.consistentWith(e.tag) || !inst.sid.consistentWith(e.sid)) continue;
        FlowInstance ni = inst;
        ni.marking = acc.next;
        ni.path.insert(ni.path.end(), acc.segment.begin(), acc.segment.end());
        ni.tag = ni.tag.mergedWith(e.tag);
        ni.sid = ni.sid.mergedWith(e.sid);
        if (flows_[inst.flow].lpn.isTerminal(acc.next)) ni.end = h;
        std::vector<std::uint32_t> ids = scen.instances;
        ids[idx] = pool.intern(ni);
        out.push_back(Scenario::fromIds(std::move(ids)));
    }
}

void ScenarioEngine::appendInitiated(InstancePool& pool, const Scenario& scen, const FlowEvent& e,
                                     std::int32_t h, const std::vector<StatusObs>& statuses,
                                     std::vector<Scenario>& out) {
    auto it = initiations_.find((std::uint32_t(e.link) << 8) | e.cmd);
    if (it == initiations_.end()) return;
    for (const InitEntry& init : it->second) {
        if (!statusOk(init.flow, init.acc.transition, statuses)) continue;
        BitConstraint initiator = BitConstraint::exact(init.initiatorTag);
        if (!initiator.consistentWith(e.tag)) continue;
        FlowInstance ni;
        ni.flow = init.flow;
        ni.marking = init.acc.next;
        ni.start = h;
        ni.end = flows_[init.flow].lpn.isTerminal(init.acc.next) ? h : -1;
        ni.tag = initiator;
        ni.sid = e.sid;
        ni.path = init.acc.segment;
        std::uint16_t ordinal = 0;
        for (std::uint32_t id : scen.instances) {
            const FlowInstance& other = pool.at(id);
            if (other.flow == ni.flow && other.start == h) ++ordinal;
        }
        ni.ordinal = ordinal;
        std::vector<std::uint32_t> ids = scen.instances;
        ids.push_back(pool.intern(ni));
        out.push_back(Scenario::fromIds(std::move(ids)));
    }
}

std::vector<Scenario> ScenarioEngine::analysis(InstancePool& pool, const Scenario& scen,
                                               const FlowEvent& e, std::int32_t h,
                                               const std::vector<StatusObs>& statuses) {
    std::vector<Scenario> out;
    for (std::size_t idx = 0; idx < scen.instances.size(); ++idx)
        appendAdvanced(pool, scen, idx, e, h, statuses, out);
    appendInitiated(pool, scen, e, h, statuses, out);
    return out;
}

std::vector<Scenario> ScenarioEngine::analysis(InstancePool& pool, const Scenario& scen,
                                               const FlowEvent& e, std::int32_t h) {
    return analysis(pool, scen, e, h, {});
}

AnalysisOutcome ScenarioEngine::checkCompliance(const SignalTrace& trace, const Limits& limits) {
    if (!trace.matches(catalog_)) throw EngineError("trace channels do not match catalog");
    if (limits.maxScenarios < 1) throw EngineError("maxScenarios must be at least 1");

    auto t0 = std::chrono::steady_clock::now();
    auto elapsedMs = [&] {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    };

    AnalysisOutcome outcome;
    InstancePool& pool = outcome.pool;
    ScenarioSet current;
    current.insert(Scenario::fromIds({}));
    outcome.metrics.peak = 1;

    auto finish = [&](RunStatus status, std::int32_t h, std::int32_t link) {
        outcome.status = status;
        outcome.haltStep = h;
        outcome.haltLink = link;
        outcome.scenarios = current.items();
        outcome.metrics.finalCount = current.size();
        outcome.metrics.wallMs = elapsedMs();
        return outcome;
    };

    for (std::size_t h = 0; h < trace.stepCount(); ++h) {
        AbstractedStep step = abstractStep(trace, h, mask_, enc_);
        for (std::size_t link = 0; link < step.links.size(); ++link) {
            const AbstractedLink& al = step.links[link];
            if (al.presence != Presence::Present || al.candidates.empty()) continue;

            ScenarioSet next;
            for (const Scenario& scen : current.items()) {
                for (std::uint8_t cmd : al.candidates) {
                    FlowEvent ev{static_cast<std::uint16_t>(link), cmd, al.tag, al.sid};
                    for (Scenario& s : analysis(pool, scen, ev, static_cast<std::int32_t>(h),
                                                step.statuses))
                        next.insert(std::move(s));
                }
            }
            if (next.empty())
                return finish(RunStatus::Inconsistent, static_cast<std::int32_t>(h),
                              static_cast<std::int32_t>(link));
            current = std::move(next);
            outcome.metrics.peak = std::max(outcome.metrics.peak, current.size());
            if (current.size() > limits.maxScenarios)
                return finish(RunStatus::ComplexityExceeded, static_cast<std::int32_t>(h),
                              static_cast<std::int32_t>(link));
        }
        outcome.metrics.stepsProcessed = static_cast<std::int64_t>(h) + 1;
        if (limits.timeLimitSec > 0 && elapsedMs() > limits.timeLimitSec * 1000.0)
            return finish(RunStatus::TimeLimitExceeded, static_cast<std::int32_t>(h), 0);
    }
    return finish(RunStatus::Completed, -1, -1);
}

}  // namespace flowtrace
