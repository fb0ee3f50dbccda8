#include "flowtrace/report.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace flowtrace {

namespace {

using nlohmann::json;

// Stable report order: scenarios sorted by their instances' content keys.
std::vector<std::size_t> scenarioOrder(const AnalysisOutcome& outcome) {
    std::vector<std::size_t> order(outcome.scenarios.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    auto contentKey = [&](std::size_t idx) {
        std::vector<FlowInstance> insts;
        for (std::uint32_t id : outcome.scenarios[idx].instances)
            insts.push_back(outcome.pool.at(id));
        std::sort(insts.begin(), insts.end());
        return insts;
    };
    std::vector<std::vector<FlowInstance>> keys(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) keys[i] = contentKey(i);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
    return order;
}

std::string pathStr(const FlowInstance& inst, const std::vector<ConcreteFlow>& flows) {
    std::string out;
    for (std::size_t i = 0; i < inst.path.size(); ++i) {
        if (i) out += ",";
        out += flows[inst.flow].lpn.transitions[inst.path[i]].name;
    }
    return out;
}

std::string attrStr(const BitConstraint& c) {
    if (c.empty()) return "?";
    if (c.mask == 0xff) return std::to_string(c.value);
    std::ostringstream out;
    out << std::hex << int(c.value) << "/" << int(c.mask);
    return out.str();
}

}  // namespace

const char* runStatusName(RunStatus status) {
    switch (status) {
        case RunStatus::Completed:
            return "completed";
        case RunStatus::Inconsistent:
            return "inconsistent";
        case RunStatus::ComplexityExceeded:
            return "complexity_exceeded";
        case RunStatus::TimeLimitExceeded:
            return "time_limit_exceeded";
    }
    return "unknown";
}

std::string renderTextReport(const AnalysisOutcome& outcome,
                             const std::vector<ConcreteFlow>& flows, const Catalog& catalog,
                             const ReportOptions& opts) {
    std::ostringstream out;
    out << "status: " << runStatusName(outcome.status) << "\n";
    out << "metrics: peak=" << outcome.metrics.peak << " final=" << outcome.metrics.finalCount
        << " halt_step=" << outcome.haltStep << " halt_link=" << outcome.haltLink
        << " steps=" << outcome.metrics.stepsProcessed;
    if (opts.withTimings)
        out << " wall_ms=" << std::fixed << std::setprecision(3) << outcome.metrics.wallMs;
    out << "\n";
    if (outcome.haltLink >= 0 && outcome.status == RunStatus::Inconsistent)
        out << "halt link: " << catalog.channelName(static_cast<std::size_t>(outcome.haltLink))
            << "\n";

    auto order = scenarioOrder(outcome);
    std::size_t shown = std::min<std::size_t>(order.size(), opts.maxScenarios);
    for (std::size_t rank = 0; rank < shown; ++rank) {
        const Scenario& scen = outcome.scenarios[order[rank]];
        out << "scenario " << rank + 1 << ":\n";
        Projection proj = project(scen, outcome.pool, opts.type);
        std::vector<std::uint32_t> ids = scen.instances;
        std::sort(ids.begin(), ids.end(), [&](std::uint32_t a, std::uint32_t b) {
            return outcome.pool.at(a) < outcome.pool.at(b);
        });
        for (std::uint32_t id : ids) {
            const FlowInstance& inst = outcome.pool.at(id);
            out << "  instance " << instanceName(inst, flows);
            out << " start=" << inst.start;
            if (opts.type >= 2) {
                out << " end=" << inst.end
                    << " marking=" << flows[inst.flow].lpn.markingStr(inst.marking);
                out << " tag=" << attrStr(inst.tag) << " sid=" << attrStr(inst.sid);
            }
            if (opts.type >= 3) out << " path=" << pathStr(inst, flows);
            out << "\n";
        }
        for (const OrderingFact& f : proj.facts) {
            out << "  " << instanceName(outcome.pool.at(f.first), flows)
                << (f.kind == OrderingFact::InitiatedBefore ? " initiated-before "
                                                            : " completed-before-initiated ")
                << instanceName(outcome.pool.at(f.second), flows) << "\n";
        }
    }
    if (order.size() > shown)
        out << "(" << order.size() - shown << " more scenarios not listed)\n";
    return out.str();
}

std::string renderJsonReport(const AnalysisOutcome& outcome,
                             const std::vector<ConcreteFlow>& flows, const Catalog& catalog,
                             const ReportOptions& opts) {
    json root;
    root["status"] = runStatusName(outcome.status);
    root["type"] = opts.type;
    json metrics;
    metrics["peak"] = outcome.metrics.peak;
    metrics["final"] = outcome.metrics.finalCount;
    metrics["halt_step"] = outcome.haltStep;
    metrics["halt_link"] = outcome.haltLink;
    if (outcome.haltLink >= 0)
        metrics["halt_link_name"] = catalog.channelName(static_cast<std::size_t>(outcome.haltLink));
    metrics["steps"] = outcome.metrics.stepsProcessed;
    if (opts.withTimings) metrics["wall_ms"] = outcome.metrics.wallMs;
    root["metrics"] = std::move(metrics);

    auto order = scenarioOrder(outcome);
    std::size_t shown = std::min<std::size_t>(order.size(), opts.maxScenarios);
    json scenarios = json::array();
    for (std::size_t rank = 0; rank < shown; ++rank) {
        const Scenario& scen = outcome.scenarios[order[rank]];
        json jscen;
        json insts = json::array();
        std::vector<std::uint32_t> ids = scen.instances;
        std::sort(ids.begin(), ids.end(), [&](std::uint32_t a, std::uint32_t b) {
            return outcome.pool.at(a) < outcome.pool.at(b);
        });
        for (std::uint32_t id : ids) {
            const FlowInstance& inst = outcome.pool.at(id);
            json ji;
            ji["name"] = instanceName(inst, flows);
            ji["flow"] = flows[inst.flow].id;
            ji["start"] = inst.start;
            if (opts.type >= 2) {
                ji["end"] = inst.end;
                ji["completed"] = inst.end >= 0;
                ji["marking"] = flows[inst.flow].lpn.markingStr(inst.marking);
                if (!inst.tag.empty()) ji["tag"] = attrStr(inst.tag);
                if (!inst.sid.empty()) ji["sid"] = attrStr(inst.sid);
            }
            if (opts.type >= 3) ji["path"] = pathStr(inst, flows);
            insts.push_back(std::move(ji));
        }
        jscen["instances"] = std::move(insts);
        json facts = json::array();
        Projection proj = project(scen, outcome.pool, opts.type);
        for (const OrderingFact& f : proj.facts) {
            json jf;
            jf["kind"] = f.kind == OrderingFact::InitiatedBefore ? "initiated-before"
                                                                 : "completed-before-initiated";
            jf["first"] = instanceName(outcome.pool.at(f.first), flows);
            jf["second"] = instanceName(outcome.pool.at(f.second), flows);
            facts.push_back(std::move(jf));
        }
        jscen["orderings"] = std::move(facts);
        scenarios.push_back(std::move(jscen));
    }
    root["scenarios"] = std::move(scenarios);
    root["scenarios_listed"] = shown;
    return root.dump(2) + "\n";
}

std::string renderSweepText(const std::vector<EvalRow>& rows) {
    std::ostringstream out;
    out << std::left << std::setw(16) << "strategy" << std::right << std::setw(7) << "bits"
        << std::setw(22) << "status" << std::setw(9) << "final" << std::setw(12) << "peak"
        << std::setw(11) << "time_s" << std::setw(14) << "mem_proxy" << std::setw(10)
        << "gt_member" << "\n";
    for (const EvalRow& r : rows) {
        out << std::left << std::setw(16) << r.strategy << std::right << std::setw(7) << r.bits
            << std::setw(22) << runStatusName(r.status);
        if (r.status == RunStatus::Completed || r.status == RunStatus::Inconsistent)
            out << std::setw(9) << r.finalCount;
        else
            out << std::setw(9) << "-";
        out << std::setw(12) << r.peak;
        out << std::setw(11) << std::fixed << std::setprecision(3) << r.wallMs / 1000.0;
        out << std::setw(14) << std::fixed << std::setprecision(1) << r.memProxy;
        out << std::setw(10) << (r.gtChecked ? (r.gtMember ? "yes" : "NO") : "-");
        out << "\n";
    }
    return out.str();
}

std::string renderSweepJson(const std::vector<EvalRow>& rows, bool withTimings) {
    json arr = json::array();
    for (const EvalRow& r : rows) {
        json jr;
        jr["strategy"] = r.strategy;
        jr["bits"] = r.bits;
        jr["status"] = runStatusName(r.status);
        jr["final"] = r.finalCount;
        jr["peak"] = r.peak;
        jr["halt_step"] = r.haltStep;
        jr["halt_link"] = r.haltLink;
        if (withTimings) jr["time_ms"] = r.wallMs;
        jr["mem_proxy"] = r.memProxy;
        if (r.gtChecked) jr["gt_member"] = r.gtMember;
        arr.push_back(std::move(jr));
    }
    return arr.dump(2) + "\n";
}

}  // namespace flowtrace
