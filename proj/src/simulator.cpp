#include "flowtrace/simulator.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace flowtrace {

namespace {

struct LiveInstance {
    std::uint32_t flow = 0;
    Marking marking = 0;
    std::uint8_t sid = 0;
    int pending = -1;  // chosen next transition, sticky across blocked cycles
    bool done = false;
    GtInstance gt;
    Rng rng;  // private stream for branch choices

    LiveInstance(std::uint32_t f, Marking m, std::uint8_t s, std::uint64_t seed)
        : flow(f), marking(m), sid(s), rng(seed) {}
};

}  // namespace

std::pair<SignalTrace, GroundTruth> simulate(const Catalog& catalog,
                                             const std::vector<ConcreteFlow>& flows,
                                             const MessageEncoding& enc,
                                             const SimConfig& config) {
    if (config.initiationProb < 0.0 || config.initiationProb > 1.0)
        throw SimError("initiation probability outside [0,1]");
    if (config.budgetPerBlock < 0) throw SimError("negative budget");

    // Which flows each block can start (block = src of an initial transition).
    std::set<std::string> allowed(config.allowedTemplates.begin(),
                                  config.allowedTemplates.end());
    std::vector<std::vector<std::uint32_t>> menu(catalog.components.size());
    for (std::size_t f = 0; f < flows.size(); ++f) {
        const ConcreteFlow& flow = flows[f];
        if (!allowed.empty() && !allowed.count(catalog.templates[flow.templateIdx].name()))
            continue;
        for (std::size_t t = 0; t < flow.lpn.transitions.size(); ++t)
            if (flow.lpn.enabled(flow.lpn.initial, t))
                menu[catalog.componentIndex(flow.lpn.transitions[t].label.src)].push_back(
                    static_cast<std::uint32_t>(f));
    }
    for (auto& m : menu) {
        std::sort(m.begin(), m.end());
        m.erase(std::unique(m.begin(), m.end()), m.end());
    }

    std::vector<int> budget(catalog.components.size(), 0);
    for (std::size_t b = 0; b < catalog.components.size(); ++b) {
        if (menu[b].empty()) continue;
        budget[b] = config.budgetPerBlock;
        auto it = config.budgetOverrides.find(catalog.components[b]);
        if (it != config.budgetOverrides.end()) budget[b] = it->second;
    }

    Rng rng(config.seed);
    std::vector<std::uint8_t> sidCounter(catalog.components.size(), 0);
    std::vector<LiveInstance> instances;
    SignalTrace trace = SignalTrace::forCatalog(catalog);
    const std::size_t linkCount = catalog.links.size();

    auto pendingWork = [&] {
        for (std::size_t b = 0; b < budget.size(); ++b)
            if (budget[b] > 0) return true;
        for (const LiveInstance& inst : instances)
            if (!inst.done) return true;
        return false;
    };

    std::size_t cycle = 0;
    while (pendingWork()) {
        if (cycle >= config.maxCycles)
            throw SimError("simulation exceeded " + std::to_string(config.maxCycles) +
                           " cycles without draining");
        std::size_t h = trace.addIdleStep();

        // New activations this cycle.
        for (std::size_t b = 0; b < catalog.components.size(); ++b) {
            if (budget[b] <= 0 || menu[b].empty()) continue;
            if (!rng.chance(config.initiationProb)) continue;
            --budget[b];
            std::uint32_t flowIdx =
                menu[b][static_cast<std::size_t>(rng.below(menu[b].size()))];
            if (sidCounter[b] == 0xff) throw SimError("sid counter overflow for block");
            std::uint8_t sid = ++sidCounter[b];
            std::uint64_t streamSeed =
                config.seed ^ (0x9e3779b97f4a7c15ull * (instances.size() + 1));
            instances.emplace_back(flowIdx, flows[flowIdx].lpn.initial, sid, streamSeed);
        }

        // Fire at most one transition per instance, one message per channel.
        std::vector<bool> channelBusy(catalog.channelCount(), false);
        for (std::size_t i = 0; i < instances.size(); ++i) {
            LiveInstance& inst = instances[i];
            if (inst.done) continue;
            const ConcreteFlow& flow = flows[inst.flow];
            if (inst.pending < 0) {
                auto enabled = flow.lpn.enabledTransitions(inst.marking);
                if (enabled.empty())
                    throw SimError(flow.id + ": stuck short of terminal");
                std::size_t pick = 0;
                if (enabled.size() > 1) {
                    switch (config.branchMode) {
                        case BranchMode::Random:
                            pick = static_cast<std::size_t>(inst.rng.below(enabled.size()));
                            break;
                        case BranchMode::First:
                            pick = 0;
                            break;
                        case BranchMode::Last:
                            pick = enabled.size() - 1;
                            break;
                    }
                }
                inst.pending = static_cast<int>(enabled[pick]);
            }

            std::size_t t = static_cast<std::size_t>(inst.pending);
            const ConcreteEvent& ev = flow.events[t];
            bool free = !channelBusy[ev.link];
            for (const auto& [channel, value] : flow.statusAsserts[t])
                if (channelBusy[linkCount + channel]) free = false;
            if (!free) continue;  // arbitration: retry next cycle

            channelBusy[ev.link] = true;
            Message msg;
            msg.cmd = ev.cmd;
            msg.tag = inst.gt.path.empty() ? flow.srcTag[t] : inst.gt.initiatorTag;
            msg.sid = inst.sid;
            msg.addr = static_cast<std::uint32_t>(rng.raw());
            msg.data = rng.raw();
            trace.steps[h][ev.link] = enc.encode(ev.link, msg);
            for (const auto& [channel, value] : flow.statusAsserts[t]) {
                channelBusy[linkCount + channel] = true;
                Bits pulse(StatusDecl::kWidth);
                pulse.set(0, true);
                pulse.set(1, value);
                trace.steps[h][linkCount + channel] = pulse;
            }

            if (inst.gt.path.empty()) {
                inst.gt.flow = inst.flow;
                inst.gt.flowId = flow.id;
                inst.gt.initiatorTag = flow.srcTag[t];
                inst.gt.sid = inst.sid;
                inst.gt.start = static_cast<std::int32_t>(h);
            }
            inst.gt.path.push_back(static_cast<std::uint16_t>(t));
            inst.gt.cycles.push_back(static_cast<std::int32_t>(h));
            inst.marking = flow.lpn.fireUnchecked(inst.marking, t);
            inst.pending = -1;
            if (flow.lpn.isTerminal(inst.marking)) {
                inst.gt.end = static_cast<std::int32_t>(h);
                inst.done = true;
            }
        }
        ++cycle;
    }

    GroundTruth gt;
    for (const LiveInstance& inst : instances) gt.instances.push_back(inst.gt);
    return {std::move(trace), std::move(gt)};
}

SignalTrace injectBug(const SignalTrace& trace, const Catalog& catalog,
                      const MessageEncoding& enc, const BugSpec& bug) {
    auto target = catalog.findLink(bug.target.src, bug.target.dest);
    if (!target) throw SimError("bug target link " + bug.target.src + "->" + bug.target.dest +
                                " not declared");
    auto repl = catalog.findLink(bug.replacement.src, bug.replacement.dest);
    if (!repl)
        throw SimError("replacement link " + bug.replacement.src + "->" +
                       bug.replacement.dest + " not declared");
    std::uint8_t targetCmd = enc.cmdCode(*target, bug.target.cmd);
    std::uint8_t replCmd = enc.cmdCode(*repl, bug.replacement.cmd);

    SignalTrace out = trace;
    const auto& targetInfo = enc.link(*target);
    std::size_t seen = 0;
    for (std::size_t h = 0; h < out.stepCount(); ++h) {
        Bits& state = out.steps[h][*target];
        if (!state.get(targetInfo.valBit)) continue;
        if (state.getByte(targetInfo.cmdLo) != targetCmd) continue;
        if (++seen != bug.occurrence) continue;

        if (*repl == *target) {
            state.setByte(targetInfo.cmdLo, replCmd);
        } else {
            Message msg;
            msg.cmd = replCmd;
            msg.tag = state.getByte(targetInfo.tagLo);
            msg.sid = state.getByte(targetInfo.sidLo);
            out.steps[h][*repl] = enc.encode(*repl, msg);
            out.steps[h][*target] = Bits(targetInfo.width);
        }
        return out;
    }
    throw SimError("occurrence " + std::to_string(bug.occurrence) + " of " + bug.target.str() +
                   " not found in trace");
}

std::string groundTruthToString(const GroundTruth& gt, const std::vector<ConcreteFlow>& flows) {
    std::ostringstream out;
    for (const GtInstance& inst : gt.instances) {
        out << "instance " << inst.flowId << " tag " << int(inst.initiatorTag) << " sid "
            << int(inst.sid) << " start " << inst.start << " end " << inst.end << " path ";
        for (std::size_t i = 0; i < inst.path.size(); ++i) {
            if (i) out << ",";
            out << flows[inst.flow].lpn.transitions[inst.path[i]].name << "@" << inst.cycles[i];
        }
        out << "\n";
    }
    return out.str();
}

void writeGroundTruth(const GroundTruth& gt, const std::vector<ConcreteFlow>& flows,
                      const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SimError("cannot write ground truth '" + path + "'");
    out << groundTruthToString(gt, flows);
}

GroundTruth groundTruthFromString(const std::string& text,
                                  const std::vector<ConcreteFlow>& flows,
                                  const std::string& sourceName) {
    GroundTruth gt;
    std::istringstream in(text);
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string kw, flowId, tagKw, sidKw, startKw, endKw, pathKw, pathList;
        int tag = 0, sid = 0;
        long start = -1, end = -1;
        ls >> kw >> flowId >> tagKw >> tag >> sidKw >> sid >> startKw >> start >> endKw >> end >>
            pathKw >> pathList;
        if (kw != "instance" || tagKw != "tag" || sidKw != "sid" || startKw != "start" ||
            endKw != "end" || pathKw != "path")
            throw SimError(sourceName + ":" + std::to_string(lineNo) + ": bad instance line");
        GtInstance inst;
        inst.flowId = flowId;
        bool found = false;
        for (std::size_t f = 0; f < flows.size(); ++f)
            if (flows[f].id == flowId) {
                inst.flow = static_cast<std::uint32_t>(f);
                found = true;
                break;
            }
        if (!found)
            throw SimError(sourceName + ":" + std::to_string(lineNo) + ": unknown flow '" +
                           flowId + "'");
        inst.initiatorTag = static_cast<std::uint8_t>(tag);
        inst.sid = static_cast<std::uint8_t>(sid);
        inst.start = static_cast<std::int32_t>(start);
        inst.end = static_cast<std::int32_t>(end);
        std::stringstream ps(pathList);
        std::string entry;
        while (std::getline(ps, entry, ',')) {
            auto at = entry.find('@');
            if (at == std::string::npos)
                throw SimError(sourceName + ":" + std::to_string(lineNo) +
                               ": path entry without cycle: " + entry);
            inst.path.push_back(static_cast<std::uint16_t>(
                flows[inst.flow].lpn.transitionIndex(entry.substr(0, at))));
            inst.cycles.push_back(static_cast<std::int32_t>(std::stol(entry.substr(at + 1))));
        }
        gt.instances.push_back(std::move(inst));
    }
    return gt;
}

GroundTruth readGroundTruth(const std::string& path, const std::vector<ConcreteFlow>& flows) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SimError("cannot open ground truth '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return groundTruthFromString(ss.str(), flows, path);
}

}  // namespace flowtrace
