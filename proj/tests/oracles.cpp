#include "oracles.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace flowtrace::testing {

const TestWorld& world() {
    static TestWorld w = [] {
        TestWorld out;
        out.catalog = loadCatalog(FLOWTRACE_TEST_CATALOG);
        out.flows = expandCatalog(out.catalog);
        out.enc = MessageEncoding::build(out.catalog, out.flows);
        return out;
    }();
    return w;
}

std::size_t TestWorld::flowIndex(const std::string& id) const {
    for (std::size_t i = 0; i < flows.size(); ++i)
        if (flows[i].id == id) return i;
    throw std::runtime_error("no such flow: " + id);
}

const ConcreteFlow& TestWorld::flow(const std::string& id) const {
    return flows[flowIndex(id)];
}

std::set<Marking> bfsReachable(const Lpn& lpn) {
    std::set<Marking> seen{lpn.initial};
    std::deque<Marking> work{lpn.initial};
    while (!work.empty()) {
        Marking m = work.front();
        work.pop_front();
        for (const Transition& t : lpn.transitions) {
            if ((m & t.preset) != t.preset) continue;
            Marking next = (m & ~t.preset) | t.postset;
            if (seen.insert(next).second) work.push_back(next);
        }
    }
    return seen;
}

std::vector<std::vector<std::size_t>> dfsPaths(const Lpn& lpn) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> path;
    auto rec = [&](auto&& self, Marking m) -> void {
        if (m == lpn.terminal) {
            out.push_back(path);
            return;
        }
        bool any = false;
        for (std::size_t t = 0; t < lpn.transitions.size(); ++t) {
            const Transition& tr = lpn.transitions[t];
            if ((m & tr.preset) != tr.preset) continue;
            any = true;
            path.push_back(t);
            self(self, (m & ~tr.preset) | tr.postset);
            path.pop_back();
        }
        (void)any;
    };
    rec(rec, lpn.initial);
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t bindingCountOracle(const FlowTemplate& tmpl) {
    std::size_t count = 0;
    std::vector<std::size_t> idx(tmpl.params.size(), 0);
    auto rec = [&](auto&& self, std::size_t p) -> void {
        if (p == tmpl.params.size()) {
            Binding b;
            for (std::size_t i = 0; i < tmpl.params.size(); ++i)
                b[tmpl.params[i].name] = tmpl.params[i].domain[idx[i]];
            for (const Constraint& c : tmpl.constraints) {
                bool eq = b.at(c.lhs) == b.at(c.rhs);
                if (eq != c.equal) return;
            }
            ++count;
            return;
        }
        for (idx[p] = 0; idx[p] < tmpl.params[p].domain.size(); ++idx[p]) self(self, p + 1);
    };
    rec(rec, 0);
    return count;
}

std::vector<std::uint8_t> abstractOracle(const Bits& state, const Bits& observed,
                                         const MessageEncoding::LinkInfo& info,
                                         const std::vector<std::uint8_t>& declaredCmds) {
    std::vector<std::uint8_t> out;
    for (std::uint8_t cmd : declaredCmds) {
        bool ok = true;
        if (observed.get(info.valBit) && !state.get(info.valBit)) ok = false;
        for (int k = 0; k < 8 && ok; ++k) {
            int idx = info.cmdLo + k;
            if (!observed.get(idx)) continue;
            bool expect = (cmd >> (7 - k)) & 1;
            if (state.get(idx) != expect) ok = false;
        }
        if (ok) out.push_back(cmd);
    }
    return out;
}

SignalTrace traceOfEvents(const TestWorld& w,
                          const std::vector<std::pair<std::string, std::string>>& events,
                          std::uint8_t tag, std::uint8_t sid) {
    SignalTrace trace = SignalTrace::forCatalog(w.catalog);
    for (const auto& [flowId, transName] : events) {
        const ConcreteFlow& flow = w.flow(flowId);
        std::size_t t = flow.lpn.transitionIndex(transName);
        const ConcreteEvent& ev = flow.events[t];
        std::size_t h = trace.addIdleStep();
        Message msg;
        msg.cmd = ev.cmd;
        msg.tag = tag;
        msg.sid = sid;
        trace.steps[h][ev.link] = w.enc.encode(ev.link, msg);
    }
    return trace;
}

namespace {

struct Slot {
    std::size_t step;
    std::uint16_t link;
    std::vector<std::uint8_t> candidates;
};

struct ObsItem {
    std::uint16_t link;
    std::uint8_t cmd;
    std::size_t silentBefore;  // silent transitions between previous obs and this one
};

struct ObsSeq {
    std::vector<ObsItem> items;
    std::int32_t start, end;
};

}  // namespace

bool replayConsistent(const Scenario& scen, const InstancePool& pool,
                      const std::vector<ConcreteFlow>& flows, const MessageEncoding& enc,
                      const SignalTrace& trace, const SelectionMask& mask) {
    std::vector<Slot> slots;
    for (std::size_t h = 0; h < trace.stepCount(); ++h) {
        AbstractedStep step = abstractStep(trace, h, mask, enc);
        for (std::size_t link = 0; link < step.links.size(); ++link) {
            const AbstractedLink& al = step.links[link];
            if (al.presence == Presence::Present && !al.candidates.empty())
                slots.push_back({h, static_cast<std::uint16_t>(link), al.candidates});
        }
    }

    std::vector<ObsSeq> seqs;
    std::size_t totalObs = 0;
    for (std::uint32_t id : scen.instances) {
        const FlowInstance& inst = pool.at(id);
        const ConcreteFlow& flow = flows[inst.flow];
        ObsSeq seq;
        seq.start = inst.start;
        seq.end = inst.end;
        std::size_t silent = 0;
        for (std::uint16_t t : inst.path) {
            std::uint16_t link = flow.events[t].link;
            bool observable = mask.observed[link].get(enc.link(link).valBit);
            if (!observable) {
                ++silent;
                continue;
            }
            seq.items.push_back({link, flow.events[t].cmd, silent});
            silent = 0;
        }
        if (silent != 0) return false;  // paths must end on an observed event
        if (seq.items.empty()) return false;
        totalObs += seq.items.size();
        seqs.push_back(std::move(seq));
    }
    if (totalObs != slots.size()) return false;

    std::vector<bool> used(slots.size(), false);
    // Assign each instance's observable transitions to slots in path order.
    auto fits = [&](const ObsSeq& seq, std::size_t item, std::size_t slot,
                    std::ptrdiff_t prevStep) {
        const Slot& s = slots[slot];
        const ObsItem& it = seq.items[item];
        if (s.link != it.link) return false;
        if (std::find(s.candidates.begin(), s.candidates.end(), it.cmd) == s.candidates.end())
            return false;
        // room for the silent transitions in between (one per cycle)
        if (static_cast<std::ptrdiff_t>(s.step) - prevStep <=
            static_cast<std::ptrdiff_t>(it.silentBefore))
            return false;
        if (item == 0 && static_cast<std::int32_t>(s.step) != seq.start) return false;
        if (item + 1 == seq.items.size() && seq.end >= 0 &&
            static_cast<std::int32_t>(s.step) != seq.end)
            return false;
        return true;
    };

    auto rec = [&](auto&& self, std::size_t seqIdx, std::size_t item,
                   std::ptrdiff_t prevStep) -> bool {
        if (seqIdx == seqs.size()) return true;
        const ObsSeq& seq = seqs[seqIdx];
        if (item == seq.items.size()) return self(self, seqIdx + 1, 0, -1);
        for (std::size_t s = 0; s < slots.size(); ++s) {
            if (used[s]) continue;
            if (!fits(seq, item, s, prevStep)) continue;
            used[s] = true;
            if (self(self, seqIdx, item + 1, static_cast<std::ptrdiff_t>(slots[s].step)))
                return true;
            used[s] = false;
        }
        return false;
    };
    return rec(rec, 0, 0, -1);
}

}  // namespace flowtrace::testing
