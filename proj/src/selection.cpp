#include "flowtrace/selection.hpp"

#include <algorithm>
#include <future>
#include <map>

#include "flowtrace/truth.hpp"

namespace flowtrace {

std::vector<std::size_t> startEndTransitions(const Lpn& lpn) {
    std::vector<std::size_t> out;
    for (std::size_t t = 0; t < lpn.transitions.size(); ++t) {
        bool start = lpn.enabled(lpn.initial, t);
        bool end = (lpn.transitions[t].postset & lpn.terminal) != 0;
        if (start || end) out.push_back(t);
    }
    return out;
}

std::vector<std::vector<std::size_t>> discriminatorSets(const Lpn& lpn) {
    BranchStructure bs = branchStructure(lpn);
    if (bs.branches.size() <= 1 || bs.shape == BranchShape::DistinctTerminal) return {};

    auto labelSet = [&](const Branch& b) {
        std::set<EventLabel> labels;
        for (std::size_t t : b.transitions) labels.insert(lpn.transitions[t].label);
        return labels;
    };
    std::vector<std::set<EventLabel>> labels;
    for (const Branch& b : bs.branches) labels.push_back(labelSet(b));

    std::vector<std::set<std::size_t>> sets;
    for (std::size_t i = 0; i < bs.branches.size(); ++i) {
        for (std::size_t j = i + 1; j < bs.branches.size(); ++j) {
            std::set<std::size_t> d;
            auto collect = [&](const Branch& from, const std::set<EventLabel>& other) {
                for (std::size_t t : from.transitions)
                    if (!other.count(lpn.transitions[t].label)) d.insert(t);
            };
            collect(bs.branches[i], labels[j]);
            collect(bs.branches[j], labels[i]);
            // A pair with no distinguishing event cannot be separated by any
            // selection; it contributes no requirement.
            if (!d.empty()) sets.push_back(std::move(d));
        }
    }

    // Keep inclusion-minimal sets, deduplicated.
    std::vector<std::set<std::size_t>> minimal;
    for (const auto& d : sets) {
        bool dominated = false;
        for (const auto& other : sets)
            if (other != d && std::includes(d.begin(), d.end(), other.begin(), other.end())) {
                dominated = true;
                break;
            }
        if (!dominated && std::find(minimal.begin(), minimal.end(), d) == minimal.end())
            minimal.push_back(d);
    }
    std::sort(minimal.begin(), minimal.end());
    std::vector<std::vector<std::size_t>> out;
    for (const auto& d : minimal) out.emplace_back(d.begin(), d.end());
    return out;
}

std::vector<std::set<std::size_t>> branchSelections(const Lpn& lpn) {
    auto sets = discriminatorSets(lpn);
    std::vector<std::set<std::size_t>> selections{{}};
    for (const auto& d : sets) {
        std::vector<std::set<std::size_t>> next;
        for (const auto& sel : selections)
            for (std::size_t t : d) {
                std::set<std::size_t> ns = sel;
                ns.insert(t);
                next.push_back(std::move(ns));
            }
        selections = std::move(next);
    }
    // Overlapping discriminator sets can produce duplicates or supersets.
    std::sort(selections.begin(), selections.end());
    selections.erase(std::unique(selections.begin(), selections.end()), selections.end());
    std::vector<std::set<std::size_t>> minimal;
    for (const auto& s : selections) {
        bool dominated = false;
        for (const auto& other : selections)
            if (other != s && std::includes(s.begin(), s.end(), other.begin(), other.end()))
                dominated = true;
        if (!dominated) minimal.push_back(s);
    }
    return minimal;
}

std::vector<std::vector<std::uint8_t>> distinguishingPower(const MessageEncoding& enc,
                                                           std::size_t link,
                                                           const std::vector<std::uint8_t>& cmds,
                                                           const std::vector<int>& bits) {
    std::map<std::vector<bool>, std::vector<std::uint8_t>> blocks;
    for (std::uint8_t cmd : cmds) {
        Bits state = enc.canonical(link, cmd);
        std::vector<bool> key;
        for (int b : bits) key.push_back(state.get(b));
        blocks[key].push_back(cmd);
    }
    std::vector<std::vector<std::uint8_t>> out;
    for (auto& [key, block] : blocks) {
        std::sort(block.begin(), block.end());
        out.push_back(std::move(block));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> greedyCmdBits(const MessageEncoding& enc, std::size_t link,
                               const std::vector<std::uint8_t>& cmds) {
    std::vector<int> chosen;
    if (cmds.size() <= 1) return chosen;
    const auto& info = enc.link(link);
    std::vector<int> field;
    for (int k = 0; k < 8; ++k) field.push_back(info.cmdLo + k);

    std::size_t best = distinguishingPower(enc, link, cmds, field).size();  // finest reachable
    std::size_t current = 1;
    while (current < best) {
        int pick = -1;
        std::size_t pickCount = current;
        for (int b : field) {
            if (std::find(chosen.begin(), chosen.end(), b) != chosen.end()) continue;
            std::vector<int> trial = chosen;
            trial.push_back(b);
            std::size_t count = distinguishingPower(enc, link, cmds, trial).size();
            if (count > pickCount) {
                pick = b;
                pickCount = count;
            }
        }
        if (pick < 0) break;  // no single bit refines further (should not happen)
        chosen.push_back(pick);
        current = pickCount;
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

Strategy Strategy::parse(const std::string& spec) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : spec) {
        if (c == '+') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    if (parts.empty() || parts[0].empty()) throw SelectionError("empty strategy spec");

    Strategy s;
    const std::string& mode = parts[0];
    if (mode == "S1")
        s.mode = SystemMode::S1;
    else if (mode == "S2")
        s.mode = SystemMode::S2;
    else if (mode == "S3")
        s.mode = SystemMode::S3;
    else if (mode == "S4")
        s.mode = SystemMode::S4;
    else
        throw SelectionError("unknown selection mode '" + mode + "'");

    if (s.mode == SystemMode::S1) {
        if (parts.size() > 1)
            throw SelectionError("S1 fixes all events and fields; no qualifiers allowed");
        return s;
    }

    s.cmd = s.tag = s.sid = false;
    for (std::size_t i = 1; i < parts.size(); ++i) {
        const std::string& p = parts[i];
        if (p == "cmd")
            s.cmd = true;
        else if (p == "tag")
            s.tag = true;
        else if (p == "sid")
            s.sid = true;
        else if (p == "us")
            s.uniqueSharedSplit = true;
        else
            throw SelectionError("unknown strategy qualifier '" + p + "'");
    }
    if (s.uniqueSharedSplit) {
        if (s.cmd || s.tag || s.sid)
            throw SelectionError("'us' already fixes the field split; drop other qualifiers");
        s.cmd = s.sid = s.tag = true;
    }
    if (!s.cmd && !s.tag && !s.sid)
        throw SelectionError("strategy selects no fields; Val alone observes nothing useful");
    return s;
}

std::string Strategy::str() const {
    switch (mode) {
        case SystemMode::S1:
            return "S1";
        case SystemMode::S2:
        case SystemMode::S3:
        case SystemMode::S4:
            break;
    }
    std::string out = mode == SystemMode::S2 ? "S2" : mode == SystemMode::S3 ? "S3" : "S4";
    if (uniqueSharedSplit) return out + "+us";
    if (cmd) out += "+cmd";
    if (tag) out += "+tag";
    if (sid) out += "+sid";
    return out;
}

std::size_t shareCount(const Catalog& catalog, const std::vector<ConcreteFlow>& flows,
                       std::size_t templateIdx, std::size_t transition) {
    std::map<ConcreteEvent, std::set<std::uint32_t>> byEvent;
    for (std::size_t f = 0; f < flows.size(); ++f)
        for (const ConcreteEvent& ev : flows[f].events)
            byEvent[ev].insert(static_cast<std::uint32_t>(f));

    std::size_t best = 0;
    for (const ConcreteFlow& flow : flows) {
        if (flow.templateIdx != templateIdx) continue;
        best = std::max(best, byEvent[flow.events[transition]].size());
    }
    return best;
}

EventSelection buildSelection(const Catalog& catalog, const std::vector<ConcreteFlow>& flows,
                              const Strategy& strategy) {
    EventSelection sel;
    sel.byTemplate.resize(catalog.templates.size());

    for (std::size_t ti = 0; ti < catalog.templates.size(); ++ti) {
        const Lpn& base = catalog.templates[ti].base;
        if (strategy.mode == SystemMode::S1) {
            for (std::size_t t = 0; t < base.transitions.size(); ++t)
                sel.byTemplate[ti].push_back({t, false});
            continue;
        }
        for (std::size_t t : startEndTransitions(base)) sel.byTemplate[ti].push_back({t, true});
        if (strategy.mode == SystemMode::S4) continue;

        for (const auto& dset : discriminatorSets(base)) {
            // S2 takes the least shared candidate, S3 the most shared; ties
            // break on event name order (cmd, src, dest).
            std::size_t pick = dset.front();
            std::size_t pickCount = shareCount(catalog, flows, ti, pick);
            for (std::size_t t : dset) {
                std::size_t count = shareCount(catalog, flows, ti, t);
                bool better = strategy.mode == SystemMode::S2 ? count < pickCount
                                                              : count > pickCount;
                if (!better && count == pickCount &&
                    base.transitions[t].label < base.transitions[pick].label)
                    better = t != pick;
                if (better) {
                    pick = t;
                    pickCount = count;
                }
            }
            if (!sel.selected(ti, pick)) sel.byTemplate[ti].push_back({pick, false});
        }
    }
    return sel;
}

SelectionMask selectBits(const Catalog& catalog, const std::vector<ConcreteFlow>& flows,
                         const MessageEncoding& enc, const EventSelection& selection,
                         const Strategy& strategy) {
    SelectionMask mask = SelectionMask::none(catalog);

    if (strategy.mode == SystemMode::S1) {
        for (std::size_t link = 0; link < catalog.links.size(); ++link) {
            const auto& info = enc.link(link);
            mask.observize(link, info.valBit);
            mask.observeRange(link, info.cmdLo, 8);
            mask.observeRange(link, info.tagLo, 8);
            mask.observeRange(link, info.sidLo, 8);
        }
        return mask;
    }

    std::map<ConcreteEvent, std::set<std::uint32_t>> byEvent;
    for (std::size_t f = 0; f < flows.size(); ++f)
        for (const ConcreteEvent& ev : flows[f].events)
            byEvent[ev].insert(static_cast<std::uint32_t>(f));

    struct PerLink {
        std::set<std::uint8_t> cmds;
        bool anyShared = false;
    };
    std::map<std::uint16_t, PerLink> perLink;
    for (const ConcreteFlow& flow : flows) {
        for (const auto& entry : selection.byTemplate[flow.templateIdx]) {
            const ConcreteEvent& ev = flow.events[entry.transition];
            PerLink& pl = perLink[ev.link];
            pl.cmds.insert(ev.cmd);
            if (byEvent[ev].size() > 1) pl.anyShared = true;
        }
    }

    for (const auto& [link, pl] : perLink) {
        const auto& info = enc.link(link);
        mask.observize(link, info.valBit);
        if (strategy.cmd)
            for (int b : greedyCmdBits(enc, link,
                                       std::vector<std::uint8_t>(pl.cmds.begin(), pl.cmds.end())))
                mask.observize(link, b);
        bool wantTag = strategy.uniqueSharedSplit ? pl.anyShared : strategy.tag;
        if (wantTag) mask.observeRange(link, info.tagLo, 8);
        if (strategy.sid) mask.observeRange(link, info.sidLo, 8);
    }

    if (strategy.mode == SystemMode::S4)
        for (std::size_t s = 0; s < catalog.statuses.size(); ++s)
            mask.observeRange(catalog.links.size() + s, 0, StatusDecl::kWidth);
    return mask;
}

SelectionMask buildStrategyMask(const Catalog& catalog, const std::vector<ConcreteFlow>& flows,
                                const MessageEncoding& enc, const Strategy& strategy) {
    return selectBits(catalog, flows, enc, buildSelection(catalog, flows, strategy), strategy);
}

EvalRow evaluate(const Catalog& catalog, const std::vector<ConcreteFlow>& flows,
                 const MessageEncoding& enc, const Strategy& strategy, const SignalTrace& trace,
                 const Limits& limits, const GroundTruth* gt) {
    EvalRow row;
    row.strategy = strategy.str();
    SelectionMask mask = buildStrategyMask(catalog, flows, enc, strategy);
    row.bits = mask.bitCount();

    ScenarioEngine engine(catalog, flows, enc, mask);
    AnalysisOutcome outcome = engine.checkCompliance(trace, limits);
    row.status = outcome.status;
    row.finalCount = outcome.metrics.finalCount;
    row.peak = outcome.metrics.peak;
    row.haltStep = outcome.haltStep;
    row.haltLink = outcome.haltLink;
    row.wallMs = outcome.metrics.wallMs;

    std::size_t totalInstances = 0;
    for (const Scenario& s : outcome.scenarios) totalInstances += s.instances.size();
    double mean = outcome.scenarios.empty()
                      ? 0.0
                      : static_cast<double>(totalInstances) / outcome.scenarios.size();
    row.memProxy = static_cast<double>(row.peak) * mean;

    if (gt && outcome.status == RunStatus::Completed) {
        row.gtChecked = true;
        TruthProjection proj = projectTruth(*gt, flows, engine);
        row.gtMember = findTruthScenario(outcome, proj).has_value();
    }
    return row;
}

std::vector<Strategy> sweepMatrix() {
    std::vector<Strategy> out;
    out.push_back(Strategy::parse("S1"));
    for (const std::string& mode : {"S2", "S3", "S4"}) {
        out.push_back(Strategy::parse(mode + "+cmd+tag+sid"));
        out.push_back(Strategy::parse(mode + "+tag+sid"));
        out.push_back(Strategy::parse(mode + "+cmd+sid"));
        out.push_back(Strategy::parse(mode + "+cmd+tag"));
        out.push_back(Strategy::parse(mode + "+us"));
    }
    return out;
}

std::vector<EvalRow> sweep(const Catalog& catalog, const std::vector<ConcreteFlow>& flows,
                           const MessageEncoding& enc, const SignalTrace& trace,
                           const Limits& limits, const GroundTruth* gt, unsigned jobs) {
    std::vector<Strategy> matrix = sweepMatrix();
    std::vector<EvalRow> rows(matrix.size());
    if (jobs <= 1) {
        for (std::size_t i = 0; i < matrix.size(); ++i)
            rows[i] = evaluate(catalog, flows, enc, matrix[i], trace, limits, gt);
        return rows;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= matrix.size()) return;
            rows[i] = evaluate(catalog, flows, enc, matrix[i], trace, limits, gt);
        }
    };
    std::vector<std::future<void>> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.push_back(std::async(std::launch::async, worker));
    for (auto& f : pool) f.get();
    return rows;
}

}  // namespace flowtrace
