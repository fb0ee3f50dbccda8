#include "flowtrace/lpn.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <set>
#include <unordered_set>

namespace flowtrace {

std::size_t Lpn::placeIndex(const std::string& id) const {
    for (std::size_t i = 0; i < places.size(); ++i)
        if (places[i] == id) return i;
    throw LpnError(name + ": unknown place '" + id + "'");
}

std::size_t Lpn::transitionIndex(const std::string& id) const {
    for (std::size_t i = 0; i < transitions.size(); ++i)
        if (transitions[i].name == id) return i;
    throw LpnError(name + ": unknown transition '" + id + "'");
}

std::vector<std::size_t> Lpn::enabledTransitions(Marking s) const {
    std::vector<std::size_t> out;
    for (std::size_t t = 0; t < transitions.size(); ++t)
        if (enabled(s, t)) out.push_back(t);
    return out;
}

std::pair<Marking, EventLabel> Lpn::fire(Marking s, std::size_t t) const {
    if (t >= transitions.size()) throw LpnError(name + ": transition index out of range");
    if (!enabled(s, t))
        throw LpnError(name + ": transition '" + transitions[t].name +
                       "' is not enabled in " + markingStr(s));
    return {fireUnchecked(s, t), transitions[t].label};
}

std::vector<std::pair<std::size_t, Marking>> Lpn::accept(Marking s, const EventLabel& e) const {
    std::vector<std::pair<std::size_t, Marking>> out;
    for (std::size_t t = 0; t < transitions.size(); ++t)
        if (enabled(s, t) && transitions[t].label == e)
            out.emplace_back(t, fireUnchecked(s, t));
    return out;
}

std::vector<Marking> Lpn::reachableMarkings() const {
    std::vector<Marking> order;
    std::unordered_set<Marking> seen{initial};
    std::deque<Marking> work{initial};
    while (!work.empty()) {
        Marking s = work.front();
        work.pop_front();
        order.push_back(s);
        for (std::size_t t : enabledTransitions(s)) {
            Marking next = fireUnchecked(s, t);
            if (seen.insert(next).second) work.push_back(next);
        }
    }
    return order;
}

void Lpn::validate() const {
    if (places.empty()) throw LpnError(name + ": no places");
    if (places.size() > 32) throw LpnError(name + ": more than 32 places unsupported");
    if (initial == 0) throw LpnError(name + ": empty initial state");
    if (transitions.empty()) throw LpnError(name + ": no transitions");

    Marking outgoing = 0;  // places feeding some transition
    for (const Transition& t : transitions) {
        if (t.preset == 0) throw LpnError(name + ": transition '" + t.name + "' has empty preset");
        if (t.postset == 0) throw LpnError(name + ": transition '" + t.name + "' has empty postset");
        outgoing |= t.preset;
    }
    Marking all = places.size() == 32 ? ~Marking{0} : ((Marking{1} << places.size()) - 1);
    Marking computedTerminal = all & ~outgoing;
    if (computedTerminal != terminal)
        throw LpnError(name + ": terminal annotation disagrees with structure (terminals are " +
                       markingStr(computedTerminal) + ")");
    if (terminal == 0) throw LpnError(name + ": no terminal place");

    // Acyclicity over the place/transition graph: DFS color marking.
    const std::size_t n = places.size();
    std::vector<int> color(n, 0);
    std::vector<std::vector<std::size_t>> succ(n);  // place -> successor places
    for (const Transition& t : transitions)
        for (std::size_t p = 0; p < n; ++p)
            if (t.preset & (Marking{1} << p))
                for (std::size_t q = 0; q < n; ++q)
                    if (t.postset & (Marking{1} << q)) succ[p].push_back(q);
    std::vector<std::pair<std::size_t, std::size_t>> stack;
    for (std::size_t root = 0; root < n; ++root) {
        if (color[root] != 0) continue;
        color[root] = 1;
        stack.push_back({root, 0});
        while (!stack.empty()) {
            auto& [p, i] = stack.back();
            if (i < succ[p].size()) {
                std::size_t q = succ[p][i++];
                if (color[q] == 1) throw LpnError(name + ": cyclic flow unsupported");
                if (color[q] == 0) {
                    color[q] = 1;
                    stack.push_back({q, 0});
                }
            } else {
                color[p] = 2;
                stack.pop_back();
            }
        }
    }
}

std::string Lpn::markingStr(Marking s) const {
    std::string out = "{";
    bool first = true;
    for (std::size_t p = 0; p < places.size(); ++p) {
        if (!(s & (Marking{1} << p))) continue;
        if (!first) out += ",";
        out += places[p];
        first = false;
    }
    return out + "}";
}

BranchStructure branchStructure(const Lpn& lpn) {
    lpn.validate();
    BranchStructure out;

    // Enumerate complete firing sequences s0 -> s_end. Catalog nets carry a
    // single token so this is plain path enumeration; a hard cap guards
    // against concurrent nets where interleavings would explode.
    constexpr std::size_t kMaxBranches = 4096;
    std::vector<std::size_t> path;
    std::set<std::vector<std::size_t>> uniq;

    auto dfs = [&](auto&& self, Marking s) -> void {
        if (lpn.isTerminal(s)) {
            if (uniq.insert(path).second) {
                if (uniq.size() > kMaxBranches) throw LpnError(lpn.name + ": too many branches");
                out.branches.push_back({path});
            }
            return;
        }
        auto ts = lpn.enabledTransitions(s);
        if (ts.empty()) return;  // dead end short of s_end: not a branch
        for (std::size_t t : ts) {
            path.push_back(t);
            self(self, lpn.fireUnchecked(s, t));
            path.pop_back();
        }
    };
    dfs(dfs, lpn.initial);

    if (out.branches.size() <= 1) {
        out.shape = BranchShape::Linear;
        return out;
    }
    bool distinct = true;
    for (std::size_t i = 0; i < out.branches.size() && distinct; ++i)
        for (std::size_t j = i + 1; j < out.branches.size() && distinct; ++j) {
            const auto& a = out.branches[i].transitions;
            const auto& b = out.branches[j].transitions;
            if (lpn.transitions[a.back()].label == lpn.transitions[b.back()].label)
                distinct = false;
        }
    out.shape = distinct ? BranchShape::DistinctTerminal : BranchShape::SplitRejoin;
    return out;
}

}  // namespace flowtrace
