#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "flowtrace/event.hpp"

namespace flowtrace {

/// Token configuration of an Lpn: bit i set = place i marked. Nets are 1-safe.
using Marking = std::uint32_t;

struct LpnError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One status channel value pinned by a transition, e.g. "Cache_0.hit = 1"
/// asserted on the cycle the transition's event is emitted.
struct StatusAssert {
    std::string channel;
    bool value = false;
    bool operator==(const StatusAssert&) const = default;
};

struct Transition {
    std::string name;
    Marking preset = 0;
    Marking postset = 0;
    EventLabel label;
    std::vector<StatusAssert> asserts;
};

/// Labeled Petri net for one protocol flow. Places/transitions are indexed;
/// `initial` is s0 and `terminal` the set of places with no outgoing
/// transition. Immutable after validate(); all queries are const.
class Lpn {
public:
    std::string name;
    std::vector<std::string> places;
    std::vector<Transition> transitions;
    Marking initial = 0;
    Marking terminal = 0;

    std::size_t placeIndex(const std::string& id) const;
    std::size_t transitionIndex(const std::string& id) const;

    bool enabled(Marking s, std::size_t t) const {
        const Marking pre = transitions[t].preset;
        return (s & pre) == pre;
    }

    /// All transitions executable in s: { t | preset(t) ⊆ s }.
    std::vector<std::size_t> enabledTransitions(Marking s) const;

    /// Fires t in s. Throws LpnError if t is not enabled.
    std::pair<Marking, EventLabel> fire(Marking s, std::size_t t) const;

    Marking fireUnchecked(Marking s, std::size_t t) const {
        const Transition& tr = transitions[t];
        return (s & ~tr.preset) | tr.postset;
    }

    /// Advances s by one transition labeled e. One entry per enabled
    /// transition carrying that label; empty when e cannot change state.
    std::vector<std::pair<std::size_t, Marking>> accept(Marking s, const EventLabel& e) const;

    bool isTerminal(Marking s) const { return s == terminal; }

    /// All markings reachable from `initial` (BFS order).
    std::vector<Marking> reachableMarkings() const;

    /// Checks structural invariants: s0 nonempty, presets/postsets nonempty,
    /// terminal-marked places consistent, acyclic, <= 32 places.
    void validate() const;

    std::string markingStr(Marking s) const;
};

/// One maximal execution path of an acyclic flow, s0 to s_end.
struct Branch {
    std::vector<std::size_t> transitions;  // in firing order
};

enum class BranchShape {
    Linear,           // single branch
    DistinctTerminal, // branches end with pairwise distinct events
    SplitRejoin,      // some branches share their terminal event
};

struct BranchStructure {
    std::vector<Branch> branches;
    BranchShape shape = BranchShape::Linear;
};

/// Enumerates all firing sequences from s0 to s_end and classifies whether
/// the terminal events alone identify the branch taken. Requires an acyclic
/// net (validate() enforces this).
BranchStructure branchStructure(const Lpn& lpn);

}  // namespace flowtrace
