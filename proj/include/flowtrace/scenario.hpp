#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "flowtrace/catalog.hpp"
#include "flowtrace/event.hpp"

namespace flowtrace {

/// One activation of a concrete flow inside a scenario: its current marking,
/// the trace indices of its observed initiation/completion, the transitions
/// taken so far (including silently crossed ones), and the Tag/Sid knowledge
/// accumulated from the events it absorbed. end == -1 means incomplete.
struct FlowInstance {
    std::uint32_t flow = 0;
    Marking marking = 0;
    std::int32_t start = -1;
    std::int32_t end = -1;
    std::uint16_t ordinal = 0;  // disambiguates same (flow, start) within a scenario
    BitConstraint tag, sid;
    std::vector<std::uint16_t> path;

    bool operator==(const FlowInstance&) const = default;

    auto key() const { return std::tie(flow, start, ordinal, marking, end, tag, sid, path); }
    bool operator<(const FlowInstance& o) const { return key() < o.key(); }
};

/// Content-addressed storage for instances. Scenarios hold pool ids, so equal
/// instances are shared across the whole scenario set.
class InstancePool {
public:
    std::uint32_t intern(const FlowInstance& inst);
    const FlowInstance& at(std::uint32_t id) const { return items_[id]; }
    std::size_t size() const { return items_.size(); }

private:
    static std::uint64_t hashOf(const FlowInstance& inst);
    std::vector<FlowInstance> items_;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> index_;
};

/// Canonical form: instance ids sorted ascending. Two scenarios over the same
/// pool are equal iff they hold the same instance multiset.
struct Scenario {
    std::vector<std::uint32_t> instances;
    std::uint64_t hash = 0;

    static Scenario fromIds(std::vector<std::uint32_t> ids);
    bool operator==(const Scenario& o) const {
        return hash == o.hash && instances == o.instances;
    }
};

/// Deduplicating ordered container of scenarios. Insertion order is preserved
/// (it is deterministic given deterministic inputs), which keeps metrics and
/// reports reproducible.
class ScenarioSet {
public:
    bool insert(Scenario s);
    const std::vector<Scenario>& items() const { return items_; }
    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }
    void clear();

private:
    std::vector<Scenario> items_;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> index_;
};

/// Pairwise temporal facts derived from start/end indices. Equal indices give
/// no fact: events within one step carry no ordering.
struct OrderingFact {
    enum Kind { InitiatedBefore, CompletedBeforeInitiated } kind;
    std::uint32_t first;   // instance ids
    std::uint32_t second;
    bool operator==(const OrderingFact&) const = default;
};

std::vector<OrderingFact> orderings(const Scenario& scen, const InstancePool& pool);

/// Scenario views at the three detail levels: 1 = initiation counts and
/// initiation order, 2 = plus completion and the full ordering relation,
/// 3 = plus per-instance execution paths.
struct Projection {
    int type = 3;
    std::map<std::uint32_t, std::size_t> initiationCounts;  // flow -> count
    std::vector<OrderingFact> facts;
    // Per instance (canonical order): flow, start and, for type >= 2,
    // completion; for type 3, the transition path.
    struct InstanceView {
        std::uint32_t flow;
        std::int32_t start;
        bool completed = false;
        std::int32_t end = -1;
        std::vector<std::uint16_t> path;
    };
    std::vector<InstanceView> instances;
};

Projection project(const Scenario& scen, const InstancePool& pool, int type);

std::string instanceName(const FlowInstance& inst, const std::vector<ConcreteFlow>& flows);

}  // namespace flowtrace
