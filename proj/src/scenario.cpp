#include "flowtrace/scenario.hpp"

#include <algorithm>

namespace flowtrace {

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
}

}  // namespace

std::uint64_t InstancePool::hashOf(const FlowInstance& inst) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    h = mix(h, inst.flow);
    h = mix(h, static_cast<std::uint32_t>(inst.marking));
    h = mix(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(inst.start)));
    h = mix(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(inst.end)));
    h = mix(h, inst.ordinal);
    h = mix(h, (std::uint64_t(inst.tag.mask) << 24) | (std::uint64_t(inst.tag.value) << 16) |
                   (std::uint64_t(inst.sid.mask) << 8) | inst.sid.value);
    for (std::uint16_t t : inst.path) h = mix(h, t);
    return h;
}

std::uint32_t InstancePool::intern(const FlowInstance& inst) {
    std::uint64_t h = hashOf(inst);
    auto& bucket = index_[h];
    for (std::uint32_t id : bucket)
        if (items_[id] == inst) return id;
    std::uint32_t id = static_cast<std::uint32_t>(items_.size());
    items_.push_back(inst);
    bucket.push_back(id);
    return id;
}

Scenario Scenario::fromIds(std::vector<std::uint32_t> ids) {
    std::sort(ids.begin(), ids.end());
    Scenario s;
    s.instances = std::move(ids);
    std::uint64_t h = 0x100001b3ull;
    for (std::uint32_t id : s.instances) h = mix(h, id);
    s.hash = h;
    return s;
}

bool ScenarioSet::insert(Scenario s) {
    auto& bucket = index_[s.hash];
    for (std::uint32_t idx : bucket)
        if (items_[idx] == s) return false;
    bucket.push_back(static_cast<std::uint32_t>(items_.size()));
    items_.push_back(std::move(s));
    return true;
}

void ScenarioSet::clear() {
    items_.clear();
    index_.clear();
}

std::vector<OrderingFact> orderings(const Scenario& scen, const InstancePool& pool) {
    std::vector<OrderingFact> out;
    const auto& ids = scen.instances;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        for (std::size_t j = 0; j < ids.size(); ++j) {
            if (i == j) continue;
            const FlowInstance& a = pool.at(ids[i]);
            const FlowInstance& b = pool.at(ids[j]);
            if (i < j) {
                // initiated-before is emitted once per unordered pair
                if (a.start < b.start)
                    out.push_back({OrderingFact::InitiatedBefore, ids[i], ids[j]});
                else if (b.start < a.start)
                    out.push_back({OrderingFact::InitiatedBefore, ids[j], ids[i]});
            }
            if (a.end >= 0 && a.end < b.start)
                out.push_back({OrderingFact::CompletedBeforeInitiated, ids[i], ids[j]});
        }
    }
    return out;
}

Projection project(const Scenario& scen, const InstancePool& pool, int type) {
    Projection out;
    out.type = type;
    for (std::uint32_t id : scen.instances) {
        const FlowInstance& inst = pool.at(id);
        out.initiationCounts[inst.flow]++;
        Projection::InstanceView v;
        v.flow = inst.flow;
        v.start = inst.start;
        if (type >= 2) {
            v.completed = inst.end >= 0;
            v.end = inst.end;
        }
        if (type >= 3) v.path = inst.path;
        out.instances.push_back(std::move(v));
    }
    std::sort(out.instances.begin(), out.instances.end(), [](const auto& a, const auto& b) {
        return std::tie(a.flow, a.start, a.end, a.path) < std::tie(b.flow, b.start, b.end, b.path);
    });
    for (const OrderingFact& f : orderings(scen, pool)) {
        if (type == 1 && f.kind != OrderingFact::InitiatedBefore) continue;
        out.facts.push_back(f);
    }
    return out;
}

std::string instanceName(const FlowInstance& inst, const std::vector<ConcreteFlow>& flows) {
    std::string name = flows[inst.flow].id + "@" + std::to_string(inst.start);
    if (inst.ordinal > 0) name += "." + std::to_string(inst.ordinal);
    return name;
}

}  // namespace flowtrace
