#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flowtrace/flow_template.hpp"
#include "flowtrace/lpn.hpp"

namespace flowtrace {

struct CatalogError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Directed communication link with per-field bit widths.
struct LinkDecl {
    std::string src;
    std::string dest;
    int val = 1, cmd = 8, tag = 8, sid = 8, addr = 32, data = 32;

    std::string name() const { return src + "->" + dest; }
    int width() const { return val + cmd + tag + sid + addr + data; }
};

/// Single-bit side channel (plus its own valid bit), e.g. a cache hit flag
/// pulsed when a branch-deciding transition fires.
struct StatusDecl {
    std::string name;
    static constexpr int kWidth = 2;  // bit 0: valid, bit 1: value
};

/// A transition's event resolved against the catalog: link index + command code.
struct ConcreteEvent {
    std::uint16_t link = 0;
    std::uint8_t cmd = 0;
    bool operator==(const ConcreteEvent&) const = default;
    bool operator<(const ConcreteEvent& o) const {
        return std::tuple(link, cmd) < std::tuple(o.link, o.cmd);
    }
};

/// One legal instantiation of a template, with transition events resolved to
/// link/cmd indices and status asserts to status-channel indices.
struct ConcreteFlow {
    std::string id;  // e.g. "mem_write[X=0]"
    std::size_t templateIdx = 0;
    Binding binding;
    Lpn lpn;
    std::vector<ConcreteEvent> events;  // per transition
    std::vector<std::vector<std::pair<std::uint16_t, bool>>> statusAsserts;  // per transition
    std::vector<std::uint8_t> srcTag;  // per transition: component id of label src
};

class Catalog {
public:
    std::vector<std::string> components;
    std::vector<LinkDecl> links;
    std::vector<StatusDecl> statuses;
    std::map<std::string, std::uint8_t> cmdCodes;  // global command byte patterns
    std::vector<FlowTemplate> templates;

    std::size_t componentIndex(const std::string& name) const;
    /// Component ids are 1-based so that 0 can mean "no attribute carried".
    std::uint8_t tagId(const std::string& component) const {
        return static_cast<std::uint8_t>(componentIndex(component) + 1);
    }
    std::optional<std::size_t> findLink(const std::string& src, const std::string& dest) const;
    std::optional<std::size_t> findStatus(const std::string& name) const;
    const FlowTemplate& templateByName(const std::string& name) const;

    std::size_t channelCount() const { return links.size() + statuses.size(); }
    std::string channelName(std::size_t idx) const;
    int channelWidth(std::size_t idx) const;
    std::optional<std::size_t> findChannel(const std::string& name) const;

    /// Full validation: component/link/cmd references of every template over
    /// every legal binding, plus all Lpn structural rules.
    void validate() const;
};

/// Loads and validates a catalog from a manifest file; flow-spec paths are
/// resolved relative to the manifest's directory.
Catalog loadCatalog(const std::string& manifestPath);

/// Parser entry points used by the loader and the tests.
Catalog parseManifest(const std::string& text, const std::string& sourceName,
                      const std::map<std::string, std::string>* inlineFlowSpecs = nullptr);
FlowTemplate parseFlowSpec(const std::string& text, const std::string& sourceName);

/// One entry per legal binding per template, ordered by template name then
/// lexicographic binding. Deterministic for byte-identical inputs.
std::vector<ConcreteFlow> expandCatalog(const Catalog& catalog);

}  // namespace flowtrace
