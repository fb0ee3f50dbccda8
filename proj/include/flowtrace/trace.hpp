#pragma once

#include <string>
#include <vector>

#include "flowtrace/bits.hpp"
#include "flowtrace/catalog.hpp"

namespace flowtrace {

struct TraceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Sampled per-cycle states of every channel (links first, then status
/// channels, in catalog order). steps[h][k] is channel k's full bit state at
/// step h.
struct SignalTrace {
    std::vector<std::string> channelNames;
    std::vector<int> channelWidths;
    std::vector<std::vector<Bits>> steps;

    static SignalTrace forCatalog(const Catalog& catalog);

    std::size_t stepCount() const { return steps.size(); }
    std::size_t channelCount() const { return channelNames.size(); }

    /// Appends an all-idle step and returns its index.
    std::size_t addIdleStep();

    std::size_t channelIndex(const std::string& name) const;

    /// True when the channel layout matches the catalog's.
    bool matches(const Catalog& catalog) const;
};

void writeTrace(const SignalTrace& trace, const std::string& path);
SignalTrace readTrace(const std::string& path);

std::string traceToString(const SignalTrace& trace);
SignalTrace traceFromString(const std::string& text, const std::string& sourceName = "<trace>");

}  // namespace flowtrace
