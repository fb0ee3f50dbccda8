#pragma once

#include <string>
#include <vector>

#include "flowtrace/bits.hpp"
#include "flowtrace/catalog.hpp"

namespace flowtrace {

struct MaskError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Observed bit positions per channel (links and status channels alike).
struct SelectionMask {
    std::vector<Bits> observed;  // one entry per catalog channel

    static SelectionMask none(const Catalog& catalog);
    static SelectionMask full(const Catalog& catalog);

    std::size_t bitCount() const;
    bool subsetOf(const SelectionMask& o) const;

    bool observes(std::size_t channel, int bit) const { return observed[channel].get(bit); }

    void observize(std::size_t channel, int bit) { observed[channel].set(bit, true); }
    void observeRange(std::size_t channel, int lo, int n) {
        for (int i = 0; i < n; ++i) observed[channel].set(lo + i, true);
    }
    void clearRange(std::size_t channel, int lo, int n) {
        for (int i = 0; i < n; ++i) observed[channel].set(lo + i, false);
    }
};

std::string maskToString(const SelectionMask& mask, const Catalog& catalog);
SelectionMask maskFromString(const std::string& text, const Catalog& catalog,
                             const std::string& sourceName = "<mask>");
void writeMask(const SelectionMask& mask, const Catalog& catalog, const std::string& path);
SelectionMask readMask(const std::string& path, const Catalog& catalog);

}  // namespace flowtrace
