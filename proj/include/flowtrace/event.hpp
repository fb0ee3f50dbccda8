#pragma once

#include <cstdint>
#include <string>
#include <tuple>

namespace flowtrace {

/// A flow event: command `cmd` sent from component `src` to component `dest`.
struct EventLabel {
    std::string src;
    std::string dest;
    std::string cmd;

    bool operator==(const EventLabel& o) const = default;

    // Event name order used for deterministic tie-breaks: cmd first, then endpoints.
    std::tuple<const std::string&, const std::string&, const std::string&> key() const {
        return {cmd, src, dest};
    }
    bool operator<(const EventLabel& o) const { return key() < o.key(); }

    std::string str() const { return src + ":" + dest + ":" + cmd; }
};

/// Partial knowledge of an 8-bit attribute (Tag or Sid): `value` on the bits in
/// `mask`, unknown elsewhere. Attribute value 0 means "not carried", so a
/// constraint is only formed when at least one observed bit is set.
struct BitConstraint {
    std::uint8_t mask = 0;
    std::uint8_t value = 0;  // normalized: value & ~mask == 0

    bool empty() const { return mask == 0; }

    static BitConstraint exact(std::uint8_t v) { return {0xff, v}; }

    static BitConstraint fromObserved(std::uint8_t observedBits, std::uint8_t observedValue) {
        std::uint8_t v = static_cast<std::uint8_t>(observedValue & observedBits);
        if (v == 0) return {};  // all observed bits zero: attribute absent or invisible
        return {observedBits, v};
    }

    bool consistentWith(const BitConstraint& o) const {
        std::uint8_t common = mask & o.mask;
        return ((value ^ o.value) & common) == 0;
    }

    BitConstraint mergedWith(const BitConstraint& o) const {
        return {static_cast<std::uint8_t>(mask | o.mask),
                static_cast<std::uint8_t>((value & mask) | (o.value & o.mask))};
    }

    bool operator==(const BitConstraint& o) const = default;
    bool operator<(const BitConstraint& o) const {
        return std::tuple(mask, value) < std::tuple(o.mask, o.value);
    }
};

}  // namespace flowtrace
