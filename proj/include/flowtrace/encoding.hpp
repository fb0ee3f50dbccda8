#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "flowtrace/bits.hpp"
#include "flowtrace/catalog.hpp"

namespace flowtrace {

struct EncodingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Wire content of one message before bit packing. Tag/Sid value 0 means the
/// attribute is not carried. Addr/Data are opaque payload.
struct Message {
    std::uint8_t cmd = 0;
    std::uint8_t tag = 0;
    std::uint8_t sid = 0;
    std::uint32_t addr = 0;
    std::uint64_t data = 0;
};

/// Bit layout of a link's message fields and the per-link command alphabet.
/// Field order on the wire: Val, Cmd (b7..b0), Tag, Sid, Addr, Data. Idle is
/// all zeros (Val=0).
class MessageEncoding {
public:
    struct LinkInfo {
        int width = 0;
        int valBit = 0;
        int cmdLo = 1, tagLo = 9, sidLo = 17, addrLo = 25, dataLo = 57;
        int dataWidth = 32;
        std::map<std::string, std::uint8_t> cmds;  // link's command alphabet
    };

    static MessageEncoding build(const Catalog& catalog,
                                 const std::vector<ConcreteFlow>& expansion);

    const LinkInfo& link(std::size_t idx) const { return links_.at(idx); }
    std::size_t linkCount() const { return links_.size(); }

    /// Trace bit index of Cmd signal b_k (k = 7 is the MSB) on a link.
    static int cmdBitIndex(int k) { return 1 + (7 - k); }

    Bits encode(std::size_t linkIdx, const Message& msg) const;
    static Bits idle(int width) { return Bits(width); }

    /// Canonical per-event encoding (attributes and payload zeroed), used for
    /// distinguishing-power computations.
    Bits canonical(std::size_t linkIdx, std::uint8_t cmd) const;

    std::uint8_t cmdCode(std::size_t linkIdx, const std::string& cmdName) const;
    std::string cmdName(std::size_t linkIdx, std::uint8_t code) const;

    /// Command codes declared on a link, ascending.
    std::vector<std::uint8_t> linkCmds(std::size_t linkIdx) const;

private:
    std::vector<LinkInfo> links_;
};

}  // namespace flowtrace
