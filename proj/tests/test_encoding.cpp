#include <doctest.h>

#include "flowtrace/encoding.hpp"
#include "oracles.hpp"

using namespace flowtrace;
using namespace flowtrace::testing;

TEST_CASE("published command patterns on the cpu-to-cache link") {
    const TestWorld& w = world();
    std::size_t link = *w.catalog.findLink("CPU_0", "Cache_0");
    CHECK(w.enc.cmdCode(link, "wr_req") == 0x40);  // 0100 0000
    CHECK(w.enc.cmdCode(link, "rd_req") == 0x80);  // 1000 0000

    Bits wr = w.enc.canonical(link, 0x40);
    CHECK(wr.get(0));            // Val
    CHECK_FALSE(wr.get(1));      // b7
    CHECK(wr.get(2));            // b6
    for (int k = 3; k <= 8; ++k) CHECK_FALSE(wr.get(k));  // b5..b0
}

TEST_CASE("idle state is all zeros with Val clear") {
    Bits idle = MessageEncoding::idle(89);
    CHECK(idle.width() == 89);
    CHECK_FALSE(idle.any());
}

TEST_CASE("field packing and byte round trip") {
    const TestWorld& w = world();
    std::size_t link = *w.catalog.findLink("Bus", "Mem");
    Message msg;
    msg.cmd = 0x80;
    msg.tag = 3;
    msg.sid = 17;
    msg.addr = 0xdeadbeef;
    msg.data = 0x0123456789abcdefull;
    Bits state = w.enc.encode(link, msg);
    const auto& info = w.enc.link(link);
    CHECK(state.get(info.valBit));
    CHECK(state.getByte(info.cmdLo) == 0x80);
    CHECK(state.getByte(info.tagLo) == 3);
    CHECK(state.getByte(info.sidLo) == 17);
}

TEST_CASE("encode rejects unknown commands and links") {
    const TestWorld& w = world();
    std::size_t link = *w.catalog.findLink("Bus", "Mem");
    Message msg;
    msg.cmd = 0x08;  // power command never travels on the memory link
    CHECK_THROWS_AS(w.enc.encode(link, msg), EncodingError);
    CHECK_THROWS_AS(w.enc.encode(w.enc.linkCount() + 5, Message{}), EncodingError);
}

TEST_CASE("hex serialization round trips") {
    const TestWorld& w = world();
    for (std::size_t link : {std::size_t(0), *w.catalog.findLink("Cache_0", "Bus")}) {
        Message msg;
        msg.cmd = w.enc.linkCmds(link).front();
        msg.tag = 9;
        msg.sid = 200;
        msg.addr = 0xabcdef01;
        msg.data = ~0ull;
        Bits state = w.enc.encode(link, msg);
        Bits back = Bits::fromHex(state.hex(), state.width());
        CHECK(back == state);
    }
}

TEST_CASE("cache-to-bus links carry a full cache block") {
    const TestWorld& w = world();
    CHECK(w.enc.link(*w.catalog.findLink("Cache_0", "Bus")).dataWidth == 512);
    CHECK(w.enc.link(*w.catalog.findLink("Bus", "Cache_1")).dataWidth == 512);
    CHECK(w.enc.link(*w.catalog.findLink("Bus", "Mem")).dataWidth == 32);
}
