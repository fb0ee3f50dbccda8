#include "flowtrace/abstraction.hpp"

#include <stdexcept>

namespace flowtrace {

namespace {

// Value/mask pair of one byte field restricted to observed bits.
std::pair<std::uint8_t, std::uint8_t> observedByte(const Bits& state, const Bits& mask, int lo) {
    std::uint8_t bits = 0, value = 0;
    for (int k = 0; k < 8; ++k) {
        if (!mask.get(lo + k)) continue;
        bits |= static_cast<std::uint8_t>(1u << (7 - k));
        if (state.get(lo + k)) value |= static_cast<std::uint8_t>(1u << (7 - k));
    }
    return {value, bits};
}

}  // namespace

AbstractedStep abstractStep(const SignalTrace& trace, std::size_t h, const SelectionMask& mask,
                            const MessageEncoding& enc) {
    if (h >= trace.stepCount()) throw std::out_of_range("abstractStep: step beyond trace end");
    AbstractedStep out;
    out.step = h;
    const std::size_t linkCount = enc.linkCount();
    out.links.resize(linkCount);

    for (std::size_t k = 0; k < linkCount; ++k) {
        const auto& info = enc.link(k);
        const Bits& state = trace.steps[h][k];
        const Bits& obs = mask.observed[k];
        AbstractedLink& al = out.links[k];

        if (obs.get(info.valBit)) {
            if (!state.get(info.valBit)) {
                al.presence = Presence::Absent;
                continue;  // idle: no candidates
            }
            al.presence = Presence::Present;
        } else {
            al.presence = Presence::Unknown;
        }

        auto [cmdVal, cmdBits] = observedByte(state, obs, info.cmdLo);
        for (std::uint8_t code : enc.linkCmds(k))
            if (((code ^ cmdVal) & cmdBits) == 0) al.candidates.push_back(code);

        auto [tagVal, tagBits] = observedByte(state, obs, info.tagLo);
        al.tag = BitConstraint::fromObserved(tagBits, tagVal);
        auto [sidVal, sidBits] = observedByte(state, obs, info.sidLo);
        al.sid = BitConstraint::fromObserved(sidBits, sidVal);
    }

    const std::size_t statusCount = trace.channelCount() - linkCount;
    out.statuses.resize(statusCount, StatusObs::Unknown);
    for (std::size_t s = 0; s < statusCount; ++s) {
        const Bits& state = trace.steps[h][linkCount + s];
        const Bits& obs = mask.observed[linkCount + s];
        if (!obs.get(0)) continue;
        if (!state.get(0)) {
            out.statuses[s] = StatusObs::Idle;
        } else if (!obs.get(1)) {
            out.statuses[s] = StatusObs::PresentUnknown;
        } else {
            out.statuses[s] = state.get(1) ? StatusObs::Present1 : StatusObs::Present0;
        }
    }
    return out;
}

}  // namespace flowtrace
