#pragma once

#include <cstdint>
#include <vector>

#include "flowtrace/encoding.hpp"
#include "flowtrace/event.hpp"
#include "flowtrace/mask.hpp"
#include "flowtrace/trace.hpp"

namespace flowtrace {

/// What the observed Val bit says about a link at one step.
enum class Presence : std::uint8_t {
    Unknown,  // Val bit not observed: the link may or may not carry a message
    Absent,   // Val observed 0: idle
    Present,  // Val observed 1: exactly one message was carried
};

/// Candidate flow events for one link at one step: every declared command of
/// the link whose encoding agrees with the observed bits, plus the attribute
/// constraints the observed Tag/Sid bits impose on all of them.
struct AbstractedLink {
    Presence presence = Presence::Unknown;
    std::vector<std::uint8_t> candidates;  // ascending cmd codes
    BitConstraint tag, sid;
};

enum class StatusObs : std::uint8_t {
    Unknown,         // valid bit not observed
    Idle,            // valid observed 0
    PresentUnknown,  // valid observed 1, value bit not observed
    Present0,
    Present1,
};

struct AbstractedStep {
    std::size_t step = 0;
    std::vector<AbstractedLink> links;   // one per catalog link
    std::vector<StatusObs> statuses;     // one per status channel
};

/// Maps one step of a partially observed trace to per-link candidate event
/// sets. Candidates are empty when the observed Val bit rules a message out;
/// with Val unobserved every bit-compatible declared event remains possible.
AbstractedStep abstractStep(const SignalTrace& trace, std::size_t h, const SelectionMask& mask,
                            const MessageEncoding& enc);

}  // namespace flowtrace
