#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "flowtrace/catalog.hpp"
#include "flowtrace/encoding.hpp"
#include "flowtrace/engine.hpp"
#include "flowtrace/mask.hpp"
#include "flowtrace/simulator.hpp"

namespace flowtrace {

struct SelectionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Transitions whose labels are a flow's start events (enabled at s0) or end
/// events (entering a terminal place). A single-transition flow is both.
std::vector<std::size_t> startEndTransitions(const Lpn& lpn);

/// Inclusion-minimal transition sets that tell branch pairs apart: for each
/// pair of branches, the transitions whose event occurs on exactly one of the
/// two. Empty for linear or distinct-terminal flows.
std::vector<std::vector<std::size_t>> discriminatorSets(const Lpn& lpn);

/// Alternative branch-disambiguating event selections: one transition picked
/// per discriminator set, enumerated as their cross product. Linear and
/// distinct-terminal flows need nothing, giving {∅}.
std::vector<std::set<std::size_t>> branchSelections(const Lpn& lpn);

/// Partition of a link's events induced by looking only at `bits` of their
/// canonical encodings. Finer partition = higher distinguishing power.
std::vector<std::vector<std::uint8_t>> distinguishingPower(const MessageEncoding& enc,
                                                           std::size_t link,
                                                           const std::vector<std::uint8_t>& cmds,
                                                           const std::vector<int>& bits);

/// Greedy minimum-cardinality Cmd-bit subset reaching the finest partition of
/// `cmds` achievable with the full field. Ties break toward the lowest bit
/// index. Deterministic; not claimed globally optimal.
std::vector<int> greedyCmdBits(const MessageEncoding& enc, std::size_t link,
                               const std::vector<std::uint8_t>& cmds);

enum class SystemMode { S1, S2, S3, S4 };

/// Parsed strategy spec, e.g. "S1", "S2+cmd+sid", "S3+cmd+tag+sid", "S4+us".
/// S1 always means all events and all fields. "us" selects Cmd and Sid
/// everywhere but Tag only on links carrying shared events.
struct Strategy {
    SystemMode mode = SystemMode::S1;
    bool cmd = true, tag = true, sid = true;
    bool uniqueSharedSplit = false;

    static Strategy parse(const std::string& spec);
    std::string str() const;
};

/// Chosen observable events per template, with provenance.
struct EventSelection {
    struct Entry {
        std::size_t transition;
        bool startEnd = false;  // otherwise a branch discriminator
    };
    std::vector<std::vector<Entry>> byTemplate;

    bool selected(std::size_t templateIdx, std::size_t transition) const {
        for (const Entry& e : byTemplate[templateIdx])
            if (e.transition == transition) return true;
        return false;
    }
};

/// System-level selection for a strategy: start/end events always; branch
/// events per mode (S2 least-shared pick, S3 most-shared pick, S4 none,
/// S1 everything).
EventSelection buildSelection(const Catalog& catalog, const std::vector<ConcreteFlow>& flows,
                              const Strategy& strategy);

/// Bit-level selection: Val always; a greedy-minimal Cmd subset per link when
/// Cmd is traced (full Cmd under S1); full Tag/Sid fields per the strategy's
/// field choice; status channels under S4.
SelectionMask selectBits(const Catalog& catalog, const std::vector<ConcreteFlow>& flows,
                         const MessageEncoding& enc, const EventSelection& selection,
                         const Strategy& strategy);

SelectionMask buildStrategyMask(const Catalog& catalog, const std::vector<ConcreteFlow>& flows,
                                const MessageEncoding& enc, const Strategy& strategy);

/// How many concrete flows carry some instantiation of a template transition's
/// event (max over bindings). 1 = unique event, >1 = shared.
std::size_t shareCount(const Catalog& catalog, const std::vector<ConcreteFlow>& flows,
                       std::size_t templateIdx, std::size_t transition);

struct EvalRow {
    std::string strategy;
    std::size_t bits = 0;
    RunStatus status = RunStatus::Completed;
    std::size_t finalCount = 0;
    std::size_t peak = 0;
    std::int32_t haltStep = -1;
    std::int32_t haltLink = -1;
    double wallMs = 0.0;
    double memProxy = 0.0;  // peak count x mean instances per final scenario
    bool gtChecked = false;
    bool gtMember = false;
};

EvalRow evaluate(const Catalog& catalog, const std::vector<ConcreteFlow>& flows,
                 const MessageEncoding& enc, const Strategy& strategy, const SignalTrace& trace,
                 const Limits& limits, const GroundTruth* gt = nullptr);

/// The full strategy-by-field evaluation grid: S1, then for each of S2/S3/S4
/// the field combinations all, tag+sid, cmd+sid, cmd+tag, and the
/// unique/shared split.
std::vector<Strategy> sweepMatrix();

std::vector<EvalRow> sweep(const Catalog& catalog, const std::vector<ConcreteFlow>& flows,
                           const MessageEncoding& enc, const SignalTrace& trace,
                           const Limits& limits, const GroundTruth* gt = nullptr,
                           unsigned jobs = 1);

}  // namespace flowtrace
