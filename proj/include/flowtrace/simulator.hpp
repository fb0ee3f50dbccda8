#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "flowtrace/catalog.hpp"
#include "flowtrace/encoding.hpp"
#include "flowtrace/trace.hpp"

namespace flowtrace {

struct SimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Deterministic RNG helpers. Bounded draws avoid std::uniform_int_distribution
/// so that seeded traces are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t raw() { return engine_(); }

    std::uint64_t below(std::uint64_t n) { return n <= 1 ? 0 : engine_() % n; }

    bool chance(double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        return (engine_() >> 11) * 0x1.0p-53 < p;
    }

private:
    std::mt19937_64 engine_;
};

enum class BranchMode {
    Random,  // uniform among enabled transitions
    First,   // lowest transition index (the long path in the bundled flows)
    Last,    // highest transition index
};

struct SimConfig {
    std::uint64_t seed = 1;
    double initiationProb = 0.25;  // per initiator block per cycle
    int budgetPerBlock = 10;       // flow instances each block may start
    std::map<std::string, int> budgetOverrides;    // block name -> budget
    std::vector<std::string> allowedTemplates;     // empty = all templates
    BranchMode branchMode = BranchMode::Random;
    std::size_t maxCycles = 200'000;  // drain guard
};

struct GtInstance {
    std::uint32_t flow = 0;  // index into the expansion
    std::string flowId;
    std::uint8_t initiatorTag = 0;
    std::uint8_t sid = 0;
    std::int32_t start = -1;  // cycle of the first emitted message
    std::int32_t end = -1;    // cycle of the terminal message
    std::vector<std::uint16_t> path;
    std::vector<std::int32_t> cycles;  // firing cycle of each path entry
};

struct GroundTruth {
    std::vector<GtInstance> instances;
};

/// Message-level simulation: each fired transition becomes one single-cycle
/// message on its link; links (and status channels) carry at most one message
/// per cycle, contention resolved by instance-id priority. Runs until every
/// budgeted instance completes.
std::pair<SignalTrace, GroundTruth> simulate(const Catalog& catalog,
                                             const std::vector<ConcreteFlow>& flows,
                                             const MessageEncoding& enc, const SimConfig& config);

/// Replaces the n-th occurrence (1-based) of `target`'s message with
/// `replacement`. Same-link replacement rewrites the Cmd field only; cross-link
/// replacement idles the original link and emits on the new one with the
/// original Tag/Sid.
struct BugSpec {
    EventLabel target;
    std::size_t occurrence = 1;
    EventLabel replacement;
};

SignalTrace injectBug(const SignalTrace& trace, const Catalog& catalog,
                      const MessageEncoding& enc, const BugSpec& bug);

void writeGroundTruth(const GroundTruth& gt, const std::vector<ConcreteFlow>& flows,
                      const std::string& path);
GroundTruth readGroundTruth(const std::string& path, const std::vector<ConcreteFlow>& flows);
std::string groundTruthToString(const GroundTruth& gt, const std::vector<ConcreteFlow>& flows);
GroundTruth groundTruthFromString(const std::string& text,
                                  const std::vector<ConcreteFlow>& flows,
                                  const std::string& sourceName = "<truth>");

}  // namespace flowtrace
