#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>

#include "flowtrace/report.hpp"
#include "flowtrace/selection.hpp"
#include "flowtrace/simulator.hpp"
#include "flowtrace/truth.hpp"

using namespace flowtrace;

namespace {

// Exit codes: 0 clean, 1 usage/I-O, 2 inconsistency detected, 3 complexity or
// time budget exceeded.
constexpr int kExitClean = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInconsistent = 2;
constexpr int kExitComplexity = 3;

struct LoadedCatalog {
    Catalog catalog;
    std::vector<ConcreteFlow> flows;
    MessageEncoding enc;
};

LoadedCatalog loadAll(const std::string& path) {
    LoadedCatalog out{loadCatalog(path), {}, {}};
    out.flows = expandCatalog(out.catalog);
    out.enc = MessageEncoding::build(out.catalog, out.flows);
    return out;
}

EventLabel parseEventSpec(const std::string& text) {
    // src:dest:cmd
    auto a = text.find(':');
    auto b = text.rfind(':');
    if (a == std::string::npos || b == a)
        throw SimError("bad event spec '" + text + "' (want src:dest:cmd)");
    return {text.substr(0, a), text.substr(a + 1, b - a - 1), text.substr(b + 1)};
}

BugSpec parseBugSpec(const std::string& text) {
    // swap:<src:dest:cmd>@<occurrence>=<src:dest:cmd>
    if (text.rfind("swap:", 0) != 0) throw SimError("only swap:... bug specs are supported");
    std::string rest = text.substr(5);
    auto eq = rest.find('=');
    if (eq == std::string::npos) throw SimError("bug spec needs '=<replacement event>'");
    std::string left = rest.substr(0, eq);
    auto at = left.rfind('@');
    if (at == std::string::npos) throw SimError("bug spec needs '@<occurrence>'");
    BugSpec bug;
    bug.target = parseEventSpec(left.substr(0, at));
    bug.occurrence = std::stoul(left.substr(at + 1));
    bug.replacement = parseEventSpec(rest.substr(eq + 1));
    return bug;
}

void writeFileOrStdout(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"flowtrace: protocol-flow scenario reconstruction from SoC signal traces"};
    app.require_subcommand(1);

    std::string catalogPath = FLOWTRACE_DEFAULT_CATALOG;
    app.add_option("--catalog", catalogPath, "catalog manifest file")->capture_default_str();

    // simulate
    auto* sim = app.add_subcommand("simulate", "run the random test environment");
    std::uint64_t seed = 1;
    int budget = 10;
    double prob = 0.25;
    std::string outTrace = "trace.trc", outTruth = "trace.gt", injectSpec;
    std::vector<std::string> templateFilter, blockBudgets;
    std::string branchModeName = "random";
    sim->add_option("--seed", seed, "rng seed")->required();
    sim->add_option("--budget", budget, "flow instances per initiating block")
        ->capture_default_str();
    sim->add_option("--prob", prob, "per-block initiation probability per cycle")
        ->capture_default_str();
    sim->add_option("--templates", templateFilter, "restrict to these flow templates");
    sim->add_option("--blocks", blockBudgets, "per-block budget overrides (Block=N)");
    sim->add_option("--branch-mode", branchModeName, "branch choice: random|first|last")
        ->capture_default_str();
    sim->add_option("--out-trace", outTrace, "trace output path")->capture_default_str();
    sim->add_option("--out-truth", outTruth, "ground-truth output path")->capture_default_str();
    sim->add_option("--inject-bug", injectSpec,
                    "swap:<src:dest:cmd>@<n>=<src:dest:cmd> event substitution");

    // analyze
    auto* an = app.add_subcommand("analyze", "reconstruct execution scenarios from a trace");
    std::string tracePath, maskPath, strategySpec, reportFormat = "text", reportPath;
    int scenarioType = 3;
    std::size_t maxScenarios = 1'000'000;
    double timeLimit = 0.0;
    bool withTimings = false;
    std::size_t reportCap = 50;
    std::string truthPath;
    an->add_option("--trace", tracePath, "trace file")->required();
    an->add_option("--mask", maskPath, "mask file");
    an->add_option("--strategy", strategySpec, "strategy spec, e.g. S2+cmd+sid (default S1)");
    an->add_option("--type", scenarioType, "scenario detail level 1|2|3")->capture_default_str();
    an->add_option("--report", reportFormat, "text|json")->capture_default_str();
    an->add_option("--out", reportPath, "report output path (default stdout)");
    an->add_option("--max-scenarios", maxScenarios, "abandon beyond this many scenarios")
        ->capture_default_str();
    an->add_option("--time-limit", timeLimit, "seconds before abandoning (0 = none)")
        ->capture_default_str();
    an->add_option("--max-report-scenarios", reportCap, "scenarios listed in the report")
        ->capture_default_str();
    an->add_flag("--with-timings", withTimings, "include wall time in the report");
    an->add_option("--truth", truthPath, "ground-truth file to check membership against");

    // select
    auto* selCmd = app.add_subcommand("select", "emit the mask a strategy selects");
    std::string selStrategy = "S1", selOut;
    bool printBits = false;
    selCmd->add_option("--strategy", selStrategy, "strategy spec")->capture_default_str();
    selCmd->add_option("--out", selOut, "mask output path (default stdout)");
    selCmd->add_flag("--print-bits", printBits, "print the traced-bit count");

    // sweep
    auto* sw = app.add_subcommand("sweep", "evaluate the full strategy/field matrix");
    std::string swTrace, swTruth, swFormat = "text", swOut;
    std::size_t swMaxScenarios = 1'000'000;
    double swTimeLimit = 600.0;
    unsigned swJobs = 1;
    bool swTimings = false;
    sw->add_option("--trace", swTrace, "trace file")->required();
    sw->add_option("--truth", swTruth, "ground-truth file for membership checks");
    sw->add_option("--max-scenarios", swMaxScenarios, "per-cell scenario cap")
        ->capture_default_str();
    sw->add_option("--time-limit", swTimeLimit, "per-cell seconds")->capture_default_str();
    sw->add_option("--jobs", swJobs, "parallel cells")->capture_default_str();
    sw->add_option("--report", swFormat, "text|json")->capture_default_str();
    sw->add_option("--out", swOut, "output path (default stdout)");
    sw->add_flag("--with-timings", swTimings, "include per-cell wall time (json)");

    // catalog
    auto* catCmd = app.add_subcommand("catalog", "validate and describe a catalog");
    bool listFlows = false;
    catCmd->add_flag("--expand", listFlows, "list every concrete flow");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) {
            LoadedCatalog lc = loadAll(catalogPath);
            SimConfig config;
            config.seed = seed;
            config.budgetPerBlock = budget;
            config.initiationProb = prob;
            config.allowedTemplates = templateFilter;
            if (branchModeName == "random")
                config.branchMode = BranchMode::Random;
            else if (branchModeName == "first")
                config.branchMode = BranchMode::First;
            else if (branchModeName == "last")
                config.branchMode = BranchMode::Last;
            else
                throw SimError("unknown branch mode '" + branchModeName + "'");
            for (const std::string& spec : blockBudgets) {
                auto eq = spec.find('=');
                if (eq == std::string::npos)
                    throw SimError("bad --blocks entry '" + spec + "' (want Block=N)");
                config.budgetOverrides[spec.substr(0, eq)] = std::stoi(spec.substr(eq + 1));
            }
            auto [trace, gt] = simulate(lc.catalog, lc.flows, lc.enc, config);
            if (!injectSpec.empty())
                trace = injectBug(trace, lc.catalog, lc.enc, parseBugSpec(injectSpec));
            writeTrace(trace, outTrace);
            writeGroundTruth(gt, lc.flows, outTruth);
            std::map<std::string, int> perBlock;
            for (const GtInstance& inst : gt.instances)
                perBlock[lc.catalog.components[inst.initiatorTag - 1]]++;
            std::cout << "cycles: " << trace.stepCount() << "\n";
            std::cout << "instances: " << gt.instances.size() << "\n";
            for (const auto& [block, n] : perBlock)
                std::cout << "  " << block << ": " << n << "\n";
            std::cout << "trace: " << outTrace << "\n";
            std::cout << "truth: " << outTruth << "\n";
            return kExitClean;
        }

        if (*an) {
            LoadedCatalog lc = loadAll(catalogPath);
            SignalTrace trace = readTrace(tracePath);
            if (!maskPath.empty() && !strategySpec.empty())
                throw MaskError("--mask and --strategy are mutually exclusive");
            SelectionMask mask =
                !maskPath.empty()
                    ? readMask(maskPath, lc.catalog)
                    : buildStrategyMask(lc.catalog, lc.flows, lc.enc,
                                        Strategy::parse(strategySpec.empty() ? "S1"
                                                                             : strategySpec));
            Limits limits{maxScenarios, timeLimit};
            ScenarioEngine engine(lc.catalog, lc.flows, lc.enc, mask);
            AnalysisOutcome outcome = engine.checkCompliance(trace, limits);

            ReportOptions opts;
            opts.type = scenarioType;
            opts.withTimings = withTimings;
            opts.maxScenarios = reportCap;
            std::string report = reportFormat == "json"
                                     ? renderJsonReport(outcome, lc.flows, lc.catalog, opts)
                                     : renderTextReport(outcome, lc.flows, lc.catalog, opts);
            writeFileOrStdout(reportPath, report);

            if (!truthPath.empty() && outcome.status == RunStatus::Completed) {
                GroundTruth gt = readGroundTruth(truthPath, lc.flows);
                TruthProjection proj = projectTruth(gt, lc.flows, engine);
                bool member = findTruthScenario(outcome, proj).has_value();
                std::cout << "ground truth " << (member ? "present in" : "MISSING from")
                          << " final set\n";
                if (!member) return kExitInconsistent;
            }
            switch (outcome.status) {
                case RunStatus::Completed:
                    return kExitClean;
                case RunStatus::Inconsistent:
                    std::cout << "inconsistency at step " << outcome.haltStep << " on "
                              << lc.catalog.channelName(
                                     static_cast<std::size_t>(outcome.haltLink))
                              << "\n";
                    return kExitInconsistent;
                case RunStatus::ComplexityExceeded:
                case RunStatus::TimeLimitExceeded:
                    std::cout << "abandoned (" << runStatusName(outcome.status) << ") at step "
                              << outcome.haltStep << ", peak " << outcome.metrics.peak << "\n";
                    return kExitComplexity;
            }
            return kExitClean;
        }

        if (*selCmd) {
            LoadedCatalog lc = loadAll(catalogPath);
            Strategy strategy = Strategy::parse(selStrategy);
            SelectionMask mask = buildStrategyMask(lc.catalog, lc.flows, lc.enc, strategy);
            writeFileOrStdout(selOut, maskToString(mask, lc.catalog));
            if (printBits) std::cout << "bits: " << mask.bitCount() << "\n";
            return kExitClean;
        }

        if (*sw) {
            LoadedCatalog lc = loadAll(catalogPath);
            SignalTrace trace = readTrace(swTrace);
            std::optional<GroundTruth> gt;
            if (!swTruth.empty()) gt = readGroundTruth(swTruth, lc.flows);
            Limits limits{swMaxScenarios, swTimeLimit};
            std::vector<EvalRow> rows = sweep(lc.catalog, lc.flows, lc.enc, trace, limits,
                                              gt ? &*gt : nullptr, swJobs);
            writeFileOrStdout(swOut, swFormat == "json" ? renderSweepJson(rows, swTimings)
                                                        : renderSweepText(rows));
            return kExitClean;
        }

        if (*catCmd) {
            LoadedCatalog lc = loadAll(catalogPath);
            std::cout << "components: " << lc.catalog.components.size() << "\n";
            std::cout << "links: " << lc.catalog.links.size() << "\n";
            std::cout << "status channels: " << lc.catalog.statuses.size() << "\n";
            std::cout << "templates: " << lc.catalog.templates.size() << "\n";
            std::cout << "concrete flows: " << lc.flows.size() << "\n";
            if (listFlows)
                for (const ConcreteFlow& flow : lc.flows) std::cout << "  " << flow.id << "\n";
            return kExitClean;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
