#pragma once

#include <string>

#include "flowtrace/engine.hpp"
#include "flowtrace/selection.hpp"

namespace flowtrace {

struct ReportOptions {
    int type = 3;  // scenario detail level 1..3
    bool withTimings = false;
    std::size_t maxScenarios = 50;  // scenarios listed in full; counts always exact
};

std::string renderTextReport(const AnalysisOutcome& outcome,
                             const std::vector<ConcreteFlow>& flows, const Catalog& catalog,
                             const ReportOptions& opts);

std::string renderJsonReport(const AnalysisOutcome& outcome,
                             const std::vector<ConcreteFlow>& flows, const Catalog& catalog,
                             const ReportOptions& opts);

std::string renderSweepText(const std::vector<EvalRow>& rows);
std::string renderSweepJson(const std::vector<EvalRow>& rows, bool withTimings);

const char* runStatusName(RunStatus status);

}  // namespace flowtrace
