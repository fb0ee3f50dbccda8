#include "flowtrace/trace.hpp"

#include <fstream>
#include <sstream>

namespace flowtrace {

SignalTrace SignalTrace::forCatalog(const Catalog& catalog) {
    SignalTrace t;
    for (std::size_t i = 0; i < catalog.channelCount(); ++i) {
        t.channelNames.push_back(catalog.channelName(i));
        t.channelWidths.push_back(catalog.channelWidth(i));
    }
    return t;
}

std::size_t SignalTrace::addIdleStep() {
    std::vector<Bits> step;
    step.reserve(channelWidths.size());
    for (int w : channelWidths) step.emplace_back(w);
    steps.push_back(std::move(step));
    return steps.size() - 1;
}

std::size_t SignalTrace::channelIndex(const std::string& name) const {
    for (std::size_t i = 0; i < channelNames.size(); ++i)
        if (channelNames[i] == name) return i;
    throw TraceError("trace has no channel '" + name + "'");
}

bool SignalTrace::matches(const Catalog& catalog) const {
    if (channelNames.size() != catalog.channelCount()) return false;
    for (std::size_t i = 0; i < channelNames.size(); ++i)
        if (channelNames[i] != catalog.channelName(i) ||
            channelWidths[i] != catalog.channelWidth(i))
            return false;
    return true;
}

std::string traceToString(const SignalTrace& trace) {
    std::ostringstream out;
    out << "links:\n";
    for (std::size_t i = 0; i < trace.channelNames.size(); ++i)
        out << "link " << trace.channelNames[i] << " " << trace.channelWidths[i] << "\n";
    for (std::size_t h = 0; h < trace.steps.size(); ++h) {
        out << "step " << h << ":";
        for (const Bits& state : trace.steps[h]) out << " " << state.hex();
        out << "\n";
    }
    return out.str();
}

void writeTrace(const SignalTrace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw TraceError("cannot write trace '" + path + "'");
    out << traceToString(trace);
    if (!out) throw TraceError("I/O error writing trace '" + path + "'");
}

SignalTrace traceFromString(const std::string& text, const std::string& sourceName) {
    SignalTrace trace;
    std::istringstream in(text);
    std::string line;
    int lineNo = 0;
    bool sawHeader = false;

    auto fail = [&](const std::string& what) -> void {
        throw TraceError(sourceName + ":" + std::to_string(lineNo) + ": " + what);
    };

    while (std::getline(in, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string kw;
        ls >> kw;
        if (kw == "links:") {
            sawHeader = true;
        } else if (kw == "link") {
            if (!sawHeader) fail("link before links: header");
            if (!trace.steps.empty()) fail("link declaration after steps");
            std::string name;
            int width = 0;
            ls >> name >> width;
            if (name.empty() || width <= 0) fail("bad link declaration");
            trace.channelNames.push_back(name);
            trace.channelWidths.push_back(width);
        } else if (kw == "step") {
            std::string idxTok;
            ls >> idxTok;
            if (idxTok.empty() || idxTok.back() != ':') fail("bad step header");
            std::size_t expect = trace.steps.size();
            std::size_t idx = 0;
            try {
                idx = std::stoul(idxTok.substr(0, idxTok.size() - 1));
            } catch (...) {
                fail("bad step index");
            }
            if (idx != expect) fail("out-of-order step index " + std::to_string(idx));
            std::vector<Bits> step;
            for (std::size_t k = 0; k < trace.channelNames.size(); ++k) {
                std::string hex;
                ls >> hex;
                if (hex.empty())
                    fail("missing state for channel " + trace.channelNames[k]);
                try {
                    step.push_back(Bits::fromHex(hex, trace.channelWidths[k]));
                } catch (const std::exception& e) {
                    fail("channel " + trace.channelNames[k] + ": " + e.what());
                }
            }
            std::string extra;
            if (ls >> extra) fail("trailing state beyond declared channels");
            trace.steps.push_back(std::move(step));
        } else {
            fail("unknown directive '" + kw + "'");
        }
    }
    if (!sawHeader) throw TraceError(sourceName + ": missing links: header");
    return trace;
}

SignalTrace readTrace(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TraceError("cannot open trace '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return traceFromString(ss.str(), path);
}

}  // namespace flowtrace
