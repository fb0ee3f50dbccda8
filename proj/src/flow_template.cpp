#include "flowtrace/flow_template.hpp"

#include <algorithm>

namespace flowtrace {

Binding FlowTemplate::withDerived(const Binding& binding) const {
    Binding full = binding;
    for (const DerivedParam& d : derived) {
        auto it = full.find(d.operand);
        if (it == full.end())
            throw LpnError(name() + ": derived parameter '" + d.name +
                           "' references unbound '" + d.operand + "'");
        if (d.complement) {
            long v = 0;
            try {
                v = std::stol(it->second);
            } catch (...) {
                throw LpnError(name() + ": derived parameter '" + d.name +
                               "' needs an integer operand, got '" + it->second + "'");
            }
            full[d.name] = std::to_string(d.base - v);
        } else {
            full[d.name] = it->second;
        }
    }
    return full;
}

bool FlowTemplate::legal(const Binding& binding) const {
    for (const Param& p : params) {
        auto it = binding.find(p.name);
        if (it == binding.end()) return false;
        if (std::find(p.domain.begin(), p.domain.end(), it->second) == p.domain.end())
            return false;
    }
    for (const Constraint& c : constraints) {
        auto l = binding.find(c.lhs);
        auto r = binding.find(c.rhs);
        if (l == binding.end() || r == binding.end()) return false;
        bool eq = l->second == r->second;
        if (c.equal != eq) return false;
    }
    return true;
}

std::string FlowTemplate::substitute(const std::string& text, const Binding& full) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size();) {
        if (text[i] == '{') {
            auto close = text.find('}', i);
            if (close == std::string::npos) throw LpnError("unterminated '{' in '" + text + "'");
            std::string key = text.substr(i + 1, close - i - 1);
            auto it = full.find(key);
            if (it == full.end())
                throw LpnError("unresolved parameter '{" + key + "}' in '" + text + "'");
            out += it->second;
            i = close + 1;
        } else {
            out += text[i++];
        }
    }
    return out;
}

Lpn FlowTemplate::instantiate(const Binding& binding) const {
    for (const Param& p : params) {
        auto it = binding.find(p.name);
        if (it == binding.end())
            throw LpnError(name() + ": parameter '" + p.name + "' unbound");
        if (std::find(p.domain.begin(), p.domain.end(), it->second) == p.domain.end())
            throw LpnError(name() + ": value '" + it->second + "' outside domain of '" +
                           p.name + "'");
    }
    for (const Constraint& c : constraints) {
        if (!legal(binding))
            throw LpnError(name() + ": binding " + bindingStr(binding) +
                           " violates constraint " + c.lhs + (c.equal ? " == " : " != ") + c.rhs);
    }

    Binding full = withDerived(binding);
    Lpn out = base;
    out.name = name() + bindingStr(binding);
    for (Transition& t : out.transitions) {
        t.label.src = substitute(t.label.src, full);
        t.label.dest = substitute(t.label.dest, full);
        t.label.cmd = substitute(t.label.cmd, full);
        for (StatusAssert& a : t.asserts) a.channel = substitute(a.channel, full);
    }
    return out;
}

std::vector<Binding> FlowTemplate::legalBindings() const {
    std::vector<Binding> out{Binding{}};
    // params map is built in name order by iterating sorted copies
    std::vector<Param> sorted = params;
    std::sort(sorted.begin(), sorted.end(),
              [](const Param& a, const Param& b) { return a.name < b.name; });
    for (const Param& p : sorted) {
        std::vector<std::string> values = p.domain;
        std::sort(values.begin(), values.end());
        std::vector<Binding> next;
        for (const Binding& b : out)
            for (const std::string& v : values) {
                Binding nb = b;
                nb[p.name] = v;
                next.push_back(std::move(nb));
            }
        out = std::move(next);
    }
    std::erase_if(out, [&](const Binding& b) { return !legal(b); });
    return out;
}

std::string bindingStr(const Binding& binding) {
    if (binding.empty()) return "";
    std::string out = "[";
    bool first = true;
    for (const auto& [k, v] : binding) {
        if (!first) out += ",";
        out += k + "=" + v;
        first = false;
    }
    return out + "]";
}

}  // namespace flowtrace
