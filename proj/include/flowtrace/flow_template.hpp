#pragma once

#include <map>
#include <string>
#include <vector>

#include "flowtrace/lpn.hpp"

namespace flowtrace {

/// Assignment of template parameters (declared and derived) to values.
using Binding = std::map<std::string, std::string>;

struct Param {
    std::string name;
    std::vector<std::string> domain;  // declared order
};

/// Derived parameter: either an alias (`Y = X`) or an integer complement
/// (`Y = <k> - X`), evaluated over the bound value.
struct DerivedParam {
    std::string name;
    std::string operand;  // parameter it derives from
    bool complement = false;
    long base = 0;  // Y = base - operand when complement
};

/// Inequality constraint over bound parameters (`I != T`).
struct Constraint {
    std::string lhs;
    std::string rhs;
    bool equal = false;  // false: lhs != rhs
};

/// Parameterized flow: an Lpn whose event fields (and status channel names)
/// may reference parameters as "{X}" placeholders.
class FlowTemplate {
public:
    Lpn base;  // symbolic labels
    std::vector<Param> params;
    std::vector<DerivedParam> derived;
    std::vector<Constraint> constraints;

    const std::string& name() const { return base.name; }

    /// Extends `binding` with derived parameters. Throws on unknown operands.
    Binding withDerived(const Binding& binding) const;

    /// True when the binding assigns every declared parameter a domain value
    /// and satisfies the constraints.
    bool legal(const Binding& binding) const;

    /// Concrete Lpn with all "{X}" placeholders substituted. Throws LpnError
    /// on a domain or constraint violation, or an unresolved placeholder.
    Lpn instantiate(const Binding& binding) const;

    /// Every legal binding, in lexicographic (param-name, value) order.
    std::vector<Binding> legalBindings() const;

    static std::string substitute(const std::string& text, const Binding& full);
};

std::string bindingStr(const Binding& binding);

}  // namespace flowtrace
