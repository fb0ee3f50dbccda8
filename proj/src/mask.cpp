#include "flowtrace/mask.hpp"

#include <fstream>
#include <sstream>

namespace flowtrace {

SelectionMask SelectionMask::none(const Catalog& catalog) {
    SelectionMask m;
    for (std::size_t i = 0; i < catalog.channelCount(); ++i)
        m.observed.emplace_back(catalog.channelWidth(i));
    return m;
}

SelectionMask SelectionMask::full(const Catalog& catalog) {
    SelectionMask m = none(catalog);
    for (std::size_t i = 0; i < m.observed.size(); ++i)
        for (int b = 0; b < m.observed[i].width(); ++b) m.observed[i].set(b, true);
    return m;
}

std::size_t SelectionMask::bitCount() const {
    std::size_t n = 0;
    for (const Bits& b : observed) n += b.count();
    return n;
}

bool SelectionMask::subsetOf(const SelectionMask& o) const {
    if (observed.size() != o.observed.size()) return false;
    for (std::size_t i = 0; i < observed.size(); ++i)
        if (!observed[i].subsetOf(o.observed[i])) return false;
    return true;
}

std::string maskToString(const SelectionMask& mask, const Catalog& catalog) {
    std::ostringstream out;
    for (std::size_t i = 0; i < mask.observed.size(); ++i) {
        const Bits& bits = mask.observed[i];
        out << "mask " << catalog.channelName(i) << ":";
        std::size_t n = bits.count();
        if (n == 0) {
            out << " none";
        } else if (static_cast<int>(n) == bits.width()) {
            out << " all";
        } else {
            for (int b = 0; b < bits.width(); ++b)
                if (bits.get(b)) out << " " << b;
        }
        out << "\n";
    }
    return out.str();
}

SelectionMask maskFromString(const std::string& text, const Catalog& catalog,
                             const std::string& sourceName) {
    SelectionMask mask = SelectionMask::none(catalog);
    std::istringstream in(text);
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto fail = [&](const std::string& what) -> void {
            throw MaskError(sourceName + ":" + std::to_string(lineNo) + ": " + what);
        };
        std::istringstream ls(line);
        std::string kw, name;
        ls >> kw;
        if (kw != "mask") fail("expected 'mask'");
        ls >> name;
        if (name.empty() || name.back() != ':') fail("expected '<channel>:'");
        name.pop_back();
        auto ch = catalog.findChannel(name);
        if (!ch) fail("unknown channel '" + name + "'");
        Bits& bits = mask.observed[*ch];
        std::string tok;
        while (ls >> tok) {
            if (tok == "all") {
                for (int b = 0; b < bits.width(); ++b) bits.set(b, true);
            } else if (tok == "none") {
                // explicit no-op
            } else {
                int b = -1;
                try {
                    b = std::stoi(tok);
                } catch (...) {
                    fail("bad bit index '" + tok + "'");
                }
                if (b < 0 || b >= bits.width())
                    fail("bit index " + tok + " outside channel width " +
                         std::to_string(bits.width()));
                bits.set(b, true);
            }
        }
    }
    return mask;
}

void writeMask(const SelectionMask& mask, const Catalog& catalog, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw MaskError("cannot write mask '" + path + "'");
    out << maskToString(mask, catalog);
}

SelectionMask readMask(const std::string& path, const Catalog& catalog) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MaskError("cannot open mask '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return maskFromString(ss.str(), catalog, path);
}

}  // namespace flowtrace
