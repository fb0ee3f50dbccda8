#include "flowtrace/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace flowtrace {

namespace {

// Minimal line/column-reporting tokenizer for the manifest and flow-spec
// grammars. Tokens are identifiers (incl. '{param}' pieces, '.', '_'),
// numbers, and single punctuation characters.
class Cursor {
public:
    Cursor(const std::string& line, const std::string& source, int lineNo)
        : line_(line), source_(source), lineNo_(lineNo) {}

    void skipWs() {
        while (pos_ < line_.size() && std::isspace(static_cast<unsigned char>(line_[pos_]))) ++pos_;
    }

    bool atEnd() {
        skipWs();
        return pos_ >= line_.size() || line_[pos_] == '#';
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw CatalogError(source_ + ":" + std::to_string(lineNo_) + ":" +
                           std::to_string(pos_ + 1) + ": " + what);
    }

    char peek() {
        skipWs();
        return pos_ < line_.size() ? line_[pos_] : '\0';
    }

    bool tryConsume(char c) {
        skipWs();
        if (pos_ < line_.size() && line_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!tryConsume(c)) fail(std::string("expected '") + c + "'");
    }

    static bool wordChar(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '{' ||
               c == '}';
    }

    static bool valueChar(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
    }

    // Identifier possibly containing {param} placeholders.
    std::string word() {
        skipWs();
        std::size_t start = pos_;
        while (pos_ < line_.size() && wordChar(line_[pos_])) ++pos_;
        if (pos_ == start) fail("expected identifier");
        return line_.substr(start, pos_ - start);
    }

    // Plain identifier; stops at braces so domain lists parse.
    std::string value() {
        skipWs();
        std::size_t start = pos_;
        while (pos_ < line_.size() && valueChar(line_[pos_])) ++pos_;
        if (pos_ == start) fail("expected identifier");
        return line_.substr(start, pos_ - start);
    }

    bool tryKeyword(const std::string& kw) {
        skipWs();
        if (line_.compare(pos_, kw.size(), kw) == 0 &&
            (pos_ + kw.size() >= line_.size() || !wordChar(line_[pos_ + kw.size()]))) {
            pos_ += kw.size();
            return true;
        }
        return false;
    }

    void expectKeyword(const std::string& kw) {
        if (!tryKeyword(kw)) fail("expected '" + kw + "'");
    }

    long integer() {
        skipWs();
        std::size_t start = pos_;
        if (pos_ < line_.size() && (line_[pos_] == '-' || line_[pos_] == '+')) ++pos_;
        while (pos_ < line_.size() && std::isdigit(static_cast<unsigned char>(line_[pos_]))) ++pos_;
        if (pos_ == start) fail("expected integer");
        return std::stol(line_.substr(start, pos_ - start));
    }

    std::uint8_t byteValue() {
        skipWs();
        std::size_t start = pos_;
        while (pos_ < line_.size() && Cursor::wordChar(line_[pos_])) ++pos_;
        if (pos_ == start) fail("expected byte value");
        std::string tok = line_.substr(start, pos_ - start);
        int base = 10;
        std::string digits = tok;
        if (tok.size() > 2 && tok[0] == '0' && (tok[1] == 'x' || tok[1] == 'X')) {
            base = 16;
            digits = tok.substr(2);
        }
        unsigned long v = 0;
        try {
            v = std::stoul(digits, nullptr, base);
        } catch (...) {
            fail("bad byte value '" + tok + "'");
        }
        if (v > 0xff) fail("byte value '" + tok + "' out of range");
        return static_cast<std::uint8_t>(v);
    }

private:
    const std::string& line_;
    const std::string& source_;
    int lineNo_;
    std::size_t pos_ = 0;
};

struct PlaceDraft {
    std::string id;
    bool init = false;
    bool terminal = false;
};

std::vector<std::string> splitLines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    lines.push_back(cur);
    return lines;
}

}  // namespace

FlowTemplate parseFlowSpec(const std::string& text, const std::string& sourceName) {
    FlowTemplate tmpl;
    std::vector<PlaceDraft> placeDrafts;
    struct TransDraft {
        std::string id;
        std::vector<std::string> pre, post;
        EventLabel label;
        std::vector<StatusAssert> asserts;
    };
    std::vector<TransDraft> transDrafts;
    bool sawHeader = false;

    auto lines = splitLines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        Cursor c(lines[i], sourceName, static_cast<int>(i + 1));
        if (c.atEnd()) continue;

        if (c.tryKeyword("flow")) {
            if (sawHeader) c.fail("duplicate flow header");
            sawHeader = true;
            tmpl.base.name = c.value();
            if (c.tryConsume('(')) {
                if (!c.tryConsume(')')) {
                    do {
                        Param p;
                        p.name = c.value();
                        c.expectKeyword("in");
                        c.expect('{');
                        do {
                            p.domain.push_back(c.value());
                        } while (c.tryConsume(','));
                        c.expect('}');
                        tmpl.params.push_back(std::move(p));
                    } while (c.tryConsume(','));
                    c.expect(')');
                }
            }
            while (c.tryKeyword("let")) {
                do {
                    DerivedParam d;
                    d.name = c.value();
                    c.expect('=');
                    if (std::isdigit(static_cast<unsigned char>(c.peek()))) {
                        d.complement = true;
                        d.base = c.integer();
                        c.expect('-');
                        d.operand = c.value();
                    } else {
                        d.operand = c.value();
                    }
                    tmpl.derived.push_back(std::move(d));
                } while (c.tryConsume(','));
            }
            if (c.tryKeyword("where")) {
                do {
                    Constraint cons;
                    cons.lhs = c.value();
                    if (c.tryConsume('!')) {
                        c.expect('=');
                        cons.equal = false;
                    } else {
                        c.expect('=');
                        c.expect('=');
                        cons.equal = true;
                    }
                    cons.rhs = c.value();
                    tmpl.constraints.push_back(std::move(cons));
                } while (c.tryConsume(','));
            }
            if (!c.atEnd()) c.fail("trailing tokens after flow header");
        } else if (c.tryKeyword("place")) {
            if (!sawHeader) c.fail("place before flow header");
            PlaceDraft p;
            p.id = c.value();
            while (!c.atEnd()) {
                if (c.tryKeyword("init"))
                    p.init = true;
                else if (c.tryKeyword("terminal"))
                    p.terminal = true;
                else
                    c.fail("unknown place attribute");
            }
            placeDrafts.push_back(std::move(p));
        } else if (c.tryKeyword("trans")) {
            if (!sawHeader) c.fail("trans before flow header");
            TransDraft t;
            t.id = c.value();
            c.expect(':');
            do {
                t.pre.push_back(c.value());
            } while (c.tryConsume(','));
            c.expect('-');
            c.expect('>');
            do {
                t.post.push_back(c.value());
            } while (c.tryConsume(','));
            c.expectKeyword("emits");
            c.expect('(');
            t.label.src = c.word();
            c.expect(',');
            t.label.dest = c.word();
            c.expect(',');
            t.label.cmd = c.word();
            c.expect(')');
            if (c.tryKeyword("status")) {
                do {
                    StatusAssert a;
                    a.channel = c.word();
                    c.expect('=');
                    long v = c.integer();
                    if (v != 0 && v != 1) c.fail("status value must be 0 or 1");
                    a.value = v == 1;
                    t.asserts.push_back(std::move(a));
                } while (c.tryConsume(','));
            }
            if (!c.atEnd()) c.fail("trailing tokens after transition");
            transDrafts.push_back(std::move(t));
        } else {
            c.fail("unknown directive");
        }
    }

    if (!sawHeader) throw CatalogError(sourceName + ": missing flow header");
    if (placeDrafts.empty()) throw CatalogError(sourceName + ": no places in " + tmpl.base.name);

    Lpn& lpn = tmpl.base;
    for (const PlaceDraft& p : placeDrafts) {
        if (std::find(lpn.places.begin(), lpn.places.end(), p.id) != lpn.places.end())
            throw CatalogError(sourceName + ": duplicate place '" + p.id + "'");
        lpn.places.push_back(p.id);
    }
    auto placeBit = [&](const std::string& id) {
        return Marking{1} << lpn.placeIndex(id);
    };
    for (const PlaceDraft& p : placeDrafts) {
        if (p.init) lpn.initial |= placeBit(p.id);
        if (p.terminal) lpn.terminal |= placeBit(p.id);
    }
    std::set<std::string> transNames;
    for (const TransDraft& t : transDrafts) {
        if (!transNames.insert(t.id).second)
            throw CatalogError(sourceName + ": duplicate transition '" + t.id + "'");
        Transition tr;
        tr.name = t.id;
        for (const std::string& p : t.pre) tr.preset |= placeBit(p);
        for (const std::string& p : t.post) tr.postset |= placeBit(p);
        tr.label = t.label;
        tr.asserts = t.asserts;
        lpn.transitions.push_back(std::move(tr));
    }
    try {
        lpn.validate();
    } catch (const LpnError& e) {
        throw CatalogError(sourceName + ": " + e.what());
    }
    return tmpl;
}

Catalog parseManifest(const std::string& text, const std::string& sourceName,
                      const std::map<std::string, std::string>* inlineFlowSpecs) {
    Catalog cat;
    std::filesystem::path baseDir = std::filesystem::path(sourceName).parent_path();

    auto lines = splitLines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        Cursor c(lines[i], sourceName, static_cast<int>(i + 1));
        if (c.atEnd()) continue;

        if (c.tryKeyword("component")) {
            cat.components.push_back(c.value());
        } else if (c.tryKeyword("link")) {
            LinkDecl link;
            link.src = c.value();
            c.expect('-');
            c.expect('>');
            link.dest = c.value();
            c.expectKeyword("fields");
            while (!c.atEnd()) {
                std::string field = c.value();
                c.expect(':');
                int w = static_cast<int>(c.integer());
                if (field == "Val")
                    link.val = w;
                else if (field == "Cmd")
                    link.cmd = w;
                else if (field == "Tag")
                    link.tag = w;
                else if (field == "Sid")
                    link.sid = w;
                else if (field == "Addr")
                    link.addr = w;
                else if (field == "Data")
                    link.data = w;
                else
                    c.fail("unknown field '" + field + "'");
            }
            if (link.val != 1 || link.cmd != 8 || link.tag != 8 || link.sid != 8 ||
                link.addr != 32)
                c.fail("unsupported field widths on link " + link.name());
            cat.links.push_back(std::move(link));
        } else if (c.tryKeyword("status")) {
            cat.statuses.push_back({c.value()});
        } else if (c.tryKeyword("cmd")) {
            std::string name = c.value();
            std::uint8_t code = c.byteValue();
            if (cat.cmdCodes.count(name)) c.fail("duplicate cmd '" + name + "'");
            for (const auto& [other, otherCode] : cat.cmdCodes)
                if (otherCode == code) c.fail("cmd code collides with '" + other + "'");
            cat.cmdCodes[name] = code;
        } else if (c.tryKeyword("flowspec")) {
            std::string ref = c.value();
            std::string body;
            if (inlineFlowSpecs && inlineFlowSpecs->count(ref)) {
                body = inlineFlowSpecs->at(ref);
            } else {
                std::filesystem::path p = baseDir / ref;
                std::ifstream in(p);
                if (!in) c.fail("cannot open flow spec '" + p.string() + "'");
                std::stringstream ss;
                ss << in.rdbuf();
                body = ss.str();
            }
            cat.templates.push_back(parseFlowSpec(body, ref));
        } else {
            c.fail("unknown directive");
        }
    }

    cat.validate();
    return cat;
}

Catalog loadCatalog(const std::string& manifestPath) {
    std::ifstream in(manifestPath);
    if (!in) throw CatalogError("cannot open catalog manifest '" + manifestPath + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parseManifest(ss.str(), manifestPath);
}

std::size_t Catalog::componentIndex(const std::string& name) const {
    for (std::size_t i = 0; i < components.size(); ++i)
        if (components[i] == name) return i;
    throw CatalogError("undeclared component '" + name + "'");
}

std::optional<std::size_t> Catalog::findLink(const std::string& src,
                                             const std::string& dest) const {
    for (std::size_t i = 0; i < links.size(); ++i)
        if (links[i].src == src && links[i].dest == dest) return i;
    return std::nullopt;
}

std::optional<std::size_t> Catalog::findStatus(const std::string& name) const {
    for (std::size_t i = 0; i < statuses.size(); ++i)
        if (statuses[i].name == name) return i;
    return std::nullopt;
}

const FlowTemplate& Catalog::templateByName(const std::string& name) const {
    for (const FlowTemplate& t : templates)
        if (t.name() == name) return t;
    throw CatalogError("unknown flow template '" + name + "'");
}

std::string Catalog::channelName(std::size_t idx) const {
    if (idx < links.size()) return links[idx].name();
    return statuses[idx - links.size()].name;
}

int Catalog::channelWidth(std::size_t idx) const {
    if (idx < links.size()) return links[idx].width();
    return StatusDecl::kWidth;
}

std::optional<std::size_t> Catalog::findChannel(const std::string& name) const {
    for (std::size_t i = 0; i < channelCount(); ++i)
        if (channelName(i) == name) return i;
    return std::nullopt;
}

void Catalog::validate() const {
    std::set<std::string> names;
    for (const std::string& comp : components)
        if (!names.insert(comp).second) throw CatalogError("duplicate component '" + comp + "'");
    for (const LinkDecl& link : links) {
        componentIndex(link.src);
        componentIndex(link.dest);
        if (link.src == link.dest) throw CatalogError("self link " + link.name());
    }
    names.clear();
    for (const FlowTemplate& t : templates)
        if (!names.insert(t.name()).second)
            throw CatalogError("duplicate flow template '" + t.name() + "'");

    // Event-label references are only checkable on concrete flows; expansion
    // performs full resolution and throws on dangling links/cmds/components.
    expandCatalog(*this);
}

std::vector<ConcreteFlow> expandCatalog(const Catalog& catalog) {
    std::vector<ConcreteFlow> out;
    std::vector<std::size_t> order(catalog.templates.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return catalog.templates[a].name() < catalog.templates[b].name();
    });

    for (std::size_t templateIdx : order) {
        const FlowTemplate& tmpl = catalog.templates[templateIdx];
        for (const Binding& binding : tmpl.legalBindings()) {
            ConcreteFlow flow;
            flow.templateIdx = templateIdx;
            flow.binding = binding;
            flow.lpn = tmpl.instantiate(binding);
            flow.id = flow.lpn.name;
            for (const Transition& t : flow.lpn.transitions) {
                if (t.label.src == t.label.dest)
                    throw CatalogError(flow.id + ": event " + t.label.str() +
                                       " has equal src and dest");
                auto link = catalog.findLink(t.label.src, t.label.dest);
                if (!link)
                    throw CatalogError(flow.id + ": event " + t.label.str() +
                                       " uses undeclared link " + t.label.src + "->" +
                                       t.label.dest);
                auto cmd = catalog.cmdCodes.find(t.label.cmd);
                if (cmd == catalog.cmdCodes.end())
                    throw CatalogError(flow.id + ": event " + t.label.str() +
                                       " uses undeclared cmd '" + t.label.cmd + "'");
                flow.events.push_back(
                    {static_cast<std::uint16_t>(*link), cmd->second});
                std::vector<std::pair<std::uint16_t, bool>> asserts;
                for (const StatusAssert& a : t.asserts) {
                    auto st = catalog.findStatus(a.channel);
                    if (!st)
                        throw CatalogError(flow.id + ": transition " + t.name +
                                           " references undeclared status '" + a.channel + "'");
                    asserts.emplace_back(static_cast<std::uint16_t>(*st), a.value);
                }
                flow.statusAsserts.push_back(std::move(asserts));
                flow.srcTag.push_back(catalog.tagId(t.label.src));
            }
            out.push_back(std::move(flow));
        }
    }
    return out;
}

}  // namespace flowtrace
