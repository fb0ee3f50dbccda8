#include "flowtrace/encoding.hpp"

namespace flowtrace {

MessageEncoding MessageEncoding::build(const Catalog& catalog,
                                       const std::vector<ConcreteFlow>& expansion) {
    MessageEncoding enc;
    enc.links_.resize(catalog.links.size());
    for (std::size_t i = 0; i < catalog.links.size(); ++i) {
        const LinkDecl& decl = catalog.links[i];
        LinkInfo& info = enc.links_[i];
        info.width = decl.width();
        info.dataWidth = decl.data;
    }
    // Per-link alphabets come from the flows that actually emit on the link.
    for (const ConcreteFlow& flow : expansion) {
        for (std::size_t t = 0; t < flow.events.size(); ++t) {
            const ConcreteEvent& ev = flow.events[t];
            const std::string& name = flow.lpn.transitions[t].label.cmd;
            auto& cmds = enc.links_[ev.link].cmds;
            auto it = cmds.find(name);
            if (it == cmds.end())
                cmds[name] = ev.cmd;
            else if (it->second != ev.cmd)
                throw EncodingError("cmd '" + name + "' has conflicting codes on link " +
                                    catalog.links[ev.link].name());
        }
    }
    // Uniqueness of patterns within each link.
    for (std::size_t i = 0; i < enc.links_.size(); ++i) {
        std::set<std::uint8_t> seen;
        for (const auto& [name, code] : enc.links_[i].cmds)
            if (!seen.insert(code).second)
                throw EncodingError("duplicate cmd pattern on link " + catalog.links[i].name());
    }
    return enc;
}

Bits MessageEncoding::encode(std::size_t linkIdx, const Message& msg) const {
    if (linkIdx >= links_.size()) throw EncodingError("unknown link index");
    const LinkInfo& info = links_[linkIdx];
    bool known = false;
    for (const auto& [name, code] : info.cmds)
        if (code == msg.cmd) known = true;
    if (!known)
        throw EncodingError("cmd code " + std::to_string(msg.cmd) +
                            " not declared on link " + std::to_string(linkIdx));
    Bits out(info.width);
    out.set(info.valBit, true);
    out.setByte(info.cmdLo, msg.cmd);
    out.setByte(info.tagLo, msg.tag);
    out.setByte(info.sidLo, msg.sid);
    out.setWord(info.addrLo, 32, msg.addr);
    out.setWord(info.dataLo, info.dataWidth < 64 ? info.dataWidth : 64, msg.data);
    return out;
}

Bits MessageEncoding::canonical(std::size_t linkIdx, std::uint8_t cmd) const {
    Message m;
    m.cmd = cmd;
    return encode(linkIdx, m);
}

std::uint8_t MessageEncoding::cmdCode(std::size_t linkIdx, const std::string& cmdName) const {
    const auto& cmds = links_.at(linkIdx).cmds;
    auto it = cmds.find(cmdName);
    if (it == cmds.end())
        throw EncodingError("cmd '" + cmdName + "' not declared on link " +
                            std::to_string(linkIdx));
    return it->second;
}

std::string MessageEncoding::cmdName(std::size_t linkIdx, std::uint8_t code) const {
    for (const auto& [name, c] : links_.at(linkIdx).cmds)
        if (c == code) return name;
    return "cmd_" + std::to_string(code);
}

std::vector<std::uint8_t> MessageEncoding::linkCmds(std::size_t linkIdx) const {
    std::vector<std::uint8_t> out;
    for (const auto& [name, code] : links_.at(linkIdx).cmds) out.push_back(code);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace flowtrace
