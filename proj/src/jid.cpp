#include "fbx/jid.hpp"

namespace fbx::xmpp {

Jid Jid::parse(std::string_view text) {
    size_t at = text.find('@');
    if (at == std::string_view::npos)
        throw JidError("JID missing '@': " + std::string(text));
    Jid jid;
    jid.node = std::string(text.substr(0, at));
    std::string_view rest = text.substr(at + 1);
    size_t slash = rest.find('/');
    if (slash == std::string_view::npos) {
        jid.domain = std::string(rest);
    } else {
        jid.domain = std::string(rest.substr(0, slash));
        jid.resource = std::string(rest.substr(slash + 1));
    }
    if (jid.node.empty())
        throw JidError("JID has empty node: " + std::string(text));
    if (jid.domain.empty())
        throw JidError("JID has empty domain: " + std::string(text));
    if (jid.node.find('@') != std::string::npos)
        throw JidError("JID node contains '@'");
    return jid;
}

}  // namespace fbx::xmpp
