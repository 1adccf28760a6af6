#include "fbx/stanza.hpp"

namespace fbx::xmpp {

namespace {

const char* iq_type_name(IqType t) {
    switch (t) {
    case IqType::Get: return "get";
    case IqType::Set: return "set";
    case IqType::Result: return "result";
    case IqType::Error: return "error";
    }
    return "?";
}

IqType iq_type_from(const std::string& s) {
    if (s == "get") return IqType::Get;
    if (s == "set") return IqType::Set;
    if (s == "result") return IqType::Result;
    if (s == "error") return IqType::Error;
    throw StanzaError("bad iq type: " + s);
}

const char* presence_type_name(PresenceType t) {
    switch (t) {
    case PresenceType::Available: return "";
    case PresenceType::Subscribe: return "subscribe";
    case PresenceType::Subscribed: return "subscribed";
    case PresenceType::Unsubscribed: return "unsubscribed";
    }
    return "?";
}

PresenceType presence_type_from(const std::string& s) {
    if (s == "subscribe") return PresenceType::Subscribe;
    if (s == "subscribed") return PresenceType::Subscribed;
    if (s == "unsubscribed") return PresenceType::Unsubscribed;
    throw StanzaError("bad presence type: " + s);
}

}  // namespace

XmlNode make_value_elem(const std::string& b64_text) {
    XmlNode value(kValueElem);
    value.set_attr("xmlns", kForteNs);
    if (!b64_text.empty())
        value.add_text(b64_text);
    return value;
}

XmlNode Stanza::to_xml() const {
    XmlNode node;
    switch (kind) {
    case StanzaKind::Presence: node.name = "presence"; break;
    case StanzaKind::Iq: node.name = "iq"; break;
    case StanzaKind::Message: node.name = "message"; break;
    }
    if (from)
        node.set_attr("from", from->full());
    if (to)
        node.set_attr("to", to->full());
    if (!id.empty())
        node.set_attr("id", id);
    if (kind == StanzaKind::Iq) {
        if (id.empty())
            throw StanzaError("iq stanza requires an id");
        node.set_attr("type", iq_type_name(iq_type));
    } else if (kind == StanzaKind::Presence &&
               presence_type != PresenceType::Available) {
        node.set_attr("type", presence_type_name(presence_type));
    }
    for (const XmlNode& p : payload)
        node.add_child(p);
    return node;
}

Stanza Stanza::from_xml(const XmlNode& node) {
    Stanza st;
    if (node.name == "presence")
        st.kind = StanzaKind::Presence;
    else if (node.name == "iq")
        st.kind = StanzaKind::Iq;
    else if (node.name == "message")
        st.kind = StanzaKind::Message;
    else
        throw StanzaError("not a stanza element: " + node.name);
    if (const std::string* v = node.attr("from"))
        st.from = Jid::parse(*v);
    if (const std::string* v = node.attr("to"))
        st.to = Jid::parse(*v);
    if (const std::string* v = node.attr("id"))
        st.id = *v;
    if (st.kind == StanzaKind::Iq) {
        const std::string* t = node.attr("type");
        if (!t)
            throw StanzaError("iq stanza missing type");
        st.iq_type = iq_type_from(*t);
        if (st.id.empty())
            throw StanzaError("iq stanza missing id");
    } else if (st.kind == StanzaKind::Presence) {
        if (const std::string* t = node.attr("type"))
            st.presence_type = presence_type_from(*t);
    }
    for (const auto& c : node.children)
        if (const XmlNode* n = std::get_if<XmlNode>(&c))
            st.payload.push_back(*n);
    return st;
}

std::optional<std::string> Stanza::value_text() const {
    for (const XmlNode& p : payload) {
        if (p.name == kValueElem) {
            const std::string* ns = p.attr("xmlns");
            if (ns && *ns == kForteNs)
                return p.text();
        }
    }
    return std::nullopt;
}

}  // namespace fbx::xmpp
