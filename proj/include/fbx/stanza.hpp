#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fbx/jid.hpp"
#include "fbx/xml.hpp"

namespace fbx::xmpp {

class StanzaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class StanzaKind { Presence, Iq, Message };
enum class IqType { Get, Set, Result, Error };
// Available is the typeless presence carrying data; the rest drive the
// subscription handshake.
enum class PresenceType { Available, Subscribe, Subscribed, Unsubscribed };

// The forte payload namespace and its single data-carrying element.
inline constexpr const char* kForteNs = "forte";
inline constexpr const char* kValueElem = "Value";

struct Stanza {
    StanzaKind kind = StanzaKind::Presence;
    std::optional<Jid> from;
    std::optional<Jid> to;
    std::string id;  // required for iq
    IqType iq_type = IqType::Get;
    PresenceType presence_type = PresenceType::Available;
    std::vector<XmlNode> payload;

    XmlNode to_xml() const;
    static Stanza from_xml(const XmlNode& node);

    // Text of the first `<Value xmlns='forte'>` payload child, if any.
    std::optional<std::string> value_text() const;
};

XmlNode make_value_elem(const std::string& b64_text);

}  // namespace fbx::xmpp
