#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fbx::xmpp {

class JidError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// node@domain[/resource]; an empty resource makes a "bare" JID.
struct Jid {
    std::string node;
    std::string domain;
    std::string resource;

    static Jid parse(std::string_view text);

    std::string bare() const { return node + "@" + domain; }
    std::string full() const {
        return resource.empty() ? bare() : bare() + "/" + resource;
    }
    Jid bare_jid() const { return {node, domain, ""}; }

    bool operator==(const Jid&) const = default;
};

}  // namespace fbx::xmpp
