#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace fbx::xmpp {

class XmlError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Element tree for the supported XML subset: elements, attributes and
// character data with the five standard entities. No comments, CDATA,
// processing instructions or DOCTYPE.
struct XmlNode {
    using Child = std::variant<XmlNode, std::string>;

    std::string name;
    std::vector<std::pair<std::string, std::string>> attrs;
    std::vector<Child> children;

    XmlNode() = default;
    explicit XmlNode(std::string n) : name(std::move(n)) {}

    const std::string* attr(std::string_view key) const;
    void set_attr(std::string key, std::string value);
    const XmlNode* child(std::string_view child_name) const;
    std::string text() const;  // concatenated direct text segments
    void add_text(std::string t) { children.emplace_back(std::move(t)); }
    void add_child(XmlNode n) { children.emplace_back(std::move(n)); }
};

bool operator==(const XmlNode& a, const XmlNode& b);

// Parses a single well-formed element. Whitespace-only text between
// elements is preserved.
XmlNode xml_parse(std::string_view text);

// Deterministic form: `'`-quoted attributes, `<a/>` for empty elements,
// all five entities escaped in text and attribute values.
std::string xml_serialize(const XmlNode& node);

std::string xml_escape(std::string_view raw);

}  // namespace fbx::xmpp
