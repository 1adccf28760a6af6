#include "fbx/xml.hpp"

namespace fbx::xmpp {

const std::string* XmlNode::attr(std::string_view key) const {
    for (const auto& [k, v] : attrs)
        if (k == key)
            return &v;
    return nullptr;
}

void XmlNode::set_attr(std::string key, std::string value) {
    for (auto& [k, v] : attrs) {
        if (k == key) {
            v = std::move(value);
            return;
        }
    }
    attrs.emplace_back(std::move(key), std::move(value));
}

const XmlNode* XmlNode::child(std::string_view child_name) const {
    for (const auto& c : children)
        if (const XmlNode* n = std::get_if<XmlNode>(&c); n && n->name == child_name)
            return n;
    return nullptr;
}

std::string XmlNode::text() const {
    std::string out;
    for (const auto& c : children)
        if (const std::string* t = std::get_if<std::string>(&c))
            out += *t;
    return out;
}

bool operator==(const XmlNode& a, const XmlNode& b) {
    return a.name == b.name && a.attrs == b.attrs && a.children == b.children;
}

std::string xml_escape(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += c;
        }
    }
    return out;
}

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    XmlNode parse_document() {
        skip_ws();
        XmlNode root = parse_element();
        skip_ws();
        if (pos_ != s_.size())
            fail("trailing content after root element");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& what) {
        throw XmlError("xml error at offset " + std::to_string(pos_) + ": " + what);
    }

    char peek() {
        if (pos_ >= s_.size())
            fail("unexpected end of input");
        return s_[pos_];
    }

    bool eof() const { return pos_ >= s_.size(); }

    void expect(char c) {
        if (peek() != c)
            fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    void skip_ws() {
        while (!eof() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r' ||
                          s_[pos_] == '\n'))
            ++pos_;
    }

    static bool name_char(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
               (c >= '0' && c <= '9') || c == '_' || c == '-' || c == ':' || c == '.';
    }

    std::string parse_name() {
        size_t start = pos_;
        while (!eof() && name_char(s_[pos_]))
            ++pos_;
        if (pos_ == start)
            fail("expected a name");
        return std::string(s_.substr(start, pos_ - start));
    }

    char parse_entity() {
        // pos_ is on '&'
        size_t end = s_.find(';', pos_);
        if (end == std::string_view::npos)
            fail("unterminated entity");
        std::string_view ent = s_.substr(pos_ + 1, end - pos_ - 1);
        pos_ = end + 1;
        if (ent == "amp") return '&';
        if (ent == "lt") return '<';
        if (ent == "gt") return '>';
        if (ent == "quot") return '"';
        if (ent == "apos") return '\'';
        fail("unknown entity: &" + std::string(ent) + ";");
    }

    std::string parse_attr_value() {
        char quote = peek();
        if (quote != '"' && quote != '\'')
            fail("expected quoted attribute value");
        ++pos_;
        std::string out;
        while (peek() != quote) {
            char c = peek();
            if (c == '&') {
                out += parse_entity();
            } else if (c == '<') {
                fail("'<' in attribute value");
            } else {
                out += c;
                ++pos_;
            }
        }
        ++pos_;
        return out;
    }

    XmlNode parse_element() {
        expect('<');
        if (peek() == '!' || peek() == '?')
            fail("unsupported construct");
        XmlNode node;
        node.name = parse_name();
        for (;;) {
            skip_ws();
            char c = peek();
            if (c == '/') {
                ++pos_;
                expect('>');
                return node;  // self-closing
            }
            if (c == '>') {
                ++pos_;
                break;
            }
            std::string key = parse_name();
            skip_ws();
            expect('=');
            skip_ws();
            std::string value = parse_attr_value();
            if (node.attr(key))
                fail("duplicate attribute: " + key);
            node.attrs.emplace_back(std::move(key), std::move(value));
        }
        // content
        std::string pending;
        auto flush = [&] {
            if (!pending.empty()) {
                node.children.emplace_back(std::move(pending));
                pending.clear();
            }
        };
        for (;;) {
            char c = peek();
            if (c == '<') {
                if (pos_ + 1 < s_.size() && s_[pos_ + 1] == '/') {
                    flush();
                    pos_ += 2;
                    std::string close = parse_name();
                    if (close != node.name)
                        fail("mismatched closing tag: </" + close + "> for <" +
                             node.name + ">");
                    skip_ws();
                    expect('>');
                    return node;
                }
                flush();
                node.children.emplace_back(parse_element());
            } else if (c == '&') {
                pending += parse_entity();
            } else {
                pending += c;
                ++pos_;
            }
        }
    }

    std::string_view s_;
    size_t pos_ = 0;
};

void serialize_into(const XmlNode& node, std::string& out) {
    out += '<';
    out += node.name;
    for (const auto& [k, v] : node.attrs) {
        out += ' ';
        out += k;
        out += "='";
        out += xml_escape(v);
        out += '\'';
    }
    if (node.children.empty()) {
        out += "/>";
        return;
    }
    out += '>';
    for (const auto& c : node.children) {
        if (const std::string* t = std::get_if<std::string>(&c))
            out += xml_escape(*t);
        else
            serialize_into(std::get<XmlNode>(c), out);
    }
    out += "</";
    out += node.name;
    out += '>';
}

}  // namespace

XmlNode xml_parse(std::string_view text) {
    return Parser(text).parse_document();
}

std::string xml_serialize(const XmlNode& node) {
    std::string out;
    serialize_into(node, out);
    return out;
}

}  // namespace fbx::xmpp
