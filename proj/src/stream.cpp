#include "fbx/stream.hpp"

#include "fbx/netstats.hpp"

namespace fbx::xmpp {

namespace {

bool is_ws(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
}

}  // namespace

void StanzaStream::write_header(const std::string& attr, const std::string& value) {
    std::string header = "<stream " + attr + "='" + xml_escape(value) + "'>";
    std::lock_guard lock(write_mutex_);
    stream_.write_all(header);
    netstats::add_msg_sent(netstats::Transport::Xmpp, header.size());
}

XmlNode StanzaStream::read_header(int timeout_ms) {
    // The opening tag never closes until session end; grab it up to the
    // first unquoted '>' and parse it as a self-closing element.
    for (;;) {
        char quote = 0;
        for (size_t i = 0; i < buf_.size(); ++i) {
            char c = buf_[i];
            if (quote) {
                if (c == quote)
                    quote = 0;
            } else if (c == '"' || c == '\'') {
                quote = c;
            } else if (c == '>') {
                std::string tag = buf_.substr(0, i + 1);
                buf_.erase(0, i + 1);
                netstats::add_msg_received(netstats::Transport::Xmpp, tag.size());
                if (tag.size() < 2 || tag[tag.size() - 2] == '/')
                    throw XmlError("bad stream header: " + tag);
                tag.insert(tag.size() - 1, "/");
                XmlNode node = xml_parse(tag);
                if (node.name != "stream")
                    throw XmlError("expected <stream>, got <" + node.name + ">");
                return node;
            }
        }
        if (!fill(timeout_ms))
            throw net::NetError("connection closed before stream header");
    }
}

void StanzaStream::write_element(const XmlNode& node) {
    std::string text = xml_serialize(node);
    std::lock_guard lock(write_mutex_);
    stream_.write_all(text);
    netstats::add_msg_sent(netstats::Transport::Xmpp, text.size());
}

void StanzaStream::write_stream_close() {
    std::lock_guard lock(write_mutex_);
    try {
        stream_.write_all(std::string_view("</stream>"));
    } catch (const net::NetError&) {
        // peer already gone
    }
}

size_t StanzaStream::scan_element(bool& closed) {
    size_t pos = 0;
    while (pos < buf_.size() && is_ws(buf_[pos]))
        ++pos;
    if (pos > 0)
        buf_.erase(0, pos);
    if (buf_.empty())
        return 0;
    if (buf_[0] != '<')
        throw XmlError("garbage between stanzas");
    if (buf_.size() >= 2 && buf_[1] == '/') {
        closed = true;  // `</stream>` (only the stream close appears here)
        return 0;
    }
    int depth = 0;
    char quote = 0;
    bool in_tag = false;
    size_t tag_start = 0;
    for (size_t i = 0; i < buf_.size(); ++i) {
        char c = buf_[i];
        if (in_tag) {
            if (quote) {
                if (c == quote)
                    quote = 0;
            } else if (c == '"' || c == '\'') {
                quote = c;
            } else if (c == '>') {
                in_tag = false;
                if (buf_[tag_start + 1] == '/')
                    --depth;
                else if (buf_[i - 1] == '/')
                    ;  // self-closing
                else
                    ++depth;
                if (depth == 0)
                    return i + 1;
                if (depth < 0)
                    throw XmlError("unbalanced stanza");
            }
        } else if (c == '<') {
            in_tag = true;
            tag_start = i;
        }
    }
    return 0;
}

bool StanzaStream::fill(int timeout_ms) {
    uint8_t chunk[4096];
    size_t n = stream_.read_some(std::span<uint8_t>(chunk, sizeof(chunk)), timeout_ms);
    if (n == 0)
        return false;
    buf_.append(reinterpret_cast<const char*>(chunk), n);
    return true;
}

std::optional<XmlNode> StanzaStream::read_element(int timeout_ms) {
    for (;;) {
        bool closed = false;
        size_t len = scan_element(closed);
        if (closed)
            return std::nullopt;
        if (len) {
            std::string text = buf_.substr(0, len);
            buf_.erase(0, len);
            netstats::add_msg_received(netstats::Transport::Xmpp, text.size());
            return xml_parse(text);
        }
        if (!fill(timeout_ms))
            return std::nullopt;
    }
}

}  // namespace fbx::xmpp
