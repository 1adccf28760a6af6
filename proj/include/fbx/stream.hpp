#pragma once

#include <mutex>
#include <optional>
#include <string>

#include "fbx/socket.hpp"
#include "fbx/xml.hpp"

namespace fbx::xmpp {

// One direction of an XMPP-mini connection is a `<stream ...>` document
// whose children are stanzas; `</stream>` (or EOF) ends the session.
// Element reads are incremental and quote-aware; writes are serialized
// under a mutex so routing threads can share a peer connection.
class StanzaStream {
public:
    explicit StanzaStream(net::TcpStream stream) : stream_(std::move(stream)) {}

    // Stream headers: `<stream to='domain'>` / `<stream from='domain'>`.
    void write_header(const std::string& attr, const std::string& value);
    XmlNode read_header(int timeout_ms);

    void write_element(const XmlNode& node);
    // nullopt on `</stream>` or connection end.
    std::optional<XmlNode> read_element(int timeout_ms = -1);

    void write_stream_close();
    void shutdown() { stream_.shutdown(); }

private:
    // Returns the byte length of the first complete element in buf_,
    // or 0 if more input is needed. Sets closed on `</stream>`.
    size_t scan_element(bool& closed);
    bool fill(int timeout_ms);  // false on EOF

    net::TcpStream stream_;
    std::string buf_;
    std::mutex write_mutex_;
};

}  // namespace fbx::xmpp
