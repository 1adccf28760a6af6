#include "fbx/stack.hpp"

#include <cstdlib>

#include "fbx/base64.hpp"
#include "fbx/ber.hpp"
#include "fbx/jid.hpp"
#include "fbx/transports.hpp"
#include "fbx/xmpp_client.hpp"

namespace fbx::comm {

uint16_t xmpp_port() {
    if (const char* env = std::getenv("FBX_XMPP_PORT")) {
        int port = std::atoi(env);
        if (port > 0 && port <= 65535)
            return static_cast<uint16_t>(port);
    }
    return 5222;
}

namespace {

struct XmppParams {
    int encryption = 0;
    xmpp::Jid self;
    std::string password;
    std::string server_ip;
    std::optional<xmpp::Jid> peer;

    static XmppParams parse(const LayerSpec& layer, bool need_peer) {
        size_t expect = need_peer ? 5 : 4;
        if (layer.params.size() != expect)
            throw StackError("xmpp layer needs " + std::to_string(expect) +
                             " parameters, got " +
                             std::to_string(layer.params.size()));
        XmppParams p;
        const std::string& enc = layer.params[0];
        if (enc == "0")
            p.encryption = 0;
        else if (enc == "1")
            throw TlsUnsupportedError("encryption=1 (TLS) is not supported");
        else
            throw StackError("bad encryption parameter '" + enc + "'");
        try {
            p.self = xmpp::Jid::parse(layer.params[1]);
            if (need_peer)
                p.peer = xmpp::Jid::parse(layer.params[4]);
        } catch (const xmpp::JidError& e) {
            throw StackError(std::string("bad JID in xmpp layer: ") + e.what());
        }
        p.password = layer.params[2];
        p.server_ip = layer.params[3];
        return p;
    }
};

// Validates the layer chain for endpoint construction: exactly one fbdk
// payload layer followed by the transport.
const LayerSpec& transport_of(const CommID& id) {
    if (id.layers.size() != 2 || id.layers[0].name != "fbdk")
        throw StackError("unsupported layer chain in " + id.to_string());
    return id.transport();
}

net::IpParams ip_params(const LayerSpec& layer) {
    try {
        return net::IpParams::parse(layer.params);
    } catch (const IdError& e) {
        throw StackError(e.what());
    }
}

std::unique_ptr<xmpp::Session> connect_session(const XmppParams& p) {
    try {
        return std::make_unique<xmpp::Session>(p.server_ip, xmpp_port(),
                                               p.self, p.password);
    } catch (const std::exception& e) {
        throw ConnectError(std::string("xmpp connect failed: ") + e.what());
    }
}

// --- udp ------------------------------------------------------------

class UdpPublisherEndpoint : public PublisherEndpoint {
public:
    explicit UdpPublisherEndpoint(const net::IpParams& params) : pub_(params) {}

    void send(const std::vector<Value>& values) override {
        pub_.publish(ber_encode(values));
    }

private:
    net::UdpPublisher pub_;
};

class UdpSubscriberEndpoint : public SubscriberEndpoint {
public:
    explicit UdpSubscriberEndpoint(const net::IpParams& params)
        : sub_(params, [this](std::vector<uint8_t> frame) { on_frame(frame); }) {}

    void set_callback(std::function<void(std::vector<Value>)> fn) override {
        std::lock_guard lock(mutex_);
        callback_ = std::move(fn);
    }

    uint64_t decode_errors() const override { return decode_errors_.load(); }
    void close() override { sub_.close(); }

private:
    void on_frame(const std::vector<uint8_t>& frame) {
        std::vector<Value> values;
        try {
            values = ber_decode(frame);
        } catch (const CodecError&) {
            decode_errors_.fetch_add(1);
            return;
        }
        std::function<void(std::vector<Value>)> cb;
        {
            std::lock_guard lock(mutex_);
            cb = callback_;
        }
        if (cb)
            cb(std::move(values));
    }

    std::mutex mutex_;
    std::function<void(std::vector<Value>)> callback_;
    std::atomic<uint64_t> decode_errors_{0};
    net::UdpSubscription sub_;
};

// --- tcp ------------------------------------------------------------

class TcpClientEndpoint : public ClientEndpoint {
public:
    explicit TcpClientEndpoint(const net::IpParams& params) : client_(make(params)) {}

    std::vector<Value> request(const std::vector<Value>& values,
                               int timeout_ms) override {
        std::vector<uint8_t> response =
            client_.request(ber_encode(values), timeout_ms);
        return ber_decode(response);
    }

private:
    static net::TcpFramedClient make(const net::IpParams& params) {
        try {
            return net::TcpFramedClient(params);
        } catch (const std::exception& e) {
            throw ConnectError(std::string("tcp connect failed: ") + e.what());
        }
    }

    net::TcpFramedClient client_;
};

class TcpServerEndpoint : public ServerEndpoint {
public:
    explicit TcpServerEndpoint(const net::IpParams& params)
        : server_(params, [this](const std::vector<uint8_t>& frame) {
              return on_request(frame);
          }) {}

    void set_handler(
        std::function<std::vector<Value>(const std::vector<Value>&)> fn) override {
        std::lock_guard lock(mutex_);
        handler_ = std::move(fn);
    }

    uint64_t decode_errors() const override { return decode_errors_.load(); }
    void close() override { server_.close(); }

private:
    std::vector<uint8_t> on_request(const std::vector<uint8_t>& frame) {
        // the empty frame doubles as the transport's error response
        std::vector<Value> values;
        try {
            values = ber_decode(frame);
        } catch (const CodecError&) {
            decode_errors_.fetch_add(1);
            return {};
        }
        std::function<std::vector<Value>(const std::vector<Value>&)> handler;
        {
            std::lock_guard lock(mutex_);
            handler = handler_;
        }
        if (!handler)
            return {};
        try {
            return ber_encode(handler(values));
        } catch (const std::exception&) {
            return {};
        }
    }

    std::mutex mutex_;
    std::function<std::vector<Value>(const std::vector<Value>&)> handler_;
    std::atomic<uint64_t> decode_errors_{0};
    net::TcpFramedServer server_;
};

// --- xmpp -----------------------------------------------------------

std::string encode_b64(const std::vector<Value>& values) {
    std::vector<uint8_t> frame = ber_encode(values);
    return b64_encode(std::span<const uint8_t>(frame.data(), frame.size()));
}

std::vector<Value> decode_b64(const std::string& text) {
    return ber_decode(b64_decode(text));
}

class XmppPublisherEndpoint : public PublisherEndpoint {
public:
    explicit XmppPublisherEndpoint(const XmppParams& params)
        : session_(connect_session(params)) {}

    void send(const std::vector<Value>& values) override {
        session_->publish_presence(encode_b64(values));
    }

private:
    std::unique_ptr<xmpp::Session> session_;
};

class XmppSubscriberEndpoint : public SubscriberEndpoint {
public:
    explicit XmppSubscriberEndpoint(const XmppParams& params)
        : session_(connect_session(params)) {
        session_->set_data_handler(
            [this](const xmpp::Jid&, const std::string& b64) { on_data(b64); });
        try {
            session_->subscribe_to(*params.peer);
        } catch (const std::exception& e) {
            throw ConnectError(std::string("subscription failed: ") + e.what());
        }
    }

    void set_callback(std::function<void(std::vector<Value>)> fn) override {
        std::lock_guard lock(mutex_);
        callback_ = std::move(fn);
    }

    uint64_t decode_errors() const override { return decode_errors_.load(); }
    void close() override { session_->close(); }

private:
    void on_data(const std::string& b64) {
        std::vector<Value> values;
        try {
            values = decode_b64(b64);
        } catch (const std::exception&) {
            decode_errors_.fetch_add(1);
            return;
        }
        std::function<void(std::vector<Value>)> cb;
        {
            std::lock_guard lock(mutex_);
            cb = callback_;
        }
        if (cb)
            cb(std::move(values));
    }

    std::mutex mutex_;
    std::function<void(std::vector<Value>)> callback_;
    std::atomic<uint64_t> decode_errors_{0};
    std::unique_ptr<xmpp::Session> session_;
};

class XmppClientEndpoint : public ClientEndpoint {
public:
    explicit XmppClientEndpoint(const XmppParams& params)
        : session_(connect_session(params)), server_jid_(*params.peer) {}

    std::vector<Value> request(const std::vector<Value>& values,
                               int timeout_ms) override {
        // a data-less request is an iq get
        std::optional<std::string> payload;
        if (!values.empty())
            payload = encode_b64(values);
        std::string result = session_->iq_request(server_jid_, payload, timeout_ms);
        return decode_b64(result);
    }

private:
    std::unique_ptr<xmpp::Session> session_;
    xmpp::Jid server_jid_;
};

class XmppServerEndpoint : public ServerEndpoint {
public:
    explicit XmppServerEndpoint(const XmppParams& params)
        : session_(connect_session(params)) {
        session_->set_iq_handler(
            [this](const std::optional<std::string>& b64) { return on_iq(b64); });
    }

    void set_handler(
        std::function<std::vector<Value>(const std::vector<Value>&)> fn) override {
        std::lock_guard lock(mutex_);
        handler_ = std::move(fn);
    }

    uint64_t decode_errors() const override { return decode_errors_.load(); }
    void close() override { session_->close(); }

private:
    std::string on_iq(const std::optional<std::string>& b64) {
        std::vector<Value> values;
        try {
            if (b64)
                values = decode_b64(*b64);
        } catch (const std::exception&) {
            decode_errors_.fetch_add(1);
            throw;  // becomes an iq error
        }
        std::function<std::vector<Value>(const std::vector<Value>&)> handler;
        {
            std::lock_guard lock(mutex_);
            handler = handler_;
        }
        if (!handler)
            throw StackError("no request handler installed");
        return encode_b64(handler(values));
    }

    std::mutex mutex_;
    std::function<std::vector<Value>(const std::vector<Value>&)> handler_;
    std::atomic<uint64_t> decode_errors_{0};
    std::unique_ptr<xmpp::Session> session_;
};

}  // namespace

std::unique_ptr<PublisherEndpoint> build_publisher(const CommID& id) {
    const LayerSpec& t = transport_of(id);
    if (t.name == "ip")
        return std::make_unique<UdpPublisherEndpoint>(ip_params(t));
    return std::make_unique<XmppPublisherEndpoint>(XmppParams::parse(t, false));
}

std::unique_ptr<SubscriberEndpoint> build_subscriber(const CommID& id) {
    const LayerSpec& t = transport_of(id);
    if (t.name == "ip")
        return std::make_unique<UdpSubscriberEndpoint>(ip_params(t));
    return std::make_unique<XmppSubscriberEndpoint>(XmppParams::parse(t, true));
}

std::unique_ptr<ClientEndpoint> build_client(const CommID& id) {
    const LayerSpec& t = transport_of(id);
    if (t.name == "ip")
        return std::make_unique<TcpClientEndpoint>(ip_params(t));
    return std::make_unique<XmppClientEndpoint>(XmppParams::parse(t, true));
}

std::unique_ptr<ServerEndpoint> build_server(const CommID& id) {
    const LayerSpec& t = transport_of(id);
    if (t.name == "ip")
        return std::make_unique<TcpServerEndpoint>(ip_params(t));
    return std::make_unique<XmppServerEndpoint>(XmppParams::parse(t, false));
}

CommEndpoint build_stack(const CommID& id, Pattern pattern) {
    CommEndpoint ep;
    switch (pattern) {
    case Pattern::Publish:
        ep.publisher = build_publisher(id);
        break;
    case Pattern::Subscribe:
        ep.subscriber = build_subscriber(id);
        break;
    case Pattern::Client:
        ep.client = build_client(id);
        break;
    case Pattern::Server:
        ep.server = build_server(id);
        break;
    }
    return ep;
}

}  // namespace fbx::comm
