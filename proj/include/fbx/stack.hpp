#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fbx/comm_id.hpp"
#include "fbx/value.hpp"

namespace fbx::comm {

class StackError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// encryption=1 parses fine but endpoint construction refuses it: TLS is
// out of scope and silently downgrading would misrepresent the link.
class TlsUnsupportedError : public StackError {
public:
    using StackError::StackError;
};

class ConnectError : public StackError {
public:
    using StackError::StackError;
};

enum class Pattern { Publish, Subscribe, Client, Server };

// The composed stack endpoints: values in, values out; BER (and the
// Base64 text bridge on xmpp) applied internally.
class PublisherEndpoint {
public:
    virtual ~PublisherEndpoint() = default;
    virtual void send(const std::vector<Value>& values) = 0;
};

class SubscriberEndpoint {
public:
    virtual ~SubscriberEndpoint() = default;
    // The callback runs in the transport's receiving context and must
    // only enqueue. Set it before traffic is expected.
    virtual void set_callback(std::function<void(std::vector<Value>)> fn) = 0;
    virtual uint64_t decode_errors() const = 0;
    virtual void close() = 0;
};

class ClientEndpoint {
public:
    virtual ~ClientEndpoint() = default;
    // Blocking exchange. An empty value list is sent as a data-less
    // request (empty TCP frame / iq get). Throws net::TimeoutError,
    // StackError, or CodecError.
    virtual std::vector<Value> request(const std::vector<Value>& values,
                                       int timeout_ms) = 0;
};

class ServerEndpoint {
public:
    virtual ~ServerEndpoint() = default;
    // The handler runs in the transport's context; it may block until
    // the application's response is available. A throwing handler turns
    // into the transport's error response.
    virtual void set_handler(
        std::function<std::vector<Value>(const std::vector<Value>&)> fn) = 0;
    virtual uint64_t decode_errors() const = 0;
    virtual void close() = 0;
};

// XMPP transport-layer parameters:
//   xmpp[encryption : own full JID : password : server IP]            (4)
//   xmpp[encryption : own full JID : password : server IP : peer JID] (5)
// The 5-param form is required for subscribe (peer = publisher) and
// client (peer = server). The broker port is 5222 unless overridden via
// the FBX_XMPP_PORT environment variable.
uint16_t xmpp_port();

std::unique_ptr<PublisherEndpoint> build_publisher(const CommID& id);
std::unique_ptr<SubscriberEndpoint> build_subscriber(const CommID& id);
std::unique_ptr<ClientEndpoint> build_client(const CommID& id);
std::unique_ptr<ServerEndpoint> build_server(const CommID& id);

struct CommEndpoint {
    std::unique_ptr<PublisherEndpoint> publisher;
    std::unique_ptr<SubscriberEndpoint> subscriber;
    std::unique_ptr<ClientEndpoint> client;
    std::unique_ptr<ServerEndpoint> server;
};

CommEndpoint build_stack(const CommID& id, Pattern pattern);

}  // namespace fbx::comm
