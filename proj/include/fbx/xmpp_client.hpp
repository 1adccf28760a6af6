#pragma once

#include <chrono>
#include <condition_variable>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <thread>

#include "fbx/stanza.hpp"
#include "fbx/stream.hpp"

namespace fbx::xmpp {

class AuthError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// iq type=error came back for a request.
class IqErrorResponse : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A client session bound to one full JID. One reader thread delivers
// inbound stanzas; iq_request is a synchronous facade over it with an
// id-keyed rendezvous. A session auto-accepts presence subscription
// requests, which is what makes it usable as a publisher.
class Session {
public:
    Session(const std::string& server_ip, uint16_t port, const Jid& jid,
            const std::string& password, int timeout_ms = 5000);
    ~Session();
    void close();

    const Jid& jid() const { return jid_; }

    // pub/sub -------------------------------------------------------
    // Blocks until the publisher's subscribed reply (or unsubscribed /
    // timeout, which throw). Idempotent.
    void subscribe_to(const Jid& publisher, int timeout_ms = 5000);
    void publish_presence(const std::string& payload_b64);
    // Called from the reader thread for every inbound data presence;
    // must be enqueue-only.
    void set_data_handler(
        std::function<void(const Jid& from, const std::string& payload_b64)> fn);

    // client/server -------------------------------------------------
    // get when payload is absent, set otherwise. Returns the result's
    // Value text. Throws TimeoutError or IqErrorResponse.
    std::string iq_request(const Jid& server_jid,
                           const std::optional<std::string>& payload_b64,
                           int timeout_ms);
    // Handler receives the request payload (nullopt for a bare get) and
    // returns the response payload; a throwing handler yields iq error.
    void set_iq_handler(
        std::function<std::string(const std::optional<std::string>&)> fn);

private:
    void reader_loop();
    void handle_stanza(const Stanza& st);
    void send(const Stanza& st);

    Jid jid_;
    std::unique_ptr<StanzaStream> stream_;
    std::thread reader_;

    std::mutex mutex_;
    std::condition_variable cv_;
    struct PendingIq {
        bool done = false;
        bool is_error = false;
        std::string value;
    };
    std::map<std::string, PendingIq> pending_;
    std::set<std::string> subscribed_acks_;  // publisher bare JIDs
    std::set<std::string> subscribe_denials_;
    uint64_t next_id_ = 1;
    bool closed_ = false;

    std::function<void(const Jid&, const std::string&)> data_handler_;
    std::function<std::string(const std::optional<std::string>&)> iq_handler_;
};

}  // namespace fbx::xmpp
