#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "fbx/stanza.hpp"
#include "fbx/stream.hpp"

namespace fbx::xmpp {

struct Account {
    Jid bare;
    std::string password;
};

// Roster subscription states: a subscribe request parks the contact as
// pending; the publisher's subscribed reply upgrades it to both.
enum class SubState { Pending, Both };

// Minimal stanza router: account table, per-account rosters (in-memory
// only), and a full-JID routing table. It forwards stanzas and never
// inspects the forte payload.
class Broker {
public:
    // port 0 picks an ephemeral port, readable via port().
    Broker(uint16_t port, std::vector<Account> accounts);
    ~Broker();
    void stop();

    uint16_t port() const { return listener_.port(); }
    uint64_t dropped() const { return dropped_; }

    // test/introspection surface
    std::vector<std::pair<std::string, SubState>> roster(const std::string& bare) const;
    uint64_t roster_version(const std::string& bare) const;
    bool online(const std::string& full_jid) const;
    size_t session_count() const;

private:
    struct SessionCtx {
        std::shared_ptr<StanzaStream> stream;
        Jid jid;
    };

    void accept_loop();
    void session_loop(std::shared_ptr<StanzaStream> stream);
    // All three run under mutex_.
    void route_locked(const Stanza& st, const Jid& sender);
    void deliver_locked(const std::string& full, const Stanza& st);
    void handle_presence_locked(Stanza st, const Jid& sender);

    net::TcpListener listener_;
    std::thread accept_thread_;

    mutable std::mutex mutex_;
    std::map<std::string, std::string> accounts_;  // bare -> password
    std::map<std::string, std::vector<std::pair<std::string, SubState>>> rosters_;
    std::map<std::string, uint64_t> roster_versions_;
    std::map<std::string, std::shared_ptr<SessionCtx>> routes_;  // full -> session
    std::vector<std::pair<std::thread, std::shared_ptr<StanzaStream>>> session_threads_;
    std::atomic<uint64_t> dropped_{0};
    bool closed_ = false;
};

}  // namespace fbx::xmpp
