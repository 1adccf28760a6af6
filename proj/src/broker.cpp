#include "fbx/broker.hpp"

#include <algorithm>

#include "fbx/base64.hpp"

namespace fbx::xmpp {

Broker::Broker(uint16_t port, std::vector<Account> accounts)
    : listener_("0.0.0.0", port) {
    for (Account& a : accounts)
        accounts_[a.bare.bare()] = a.password;
    accept_thread_ = std::thread([this] { accept_loop(); });
}

Broker::~Broker() { stop(); }

void Broker::stop() {
    std::vector<std::pair<std::thread, std::shared_ptr<StanzaStream>>> threads;
    {
        std::lock_guard lock(mutex_);
        if (closed_)
            return;
        closed_ = true;
        threads.swap(session_threads_);
    }
    listener_.close();
    if (accept_thread_.joinable())
        accept_thread_.join();
    for (auto& [t, s] : threads)
        s->shutdown();
    for (auto& [t, s] : threads)
        if (t.joinable())
            t.join();
}

void Broker::accept_loop() {
    while (auto conn = listener_.accept()) {
        auto stream = std::make_shared<StanzaStream>(std::move(*conn));
        std::lock_guard lock(mutex_);
        if (closed_) {
            stream->shutdown();
            break;
        }
        session_threads_.emplace_back(
            std::thread([this, stream] { session_loop(stream); }), stream);
    }
}

namespace {

std::optional<std::pair<Jid, std::string>> parse_auth(const XmlNode& auth) {
    const std::string* ns = auth.attr("xmlns");
    if (auth.name != "auth" || !ns || *ns != "forte-auth")
        return std::nullopt;
    std::vector<uint8_t> raw;
    try {
        raw = comm::b64_decode(auth.text());
    } catch (const comm::Base64Error&) {
        return std::nullopt;
    }
    auto nul = std::find(raw.begin(), raw.end(), uint8_t(0));
    if (nul == raw.end())
        return std::nullopt;
    try {
        Jid bare = Jid::parse(std::string(raw.begin(), nul));
        std::string password(nul + 1, raw.end());
        if (const std::string* res = auth.attr("resource"))
            bare.resource = *res;
        return std::make_pair(bare, password);
    } catch (const JidError&) {
        return std::nullopt;
    }
}

Stanza service_unavailable(const Stanza& request, const Jid& from) {
    Stanza err;
    err.kind = StanzaKind::Iq;
    err.iq_type = IqType::Error;
    err.id = request.id;
    err.from = from;
    err.to = request.from;
    XmlNode detail("error");
    detail.set_attr("type", "cancel");
    detail.add_child(XmlNode("service-unavailable"));
    err.payload.push_back(detail);
    return err;
}

}  // namespace

void Broker::session_loop(std::shared_ptr<StanzaStream> stream) {
    Jid bound;
    bool is_bound = false;
    try {
        stream->read_header(10000);
        stream->write_header("from", "localhost");
        std::optional<XmlNode> auth_elem = stream->read_element(10000);
        if (!auth_elem)
            return;
        auto creds = parse_auth(*auth_elem);
        bool ok = false;
        if (creds) {
            std::lock_guard lock(mutex_);
            auto it = accounts_.find(creds->first.bare());
            ok = it != accounts_.end() && it->second == creds->second;
        }
        if (!ok) {
            stream->write_element(XmlNode("failure"));
            stream->write_stream_close();
            return;
        }
        bound = creds->first;
        is_bound = true;
        {
            std::lock_guard lock(mutex_);
            // resource conflict: the new session replaces the old one
            auto it = routes_.find(bound.full());
            if (it != routes_.end())
                it->second->stream->shutdown();
            auto ctx = std::make_shared<SessionCtx>();
            ctx->stream = stream;
            ctx->jid = bound;
            routes_[bound.full()] = ctx;
        }
        stream->write_element(XmlNode("success"));

        while (auto elem = stream->read_element()) {
            Stanza st;
            try {
                st = Stanza::from_xml(*elem);
            } catch (const std::exception&) {
                ++dropped_;
                continue;
            }
            st.from = bound;  // the broker stamps the sender
            std::lock_guard lock(mutex_);
            route_locked(st, bound);
        }
    } catch (const std::exception&) {
        // connection error path falls through to unbind
    }
    if (is_bound) {
        std::lock_guard lock(mutex_);
        auto it = routes_.find(bound.full());
        if (it != routes_.end() && it->second->stream == stream)
            routes_.erase(it);
    }
}

void Broker::deliver_locked(const std::string& full, const Stanza& st) {
    auto it = routes_.find(full);
    if (it == routes_.end()) {
        ++dropped_;
        return;
    }
    try {
        it->second->stream->write_element(st.to_xml());
    } catch (const std::exception&) {
        ++dropped_;
    }
}

void Broker::route_locked(const Stanza& st, const Jid& sender) {
    if (st.kind == StanzaKind::Presence) {
        handle_presence_locked(st, sender);
        return;
    }
    if (st.kind == StanzaKind::Iq) {
        if (!st.to) {
            ++dropped_;
            return;
        }
        auto it = routes_.find(st.to->full());
        if (it == routes_.end()) {
            if (st.iq_type == IqType::Get || st.iq_type == IqType::Set)
                deliver_locked(sender.full(), service_unavailable(st, *st.to));
            else
                ++dropped_;
            return;
        }
        deliver_locked(st.to->full(), st);
        return;
    }
    // message stanzas: full-JID routing only
    if (st.to)
        deliver_locked(st.to->full(), st);
    else
        ++dropped_;
}

void Broker::handle_presence_locked(Stanza st, const Jid& sender) {
    switch (st.presence_type) {
    case PresenceType::Subscribe: {
        if (!st.to) {
            ++dropped_;
            return;
        }
        std::string publisher = st.to->bare();
        if (!accounts_.count(publisher)) {
            Stanza deny;
            deny.kind = StanzaKind::Presence;
            deny.presence_type = PresenceType::Unsubscribed;
            deny.from = *st.to;
            deny.to = sender;
            deliver_locked(sender.full(), deny);
            return;
        }
        auto& roster = rosters_[publisher];
        std::string contact = sender.bare();
        bool known = std::any_of(roster.begin(), roster.end(),
                                 [&](const auto& e) { return e.first == contact; });
        if (!known) {
            roster.emplace_back(contact, SubState::Pending);
            ++roster_versions_[publisher];
        }
        // hand the request to every online session of the publisher
        for (auto& [full, ctx] : routes_)
            if (ctx->jid.bare() == publisher)
                deliver_locked(full, st);
        return;
    }
    case PresenceType::Subscribed: {
        if (!st.to) {
            ++dropped_;
            return;
        }
        std::string publisher = sender.bare();
        std::string contact = st.to->bare();
        auto& roster = rosters_[publisher];
        for (auto& entry : roster) {
            if (entry.first == contact && entry.second != SubState::Both) {
                entry.second = SubState::Both;
                ++roster_versions_[publisher];
            }
        }
        for (auto& [full, ctx] : routes_)
            if (ctx->jid.bare() == contact)
                deliver_locked(full, st);
        return;
    }
    case PresenceType::Unsubscribed: {
        if (st.to)
            for (auto& [full, ctx] : routes_)
                if (ctx->jid.bare() == st.to->bare())
                    deliver_locked(full, st);
        return;
    }
    case PresenceType::Available: {
        if (st.to) {
            deliver_locked(st.to->full(), st);
            return;
        }
        // data publish: fan out to roster contacts in state both that
        // are online; offline contacts are skipped
        auto it = rosters_.find(sender.bare());
        if (it == rosters_.end())
            return;
        for (const auto& [contact, state] : it->second) {
            if (state != SubState::Both)
                continue;
            for (auto& [full, ctx] : routes_) {
                if (ctx->jid.bare() == contact) {
                    Stanza copy = st;
                    copy.to = ctx->jid;
                    deliver_locked(full, copy);
                }
            }
        }
        return;
    }
    }
}

std::vector<std::pair<std::string, SubState>> Broker::roster(
    const std::string& bare) const {
    std::lock_guard lock(mutex_);
    auto it = rosters_.find(bare);
    return it == rosters_.end() ? std::vector<std::pair<std::string, SubState>>{}
                                : it->second;
}

uint64_t Broker::roster_version(const std::string& bare) const {
    std::lock_guard lock(mutex_);
    auto it = roster_versions_.find(bare);
    return it == roster_versions_.end() ? 0 : it->second;
}

bool Broker::online(const std::string& full_jid) const {
    std::lock_guard lock(mutex_);
    return routes_.count(full_jid) > 0;
}

size_t Broker::session_count() const {
    std::lock_guard lock(mutex_);
    return routes_.size();
}

}  // namespace fbx::xmpp
