#include "fbx/xmpp_client.hpp"

#include "fbx/base64.hpp"

namespace fbx::xmpp {

Session::Session(const std::string& server_ip, uint16_t port, const Jid& jid,
                 const std::string& password, int timeout_ms)
    : jid_(jid) {
    stream_ = std::make_unique<StanzaStream>(
        net::TcpStream::connect(server_ip, port, timeout_ms));
    stream_->write_header("to", jid.domain);
    stream_->read_header(timeout_ms);

    std::string creds = jid.bare();
    creds.push_back('\0');
    creds += password;
    XmlNode auth("auth");
    auth.set_attr("xmlns", "forte-auth");
    if (!jid.resource.empty())
        auth.set_attr("resource", jid.resource);
    auth.add_text(comm::b64_encode(std::span<const uint8_t>(
        reinterpret_cast<const uint8_t*>(creds.data()), creds.size())));
    stream_->write_element(auth);

    std::optional<XmlNode> reply = stream_->read_element(timeout_ms);
    if (!reply)
        throw net::NetError("server closed the stream during auth");
    if (reply->name == "failure")
        throw AuthError("authentication failed for " + jid.full());
    if (reply->name != "success")
        throw AuthError("unexpected auth reply: <" + reply->name + ">");

    reader_ = std::thread([this] { reader_loop(); });
}

Session::~Session() { close(); }

void Session::close() {
    {
        std::lock_guard lock(mutex_);
        if (closed_)
            return;
        closed_ = true;
    }
    stream_->write_stream_close();
    stream_->shutdown();
    if (reader_.joinable())
        reader_.join();
    cv_.notify_all();
}

void Session::send(const Stanza& st) {
    stream_->write_element(st.to_xml());
}

void Session::reader_loop() {
    try {
        while (auto elem = stream_->read_element()) {
            Stanza st;
            try {
                st = Stanza::from_xml(*elem);
            } catch (const std::exception&) {
                continue;
            }
            handle_stanza(st);
        }
    } catch (const std::exception&) {
        // connection dropped
    }
    std::lock_guard lock(mutex_);
    for (auto& [id, slot] : pending_) {
        if (!slot.done) {
            slot.done = true;
            slot.is_error = true;
            slot.value = "connection closed";
        }
    }
    cv_.notify_all();
}

void Session::handle_stanza(const Stanza& st) {
    if (st.kind == StanzaKind::Iq) {
        switch (st.iq_type) {
        case IqType::Result:
        case IqType::Error: {
            std::lock_guard lock(mutex_);
            auto it = pending_.find(st.id);
            if (it == pending_.end())
                return;  // mismatched id: keep waiting
            it->second.done = true;
            it->second.is_error = st.iq_type == IqType::Error;
            it->second.value = st.value_text().value_or("");
            cv_.notify_all();
            return;
        }
        case IqType::Get:
        case IqType::Set: {
            std::function<std::string(const std::optional<std::string>&)> handler;
            {
                std::lock_guard lock(mutex_);
                handler = iq_handler_;
            }
            Stanza reply;
            reply.kind = StanzaKind::Iq;
            reply.id = st.id;
            reply.to = st.from;
            if (!handler) {
                reply.iq_type = IqType::Error;
            } else {
                std::optional<std::string> payload;
                if (st.iq_type == IqType::Set)
                    payload = st.value_text().value_or("");
                try {
                    reply.iq_type = IqType::Result;
                    reply.payload.push_back(make_value_elem(handler(payload)));
                } catch (const std::exception&) {
                    reply.iq_type = IqType::Error;
                    reply.payload.clear();
                }
            }
            try {
                send(reply);
            } catch (const std::exception&) {
            }
            return;
        }
        }
        return;
    }
    if (st.kind != StanzaKind::Presence || !st.from)
        return;
    switch (st.presence_type) {
    case PresenceType::Subscribe: {
        // auto-accept: this is the publisher half of the handshake
        Stanza accept;
        accept.kind = StanzaKind::Presence;
        accept.presence_type = PresenceType::Subscribed;
        accept.to = st.from->bare_jid();
        try {
            send(accept);
        } catch (const std::exception&) {
        }
        return;
    }
    case PresenceType::Subscribed: {
        std::lock_guard lock(mutex_);
        subscribed_acks_.insert(st.from->bare());
        cv_.notify_all();
        return;
    }
    case PresenceType::Unsubscribed: {
        std::lock_guard lock(mutex_);
        subscribe_denials_.insert(st.from->bare());
        cv_.notify_all();
        return;
    }
    case PresenceType::Available: {
        std::function<void(const Jid&, const std::string&)> handler;
        {
            std::lock_guard lock(mutex_);
            handler = data_handler_;
        }
        if (handler) {
            if (std::optional<std::string> text = st.value_text())
                handler(*st.from, *text);
        }
        return;
    }
    }
}

void Session::subscribe_to(const Jid& publisher, int timeout_ms) {
    {
        std::lock_guard lock(mutex_);
        if (subscribed_acks_.count(publisher.bare()))
            return;
        subscribe_denials_.erase(publisher.bare());
    }
    Stanza req;
    req.kind = StanzaKind::Presence;
    req.presence_type = PresenceType::Subscribe;
    req.to = publisher.bare_jid();
    send(req);

    std::unique_lock lock(mutex_);
    bool done = cv_.wait_for(lock, std::chrono::milliseconds(timeout_ms), [&] {
        return subscribed_acks_.count(publisher.bare()) ||
               subscribe_denials_.count(publisher.bare()) || closed_;
    });
    if (subscribed_acks_.count(publisher.bare()))
        return;
    if (subscribe_denials_.count(publisher.bare()))
        throw net::NetError("subscription refused by " + publisher.bare());
    if (!done || closed_)
        throw net::TimeoutError("no subscription ack from " + publisher.bare());
    throw net::TimeoutError("no subscription ack from " + publisher.bare());
}

void Session::publish_presence(const std::string& payload_b64) {
    Stanza st;
    st.kind = StanzaKind::Presence;
    st.payload.push_back(make_value_elem(payload_b64));
    send(st);
}

void Session::set_data_handler(
    std::function<void(const Jid&, const std::string&)> fn) {
    std::lock_guard lock(mutex_);
    data_handler_ = std::move(fn);
}

void Session::set_iq_handler(
    std::function<std::string(const std::optional<std::string>&)> fn) {
    std::lock_guard lock(mutex_);
    iq_handler_ = std::move(fn);
}

std::string Session::iq_request(const Jid& server_jid,
                                const std::optional<std::string>& payload_b64,
                                int timeout_ms) {
    std::string id;
    {
        std::lock_guard lock(mutex_);
        id = std::to_string(next_id_++);
        pending_[id] = PendingIq{};
    }
    Stanza req;
    req.kind = StanzaKind::Iq;
    req.iq_type = payload_b64 ? IqType::Set : IqType::Get;
    req.id = id;
    req.to = server_jid;
    req.payload.push_back(make_value_elem(payload_b64.value_or("")));
    send(req);

    std::unique_lock lock(mutex_);
    bool done = cv_.wait_for(lock, std::chrono::milliseconds(timeout_ms),
                             [&] { return pending_[id].done; });
    PendingIq slot = pending_[id];
    pending_.erase(id);
    if (!done)
        throw net::TimeoutError("iq request " + id + " timed out");
    if (slot.is_error)
        throw IqErrorResponse("iq error for request " + id +
                              (slot.value.empty() ? "" : ": " + slot.value));
    return slot.value;
}

}  // namespace fbx::xmpp
