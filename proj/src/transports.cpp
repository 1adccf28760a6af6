#include "fbx/transports.hpp"

#include <charconv>

#include "fbx/netstats.hpp"

namespace fbx::net {

IpParams IpParams::parse(const std::vector<std::string>& params) {
    if (params.size() != 2)
        throw NetError("ip layer expects host:port, got " +
                       std::to_string(params.size()) + " parameter(s)");
    IpParams out;
    out.host = params[0];
    parse_ipv4(out.host);  // validate
    int port = 0;
    auto [p, ec] = std::from_chars(params[1].data(),
                                   params[1].data() + params[1].size(), port);
    if (ec != std::errc{} || p != params[1].data() + params[1].size() ||
        port < 1 || port > 65535)
        throw NetError("bad port: " + params[1]);
    out.port = static_cast<uint16_t>(port);
    return out;
}

// ---- UDP ----

UdpPublisher::UdpPublisher(const IpParams& params)
    : sock_(UdpSocket::sender(params.host, params.port)) {}

void UdpPublisher::publish(std::span<const uint8_t> frame) {
    if (frame.size() > kMaxUdpFrame)
        throw NetError("frame exceeds " + std::to_string(kMaxUdpFrame) + " bytes");
    sock_.send(frame);
    netstats::add_msg_sent(netstats::Transport::Udp, frame.size());
}

UdpSubscription::UdpSubscription(const IpParams& params,
                                 std::function<void(std::vector<uint8_t>)> on_frame)
    : sock_(UdpSocket::receiver(params.host, params.port)) {
    rx_thread_ = std::thread([this, cb = std::move(on_frame)] {
        while (auto frame = sock_.recv()) {
            netstats::add_msg_received(netstats::Transport::Udp, frame->size());
            cb(std::move(*frame));
        }
    });
}

UdpSubscription::~UdpSubscription() { close(); }

void UdpSubscription::close() {
    if (closed_)
        return;
    closed_ = true;
    sock_.wake();
    if (rx_thread_.joinable())
        rx_thread_.join();
    sock_.close();
}

// ---- TCP ----

std::vector<uint8_t> frame_with_length(std::span<const uint8_t> frame) {
    if (frame.size() > 65535)
        throw NetError("frame exceeds 2-byte length prefix");
    std::vector<uint8_t> out;
    out.reserve(frame.size() + 2);
    out.push_back(static_cast<uint8_t>(frame.size() >> 8));
    out.push_back(static_cast<uint8_t>(frame.size() & 0xff));
    out.insert(out.end(), frame.begin(), frame.end());
    return out;
}

namespace {

std::vector<uint8_t> read_frame(TcpStream& stream, int timeout_ms) {
    uint8_t len_buf[2];
    stream.read_exact(std::span<uint8_t>(len_buf, 2), timeout_ms);
    size_t len = (static_cast<size_t>(len_buf[0]) << 8) | len_buf[1];
    std::vector<uint8_t> frame(len);
    if (len)
        stream.read_exact(frame, timeout_ms);
    netstats::add_msg_received(netstats::Transport::Tcp, len + 2);
    return frame;
}

void write_frame(TcpStream& stream, std::span<const uint8_t> frame) {
    std::vector<uint8_t> rec = frame_with_length(frame);
    stream.write_all(rec);
    netstats::add_msg_sent(netstats::Transport::Tcp, rec.size());
}

}  // namespace

TcpFramedServer::TcpFramedServer(const IpParams& params, Handler on_request)
    : listener_(params.host, params.port), handler_(std::move(on_request)) {
    accept_thread_ = std::thread([this] {
        while (auto stream = listener_.accept()) {
            auto s = std::make_shared<TcpStream>(std::move(*stream));
            std::lock_guard lock(conn_mutex_);
            if (closed_) {
                s->close();
                break;
            }
            conns_.emplace_back(std::thread([this, s] { serve_connection(*s); }), s);
        }
    });
}

void TcpFramedServer::serve_connection(TcpStream& stream) {
    try {
        for (;;) {
            std::vector<uint8_t> request = read_frame(stream, -1);
            std::vector<uint8_t> response = handler_(request);
            write_frame(stream, response);
        }
    } catch (const std::exception&) {
        // peer gone, malformed framing, or handler failure
    }
}

TcpFramedServer::~TcpFramedServer() { close(); }

void TcpFramedServer::close() {
    std::vector<std::pair<std::thread, std::shared_ptr<TcpStream>>> conns;
    {
        std::lock_guard lock(conn_mutex_);
        if (closed_)
            return;
        closed_ = true;
        conns.swap(conns_);
    }
    listener_.close();
    if (accept_thread_.joinable())
        accept_thread_.join();
    for (auto& [t, s] : conns)
        s->shutdown();
    for (auto& [t, s] : conns)
        if (t.joinable())
            t.join();
}

TcpFramedClient::TcpFramedClient(const IpParams& params)
    : stream_(TcpStream::connect(params.host, params.port)) {}

std::vector<uint8_t> TcpFramedClient::request(std::span<const uint8_t> frame,
                                              int timeout_ms) {
    std::lock_guard lock(mutex_);
    write_frame(stream_, frame);
    return read_frame(stream_, timeout_ms);
}

void TcpFramedClient::close() {
    std::lock_guard lock(mutex_);
    stream_.shutdown();
    stream_.close();
}

}  // namespace fbx::net
