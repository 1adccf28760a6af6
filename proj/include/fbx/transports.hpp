#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

#include "fbx/socket.hpp"

namespace fbx::net {

// Host/port pair from the `ip[...]` layer parameters.
struct IpParams {
    std::string host;
    uint16_t port = 0;

    static IpParams parse(const std::vector<std::string>& params);
};

constexpr size_t kMaxUdpFrame = 1400;

// One datagram per frame, payload = frame octets. Multicast when the
// host is in 224.0.0.0/4, unicast otherwise.
class UdpPublisher {
public:
    explicit UdpPublisher(const IpParams& params);
    void publish(std::span<const uint8_t> frame);  // throws on oversize

private:
    UdpSocket sock_;
};

// Binds/joins and delivers each received datagram as one frame on a
// dedicated receive thread. Callbacks must be enqueue-only.
class UdpSubscription {
public:
    UdpSubscription(const IpParams& params,
                    std::function<void(std::vector<uint8_t>)> on_frame);
    ~UdpSubscription();
    void close();
    uint16_t port() const { return sock_.port(); }

private:
    UdpSocket sock_;
    std::thread rx_thread_;
    bool closed_ = false;
};

// Stream framing: repeated (len:2 BE, frame:len) records. A request
// whose handler throws is answered by closing the connection.
class TcpFramedServer {
public:
    using Handler = std::function<std::vector<uint8_t>(const std::vector<uint8_t>&)>;

    TcpFramedServer(const IpParams& params, Handler on_request);
    ~TcpFramedServer();
    void close();
    uint16_t port() const { return listener_.port(); }

private:
    void serve_connection(TcpStream& stream);

    TcpListener listener_;
    Handler handler_;
    std::thread accept_thread_;
    std::mutex conn_mutex_;
    std::vector<std::pair<std::thread, std::shared_ptr<TcpStream>>> conns_;
    bool closed_ = false;
};

// Holds one connection open and reuses it across requests.
class TcpFramedClient {
public:
    explicit TcpFramedClient(const IpParams& params);  // connects eagerly
    std::vector<uint8_t> request(std::span<const uint8_t> frame, int timeout_ms);
    void close();

private:
    TcpStream stream_;
    std::mutex mutex_;
};

std::vector<uint8_t> frame_with_length(std::span<const uint8_t> frame);

}  // namespace fbx::net
