#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fbx::net {

class NetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TimeoutError : public NetError {
public:
    using NetError::NetError;
};

// Thin RAII wrappers over POSIX sockets. All send/receive paths feed
// the raw byte counters in fbx::netstats.

class TcpStream {
public:
    TcpStream() = default;
    explicit TcpStream(int fd) : fd_(fd) {}
    TcpStream(TcpStream&& o) noexcept;
    TcpStream& operator=(TcpStream&& o) noexcept;
    TcpStream(const TcpStream&) = delete;
    TcpStream& operator=(const TcpStream&) = delete;
    ~TcpStream();

    static TcpStream connect(const std::string& host, uint16_t port,
                             int timeout_ms = 5000);

    bool valid() const { return fd_ >= 0; }
    void write_all(std::span<const uint8_t> data);
    void write_all(std::string_view data);
    // Reads at most buf.size() bytes. Returns 0 on orderly shutdown.
    // timeout_ms < 0 blocks indefinitely; expiry throws TimeoutError.
    size_t read_some(std::span<uint8_t> buf, int timeout_ms = -1);
    void read_exact(std::span<uint8_t> buf, int timeout_ms = -1);
    void shutdown();  // unblocks any reader
    void close();

private:
    int fd_ = -1;
};

class TcpListener {
public:
    TcpListener() = default;
    // port 0 picks an ephemeral port, readable via port().
    TcpListener(const std::string& host, uint16_t port);
    TcpListener(TcpListener&& o) noexcept;
    TcpListener& operator=(TcpListener&& o) noexcept;
    TcpListener(const TcpListener&) = delete;
    ~TcpListener();

    uint16_t port() const { return port_; }
    // Returns nullopt when the listener has been closed.
    std::optional<TcpStream> accept();
    void close();

private:
    int fd_ = -1;
    uint16_t port_ = 0;
};

class UdpSocket {
public:
    UdpSocket() = default;
    UdpSocket(UdpSocket&& o) noexcept;
    UdpSocket& operator=(UdpSocket&& o) noexcept;
    UdpSocket(const UdpSocket&) = delete;
    ~UdpSocket();

    static UdpSocket sender(const std::string& host, uint16_t port);
    // Binds the port; joins `host` on loopback when it is a multicast
    // group address.
    static UdpSocket receiver(const std::string& host, uint16_t port);

    uint16_t port() const { return port_; }
    void send(std::span<const uint8_t> datagram);
    // Returns nullopt after wake() has been called. Callers must join
    // the receiving thread before close().
    std::optional<std::vector<uint8_t>> recv();
    void wake();  // unblocks a pending recv, callable from any thread
    void close();

private:
    int fd_ = -1;
    int wake_fd_ = -1;
    uint16_t port_ = 0;
    // sender destination
    uint32_t dest_addr_ = 0;
    uint16_t dest_port_ = 0;
};

bool is_multicast(const std::string& host);
uint32_t parse_ipv4(const std::string& host);  // throws NetError

}  // namespace fbx::net
