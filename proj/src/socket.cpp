#include "fbx/socket.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/eventfd.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "fbx/netstats.hpp"

namespace fbx::net {

namespace {

[[noreturn]] void fail_errno(const std::string& what) {
    throw NetError(what + ": " + std::strerror(errno));
}

sockaddr_in make_addr(uint32_t addr_be, uint16_t port) {
    sockaddr_in sa{};
    sa.sin_family = AF_INET;
    sa.sin_addr.s_addr = addr_be;
    sa.sin_port = htons(port);
    return sa;
}

uint16_t bound_port(int fd) {
    sockaddr_in sa{};
    socklen_t len = sizeof(sa);
    if (::getsockname(fd, reinterpret_cast<sockaddr*>(&sa), &len) < 0)
        fail_errno("getsockname");
    return ntohs(sa.sin_port);
}

}  // namespace

uint32_t parse_ipv4(const std::string& host) {
    in_addr addr{};
    if (::inet_pton(AF_INET, host.c_str(), &addr) != 1)
        throw NetError("not an IPv4 address: " + host);
    return addr.s_addr;
}

bool is_multicast(const std::string& host) {
    uint32_t be = parse_ipv4(host);
    uint8_t first = ntohl(be) >> 24;
    return first >= 224 && first <= 239;
}

// ---- TcpStream ----

TcpStream::TcpStream(TcpStream&& o) noexcept : fd_(o.fd_) { o.fd_ = -1; }

TcpStream& TcpStream::operator=(TcpStream&& o) noexcept {
    if (this != &o) {
        close();
        fd_ = o.fd_;
        o.fd_ = -1;
    }
    return *this;
}

TcpStream::~TcpStream() { close(); }

TcpStream TcpStream::connect(const std::string& host, uint16_t port,
                             int timeout_ms) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0)
        fail_errno("socket");
    TcpStream stream(fd);
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    sockaddr_in sa = make_addr(parse_ipv4(host), port);
    if (::connect(fd, reinterpret_cast<sockaddr*>(&sa), sizeof(sa)) < 0)
        fail_errno("connect to " + host + ":" + std::to_string(port));
    (void)timeout_ms;
    return stream;
}

void TcpStream::write_all(std::span<const uint8_t> data) {
    size_t off = 0;
    while (off < data.size()) {
        ssize_t n = ::send(fd_, data.data() + off, data.size() - off, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR)
                continue;
            fail_errno("send");
        }
        off += static_cast<size_t>(n);
    }
    netstats::add_raw_sent(data.size());
}

void TcpStream::write_all(std::string_view data) {
    write_all(std::span<const uint8_t>(
        reinterpret_cast<const uint8_t*>(data.data()), data.size()));
}

size_t TcpStream::read_some(std::span<uint8_t> buf, int timeout_ms) {
    if (timeout_ms >= 0) {
        pollfd pfd{fd_, POLLIN, 0};
        int r = ::poll(&pfd, 1, timeout_ms);
        if (r < 0)
            fail_errno("poll");
        if (r == 0)
            throw TimeoutError("read timeout");
    }
    for (;;) {
        ssize_t n = ::recv(fd_, buf.data(), buf.size(), 0);
        if (n < 0) {
            if (errno == EINTR)
                continue;
            fail_errno("recv");
        }
        netstats::add_raw_received(static_cast<size_t>(n));
        return static_cast<size_t>(n);
    }
}

void TcpStream::read_exact(std::span<uint8_t> buf, int timeout_ms) {
    size_t off = 0;
    while (off < buf.size()) {
        size_t n = read_some(buf.subspan(off), timeout_ms);
        if (n == 0)
            throw NetError("connection closed mid-read");
        off += n;
    }
}

void TcpStream::shutdown() {
    if (fd_ >= 0)
        ::shutdown(fd_, SHUT_RDWR);
}

void TcpStream::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

// ---- TcpListener ----

TcpListener::TcpListener(const std::string& host, uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0)
        fail_errno("socket");
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in sa = make_addr(parse_ipv4(host), port);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&sa), sizeof(sa)) < 0) {
        int e = errno;
        ::close(fd_);
        fd_ = -1;
        errno = e;
        fail_errno("bind " + host + ":" + std::to_string(port));
    }
    if (::listen(fd_, 16) < 0)
        fail_errno("listen");
    port_ = bound_port(fd_);
}

TcpListener::TcpListener(TcpListener&& o) noexcept : fd_(o.fd_), port_(o.port_) {
    o.fd_ = -1;
}

TcpListener& TcpListener::operator=(TcpListener&& o) noexcept {
    if (this != &o) {
        close();
        fd_ = o.fd_;
        port_ = o.port_;
        o.fd_ = -1;
    }
    return *this;
}

TcpListener::~TcpListener() { close(); }

std::optional<TcpStream> TcpListener::accept() {
    int fd = ::accept(fd_, nullptr, nullptr);
    if (fd < 0)
        return std::nullopt;
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    return TcpStream(fd);
}

void TcpListener::close() {
    if (fd_ >= 0) {
        ::shutdown(fd_, SHUT_RDWR);
        ::close(fd_);
        fd_ = -1;
    }
}

// ---- UdpSocket ----

UdpSocket::UdpSocket(UdpSocket&& o) noexcept
    : fd_(o.fd_), wake_fd_(o.wake_fd_), port_(o.port_), dest_addr_(o.dest_addr_),
      dest_port_(o.dest_port_) {
    o.fd_ = -1;
    o.wake_fd_ = -1;
}

UdpSocket& UdpSocket::operator=(UdpSocket&& o) noexcept {
    if (this != &o) {
        close();
        fd_ = o.fd_;
        wake_fd_ = o.wake_fd_;
        port_ = o.port_;
        dest_addr_ = o.dest_addr_;
        dest_port_ = o.dest_port_;
        o.fd_ = -1;
        o.wake_fd_ = -1;
    }
    return *this;
}

UdpSocket::~UdpSocket() { close(); }

UdpSocket UdpSocket::sender(const std::string& host, uint16_t port) {
    UdpSocket s;
    s.fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (s.fd_ < 0)
        fail_errno("socket");
    s.dest_addr_ = parse_ipv4(host);
    s.dest_port_ = port;
    if (is_multicast(host)) {
        uint8_t loop = 1;
        ::setsockopt(s.fd_, IPPROTO_IP, IP_MULTICAST_LOOP, &loop, sizeof(loop));
        in_addr ifaddr{};
        ifaddr.s_addr = htonl(INADDR_LOOPBACK);
        ::setsockopt(s.fd_, IPPROTO_IP, IP_MULTICAST_IF, &ifaddr, sizeof(ifaddr));
    }
    return s;
}

UdpSocket UdpSocket::receiver(const std::string& host, uint16_t port) {
    UdpSocket s;
    s.fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (s.fd_ < 0)
        fail_errno("socket");
    int one = 1;
    ::setsockopt(s.fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    bool mc = is_multicast(host);
    sockaddr_in sa = make_addr(mc ? htonl(INADDR_ANY) : parse_ipv4(host), port);
    if (::bind(s.fd_, reinterpret_cast<sockaddr*>(&sa), sizeof(sa)) < 0)
        fail_errno("bind udp " + host + ":" + std::to_string(port));
    s.port_ = bound_port(s.fd_);
    s.wake_fd_ = ::eventfd(0, 0);
    if (s.wake_fd_ < 0)
        fail_errno("eventfd");
    if (mc) {
        ip_mreq mreq{};
        mreq.imr_multiaddr.s_addr = parse_ipv4(host);
        mreq.imr_interface.s_addr = htonl(INADDR_LOOPBACK);
        if (::setsockopt(s.fd_, IPPROTO_IP, IP_ADD_MEMBERSHIP, &mreq, sizeof(mreq)) < 0)
            fail_errno("join multicast group " + host);
    }
    return s;
}

void UdpSocket::send(std::span<const uint8_t> datagram) {
    sockaddr_in sa = make_addr(dest_addr_, dest_port_);
    ssize_t n = ::sendto(fd_, datagram.data(), datagram.size(), 0,
                         reinterpret_cast<sockaddr*>(&sa), sizeof(sa));
    if (n < 0)
        fail_errno("sendto");
    netstats::add_raw_sent(datagram.size());
}

std::optional<std::vector<uint8_t>> UdpSocket::recv() {
    for (;;) {
        pollfd pfds[2] = {{fd_, POLLIN, 0}, {wake_fd_, POLLIN, 0}};
        int r = ::poll(pfds, 2, -1);
        if (r < 0) {
            if (errno == EINTR)
                continue;
            return std::nullopt;
        }
        if (pfds[1].revents & POLLIN)
            return std::nullopt;
        if (!(pfds[0].revents & POLLIN))
            continue;
        std::vector<uint8_t> buf(2048);
        ssize_t n = ::recvfrom(fd_, buf.data(), buf.size(), 0, nullptr, nullptr);
        if (n < 0)
            return std::nullopt;
        buf.resize(static_cast<size_t>(n));
        netstats::add_raw_received(buf.size());
        return buf;
    }
}

void UdpSocket::wake() {
    if (wake_fd_ >= 0) {
        uint64_t one = 1;
        [[maybe_unused]] ssize_t n = ::write(wake_fd_, &one, sizeof(one));
    }
}

void UdpSocket::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
    if (wake_fd_ >= 0) {
        ::close(wake_fd_);
        wake_fd_ = -1;
    }
}

}  // namespace fbx::net
