#include <atomic>
#include <chrono>
#include <condition_variable>
#include <mutex>
#include <random>
#include <thread>

#include "doctest.h"
#include "fbx/netstats.hpp"
#include "fbx/transports.hpp"

using namespace fbx;
using namespace fbx::net;
using namespace std::chrono_literals;

namespace {

struct FrameCollector {
    std::mutex m;
    std::condition_variable cv;
    std::vector<std::vector<uint8_t>> frames;

    void push(std::vector<uint8_t> f) {
        std::lock_guard lock(m);
        frames.push_back(std::move(f));
        cv.notify_all();
    }
    bool wait_for_count(size_t n, int timeout_ms = 2000) {
        std::unique_lock lock(m);
        return cv.wait_for(lock, std::chrono::milliseconds(timeout_ms),
                           [&] { return frames.size() >= n; });
    }
};

}  // namespace

TEST_CASE("ip params parsing") {
    IpParams p = IpParams::parse({"192.168.20.1", "61499"});
    CHECK(p.host == "192.168.20.1");
    CHECK(p.port == 61499);
    CHECK_THROWS_AS(IpParams::parse({"192.168.20.1"}), NetError);
    CHECK_THROWS_AS(IpParams::parse({"nothost", "1"}), NetError);
    CHECK_THROWS_AS(IpParams::parse({"127.0.0.1", "0"}), NetError);
    CHECK_THROWS_AS(IpParams::parse({"127.0.0.1", "70000"}), NetError);
}

TEST_CASE("udp loopback publish/subscribe") {
    FrameCollector rx;
    UdpSubscription sub({"127.0.0.1", 0}, [&](std::vector<uint8_t> f) { rx.push(std::move(f)); });
    UdpPublisher pub({"127.0.0.1", sub.port()});

    pub.publish(std::vector<uint8_t>{0x41});
    REQUIRE(rx.wait_for_count(1));
    CHECK(rx.frames[0] == std::vector<uint8_t>{0x41});

    for (int i = 0; i < 3; ++i)
        pub.publish(std::vector<uint8_t>{static_cast<uint8_t>(i)});
    REQUIRE(rx.wait_for_count(4));

    sub.close();
    pub.publish(std::vector<uint8_t>{9});
    std::this_thread::sleep_for(50ms);
    CHECK(rx.frames.size() == 4);  // no callbacks after close
}

TEST_CASE("udp oversize frame rejected") {
    UdpPublisher pub({"127.0.0.1", 61000});
    CHECK_THROWS_AS(pub.publish(std::vector<uint8_t>(1401)), NetError);
    CHECK_NOTHROW(pub.publish(std::vector<uint8_t>(1400)));
}

TEST_CASE("udp multicast delivers to two subscribers") {
    const std::string group = "239.255.0.7";
    FrameCollector a, b;
    try {
        UdpSubscription s1({group, 61007}, [&](std::vector<uint8_t> f) { a.push(std::move(f)); });
        UdpSubscription s2({group, 61007}, [&](std::vector<uint8_t> f) { b.push(std::move(f)); });
        UdpPublisher pub({group, 61007});
        pub.publish(std::vector<uint8_t>{1, 2, 3});
        bool got_a = a.wait_for_count(1);
        bool got_b = b.wait_for_count(1);
        CHECK(got_a);
        CHECK(got_b);
        if (got_a)
            CHECK(a.frames[0] == std::vector<uint8_t>{1, 2, 3});
    } catch (const NetError& e) {
        MESSAGE("multicast unavailable in this environment: ", e.what());
    }
}

TEST_CASE("tcp request/response with identity server") {
    TcpFramedServer server({"127.0.0.1", 0}, [](const std::vector<uint8_t>& f) { return f; });
    TcpFramedClient client({"127.0.0.1", server.port()});

    CHECK(client.request(std::vector<uint8_t>{}, 1000).empty());
    CHECK(client.request(std::vector<uint8_t>{0x41}, 1000) == std::vector<uint8_t>{0x41});

    // two sequential requests on one connection stay ordered
    auto r1 = client.request(std::vector<uint8_t>{1}, 1000);
    auto r2 = client.request(std::vector<uint8_t>{2}, 1000);
    CHECK(r1 == std::vector<uint8_t>{1});
    CHECK(r2 == std::vector<uint8_t>{2});
}

TEST_CASE("tcp frame transparency across sizes") {
    TcpFramedServer server({"127.0.0.1", 0}, [](const std::vector<uint8_t>& f) { return f; });
    TcpFramedClient client({"127.0.0.1", server.port()});
    std::mt19937 rng(77);
    for (size_t size : {size_t(0), size_t(1), size_t(2), size_t(1399), size_t(1400)}) {
        std::vector<uint8_t> f(size);
        for (uint8_t& x : f)
            x = static_cast<uint8_t>(rng());
        CHECK(client.request(f, 2000) == f);
    }
}

TEST_CASE("tcp connect to closed port fails") {
    uint16_t unused;
    {
        TcpListener probe("127.0.0.1", 0);
        unused = probe.port();
    }
    CHECK_THROWS_AS(TcpFramedClient({"127.0.0.1", unused}), NetError);
}

TEST_CASE("tcp request timeout against a stalled server") {
    TcpFramedServer server({"127.0.0.1", 0}, [](const std::vector<uint8_t>& f) {
        std::this_thread::sleep_for(500ms);
        return f;
    });
    TcpFramedClient client({"127.0.0.1", server.port()});
    auto t0 = std::chrono::steady_clock::now();
    CHECK_THROWS_AS(client.request(std::vector<uint8_t>{1}, 100), TimeoutError);
    auto dt = std::chrono::steady_clock::now() - t0;
    CHECK(dt < 400ms);
    client.close();
}

TEST_CASE("byte accounting matches raw socket counters for tcp") {
    netstats::reset_all();
    TcpFramedServer server({"127.0.0.1", 0}, [](const std::vector<uint8_t>& f) { return f; });
    TcpFramedClient client({"127.0.0.1", server.port()});
    for (int i = 0; i < 5; ++i)
        client.request(std::vector<uint8_t>(size_t(i * 7), 0xaa), 1000);
    auto& c = netstats::counters(netstats::Transport::Tcp);
    CHECK(c.msgs_sent == 10);   // 5 requests + 5 responses
    CHECK(c.msgs_recv == 10);
    CHECK(c.msg_sent_bytes == netstats::raw_sent());
    CHECK(c.msg_recv_bytes == netstats::raw_received());
    CHECK(c.msg_sent_bytes == c.msg_recv_bytes);
}
