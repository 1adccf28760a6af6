#include "fbx/netstats.hpp"

namespace fbx::netstats {

namespace {

Counters g_counters[3];
std::atomic<uint64_t> g_raw_sent{0};
std::atomic<uint64_t> g_raw_recv{0};

}  // namespace

Counters& counters(Transport t) {
    return g_counters[static_cast<int>(t)];
}

void add_msg_sent(Transport t, size_t bytes) {
    counters(t).msg_sent_bytes += bytes;
    counters(t).msgs_sent += 1;
}

void add_msg_received(Transport t, size_t bytes) {
    counters(t).msg_recv_bytes += bytes;
    counters(t).msgs_recv += 1;
}

void add_raw_sent(size_t bytes) { g_raw_sent += bytes; }
void add_raw_received(size_t bytes) { g_raw_recv += bytes; }
uint64_t raw_sent() { return g_raw_sent; }
uint64_t raw_received() { return g_raw_recv; }

void reset_all() {
    for (Counters& c : g_counters) {
        c.msg_sent_bytes = 0;
        c.msg_recv_bytes = 0;
        c.msgs_sent = 0;
        c.msgs_recv = 0;
    }
    g_raw_sent = 0;
    g_raw_recv = 0;
}

}  // namespace fbx::netstats
