#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>

namespace fbx::netstats {

enum class Transport { Udp, Tcp, Xmpp };

// Lock-free counters feeding the benchmark harness. Message counters
// account whole application-layer messages (frame plus any framing
// prefix, or a serialized stanza); raw counters account bytes at the
// socket calls.
struct Counters {
    std::atomic<uint64_t> msg_sent_bytes{0};
    std::atomic<uint64_t> msg_recv_bytes{0};
    std::atomic<uint64_t> msgs_sent{0};
    std::atomic<uint64_t> msgs_recv{0};
};

Counters& counters(Transport t);

void add_msg_sent(Transport t, size_t bytes);
void add_msg_received(Transport t, size_t bytes);

void add_raw_sent(size_t bytes);
void add_raw_received(size_t bytes);
uint64_t raw_sent();
uint64_t raw_received();

void reset_all();

}  // namespace fbx::netstats
