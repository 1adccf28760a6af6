#pragma once

#include <string>
#include <vector>

#include "fbx/stack.hpp"

namespace fbx::bench {

class BenchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Transport { Udp, Tcp, Xmpp };
enum class Pattern { Async, Sync };

Transport parse_transport(const std::string& name);  // udp | tcp | xmpp
Pattern parse_pattern(const std::string& name);      // async | sync

// Sum of accounted application-layer bytes across every message needed
// to move one BOOL value end to end (sent side of each hop; request and
// response both counted for the sync pattern). Our framing has no
// separate acknowledgement message.
uint64_t measure_payload(Transport transport, Pattern pattern);

struct LatencyResult {
    size_t n = 0;         // measured transfers (after warm-up)
    size_t lost = 0;      // timed-out transfers, excluded
    bool flagged = false; // n == 0 or loss > 1%
    double min_ms = 0;
    double median_ms = 0;
    double p95_ms = 0;
};

// Timestamps send initiation and delivery for n transfers on localhost;
// the first 10 transfers are warm-up and excluded.
LatencyResult measure_latency(Transport transport, Pattern pattern, size_t n);

struct SoakResult {
    bool supported = false;
    std::vector<std::pair<double, long>> samples;  // (seconds, resident KiB)
    long warmup_end_kb = 0;    // resident size at the end of the 1 min warmup
    double slope_kb_per_min = 0;  // linear fit over the post-warmup window
    double growth_fraction = 0;   // (last - warmup_end) / warmup_end, >= 0
};

// Runs the voltage-publisher application pair in-process over the given
// transport with a scripted press every `press_period_ms`, sampling
// resident memory every `sample_period_s`.
SoakResult soak_run(int minutes, Transport transport, int sample_period_s = 10,
                    int press_period_ms = 2000);

long resident_kb();  // from /proc/self/status, -1 when unavailable

std::string payload_report();
std::string latency_report(size_t n);
std::string soak_report(const SoakResult& result);

}  // namespace fbx::bench
