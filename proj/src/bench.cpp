#include "fbx/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "fbx/broker.hpp"
#include "fbx/netdef.hpp"
#include "fbx/netstats.hpp"
#include "fbx/runner.hpp"

namespace fbx::bench {

namespace {

using namespace std::chrono_literals;
using clock_type = std::chrono::steady_clock;

uint16_t next_port() {
    static std::atomic<uint16_t> port{48200};
    return port.fetch_add(1);
}

std::vector<xmpp::Account> bench_accounts() {
    return {{xmpp::Jid::parse("pub@localhost"), "pw"},
            {xmpp::Jid::parse("sub@localhost"), "pw"},
            {xmpp::Jid::parse("srv@localhost"), "pw"}};
}

// One ready-to-measure transfer path. For async, send_one() publishes a
// BOOL and blocks until the subscriber callback fires; for sync it runs
// one request/response exchange.
struct Rig {
    std::unique_ptr<xmpp::Broker> broker;
    std::string saved_port_env;
    comm::CommEndpoint tx;
    comm::CommEndpoint echo;
    std::mutex mutex;
    std::condition_variable cv;
    uint64_t received = 0;

    Rig(Transport transport, Pattern pattern) {
        if (transport == Transport::Xmpp) {
            broker = std::make_unique<xmpp::Broker>(0, bench_accounts());
            if (const char* old = std::getenv("FBX_XMPP_PORT"))
                saved_port_env = old;
            setenv("FBX_XMPP_PORT", std::to_string(broker->port()).c_str(), 1);
        }
        if (pattern == Pattern::Async) {
            std::string pub_id, sub_id;
            if (transport == Transport::Udp) {
                std::string addr = "127.0.0.1:" + std::to_string(next_port());
                pub_id = "fbdk[].ip[" + addr + "]";
                sub_id = pub_id;
            } else if (transport == Transport::Xmpp) {
                pub_id = "fbdk[].xmpp[0:pub@localhost/r:pw:127.0.0.1]";
                sub_id = "fbdk[].xmpp[0:sub@localhost/r:pw:127.0.0.1:pub@localhost/r]";
            } else {
                throw BenchError("tcp does not serve the async pattern");
            }
            tx.publisher = comm::build_publisher(comm::parse_comm_id(pub_id));
            echo.subscriber = comm::build_subscriber(comm::parse_comm_id(sub_id));
            echo.subscriber->set_callback([this](std::vector<Value>) {
                std::lock_guard lock(mutex);
                ++received;
                cv.notify_all();
            });
        } else {
            std::string clt_id, srv_id;
            if (transport == Transport::Tcp) {
                std::string addr = "127.0.0.1:" + std::to_string(next_port());
                srv_id = "fbdk[].ip[" + addr + "]";
                clt_id = srv_id;
            } else if (transport == Transport::Xmpp) {
                srv_id = "fbdk[].xmpp[0:srv@localhost/r:pw:127.0.0.1]";
                clt_id = "fbdk[].xmpp[0:sub@localhost/r:pw:127.0.0.1:srv@localhost/r]";
            } else {
                throw BenchError("udp does not serve the sync pattern");
            }
            echo.server = comm::build_server(comm::parse_comm_id(srv_id));
            echo.server->set_handler(
                [](const std::vector<Value>& v) { return v; });
            tx.client = comm::build_client(comm::parse_comm_id(clt_id));
        }
    }

    ~Rig() {
        if (echo.subscriber)
            echo.subscriber->close();
        if (echo.server)
            echo.server->close();
        tx = {};
        echo = {};
        broker.reset();
        if (!saved_port_env.empty())
            setenv("FBX_XMPP_PORT", saved_port_env.c_str(), 1);
        else
            unsetenv("FBX_XMPP_PORT");
    }

    // Returns false on a lost/timed-out transfer.
    bool send_one(int timeout_ms = 1000) {
        std::vector<Value> payload{Value::of_bool(true)};
        if (tx.publisher) {
            uint64_t target;
            {
                std::lock_guard lock(mutex);
                target = received + 1;
            }
            tx.publisher->send(payload);
            std::unique_lock lock(mutex);
            return cv.wait_for(lock, std::chrono::milliseconds(timeout_ms),
                               [&] { return received >= target; });
        }
        try {
            std::vector<Value> response = tx.client->request(payload, timeout_ms);
            return response == payload;
        } catch (const std::exception&) {
            return false;
        }
    }
};

uint64_t total_msg_sent_bytes() {
    uint64_t total = 0;
    for (auto t : {netstats::Transport::Udp, netstats::Transport::Tcp,
                   netstats::Transport::Xmpp})
        total += netstats::counters(t).msg_sent_bytes.load();
    return total;
}

double percentile(std::vector<double> sorted, double q) {
    if (sorted.empty())
        return 0;
    double idx = q * static_cast<double>(sorted.size() - 1);
    size_t lo = static_cast<size_t>(idx);
    size_t hi = std::min(lo + 1, sorted.size() - 1);
    double frac = idx - static_cast<double>(lo);
    return sorted[lo] * (1 - frac) + sorted[hi] * frac;
}

const char* transport_name(Transport t) {
    switch (t) {
    case Transport::Udp: return "udp";
    case Transport::Tcp: return "tcp";
    case Transport::Xmpp: return "xmpp";
    }
    return "?";
}

const char* pattern_name(Pattern p) {
    return p == Pattern::Async ? "async" : "sync";
}

// The two-device voltage-publisher network used by the soak, with the
// transport IDs substituted in.
std::string soak_netdef(Transport transport) {
    std::string pub_id, sub_id;
    if (transport == Transport::Udp) {
        std::string addr = "127.0.0.1:" + std::to_string(next_port());
        pub_id = sub_id = "fbdk[].ip[" + addr + "]";
    } else {
        pub_id = "fbdk[].xmpp[0:pub@localhost/r:pw:127.0.0.1]";
        sub_id = "fbdk[].xmpp[0:sub@localhost/r:pw:127.0.0.1:pub@localhost/r]";
    }
    std::string text = R"([devices]
netop = 127.0.0.1
cem = 127.0.0.1

[fbs]
CYCLE = E_CYCLE @netop DT=500
I_OV = IX @netop
I_NV = IX @netop
I_UV = IX @netop
OR_OV = OR2 @netop
OR_NV = OR2 @netop
OR_UV = OR2 @netop
RS_OV = RS @netop
RS_NV = RS @netop
RS_UV = RS @netop
PUB = PUBLISH_3 @netop ID=%PUB%
SUB = SUBSCRIBE_3 @cem ID=%SUB%
OR_C = OR2 @cem
OR_D = OR2 @cem
RS_C = RS @cem
RS_D = RS @cem
Q_C = QX @cem
Q_D = QX @cem

[events]
CYCLE.EO = I_OV.REQ
CYCLE.EO = I_NV.REQ
CYCLE.EO = I_UV.REQ
I_OV.IND = OR_OV.REQ
I_OV.IND = OR_NV.REQ
I_OV.IND = OR_UV.REQ
I_NV.IND = OR_OV.REQ
I_NV.IND = OR_NV.REQ
I_NV.IND = OR_UV.REQ
I_UV.IND = OR_OV.REQ
I_UV.IND = OR_NV.REQ
I_UV.IND = OR_UV.REQ
OR_OV.CNF = RS_OV.S
OR_NV.CNF = RS_NV.S
OR_UV.CNF = RS_UV.S
RS_OV.EO = PUB.REQ
RS_NV.EO = PUB.REQ
RS_UV.EO = PUB.REQ
SUB.IND = OR_C.REQ
SUB.IND = OR_D.REQ
OR_C.CNF = RS_C.S
OR_D.CNF = RS_D.S
RS_C.EO = Q_C.REQ
RS_D.EO = Q_D.REQ

[data]
I_NV.Q = OR_OV.IN1
I_UV.Q = OR_OV.IN2
I_OV.Q = OR_NV.IN1
I_UV.Q = OR_NV.IN2
I_OV.Q = OR_UV.IN1
I_NV.Q = OR_UV.IN2
I_OV.Q = RS_OV.S
I_NV.Q = RS_NV.S
I_UV.Q = RS_UV.S
OR_OV.OUT = RS_OV.R
OR_NV.OUT = RS_NV.R
OR_UV.OUT = RS_UV.R
RS_OV.Q = PUB.SD_1
RS_NV.Q = PUB.SD_2
RS_UV.Q = PUB.SD_3
SUB.RD_1 = RS_C.S
SUB.RD_2 = OR_C.IN1
SUB.RD_3 = OR_C.IN2
OR_C.OUT = RS_C.R
SUB.RD_3 = RS_D.S
SUB.RD_1 = OR_D.IN1
SUB.RD_2 = OR_D.IN2
OR_D.OUT = RS_D.R
RS_C.Q = Q_C.IN
RS_D.Q = Q_D.IN
)";
    auto replace = [&](const std::string& key, const std::string& value) {
        size_t pos = text.find(key);
        text.replace(pos, key.size(), value);
    };
    replace("%PUB%", pub_id);
    replace("%SUB%", sub_id);
    return text;
}

}  // namespace

Transport parse_transport(const std::string& name) {
    if (name == "udp") return Transport::Udp;
    if (name == "tcp") return Transport::Tcp;
    if (name == "xmpp") return Transport::Xmpp;
    throw BenchError("unknown transport '" + name + "'");
}

Pattern parse_pattern(const std::string& name) {
    if (name == "async") return Pattern::Async;
    if (name == "sync") return Pattern::Sync;
    throw BenchError("unknown pattern '" + name + "'");
}

uint64_t measure_payload(Transport transport, Pattern pattern) {
    Rig rig(transport, pattern);
    if (!rig.send_one())
        throw BenchError("payload transfer failed");
    netstats::reset_all();
    if (!rig.send_one())
        throw BenchError("payload transfer failed");
    return total_msg_sent_bytes();
}

LatencyResult measure_latency(Transport transport, Pattern pattern, size_t n) {
    LatencyResult result;
    if (n == 0) {
        result.flagged = true;
        return result;
    }
    Rig rig(transport, pattern);
    constexpr size_t kWarmup = 10;
    std::vector<double> samples;
    for (size_t i = 0; i < n + kWarmup; ++i) {
        auto t0 = clock_type::now();
        bool ok = rig.send_one();
        auto t1 = clock_type::now();
        if (i < kWarmup)
            continue;
        if (!ok) {
            ++result.lost;
            continue;
        }
        samples.push_back(
            std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    std::sort(samples.begin(), samples.end());
    result.n = samples.size();
    result.flagged = samples.empty() ||
                     result.lost * 100 > (result.lost + samples.size());
    if (!samples.empty()) {
        result.min_ms = samples.front();
        result.median_ms = percentile(samples, 0.5);
        result.p95_ms = percentile(samples, 0.95);
    }
    return result;
}

long resident_kb() {
    std::ifstream in("/proc/self/status");
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("VmRSS:", 0) == 0) {
            std::istringstream fields(line.substr(6));
            long kb = -1;
            fields >> kb;
            return kb;
        }
    }
    return -1;
}

SoakResult soak_run(int minutes, Transport transport, int sample_period_s,
                    int press_period_ms) {
    SoakResult result;
    if (resident_kb() < 0)
        return result;  // unsupported platform
    result.supported = true;
    if (minutes <= 0)
        return result;
    if (transport == Transport::Tcp)
        throw BenchError("the soak runs the async application (udp or xmpp)");

    std::unique_ptr<xmpp::Broker> broker;
    std::string saved_env;
    if (transport == Transport::Xmpp) {
        broker = std::make_unique<xmpp::Broker>(0, bench_accounts());
        if (const char* old = std::getenv("FBX_XMPP_PORT"))
            saved_env = old;
        setenv("FBX_XMPP_PORT", std::to_string(broker->port()).c_str(), 1);
    }

    {
        std::istringstream in(soak_netdef(transport));
        core::NetworkDecl doc = app::parse_netdef(in, "soak");
        app::DeviceRunner netop(doc, "netop");
        app::DeviceRunner cem(doc, "cem");

        auto start = clock_type::now();
        auto end = start + std::chrono::minutes(minutes);
        auto next_sample = start;
        auto next_press = start;
        const std::string buttons[3] = {"I_OV", "I_NV", "I_UV"};
        size_t press_index = 0;
        while (clock_type::now() < end) {
            auto now = clock_type::now();
            if (now >= next_press) {
                netop.runtime().momentary_press(buttons[press_index++ % 3]);
                next_press += std::chrono::milliseconds(press_period_ms);
            }
            if (now >= next_sample) {
                double t = std::chrono::duration<double>(now - start).count();
                result.samples.emplace_back(t, resident_kb());
                next_sample += std::chrono::seconds(sample_period_s);
            }
            std::this_thread::sleep_for(50ms);
        }
        result.samples.emplace_back(
            std::chrono::duration<double>(clock_type::now() - start).count(),
            resident_kb());
    }

    if (broker) {
        broker.reset();
        if (!saved_env.empty())
            setenv("FBX_XMPP_PORT", saved_env.c_str(), 1);
        else
            unsetenv("FBX_XMPP_PORT");
    }

    // linear fit over the post-warmup (>= 60 s) window
    std::vector<std::pair<double, long>> window;
    for (const auto& s : result.samples)
        if (s.first >= 60.0)
            window.push_back(s);
    if (window.empty())
        window = result.samples;
    result.warmup_end_kb = window.front().second;
    if (window.size() >= 2) {
        double n = static_cast<double>(window.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (const auto& [x, y] : window) {
            sx += x;
            sy += static_cast<double>(y);
            sxx += x * x;
            sxy += x * static_cast<double>(y);
        }
        double denom = n * sxx - sx * sx;
        if (denom > 0)
            result.slope_kb_per_min = (n * sxy - sx * sy) / denom * 60.0;
    }
    if (result.warmup_end_kb > 0) {
        long last = window.back().second;
        result.growth_fraction =
            std::max(0.0, static_cast<double>(last - result.warmup_end_kb) /
                              static_cast<double>(result.warmup_end_kb));
    }
    return result;
}

std::string payload_report() {
    struct Row {
        Transport transport;
        Pattern pattern;
        uint64_t bytes;
        int reference;  // published LAN-testbed measurement, for context
    };
    std::vector<Row> rows{
        {Transport::Udp, Pattern::Async, 0, 45},
        {Transport::Xmpp, Pattern::Async, 0, 741},
        {Transport::Tcp, Pattern::Sync, 0, 202},
        {Transport::Xmpp, Pattern::Sync, 0, 535},
    };
    for (Row& row : rows)
        row.bytes = measure_payload(row.transport, row.pattern);

    std::ostringstream out;
    out << "# payload bytes per transferred BOOL value\n"
        << "# (sum of sent application-layer bytes over every hop; request\n"
        << "# and response both counted for sync; no separate acknowledgement\n"
        << "# message exists in this framing)\n";
    for (const Row& row : rows)
        out << "payload " << transport_name(row.transport) << " "
            << pattern_name(row.pattern) << " " << row.bytes
            << "   # published reference (different stack): " << row.reference
            << "\n";
    out << "payload xmpp-tls async unsupported(v1)\n"
        << "payload xmpp-tls sync unsupported(v1)\n";
    out << "ratio xmpp/udp async "
        << static_cast<double>(rows[1].bytes) / static_cast<double>(rows[0].bytes)
        << "\n"
        << "ratio xmpp/tcp sync "
        << static_cast<double>(rows[3].bytes) / static_cast<double>(rows[2].bytes)
        << "\n";
    return out.str();
}

std::string latency_report(size_t n) {
    std::ostringstream out;
    out << "# end-to-end transfer latency on localhost, n=" << n
        << " after 10 warm-up transfers\n";
    struct Row {
        Transport transport;
        Pattern pattern;
        const char* reference;
    };
    for (const Row& row :
         {Row{Transport::Udp, Pattern::Async, "3 ms"},
          Row{Transport::Xmpp, Pattern::Async, "21 ms"},
          Row{Transport::Tcp, Pattern::Sync, "-"},
          Row{Transport::Xmpp, Pattern::Sync, "-"}}) {
        LatencyResult r = measure_latency(row.transport, row.pattern, n);
        out << "latency " << transport_name(row.transport) << " "
            << pattern_name(row.pattern) << " min=" << r.min_ms
            << "ms median=" << r.median_ms << "ms p95=" << r.p95_ms
            << "ms lost=" << r.lost << (r.flagged ? " FLAGGED" : "")
            << "   # published reference (LAN): " << row.reference << "\n";
    }
    out << "latency xmpp-tls async unsupported(v1)   # published reference "
           "(LAN): 25 ms\n";
    return out.str();
}

std::string soak_report(const SoakResult& result) {
    std::ostringstream out;
    if (!result.supported) {
        out << "soak unsupported (no resident-memory sampling on this "
               "platform)\n";
        return out.str();
    }
    out << "# resident memory during the scripted publish/subscribe soak\n";
    for (const auto& [t, kb] : result.samples)
        out << "mem_kb " << t << " " << kb << "\n";
    out << "soak warmup_end_kb " << result.warmup_end_kb << "\n"
        << "soak slope_kb_per_min " << result.slope_kb_per_min << "\n"
        << "soak growth_fraction " << result.growth_fraction << "\n";
    return out.str();
}

}  // namespace fbx::bench
