// Acceptance harness: prints one PASS/FAIL line per criterion.
//   acceptance fast   -> criteria 1-7, 9, 10
//   acceptance soak   -> criterion 8 (ten-minute memory soak)
#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include "fbx/base64.hpp"
#include "fbx/bench.hpp"
#include "fbx/ber.hpp"
#include "fbx/broker.hpp"
#include "fbx/comm_id.hpp"
#include "fbx/runtime.hpp"
#include "fbx/xmpp_client.hpp"

using namespace fbx;
using namespace std::chrono_literals;
using clock_type = std::chrono::steady_clock;

namespace {

std::string bindir() { return FBX_BINDIR; }
std::string appdir() { return FBX_APPDIR; }

struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
    if (!ok)
        throw CheckFailure(what);
}

// ---------------------------------------------------------------- processes

class Proc {
public:
    Proc() = default;
    Proc(const Proc&) = delete;
    Proc& operator=(const Proc&) = delete;
    Proc(Proc&& o) noexcept
        : pid_(o.pid_), in_fd_(o.in_fd_), out_fd_(o.out_fd_),
          buffer_(std::move(o.buffer_)) {
        o.pid_ = -1;
        o.in_fd_ = -1;
        o.out_fd_ = -1;
    }
    ~Proc() { kill_now(); }

    void start(const std::vector<std::string>& argv) {
        int in_pipe[2], out_pipe[2];
        require(pipe(in_pipe) == 0 && pipe(out_pipe) == 0, "pipe failed");
        pid_ = fork();
        require(pid_ >= 0, "fork failed");
        if (pid_ == 0) {
            dup2(in_pipe[0], 0);
            dup2(out_pipe[1], 1);
            close(in_pipe[0]);
            close(in_pipe[1]);
            close(out_pipe[0]);
            close(out_pipe[1]);
            std::vector<char*> args;
            for (const auto& a : argv)
                args.push_back(const_cast<char*>(a.c_str()));
            args.push_back(nullptr);
            execv(args[0], args.data());
            _exit(127);
        }
        close(in_pipe[0]);
        close(out_pipe[1]);
        in_fd_ = in_pipe[1];
        out_fd_ = out_pipe[0];
    }

    void send_line(const std::string& line) {
        std::string data = line + "\n";
        require(write(in_fd_, data.data(), data.size()) ==
                    static_cast<ssize_t>(data.size()),
                "write to child failed");
    }

    // Next complete stdout line, or nullopt on timeout/EOF.
    std::optional<std::string> read_line(int timeout_ms) {
        auto deadline = clock_type::now() + std::chrono::milliseconds(timeout_ms);
        for (;;) {
            size_t nl = buffer_.find('\n');
            if (nl != std::string::npos) {
                std::string line = buffer_.substr(0, nl);
                buffer_.erase(0, nl + 1);
                return line;
            }
            int remain = static_cast<int>(
                std::chrono::duration_cast<std::chrono::milliseconds>(
                    deadline - clock_type::now())
                    .count());
            if (remain <= 0)
                return std::nullopt;
            struct pollfd pfd{out_fd_, POLLIN, 0};
            if (poll(&pfd, 1, remain) <= 0)
                return std::nullopt;
            char chunk[4096];
            ssize_t n = read(out_fd_, chunk, sizeof chunk);
            if (n <= 0)
                return std::nullopt;  // EOF
            buffer_.append(chunk, static_cast<size_t>(n));
        }
    }

    void expect_line(const std::string& needle, int timeout_ms) {
        auto deadline = clock_type::now() + std::chrono::milliseconds(timeout_ms);
        for (;;) {
            int remain = static_cast<int>(
                std::chrono::duration_cast<std::chrono::milliseconds>(
                    deadline - clock_type::now())
                    .count());
            auto line = read_line(std::max(remain, 1));
            require(line.has_value(),
                    "timed out waiting for '" + needle + "'");
            if (line->find(needle) != std::string::npos)
                return;
        }
    }

    // Drains stdout to EOF and reaps the child; returns everything read
    // (including anything buffered before the call).
    std::string drain_and_wait(int timeout_ms) {
        auto deadline = clock_type::now() + std::chrono::milliseconds(timeout_ms);
        std::string out = buffer_;
        buffer_.clear();
        for (;;) {
            int remain = static_cast<int>(
                std::chrono::duration_cast<std::chrono::milliseconds>(
                    deadline - clock_type::now())
                    .count());
            if (remain <= 0)
                break;
            struct pollfd pfd{out_fd_, POLLIN, 0};
            if (poll(&pfd, 1, remain) <= 0)
                break;
            char chunk[4096];
            ssize_t n = read(out_fd_, chunk, sizeof chunk);
            if (n <= 0)
                break;
            out.append(chunk, static_cast<size_t>(n));
        }
        close_stdin();
        reap(timeout_ms);
        return out;
    }

    void close_stdin() {
        if (in_fd_ >= 0) {
            close(in_fd_);
            in_fd_ = -1;
        }
    }

    void reap(int timeout_ms) {
        if (pid_ < 0)
            return;
        auto deadline = clock_type::now() + std::chrono::milliseconds(timeout_ms);
        while (clock_type::now() < deadline) {
            int status = 0;
            pid_t r = waitpid(pid_, &status, WNOHANG);
            if (r == pid_) {
                pid_ = -1;
                return;
            }
            std::this_thread::sleep_for(20ms);
        }
        kill_now();
    }

    void kill_now() {
        close_stdin();
        if (out_fd_ >= 0) {
            close(out_fd_);
            out_fd_ = -1;
        }
        if (pid_ > 0) {
            kill(pid_, SIGKILL);
            waitpid(pid_, nullptr, 0);
            pid_ = -1;
        }
    }

private:
    pid_t pid_ = -1;
    int in_fd_ = -1;
    int out_fd_ = -1;
    std::string buffer_;
};

uint16_t base_port() {
    return static_cast<uint16_t>(26000 + (getpid() % 500) * 4);
}

void set_broker_port(uint16_t port) {
    setenv("FBX_XMPP_PORT", std::to_string(port).c_str(), 1);
}

Proc start_broker(uint16_t port) {
    Proc p;
    p.start({bindir() + "/xmppd", "--port", std::to_string(port),
             "--accounts", appdir() + "/accounts.txt"});
    p.expect_line("listening", 5000);
    return p;
}

Proc start_runner(const std::string& net, const std::string& device) {
    Proc p;
    p.start({bindir() + "/fbrun", "--net", appdir() + "/" + net, "--device",
             device});
    p.expect_line("ready " + device, 10000);
    return p;
}

// Polls `leds` until the reply equals `expected` or the deadline passes.
void await_leds(Proc& p, const std::string& expected, int deadline_ms) {
    auto deadline = clock_type::now() + std::chrono::milliseconds(deadline_ms);
    std::string last = "(none)";
    for (;;) {
        p.send_line("leds");
        auto line = p.read_line(1000);
        require(line.has_value(), "leds query got no reply");
        last = *line;
        if (last == expected)
            return;
        require(clock_type::now() < deadline,
                "leds never reached '" + expected + "' (last: " + last + ")");
        std::this_thread::sleep_for(50ms);
    }
}

void press(Proc& p, const std::string& input) {
    p.send_line("press " + input);
    auto line = p.read_line(1000);
    require(line.has_value() && *line == "ok", "press " + input + " failed");
}

// --------------------------------------------------------- criteria 1 and 2

void criterion1_tc1_functional() {
    uint16_t port = base_port();
    set_broker_port(port);
    Proc broker = start_broker(port);
    Proc netop = start_runner("tc1.net", "netop");
    Proc cem = start_runner("tc1.net", "cem");

    await_leds(cem, "Q_C=0 Q_D=0", 2000);  // cold state
    press(netop, "I_OV");
    await_leds(cem, "Q_C=1 Q_D=0", 2000);
    press(netop, "I_NV");
    await_leds(cem, "Q_C=0 Q_D=0", 2000);
    press(netop, "I_UV");
    await_leds(cem, "Q_C=0 Q_D=1", 2000);

    cem.send_line("quit");
    netop.send_line("quit");
    cem.drain_and_wait(2000);
    netop.drain_and_wait(2000);
}

void criterion2_tc2_functional() {
    uint16_t port = static_cast<uint16_t>(base_port() + 1);
    set_broker_port(port);
    Proc broker = start_broker(port);
    Proc cem = start_runner("tc2.net", "cem");
    Proc display = start_runner("tc2.net", "display");

    bool state = false;
    for (int i = 0; i < 8; ++i) {
        press(cem, "I_LO");
        state = !state;
        // the CEM samples within 500 ms of the press...
        await_leds(cem, std::string("Q_LO=") + (state ? "1" : "0"), 1000);
        // ...and the display's 1 s poll must mirror it within 1.5 s
        await_leds(display, std::string("Q_LOD=") + (state ? "1" : "0"), 1500);
    }
    require(!state, "parity after 8 presses");

    display.send_line("quit");
    cem.send_line("quit");
    display.drain_and_wait(2000);
    cem.drain_and_wait(2000);
}

// ------------------------------------------------------ criterion 3: equiv

std::string write_script(const std::string& name, const std::string& body) {
    std::string path = "/tmp/accept_" + std::to_string(getpid()) + "_" + name;
    std::ofstream out(path);
    out << body;
    return path;
}

// Runs one scripted two-device deployment and returns the observer's
// full stdout.
std::string scripted_run(const std::string& net, const std::string& presser_dev,
                         const std::string& presser_script,
                         const std::string& observer_dev,
                         const std::string& observer_script, bool with_broker,
                         uint16_t port) {
    std::optional<Proc> broker;
    if (with_broker) {
        set_broker_port(port);
        broker.emplace(start_broker(port));
    }
    Proc presser;
    presser.start({bindir() + "/fbrun", "--net", appdir() + "/" + net,
                   "--device", presser_dev, "--script", presser_script});
    presser.expect_line("ready " + presser_dev, 10000);
    Proc observer;
    observer.start({bindir() + "/fbrun", "--net", appdir() + "/" + net,
                    "--device", observer_dev, "--script", observer_script});
    std::string transcript = observer.drain_and_wait(20000);
    presser.drain_and_wait(20000);
    return transcript;
}

void criterion3_transport_equivalence() {
    std::string tc1_press = write_script("tc1_press",
                                         "sleep 1500\npress I_OV\n"
                                         "sleep 2000\npress I_NV\n"
                                         "sleep 2000\npress I_UV\n"
                                         "sleep 2500\nquit\n");
    std::string tc1_watch = write_script(
        "tc1_watch", "sleep 2500\nleds\nsleep 2000\nleds\nsleep 2000\nleds\n"
                     "sleep 500\nquit\n");
    uint16_t port = static_cast<uint16_t>(base_port() + 2);
    std::string over_xmpp = scripted_run("tc1.net", "netop", tc1_press, "cem",
                                         tc1_watch, true, port);
    std::string over_udp = scripted_run("tc1_udp.net", "netop", tc1_press,
                                        "cem", tc1_watch, false, 0);
    std::string tc1_expected =
        "ready cem\nQ_C=1 Q_D=0\nQ_C=0 Q_D=0\nQ_C=0 Q_D=1\n";
    require(over_xmpp == over_udp, "tc1 transcripts differ: xmpp <" +
                                       over_xmpp + "> udp <" + over_udp + ">");
    require(over_xmpp == tc1_expected,
            "tc1 transcript unexpected: <" + over_xmpp + ">");

    std::string tc2_press = write_script(
        "tc2_press",
        "sleep 1500\npress I_LO\nsleep 3000\npress I_LO\nsleep 3500\nquit\n");
    std::string tc2_watch = write_script(
        "tc2_watch", "sleep 4000\nleds\nsleep 3000\nleds\nsleep 500\nquit\n");
    port = static_cast<uint16_t>(base_port() + 3);
    std::string tc2_xmpp = scripted_run("tc2.net", "cem", tc2_press, "display",
                                        tc2_watch, true, port);
    std::string tc2_tcp = scripted_run("tc2_tcp.net", "cem", tc2_press,
                                       "display", tc2_watch, false, 0);
    std::string tc2_expected = "ready display\nQ_LOD=1\nQ_LOD=0\n";
    require(tc2_xmpp == tc2_tcp, "tc2 transcripts differ: xmpp <" + tc2_xmpp +
                                     "> tcp <" + tc2_tcp + ">");
    require(tc2_xmpp == tc2_expected,
            "tc2 transcript unexpected: <" + tc2_xmpp + ">");
}

// ------------------------------------------------------ criterion 4: codecs

Value random_value(std::mt19937& rng) {
    switch (rng() % 5) {
    case 0: return Value::of_bool(rng() & 1);
    case 1: return Value::of_sint(static_cast<int8_t>(rng()));
    case 2: return Value::of_int(static_cast<int16_t>(rng()));
    case 3: return Value::of_dint(static_cast<int32_t>(rng()));
    default: {
        std::string s(rng() % 24, '\0');
        for (char& c : s)
            c = static_cast<char>(rng());
        return Value::of_string(std::move(s));
    }
    }
}

void criterion4_codec_properties() {
    std::mt19937 rng(20260825);
    for (int i = 0; i < 10000; ++i) {
        std::vector<Value> values(rng() % 9);
        for (Value& v : values)
            v = random_value(rng);
        require(comm::ber_decode(comm::ber_encode(values)) == values,
                "ber roundtrip mismatch");
    }
    for (int i = 0; i < 1000; ++i) {
        std::vector<uint8_t> frame(rng() % 64);
        for (uint8_t& b : frame)
            b = static_cast<uint8_t>(rng());
        require(comm::b64_decode(comm::b64_encode(frame)) == frame,
                "base64 roundtrip mismatch");
    }
    const std::pair<std::string, std::string> vectors[] = {
        {"", ""},           {"f", "Zg=="},       {"fo", "Zm8="},
        {"foo", "Zm9v"},    {"foob", "Zm9vYg=="}, {"fooba", "Zm9vYmE="},
        {"foobar", "Zm9vYmFy"}};
    for (const auto& [plain, encoded] : vectors) {
        std::span<const uint8_t> bytes(
            reinterpret_cast<const uint8_t*>(plain.data()), plain.size());
        require(comm::b64_encode(bytes) == encoded, "rfc4648 encode vector");
        auto decoded = comm::b64_decode(encoded);
        require(std::string(decoded.begin(), decoded.end()) == plain,
                "rfc4648 decode vector");
    }
}

// -------------------------------------------------------- criterion 5: ids

void criterion5_id_grammar() {
    struct Case {
        std::string text;
        std::vector<std::string> transport_params;
    };
    const Case cases[] = {
        {"fbdk[].ip[192.168.20.1:61499]", {"192.168.20.1", "61499"}},
        {"fbdk[].xmpp[1:cemdsm@localhost/res:***:192.168.1.210:netop@localhost/res]",
         {"1", "cemdsm@localhost/res", "***", "192.168.1.210",
          "netop@localhost/res"}},
        {"fbdk[].xmpp[0:a@localhost/r:pw:127.0.0.1]",
         {"0", "a@localhost/r", "pw", "127.0.0.1"}},
    };
    for (const Case& c : cases) {
        comm::CommID id = comm::parse_comm_id(c.text);
        require(id.layers.size() == 2, "layer count");
        require(id.layers[0].name == "fbdk" && id.layers[0].params.empty(),
                "fbdk layer");
        require(id.transport().params == c.transport_params,
                "transport params of " + c.text);
        require(id.to_string() == c.text, "reserialization of " + c.text);
    }
}

// -------------------------------------------------- criteria 6, 7, 8: bench

void criterion6_payload_ordering() {
    uint64_t udp = bench::measure_payload(bench::Transport::Udp,
                                          bench::Pattern::Async);
    uint64_t xmpp_a = bench::measure_payload(bench::Transport::Xmpp,
                                             bench::Pattern::Async);
    uint64_t tcp = bench::measure_payload(bench::Transport::Tcp,
                                          bench::Pattern::Sync);
    uint64_t xmpp_s = bench::measure_payload(bench::Transport::Xmpp,
                                             bench::Pattern::Sync);
    require(udp > 0 && udp <= 100, "udp async payload within 100 bytes");
    require(xmpp_a >= 5 * udp, "xmpp/udp async ratio >= 5");
    require(tcp > 0 && xmpp_s >= 2 * tcp, "xmpp/tcp sync ratio >= 2");
}

void criterion7_latency_ordering() {
    bench::LatencyResult udp =
        bench::measure_latency(bench::Transport::Udp, bench::Pattern::Async, 100);
    bench::LatencyResult xmpp = bench::measure_latency(bench::Transport::Xmpp,
                                                       bench::Pattern::Async, 100);
    require(!udp.flagged && !xmpp.flagged, "latency loss within 1%");
    require(udp.median_ms < 5.0, "udp median < 5 ms");
    require(xmpp.median_ms < 100.0, "xmpp median < 100 ms");
    require(xmpp.median_ms > udp.median_ms, "xmpp median > udp median");
}

void criterion8_soak() {
    bench::SoakResult r = bench::soak_run(10, bench::Transport::Xmpp);
    require(r.supported, "resident-memory sampling supported");
    std::cout << "  soak: warmup_end=" << r.warmup_end_kb
              << " KiB, slope=" << r.slope_kb_per_min
              << " KiB/min, growth=" << r.growth_fraction * 100 << "%\n";
    require(r.growth_fraction < 0.10, "post-warmup growth < 10%");
}

// ------------------------------------------------- criterion 9: broker fuzz

void criterion9_broker_fuzz() {
    xmpp::Broker broker(0, {{xmpp::Jid::parse("a@localhost"), "pw"},
                            {xmpp::Jid::parse("b@localhost"), "pw"},
                            {xmpp::Jid::parse("c@localhost"), "pw"}});
    auto session = [&](const std::string& who) {
        return std::make_unique<xmpp::Session>(
            "127.0.0.1", broker.port(), xmpp::Jid::parse(who + "@localhost/r"),
            "pw");
    };
    auto a = session("a"), b = session("b"), c = session("c");

    std::mutex mutex;
    std::vector<std::string> got_b, got_c;
    b->set_data_handler([&](const xmpp::Jid&, const std::string& payload) {
        std::lock_guard lock(mutex);
        got_b.push_back(payload);
    });
    c->set_data_handler([&](const xmpp::Jid&, const std::string& payload) {
        std::lock_guard lock(mutex);
        got_c.push_back(payload);
    });
    for (auto* s : {a.get(), b.get(), c.get()})
        s->set_iq_handler([](const std::optional<std::string>& p) {
            return p.value_or("QkFSRQ==");
        });
    b->subscribe_to(xmpp::Jid::parse("a@localhost"));
    c->subscribe_to(xmpp::Jid::parse("a@localhost"));

    std::mt19937 rng(99);
    xmpp::Session* sessions[3] = {a.get(), b.get(), c.get()};
    std::vector<std::string> published;
    uint32_t counter = 0;
    for (int i = 0; i < 1200; ++i) {
        switch (rng() % 4) {
        case 0: case 1: {  // roster fan-out
            uint32_t n = counter++;
            uint8_t bytes[4] = {static_cast<uint8_t>(n >> 24),
                                static_cast<uint8_t>(n >> 16),
                                static_cast<uint8_t>(n >> 8),
                                static_cast<uint8_t>(n)};
            std::string payload = comm::b64_encode(bytes);
            published.push_back(payload);
            a->publish_presence(payload);
            break;
        }
        case 2: {  // iq id pairing: the response must echo this request
            size_t from = rng() % 3;
            size_t to = (from + 1 + rng() % 2) % 3;
            uint8_t bytes[2] = {static_cast<uint8_t>(rng()),
                                static_cast<uint8_t>(rng())};
            std::string payload = comm::b64_encode(bytes);
            std::string reply = sessions[from]->iq_request(
                xmpp::Jid::parse(std::string(1, "abc"[to]) + "@localhost/r"),
                payload, 3000);
            require(reply == payload, "iq response not paired to request");
            break;
        }
        default: {  // routing exactness: unknown target errors, no misroute
            bool errored = false;
            try {
                b->iq_request(xmpp::Jid::parse("ghost@localhost/r"), "QQ==",
                              1500);
            } catch (const xmpp::IqErrorResponse&) {
                errored = true;
            }
            require(errored, "iq to unknown JID must yield an error");
            break;
        }
        }
    }

    auto deadline = clock_type::now() + 5s;
    for (;;) {
        {
            std::lock_guard lock(mutex);
            if (got_b.size() >= published.size() &&
                got_c.size() >= published.size())
                break;
        }
        require(clock_type::now() < deadline, "publish fan-out incomplete");
        std::this_thread::sleep_for(20ms);
    }
    std::lock_guard lock(mutex);
    require(got_b == published && got_c == published,
            "fan-out payloads must match the published sequence exactly");
}

// ---------------------------------------------- criterion 10: logic oracles

struct NetBuilder {
    core::NetworkDecl net;

    NetBuilder() { net.devices.push_back({"dev", "127.0.0.1"}); }

    NetBuilder& fb(const std::string& name, const std::string& type) {
        auto decl = core::lookup_type(type);
        require(decl.has_value(), "unknown type " + type);
        net.fbs.push_back({name, *decl, "dev", {}});
        return *this;
    }

    static core::ConnDecl conn(const std::string& from, const std::string& to) {
        auto split = [](const std::string& s) {
            size_t dot = s.find('.');
            return std::make_pair(s.substr(0, dot), s.substr(dot + 1));
        };
        auto [ff, fp] = split(from);
        auto [tf, tp] = split(to);
        return {ff, fp, tf, tp};
    }

    NetBuilder& ev(const std::string& from, const std::string& to) {
        net.events.push_back(conn(from, to));
        return *this;
    }

    NetBuilder& data(const std::string& from, const std::string& to) {
        net.data.push_back(conn(from, to));
        return *this;
    }

    std::unique_ptr<core::ResourceRuntime> build() {
        return std::make_unique<core::ResourceRuntime>(net, "dev");
    }
};

void set_input(core::ResourceRuntime& rt, const std::string& fb,
               const std::string& pin, Value v) {
    auto* inst = rt.find(fb);
    require(inst != nullptr, "missing fb " + fb);
    for (size_t i = 0; i < inst->type.data_inputs.size(); ++i)
        if (inst->type.data_inputs[i].name == pin)
            inst->inputs[i] = std::move(v);
}

void rs_truth_table() {
    for (int mask = 0; mask < 8; ++mask) {
        bool s = mask & 1, r = mask & 2, state = mask & 4;
        NetBuilder b;
        b.fb("FF", "RS");
        auto rt = b.build();
        if (state) {
            set_input(*rt, "FF", "S", Value::of_bool(true));
            rt->post_event({"FF", "S", false, {}});
            rt->run_until_idle();
        }
        set_input(*rt, "FF", "S", Value::of_bool(s));
        set_input(*rt, "FF", "R", Value::of_bool(r));
        rt->post_event({"FF", "S", false, {}});
        rt->run_until_idle();
        bool expected = r ? false : (s ? true : state);
        require(rt->output_value("FF", "Q").as_bool() == expected,
                "rs truth table case " + std::to_string(mask));
    }
}

// TC1 merged onto one device (the communication hop replaced by direct
// connections): three sampled buttons latch the grid state one-hot and
// derive the charge/discharge indications.
std::unique_ptr<core::ResourceRuntime> build_tc1_merged() {
    NetBuilder b;
    for (const std::string x : {"OV", "NV", "UV"}) {
        b.fb("I_" + x, "IX");
        b.fb("OR_" + x, "OR2");
        b.fb("RS_" + x, "RS");
        b.fb("Q_" + x, "QX");
    }
    b.fb("OR_C", "OR2").fb("OR_D", "OR2");
    b.fb("RS_C", "RS").fb("RS_D", "RS");
    b.fb("Q_C", "QX").fb("Q_D", "QX");
    for (const std::string x : {"OV", "NV", "UV"})
        for (const std::string y : {"OV", "NV", "UV"})
            b.ev("I_" + x + ".IND", "OR_" + y + ".REQ");
    for (const std::string x : {"OV", "NV", "UV"}) {
        b.ev("OR_" + x + ".CNF", "RS_" + x + ".S");
        b.ev("RS_" + x + ".EO", "Q_" + x + ".REQ");
        b.ev("RS_" + x + ".EO", "OR_C.REQ");
        b.ev("RS_" + x + ".EO", "OR_D.REQ");
        b.data("I_" + x + ".Q", "RS_" + x + ".S");
        b.data("OR_" + x + ".OUT", "RS_" + x + ".R");
        b.data("RS_" + x + ".Q", "Q_" + x + ".IN");
    }
    b.data("I_NV.Q", "OR_OV.IN1").data("I_UV.Q", "OR_OV.IN2");
    b.data("I_OV.Q", "OR_NV.IN1").data("I_UV.Q", "OR_NV.IN2");
    b.data("I_OV.Q", "OR_UV.IN1").data("I_NV.Q", "OR_UV.IN2");
    b.data("RS_NV.Q", "OR_C.IN1").data("RS_UV.Q", "OR_C.IN2");
    b.data("RS_OV.Q", "OR_D.IN1").data("RS_NV.Q", "OR_D.IN2");
    b.ev("OR_C.CNF", "RS_C.S").ev("OR_D.CNF", "RS_D.S");
    b.data("RS_OV.Q", "RS_C.S").data("OR_C.OUT", "RS_C.R");
    b.data("RS_UV.Q", "RS_D.S").data("OR_D.OUT", "RS_D.R");
    b.ev("RS_C.EO", "Q_C.REQ").ev("RS_D.EO", "Q_D.REQ");
    b.data("RS_C.Q", "Q_C.IN").data("RS_D.Q", "Q_D.IN");
    return b.build();
}

void tc1_tick(core::ResourceRuntime& rt) {
    for (const std::string x : {"OV", "NV", "UV"})
        rt.post_event({"I_" + x, "REQ", false, {}});
    rt.run_until_idle();
}

void tc1_oracle() {
    const std::string buttons[3] = {"OV", "NV", "UV"};
    const std::pair<bool, bool> expected[3] = {{true, false}, {false, false},
                                               {false, true}};
    int checked = 0;
    for (int len = 0; len <= 4; ++len) {
        int total = 1;
        for (int i = 0; i < len; ++i)
            total *= 3;
        for (int code = 0; code < total; ++code) {
            auto rt = build_tc1_merged();
            int c = code, last = -1;
            for (int i = 0; i < len; ++i) {
                int btn = c % 3;
                c /= 3;
                rt->momentary_press("I_" + buttons[btn]);
                tc1_tick(*rt);
                tc1_tick(*rt);
                last = btn;
            }
            bool q_c = rt->io_led("Q_C");
            bool q_d = rt->io_led("Q_D");
            if (last < 0) {
                require(!q_c && !q_d, "tc1 cold state");
            } else {
                require(q_c == expected[last].first &&
                            q_d == expected[last].second,
                        "tc1 f(last press), sequence " + std::to_string(code));
                for (int k = 0; k < 3; ++k)
                    require(rt->io_led("Q_" + buttons[k]) == (k == last),
                            "tc1 one-hot latches");
            }
            ++checked;
        }
    }
    require(checked == 121, "tc1 sequence count");
}

void tc2_oracle() {
    for (int presses = 0; presses <= 8; ++presses) {
        NetBuilder b;
        b.fb("I_LO", "IX").fb("AND_LO", "AND2").fb("RS_LO", "RS");
        b.fb("Q_LO", "QX").fb("Q_LOD", "QX");
        b.ev("I_LO.IND", "AND_LO.REQ");
        b.ev("AND_LO.CNF", "RS_LO.S");
        b.ev("RS_LO.EO", "Q_LO.REQ");
        b.ev("RS_LO.EO", "Q_LOD.REQ");
        b.data("I_LO.Q", "AND_LO.IN1").data("RS_LO.Q", "AND_LO.IN2");
        b.data("I_LO.Q", "RS_LO.S").data("AND_LO.OUT", "RS_LO.R");
        b.data("RS_LO.Q", "Q_LO.IN").data("RS_LO.Q", "Q_LOD.IN");
        auto rt = b.build();
        for (int i = 0; i < presses; ++i) {
            rt->momentary_press("I_LO");
            rt->post_event({"I_LO", "REQ", false, {}});
            rt->run_until_idle();
            rt->post_event({"I_LO", "REQ", false, {}});
            rt->run_until_idle();
        }
        bool expected = presses % 2 == 1;
        require(rt->io_led("Q_LO") == expected &&
                    rt->io_led("Q_LOD") == expected,
                "tc2 parity with " + std::to_string(presses) + " presses");
    }
}

void criterion10_logic_oracles() {
    auto t0 = clock_type::now();
    rs_truth_table();
    tc1_oracle();
    tc2_oracle();
    double secs = std::chrono::duration<double>(clock_type::now() - t0).count();
    require(secs < 10.0, "oracles took " + std::to_string(secs) + " s");
}

// ------------------------------------------------------------------ driver

int failures = 0;

void run(int number, const std::string& title, const std::function<void()>& fn) {
    try {
        fn();
        std::cout << "criterion " << number << ": PASS  (" << title << ")\n";
    } catch (const std::exception& e) {
        ++failures;
        std::cout << "criterion " << number << ": FAIL  (" << title
                  << "): " << e.what() << "\n";
    }
    std::cout.flush();
}

}  // namespace

int main(int argc, char** argv) {
    signal(SIGPIPE, SIG_IGN);
    std::string mode = argc > 1 ? argv[1] : "fast";
    if (mode == "soak") {
        run(8, "ten-minute memory soak, growth < 10%", criterion8_soak);
        return failures == 0 ? 0 : 1;
    }
    if (mode != "fast") {
        std::cerr << "usage: acceptance [fast|soak]\n";
        return 2;
    }
    run(1, "functional voltage scenario over xmpp", criterion1_tc1_functional);
    run(2, "functional load-toggle scenario over xmpp",
        criterion2_tc2_functional);
    run(3, "transport-equivalent led transcripts",
        criterion3_transport_equivalence);
    run(4, "codec roundtrip properties", criterion4_codec_properties);
    run(5, "id grammar structures and reserialization", criterion5_id_grammar);
    run(6, "payload ordering and ratios", criterion6_payload_ordering);
    run(7, "latency ordering", criterion7_latency_ordering);
    std::cout << "criterion 8: run the 'soak' mode (separate ten-minute test)\n";
    run(9, "broker routing/iq/fan-out fuzz", criterion9_broker_fuzz);
    run(10, "in-process logic oracles", criterion10_logic_oracles);
    return failures == 0 ? 0 : 1;
}
