#include "fbx/runner.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "fbx/netstats.hpp"
#include "fbx/sifb.hpp"

namespace fbx::app {

DeviceRunner::DeviceRunner(const core::NetworkDecl& doc,
                           const std::string& device, bool tolerate_init_errors) {
    sifb::register_sifb_behaviors();
    core::NetworkDecl slice = slice_for_device(doc, device);
    rt_ = std::make_unique<core::ResourceRuntime>(slice, device);

    // INIT every SIFB with QI=true, in declaration order
    for (const auto& fb : rt_->instances()) {
        if (!core::is_sifb(fb->type))
            continue;
        for (size_t i = 0; i < fb->type.data_inputs.size(); ++i)
            if (fb->type.data_inputs[i].name == "QI")
                fb->inputs[i] = Value::of_bool(true);
        rt_->post_event({fb->name, "INIT", false, {}});
        rt_->run_until_idle();
        if (!rt_->output_value(fb->name, "QO").as_bool())
            failures_.push_back(fb->name + ": " +
                                rt_->output_value(fb->name, "STATUS").as_string());
    }
    if (!failures_.empty() && !tolerate_init_errors) {
        std::string message = "SIFB INIT failed:";
        for (const std::string& f : failures_)
            message += " " + f;
        throw RunnerError(message);
    }

    for (const auto& fb : rt_->instances())
        if (fb->type.behavior == "E_CYCLE")
            rt_->post_event({fb->name, "START", false, {}});
    rt_->start_thread();
}

DeviceRunner::~DeviceRunner() { stop(); }

void DeviceRunner::stop() {
    if (rt_)
        rt_->stop();
}

std::string DeviceRunner::repl_execute(const std::string& line) {
    std::istringstream in(line);
    std::string cmd;
    in >> cmd;
    if (cmd.empty())
        return "";
    if (cmd == "quit") {
        done_ = true;
        return "";
    }
    if (cmd == "press") {
        std::string input;
        in >> input;
        if (!rt_->has_input(input))
            return "error: unknown input " + input;
        rt_->momentary_press(input);
        return "ok";
    }
    if (cmd == "leds") {
        std::string out;
        for (const auto& [name, value] : rt_->led_snapshot()) {
            if (!out.empty())
                out += " ";
            out += name + "=" + (value ? "1" : "0");
        }
        return out.empty() ? "(no outputs)" : out;
    }
    if (cmd == "stats") {
        auto& udp = netstats::counters(netstats::Transport::Udp);
        auto& tcp = netstats::counters(netstats::Transport::Tcp);
        auto& xmpp = netstats::counters(netstats::Transport::Xmpp);
        std::ostringstream out;
        out << "drops=" << rt_->dropped_events()
            << " decode_errors=" << sifb::total_decode_errors(*rt_)
            << " udp_tx=" << udp.msg_sent_bytes.load()
            << " udp_rx=" << udp.msg_recv_bytes.load()
            << " tcp_tx=" << tcp.msg_sent_bytes.load()
            << " tcp_rx=" << tcp.msg_recv_bytes.load()
            << " xmpp_tx=" << xmpp.msg_sent_bytes.load()
            << " xmpp_rx=" << xmpp.msg_recv_bytes.load();
        return out.str();
    }
    if (cmd == "sleep") {
        int ms = 0;
        if (!(in >> ms) || ms < 0)
            return "error: sleep needs a duration in ms";
        std::this_thread::sleep_for(std::chrono::milliseconds(ms));
        return "";
    }
    return "error: unknown command '" + cmd + "'";
}

void DeviceRunner::run_repl(std::istream& in, std::ostream& out) {
    std::string line;
    while (!done_ && std::getline(in, line)) {
        std::string reply = repl_execute(line);
        if (!reply.empty())
            out << reply << "\n" << std::flush;
    }
}

}  // namespace fbx::app
