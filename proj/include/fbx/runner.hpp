#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "fbx/netdef.hpp"
#include "fbx/runtime.hpp"

namespace fbx::app {

class RunnerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Runs one device of a network: instantiates the slice, fires INIT on
// every SIFB (QI=true), starts the cycle timers and the scheduler
// thread, and serves the line-oriented REPL.
class DeviceRunner {
public:
    DeviceRunner(const core::NetworkDecl& doc, const std::string& device,
                 bool tolerate_init_errors = false);
    ~DeviceRunner();

    // "FB: STATUS" for every SIFB whose INIT did not succeed.
    const std::vector<std::string>& init_failures() const { return failures_; }

    // Commands: press <INPUT> | leds | stats | sleep <ms> | quit.
    // Returns the reply line ("" for quiet commands); quit sets done().
    std::string repl_execute(const std::string& line);
    bool done() const { return done_; }

    void run_repl(std::istream& in, std::ostream& out);

    core::ResourceRuntime& runtime() { return *rt_; }
    void stop();

private:
    std::unique_ptr<core::ResourceRuntime> rt_;
    std::vector<std::string> failures_;
    bool done_ = false;
};

}  // namespace fbx::app
