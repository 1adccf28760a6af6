#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "fbx/fbtype.hpp"
#include "fbx/value.hpp"

namespace fbx::core {

// One queued event delivery. `payload` is only populated for the hidden
// RX input of SIFBs, carrying the decoded inbound values.
struct EventOccurrence {
    std::string fb;
    std::string event_input;
    bool external = false;
    std::vector<Value> payload;
};

struct StepReport {
    bool idle = true;
    std::string fired_fb;
    std::string fired_event;
    std::vector<std::string> emitted;  // enqueued sink occurrences, "FB.PIN"
    std::vector<std::string> changed;  // output pins whose value changed, "FB.PIN"
};

class ResourceRuntime;

// Behavior-facing view of one FB during one event delivery.
class FBContext {
public:
    FBContext(ResourceRuntime& rt, size_t fb_index);

    const Value& in(const std::string& pin) const;
    const Value& out(const std::string& pin) const;
    void set_out(const std::string& pin, Value v);
    void emit(const std::string& event_output);

    const std::string& fb_name() const;
    const FBTypeDecl& type() const;
    ResourceRuntime& runtime() { return rt_; }

    const std::vector<std::string>& emitted() const { return emitted_; }

private:
    ResourceRuntime& rt_;
    size_t fb_index_;
    std::vector<std::string> emitted_;
};

class Behavior {
public:
    virtual ~Behavior() = default;
    // Delivery of one event occurrence; data inputs are already sampled.
    virtual void event(FBContext& ctx, const std::string& input,
                       const std::vector<Value>* payload) = 0;
    // Teardown hook for behaviors owning external resources (SIFBs).
    virtual void shutdown() {}
};

using BehaviorFactory = std::function<std::unique_ptr<Behavior>(
    const FBDecl& decl, ResourceRuntime& rt)>;

// Process-wide behavior registry keyed by FBTypeDecl::behavior. The logic
// behaviors self-register; the sifb module adds the four patterns.
void register_behavior(const std::string& key, BehaviorFactory factory);
bool behavior_registered(const std::string& key);

// The per-device scheduler: owns the device's FB instances, the bounded
// event queue, timers, and virtual process I/O. All behavior code runs on
// the thread calling step()/run(); post_event is the only cross-thread
// entry point.
class ResourceRuntime {
public:
    static constexpr size_t kQueueCapacity = 1024;

    // Builds the runtime for `device`, keeping only FBs mapped to it.
    ResourceRuntime(const NetworkDecl& net, const std::string& device);
    ~ResourceRuntime();

    ResourceRuntime(const ResourceRuntime&) = delete;
    ResourceRuntime& operator=(const ResourceRuntime&) = delete;

    const std::string& device() const { return device_; }

    // --- event queue -----------------------------------------------
    // Thread-safe; a full queue drops the occurrence and counts it.
    void post_event(EventOccurrence occ);
    uint64_t dropped_events() const { return dropped_.load(); }

    // Dequeues and executes at most one occurrence. Never blocks.
    StepReport step();
    // Drains the queue on the calling thread (timers are not serviced).
    void run_until_idle();
    // Scheduler loop: executes occurrences and services timers until stop().
    void run();
    void start_thread();
    void stop();

    void set_step_observer(std::function<void(const StepReport&)> fn);

    // --- timers (used by E_CYCLE) ----------------------------------
    void set_timer(const std::string& fb, std::chrono::milliseconds period);
    void clear_timer(const std::string& fb);

    // --- virtual process I/O ---------------------------------------
    void io_press(const std::string& input, bool pressed);
    // Press that auto-releases after the next sample (scripted tests).
    void momentary_press(const std::string& input);
    bool io_sample(const std::string& input);  // called by IX behaviors
    bool io_led(const std::string& output) const;
    void set_led(const std::string& fb, bool value);  // called by QX behaviors
    // QX instances in declaration order with their current values.
    std::vector<std::pair<std::string, bool>> led_snapshot() const;
    bool has_input(const std::string& name) const;

    // --- introspection ---------------------------------------------
    struct FBInstance {
        std::string name;
        FBTypeDecl type;
        std::map<std::string, std::string> params;
        std::vector<Value> inputs;   // parallel to type.data_inputs
        std::vector<Value> outputs;  // parallel to type.data_outputs
        std::unique_ptr<Behavior> behavior;
    };
    const std::vector<std::unique_ptr<FBInstance>>& instances() const {
        return fbs_;
    }
    FBInstance* find(const std::string& name);
    const Value& output_value(const std::string& fb, const std::string& pin) const;
    const Value& input_value(const std::string& fb, const std::string& pin) const;

private:
    friend class FBContext;

    void execute(const EventOccurrence& occ, StepReport& report);
    void sample_inputs(FBInstance& fb);
    size_t index_of(const std::string& fb) const;

    std::string device_;
    std::vector<std::unique_ptr<FBInstance>> fbs_;
    std::map<std::string, size_t> index_;
    // event routing: "FB.PIN" → sink (fb index, event input)
    std::map<std::string, std::vector<std::pair<size_t, std::string>>> event_routes_;
    // data sources per fb: data-input index → (source fb index, output index)
    std::vector<std::vector<std::pair<size_t, std::pair<size_t, size_t>>>> data_sources_;

    mutable std::mutex mutex_;
    std::condition_variable cv_;
    std::deque<EventOccurrence> queue_;
    std::atomic<uint64_t> dropped_{0};
    bool stopped_ = false;
    std::thread scheduler_;

    struct Timer {
        std::chrono::milliseconds period;
        std::chrono::steady_clock::time_point next;
    };
    std::map<std::string, Timer> timers_;

    struct IoCell {
        bool level = false;
        bool momentary = false;
    };
    std::map<std::string, IoCell> inputs_;
    std::map<std::string, bool> leds_;
    std::vector<std::string> led_order_;

    std::function<void(const StepReport&)> observer_;
};

}  // namespace fbx::core
