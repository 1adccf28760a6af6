#include "fbx/runtime.hpp"

#include <algorithm>

#include "fbx/behaviors.hpp"

namespace fbx::core {

// ---------------------------------------------------------------------
// behavior registry

namespace {

std::mutex g_registry_mutex;
std::map<std::string, BehaviorFactory>& registry() {
    static std::map<std::string, BehaviorFactory> r;
    return r;
}

}  // namespace

void register_behavior(const std::string& key, BehaviorFactory factory) {
    std::lock_guard lock(g_registry_mutex);
    registry()[key] = std::move(factory);
}

bool behavior_registered(const std::string& key) {
    std::lock_guard lock(g_registry_mutex);
    return registry().count(key) > 0;
}

namespace {

BehaviorFactory lookup_factory(const std::string& key) {
    std::lock_guard lock(g_registry_mutex);
    auto it = registry().find(key);
    if (it == registry().end())
        throw NetworkError("no behavior registered for " + key);
    return it->second;
}

}  // namespace

// ---------------------------------------------------------------------
// FBContext

FBContext::FBContext(ResourceRuntime& rt, size_t fb_index)
    : rt_(rt), fb_index_(fb_index) {}

const std::string& FBContext::fb_name() const {
    return rt_.fbs_[fb_index_]->name;
}

const FBTypeDecl& FBContext::type() const { return rt_.fbs_[fb_index_]->type; }

const Value& FBContext::in(const std::string& pin) const {
    const auto& fb = *rt_.fbs_[fb_index_];
    for (size_t i = 0; i < fb.type.data_inputs.size(); ++i)
        if (fb.type.data_inputs[i].name == pin)
            return fb.inputs[i];
    throw NetworkError(fb.name + " has no data input " + pin);
}

const Value& FBContext::out(const std::string& pin) const {
    const auto& fb = *rt_.fbs_[fb_index_];
    for (size_t i = 0; i < fb.type.data_outputs.size(); ++i)
        if (fb.type.data_outputs[i].name == pin)
            return fb.outputs[i];
    throw NetworkError(fb.name + " has no data output " + pin);
}

void FBContext::set_out(const std::string& pin, Value v) {
    auto& fb = *rt_.fbs_[fb_index_];
    for (size_t i = 0; i < fb.type.data_outputs.size(); ++i) {
        if (fb.type.data_outputs[i].name == pin) {
            if (v.kind() != fb.type.data_outputs[i].kind)
                throw NetworkError(fb.name + "." + pin +
                                   ": value kind does not match pin declaration");
            fb.outputs[i] = std::move(v);
            return;
        }
    }
    throw NetworkError(fb.name + " has no data output " + pin);
}

void FBContext::emit(const std::string& event_output) {
    const auto& fb = *rt_.fbs_[fb_index_];
    if (!fb.type.has_event_output(event_output))
        throw NetworkError(fb.name + " has no event output " + event_output);
    emitted_.push_back(event_output);
}

// ---------------------------------------------------------------------
// ResourceRuntime

ResourceRuntime::ResourceRuntime(const NetworkDecl& net, const std::string& device)
    : device_(device) {
    ensure_builtin_behaviors();
    if (!net.find_device(device))
        throw NetworkError("unknown device " + device);
    net.validate();

    for (const FBDecl& decl : net.fbs) {
        if (decl.device != device)
            continue;
        auto fb = std::make_unique<FBInstance>();
        fb->name = decl.name;
        fb->type = decl.type;
        fb->params = decl.params;
        for (const PinDecl& p : decl.type.data_inputs)
            fb->inputs.push_back(Value::zero(p.kind));
        for (const PinDecl& p : decl.type.data_outputs)
            fb->outputs.push_back(Value::zero(p.kind));
        for (const auto& [pin, literal] : decl.params) {
            if (pin == "ID" && is_sifb(decl.type)) {
                // the SIFB reads its ID from the pin like any other input
                for (size_t i = 0; i < decl.type.data_inputs.size(); ++i)
                    if (decl.type.data_inputs[i].name == "ID")
                        fb->inputs[i] = Value::of_string(literal);
                continue;
            }
            for (size_t i = 0; i < decl.type.data_inputs.size(); ++i)
                if (decl.type.data_inputs[i].name == pin)
                    fb->inputs[i] = parse_literal(decl.type.data_inputs[i].kind,
                                                  literal);
        }
        if (decl.type.behavior == "E_CYCLE") {
            const Value& dt = fb->inputs[0];  // DT is the sole data input
            if (dt.as_dint() <= 0)
                throw NetworkError("E_CYCLE " + decl.name +
                                   ": DT must be positive");
        }
        if (decl.type.behavior == "IX")
            inputs_[decl.name] = IoCell{};
        if (decl.type.behavior == "QX") {
            leds_[decl.name] = false;
            led_order_.push_back(decl.name);
        }
        index_[decl.name] = fbs_.size();
        fbs_.push_back(std::move(fb));
    }

    data_sources_.resize(fbs_.size());
    for (const ConnDecl& c : net.events) {
        auto src = index_.find(c.from_fb);
        auto dst = index_.find(c.to_fb);
        if (src == index_.end() || dst == index_.end())
            continue;  // connection of another device
        event_routes_[c.from_fb + "." + c.from_pin].emplace_back(dst->second,
                                                                 c.to_pin);
    }
    for (const ConnDecl& c : net.data) {
        auto src = index_.find(c.from_fb);
        auto dst = index_.find(c.to_fb);
        if (src == index_.end() || dst == index_.end())
            continue;
        const FBTypeDecl& st = fbs_[src->second]->type;
        const FBTypeDecl& dt = fbs_[dst->second]->type;
        size_t out_idx = 0, in_idx = 0;
        for (size_t i = 0; i < st.data_outputs.size(); ++i)
            if (st.data_outputs[i].name == c.from_pin)
                out_idx = i;
        for (size_t i = 0; i < dt.data_inputs.size(); ++i)
            if (dt.data_inputs[i].name == c.to_pin)
                in_idx = i;
        data_sources_[dst->second].emplace_back(
            in_idx, std::make_pair(src->second, out_idx));
    }

    // behaviors last, so factories can inspect the wired runtime
    for (size_t i = 0; i < fbs_.size(); ++i) {
        const FBDecl* decl = net.find_fb(fbs_[i]->name);
        fbs_[i]->behavior = lookup_factory(fbs_[i]->type.behavior)(*decl, *this);
    }
}

ResourceRuntime::~ResourceRuntime() {
    stop();
    for (auto& fb : fbs_)
        if (fb->behavior)
            fb->behavior->shutdown();
}

size_t ResourceRuntime::index_of(const std::string& fb) const {
    auto it = index_.find(fb);
    if (it == index_.end())
        throw NetworkError("unknown fb " + fb);
    return it->second;
}

ResourceRuntime::FBInstance* ResourceRuntime::find(const std::string& name) {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : fbs_[it->second].get();
}

const Value& ResourceRuntime::output_value(const std::string& fb,
                                           const std::string& pin) const {
    const FBInstance& inst = *fbs_[index_of(fb)];
    for (size_t i = 0; i < inst.type.data_outputs.size(); ++i)
        if (inst.type.data_outputs[i].name == pin)
            return inst.outputs[i];
    throw NetworkError(fb + " has no data output " + pin);
}

const Value& ResourceRuntime::input_value(const std::string& fb,
                                          const std::string& pin) const {
    const FBInstance& inst = *fbs_[index_of(fb)];
    for (size_t i = 0; i < inst.type.data_inputs.size(); ++i)
        if (inst.type.data_inputs[i].name == pin)
            return inst.inputs[i];
    throw NetworkError(fb + " has no data input " + pin);
}

// ---------------------------------------------------------------------
// queue + scheduler

void ResourceRuntime::post_event(EventOccurrence occ) {
    {
        std::lock_guard lock(mutex_);
        if (queue_.size() >= kQueueCapacity) {
            dropped_.fetch_add(1);
            return;
        }
        queue_.push_back(std::move(occ));
    }
    cv_.notify_all();
}

void ResourceRuntime::sample_inputs(FBInstance& fb) {
    size_t idx = index_of(fb.name);
    for (const auto& [in_idx, src] : data_sources_[idx])
        fb.inputs[in_idx] = fbs_[src.first]->outputs[src.second];
}

void ResourceRuntime::execute(const EventOccurrence& occ, StepReport& report) {
    auto it = index_.find(occ.fb);
    if (it == index_.end())
        return;  // stale occurrence for a foreign fb: ignore
    FBInstance& fb = *fbs_[it->second];
    if (!fb.type.has_event_input(occ.event_input))
        return;

    report.idle = false;
    report.fired_fb = occ.fb;
    report.fired_event = occ.event_input;

    sample_inputs(fb);
    std::vector<Value> before = fb.outputs;

    FBContext ctx(*this, it->second);
    fb.behavior->event(ctx, occ.event_input,
                       occ.payload.empty() && !occ.external ? nullptr
                                                            : &occ.payload);

    for (size_t i = 0; i < fb.outputs.size(); ++i)
        if (!(fb.outputs[i] == before[i]))
            report.changed.push_back(fb.name + "." +
                                     fb.type.data_outputs[i].name);

    for (const std::string& out : ctx.emitted()) {
        auto routes = event_routes_.find(fb.name + "." + out);
        if (routes == event_routes_.end())
            continue;
        for (const auto& [sink_idx, sink_pin] : routes->second) {
            post_event({fbs_[sink_idx]->name, sink_pin, false, {}});
            report.emitted.push_back(fbs_[sink_idx]->name + "." + sink_pin);
        }
    }
}

StepReport ResourceRuntime::step() {
    EventOccurrence occ;
    {
        std::lock_guard lock(mutex_);
        if (queue_.empty())
            return {};
        occ = std::move(queue_.front());
        queue_.pop_front();
    }
    StepReport report;
    execute(occ, report);
    if (observer_)
        observer_(report);
    return report;
}

void ResourceRuntime::run_until_idle() {
    while (!step().idle) {
    }
}

void ResourceRuntime::run() {
    using clock = std::chrono::steady_clock;
    for (;;) {
        EventOccurrence occ;
        {
            std::unique_lock lock(mutex_);
            for (;;) {
                if (stopped_)
                    return;
                // fire every due timer on its drift-free schedule
                auto now = clock::now();
                bool fired = false;
                for (auto& [fb, timer] : timers_) {
                    while (timer.next <= now) {
                        timer.next += timer.period;
                        if (queue_.size() >= kQueueCapacity)
                            dropped_.fetch_add(1);
                        else
                            queue_.push_back({fb, "TICK", false, {}});
                        fired = true;
                    }
                }
                if (!queue_.empty())
                    break;
                auto deadline = clock::time_point::max();
                for (const auto& [fb, timer] : timers_)
                    deadline = std::min(deadline, timer.next);
                if (deadline == clock::time_point::max())
                    cv_.wait(lock);
                else
                    cv_.wait_until(lock, deadline);
                (void)fired;
            }
            occ = std::move(queue_.front());
            queue_.pop_front();
        }
        StepReport report;
        execute(occ, report);
        if (observer_)
            observer_(report);
    }
}

void ResourceRuntime::start_thread() {
    scheduler_ = std::thread([this] { run(); });
}

void ResourceRuntime::stop() {
    {
        std::lock_guard lock(mutex_);
        stopped_ = true;
    }
    cv_.notify_all();
    if (scheduler_.joinable())
        scheduler_.join();
}

void ResourceRuntime::set_step_observer(std::function<void(const StepReport&)> fn) {
    observer_ = std::move(fn);
}

// ---------------------------------------------------------------------
// timers

void ResourceRuntime::set_timer(const std::string& fb,
                                std::chrono::milliseconds period) {
    {
        std::lock_guard lock(mutex_);
        timers_[fb] = Timer{period, std::chrono::steady_clock::now() + period};
    }
    cv_.notify_all();
}

void ResourceRuntime::clear_timer(const std::string& fb) {
    {
        std::lock_guard lock(mutex_);
        timers_.erase(fb);
    }
    cv_.notify_all();
}

// ---------------------------------------------------------------------
// process I/O

void ResourceRuntime::io_press(const std::string& input, bool pressed) {
    std::lock_guard lock(mutex_);
    auto it = inputs_.find(input);
    if (it == inputs_.end())
        throw NetworkError("unknown input " + input);
    it->second.level = pressed;
    it->second.momentary = false;
}

void ResourceRuntime::momentary_press(const std::string& input) {
    std::lock_guard lock(mutex_);
    auto it = inputs_.find(input);
    if (it == inputs_.end())
        throw NetworkError("unknown input " + input);
    it->second.level = true;
    it->second.momentary = true;
}

bool ResourceRuntime::io_sample(const std::string& input) {
    std::lock_guard lock(mutex_);
    auto it = inputs_.find(input);
    if (it == inputs_.end())
        return false;
    bool level = it->second.level;
    if (it->second.momentary) {
        it->second.level = false;
        it->second.momentary = false;
    }
    return level;
}

bool ResourceRuntime::has_input(const std::string& name) const {
    std::lock_guard lock(mutex_);
    return inputs_.count(name) > 0;
}

bool ResourceRuntime::io_led(const std::string& output) const {
    std::lock_guard lock(mutex_);
    auto it = leds_.find(output);
    if (it == leds_.end())
        throw NetworkError("unknown output " + output);
    return it->second;
}

void ResourceRuntime::set_led(const std::string& fb, bool value) {
    std::lock_guard lock(mutex_);
    leds_[fb] = value;
}

std::vector<std::pair<std::string, bool>> ResourceRuntime::led_snapshot() const {
    std::lock_guard lock(mutex_);
    std::vector<std::pair<std::string, bool>> out;
    for (const std::string& name : led_order_)
        out.emplace_back(name, leds_.at(name));
    return out;
}

}  // namespace fbx::core
