#include "fbx/sifb.hpp"

#include <condition_variable>
#include <mutex>
#include <thread>

#include "fbx/ber.hpp"
#include "fbx/socket.hpp"
#include "fbx/stack.hpp"

namespace fbx::sifb {

namespace {

using core::FBContext;
using core::ResourceRuntime;
using fbx::Value;

// Shared plumbing: ID parsing and endpoint lifecycle on INIT, SD pin
// gathering, RD pin latching.
class SifbBase : public SifbBehavior {
public:
    SifbBase(std::string fb_name, ResourceRuntime& rt)
        : fb_name_(std::move(fb_name)), rt_(rt) {}

    uint64_t decode_errors() const override { return decode_errors_.load(); }
    uint64_t ignored_events() const override { return ignored_.load(); }

protected:
    // Builds the endpoint via `build`, translating failures into STATUS
    // text. Returns true when initialized.
    template <typename BuildFn>
    bool init(FBContext& ctx, BuildFn build) {
        if (!ctx.in("QI").as_bool()) {
            teardown();
            set_status(ctx, false, kStatusTerminated);
            return false;
        }
        comm::CommID id;
        try {
            id = comm::parse_comm_id(ctx.in("ID").as_string());
        } catch (const comm::IdError&) {
            set_status(ctx, false, kStatusInvalidId);
            return false;
        }
        try {
            build(id);
        } catch (const comm::TlsUnsupportedError&) {
            set_status(ctx, false, kStatusTlsUnsupported);
            return false;
        } catch (const comm::ConnectError&) {
            set_status(ctx, false, kStatusConnectFailed);
            return false;
        } catch (const std::exception&) {
            set_status(ctx, false, kStatusInvalidId);
            return false;
        }
        set_status(ctx, true, kStatusInitialized);
        return true;
    }

    virtual void teardown() {}

    static void set_status(FBContext& ctx, bool qo, const char* text) {
        ctx.set_out("QO", Value::of_bool(qo));
        ctx.set_out("STATUS", Value::of_string(text));
    }

    std::vector<Value> gather_sd(FBContext& ctx) const {
        std::vector<Value> values;
        for (const core::PinDecl& p : ctx.type().data_inputs)
            if (p.name.rfind("SD_", 0) == 0)
                values.push_back(ctx.in(p.name));
        return values;
    }

    // Latches `values` onto the RD pins; arity or kind mismatches count
    // as decode errors and latch nothing.
    bool latch_rd(FBContext& ctx, const std::vector<Value>& values) {
        std::vector<const core::PinDecl*> rd;
        for (const core::PinDecl& p : ctx.type().data_outputs)
            if (p.name.rfind("RD_", 0) == 0)
                rd.push_back(&p);
        if (values.size() != rd.size()) {
            decode_errors_.fetch_add(1);
            return false;
        }
        for (size_t i = 0; i < rd.size(); ++i) {
            if (values[i].kind() != rd[i]->kind) {
                decode_errors_.fetch_add(1);
                return false;
            }
        }
        for (size_t i = 0; i < rd.size(); ++i)
            ctx.set_out(rd[i]->name, values[i]);
        return true;
    }

    std::string fb_name_;
    ResourceRuntime& rt_;
    std::atomic<uint64_t> decode_errors_{0};
    std::atomic<uint64_t> ignored_{0};
};

// ---------------------------------------------------------------------

class PublishBehavior : public SifbBase {
public:
    using SifbBase::SifbBase;

    void event(FBContext& ctx, const std::string& input,
               const std::vector<Value>*) override {
        if (input == "INIT") {
            init(ctx, [this](const comm::CommID& id) {
                endpoint_ = comm::build_publisher(id);
            });
            ctx.emit("INITO");
            return;
        }
        if (input != "REQ")
            return;
        if (!endpoint_) {
            set_status(ctx, false, kStatusInvalidId);
            ctx.emit("CNF");
            return;
        }
        try {
            endpoint_->send(gather_sd(ctx));
            set_status(ctx, true, kStatusOk);
        } catch (const comm::CodecError&) {
            decode_errors_.fetch_add(1);
            set_status(ctx, false, kStatusDecodeError);
        } catch (const std::exception&) {
            set_status(ctx, false, kStatusConnectFailed);
        }
        ctx.emit("CNF");
    }

private:
    void teardown() override { endpoint_.reset(); }

    std::unique_ptr<comm::PublisherEndpoint> endpoint_;
};

// ---------------------------------------------------------------------

class SubscribeBehavior : public SifbBase {
public:
    using SifbBase::SifbBase;

    void event(FBContext& ctx, const std::string& input,
               const std::vector<Value>* payload) override {
        if (input == "INIT") {
            bool ok = init(ctx, [this](const comm::CommID& id) {
                endpoint_ = comm::build_subscriber(id);
            });
            if (ok) {
                // transport context: enqueue only
                endpoint_->set_callback([this](std::vector<Value> values) {
                    rt_.post_event({fb_name_, "RX", true, std::move(values)});
                });
            }
            ctx.emit("INITO");
            return;
        }
        if (input != "RX" || !payload)
            return;
        if (latch_rd(ctx, *payload)) {
            set_status(ctx, true, kStatusOk);
            ctx.emit("IND");
        }
    }

    uint64_t decode_errors() const override {
        return SifbBase::decode_errors() +
               (endpoint_ ? endpoint_->decode_errors() : 0);
    }

private:
    void teardown() override {
        if (endpoint_)
            endpoint_->close();
        endpoint_.reset();
    }

    std::unique_ptr<comm::SubscriberEndpoint> endpoint_;
};

// ---------------------------------------------------------------------

class ClientBehavior : public SifbBase {
public:
    static constexpr int kTimeoutMs = 3000;

    using SifbBase::SifbBase;

    ~ClientBehavior() override { ClientBehavior::shutdown(); }

    void event(FBContext& ctx, const std::string& input,
               const std::vector<Value>*) override {
        if (input == "INIT") {
            init(ctx, [this](const comm::CommID& id) {
                endpoint_ = comm::build_client(id);
            });
            ctx.emit("INITO");
            return;
        }
        if (input == "REQ") {
            if (!endpoint_) {
                set_status(ctx, false, kStatusInvalidId);
                ctx.emit("CNF");
                return;
            }
            {
                std::lock_guard lock(mutex_);
                if (in_flight_) {  // one exchange at a time
                    ignored_.fetch_add(1);
                    return;
                }
                in_flight_ = true;
            }
            reap();
            std::vector<Value> sd = gather_sd(ctx);
            worker_ = std::thread([this, sd = std::move(sd)] {
                Outcome out;
                try {
                    out.values = endpoint_->request(sd, kTimeoutMs);
                    out.status = kStatusOk;
                } catch (const net::TimeoutError&) {
                    out.status = kStatusTimeout;
                } catch (const comm::CodecError&) {
                    out.status = kStatusDecodeError;
                } catch (const std::exception&) {
                    out.status = kStatusTimeout;
                }
                {
                    std::lock_guard lock(mutex_);
                    outcome_ = std::move(out);
                }
                // the scheduler delivers the result as the CNF event
                rt_.post_event({fb_name_, "RX", true, {}});
            });
            return;
        }
        if (input != "RX")
            return;
        Outcome out;
        {
            std::lock_guard lock(mutex_);
            if (!in_flight_)
                return;
            in_flight_ = false;
            out = std::move(outcome_);
        }
        if (out.status == kStatusOk) {
            if (latch_rd(ctx, out.values)) {
                set_status(ctx, true, kStatusOk);
            } else {
                set_status(ctx, false, kStatusDecodeError);
            }
        } else {
            set_status(ctx, false, out.status.c_str());
        }
        ctx.emit("CNF");
    }

    void shutdown() override {
        reap();
        teardown();
    }

private:
    struct Outcome {
        std::vector<Value> values;
        std::string status = kStatusTimeout;
    };

    void reap() {
        if (worker_.joinable())
            worker_.join();
    }

    void teardown() override {
        reap();
        endpoint_.reset();
    }

    std::unique_ptr<comm::ClientEndpoint> endpoint_;
    std::mutex mutex_;
    bool in_flight_ = false;
    Outcome outcome_;
    std::thread worker_;
};

// ---------------------------------------------------------------------

class ServerBehavior : public SifbBase {
public:
    static constexpr int kResponseWindowMs = 5000;

    using SifbBase::SifbBase;

    void event(FBContext& ctx, const std::string& input,
               const std::vector<Value>*) override {
        if (input == "INIT") {
            bool ok = init(ctx, [this](const comm::CommID& id) {
                endpoint_ = comm::build_server(id);
            });
            if (ok) {
                endpoint_->set_handler([this](const std::vector<Value>& request) {
                    return serve(request);
                });
            }
            ctx.emit("INITO");
            return;
        }
        if (input == "RX") {
            std::vector<Value> request;
            {
                std::lock_guard lock(mutex_);
                if (state_ != State::Delivering)
                    return;  // stale RX after a window expiry
                request = request_;
                state_ = State::AwaitingRsp;
            }
            if (latch_rd(ctx, request)) {
                set_status(ctx, true, kStatusOk);
                ctx.emit("IND");
            } else {
                // undeliverable request: fail the exchange immediately
                std::lock_guard lock(mutex_);
                state_ = State::Failed;
                cv_.notify_all();
            }
            return;
        }
        if (input != "RSP")
            return;
        std::lock_guard lock(mutex_);
        if (state_ != State::AwaitingRsp) {
            ignored_.fetch_add(1);  // RSP with no pending request
            return;
        }
        response_ = gather_sd(ctx);
        state_ = State::Responded;
        cv_.notify_all();
    }

    uint64_t decode_errors() const override {
        return SifbBase::decode_errors() +
               (endpoint_ ? endpoint_->decode_errors() : 0);
    }

private:
    enum class State { Idle, Delivering, AwaitingRsp, Responded, Failed };

    // Runs in the transport context: posts the request to the scheduler
    // and blocks for the application's RSP, one exchange at a time.
    std::vector<Value> serve(const std::vector<Value>& request) {
        std::unique_lock lock(mutex_);
        if (state_ != State::Idle)
            throw comm::StackError("request already pending");
        state_ = State::Delivering;
        request_ = request;
        rt_.post_event({fb_name_, "RX", true, {}});
        bool done = cv_.wait_for(
            lock, std::chrono::milliseconds(kResponseWindowMs), [&] {
                return state_ == State::Responded || state_ == State::Failed ||
                       closing_;
            });
        State state = state_;
        std::vector<Value> response = std::move(response_);
        state_ = State::Idle;
        if (!done || closing_ || state != State::Responded)
            throw comm::StackError("no response within the window");
        return response;
    }

    void teardown() override {
        {
            std::lock_guard lock(mutex_);
            closing_ = true;
        }
        cv_.notify_all();
        if (endpoint_)
            endpoint_->close();
        endpoint_.reset();
        std::lock_guard lock(mutex_);
        closing_ = false;
        state_ = State::Idle;
    }

    std::unique_ptr<comm::ServerEndpoint> endpoint_;
    std::mutex mutex_;
    std::condition_variable cv_;
    State state_ = State::Idle;
    bool closing_ = false;
    std::vector<Value> request_;
    std::vector<Value> response_;
};

}  // namespace

void register_sifb_behaviors() {
    static std::once_flag once;
    std::call_once(once, [] {
        core::register_behavior(
            "PUBLISH", [](const core::FBDecl& decl, ResourceRuntime& rt) {
                return std::make_unique<PublishBehavior>(decl.name, rt);
            });
        core::register_behavior(
            "SUBSCRIBE", [](const core::FBDecl& decl, ResourceRuntime& rt) {
                return std::make_unique<SubscribeBehavior>(decl.name, rt);
            });
        core::register_behavior(
            "CLIENT", [](const core::FBDecl& decl, ResourceRuntime& rt) {
                return std::make_unique<ClientBehavior>(decl.name, rt);
            });
        core::register_behavior(
            "SERVER", [](const core::FBDecl& decl, ResourceRuntime& rt) {
                return std::make_unique<ServerBehavior>(decl.name, rt);
            });
    });
}

uint64_t total_decode_errors(core::ResourceRuntime& rt) {
    uint64_t total = 0;
    for (const auto& fb : rt.instances())
        if (auto* s = dynamic_cast<SifbBehavior*>(fb->behavior.get()))
            total += s->decode_errors();
    return total;
}

}  // namespace fbx::sifb
