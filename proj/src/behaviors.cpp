#include "fbx/behaviors.hpp"

#include <mutex>

#include "fbx/runtime.hpp"

namespace fbx::core {

namespace {

// Reset-dominant latch; every trigger republishes Q via EO.
class RsBehavior : public Behavior {
public:
    void event(FBContext& ctx, const std::string&,
               const std::vector<Value>*) override {
        if (ctx.in("R").as_bool())
            state_ = false;
        else if (ctx.in("S").as_bool())
            state_ = true;
        ctx.set_out("Q", Value::of_bool(state_));
        ctx.emit("EO");
    }

private:
    bool state_ = false;
};

class GateBehavior : public Behavior {
public:
    enum class Kind { Or, And, Not };
    explicit GateBehavior(Kind kind) : kind_(kind) {}

    void event(FBContext& ctx, const std::string&,
               const std::vector<Value>*) override {
        bool out = false;
        switch (kind_) {
        case Kind::Or:
            out = ctx.in("IN1").as_bool() || ctx.in("IN2").as_bool();
            break;
        case Kind::And:
            out = ctx.in("IN1").as_bool() && ctx.in("IN2").as_bool();
            break;
        case Kind::Not:
            out = !ctx.in("IN").as_bool();
            break;
        }
        ctx.set_out("OUT", Value::of_bool(out));
        ctx.emit("CNF");
    }

private:
    Kind kind_;
};

class CycleBehavior : public Behavior {
public:
    void event(FBContext& ctx, const std::string& input,
               const std::vector<Value>*) override {
        if (input == "START") {
            ctx.runtime().set_timer(
                ctx.fb_name(), std::chrono::milliseconds(ctx.in("DT").as_dint()));
        } else if (input == "STOP") {
            ctx.runtime().clear_timer(ctx.fb_name());
        } else if (input == "TICK") {
            ctx.emit("EO");
        }
    }
};

// Samples the input cell named after the instance; IND only on the
// rising edge, so a held button fires once.
class IxBehavior : public Behavior {
public:
    void event(FBContext& ctx, const std::string&,
               const std::vector<Value>*) override {
        bool level = ctx.runtime().io_sample(ctx.fb_name());
        ctx.set_out("Q", Value::of_bool(level));
        if (level && !prev_)
            ctx.emit("IND");
        prev_ = level;
    }

private:
    bool prev_ = false;
};

class QxBehavior : public Behavior {
public:
    void event(FBContext& ctx, const std::string&,
               const std::vector<Value>*) override {
        ctx.runtime().set_led(ctx.fb_name(), ctx.in("IN").as_bool());
        ctx.emit("CNF");
    }
};

}  // namespace

void ensure_builtin_behaviors() {
    static std::once_flag once;
    std::call_once(once, [] {
        register_behavior("RS", [](const FBDecl&, ResourceRuntime&) {
            return std::make_unique<RsBehavior>();
        });
        register_behavior("OR2", [](const FBDecl&, ResourceRuntime&) {
            return std::make_unique<GateBehavior>(GateBehavior::Kind::Or);
        });
        register_behavior("AND2", [](const FBDecl&, ResourceRuntime&) {
            return std::make_unique<GateBehavior>(GateBehavior::Kind::And);
        });
        register_behavior("NOT", [](const FBDecl&, ResourceRuntime&) {
            return std::make_unique<GateBehavior>(GateBehavior::Kind::Not);
        });
        register_behavior("E_CYCLE", [](const FBDecl&, ResourceRuntime&) {
            return std::make_unique<CycleBehavior>();
        });
        register_behavior("IX", [](const FBDecl&, ResourceRuntime&) {
            return std::make_unique<IxBehavior>();
        });
        register_behavior("QX", [](const FBDecl&, ResourceRuntime&) {
            return std::make_unique<QxBehavior>();
        });
    });
}

}  // namespace fbx::core
