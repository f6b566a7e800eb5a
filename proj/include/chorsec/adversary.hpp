#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chorsec/buffer.hpp"
#include "chorsec/semantics.hpp"

namespace chorsec {

// One adversary turn: schedule a channel, inject a message, or stop.
// Yield never reaches a world; it hands control back to the harness.
struct Decision {
    enum class Kind : std::uint8_t { Accept, Emit, Stop, Yield };
    Kind kind = Kind::Stop;
    Channel ch{kNoEndpoint, kNoEndpoint};  // Accept
    Message msg;                            // Emit

    static Decision accept(Channel c) { return {Kind::Accept, c, {}}; }
    static Decision emit(Message m) { return {Kind::Emit, m.channel(), m}; }
    static Decision stop() { return {}; }
    static Decision yield() { return {Kind::Yield, {kNoEndpoint, kNoEndpoint}, {}}; }
    friend bool operator==(const Decision&, const Decision&) = default;
};

std::string to_string(const Decision& d, const HostEnv& env);

// What the adversary learns from an Accept. Payloads on channels between two
// honest endpoints are withheld.
struct Observation {
    Channel ch{kNoEndpoint, kNoEndpoint};
    bool delivered = false;
    std::optional<Value> value;

    static Observation stalled(Channel c) { return {c, false, std::nullopt}; }
    friend bool operator==(const Observation&, const Observation&) = default;
};

// Honest endpoints: hosts with secret labels, the environment and the ideal host.
bool honest_endpoint(Ep e, const HostEnv& env, const Attack& attack);
bool visible(const Channel& ch, const HostEnv& env, const Attack& attack);
Observation observe_action(const Action& a, const HostEnv& env, const Attack& attack);
// Whether an adversary may inject `m` under the attack.
bool may_emit(const Message& m, const HostEnv& env, const Attack& attack);

class Adversary {
public:
    virtual ~Adversary() = default;
    virtual Decision decide() = 0;
    virtual void observe(const Observation& o) = 0;
    virtual std::unique_ptr<Adversary> clone() const = 0;
    // Canonical encoding of the state, used to share exploration work.
    virtual void encode(std::string& out) const = 0;
    // The wrapped adversary, for simulators and gates.
    virtual Adversary* inner() { return nullptr; }
    // First inconsistency detected by a simulator, if any.
    virtual std::string fault() const { return {}; }
};

using AdversaryP = std::unique_ptr<Adversary>;

// Channels a scheduler may pick in a world with the given hosts.
std::vector<Channel> schedulable_channels(const HostEnv& env, bool with_ideal);

// Round-robin scheduler that never injects; stops after a full cycle of stalls.
class DummyAdversary : public Adversary {
public:
    explicit DummyAdversary(std::vector<Channel> channels);
    Decision decide() override { return decide_const(); }
    Decision decide_const() const;
    void observe(const Observation& o) override;
    AdversaryP clone() const override { return std::make_unique<DummyAdversary>(*this); }
    void encode(std::string& out) const override;

private:
    std::shared_ptr<const std::vector<Channel>> channels_;
    size_t next_ = 0;
    size_t stalls_ = 0;
};

// The dummy scheduler with some of its turns overridden. Each plan entry is
// one turn; nullopt leaves the turn to the dummy, as does an exhausted plan.
using Plan = std::vector<std::optional<Decision>>;

class PrefixAdversary : public Adversary {
public:
    PrefixAdversary(Plan plan, std::vector<Channel> channels);
    Decision decide() override;
    void observe(const Observation& o) override;
    AdversaryP clone() const override { return std::make_unique<PrefixAdversary>(*this); }
    void encode(std::string& out) const override;
    // Overrides the first turn not yet planned.
    void push(const Decision& d) { plan_.push_back(d); }
    // What the dummy would do on an unplanned turn.
    Decision dummy_choice() const { return tail_.decide_const(); }
    // Observation of the current turn, if any.
    const std::optional<Observation>& last_observation() const { return last_; }

private:
    std::deque<std::optional<Decision>> plan_;
    std::optional<Observation> last_;
    bool awaiting_ = false;  // last decision was a planned accept
    DummyAdversary tail_;
};

// Passes at most `allowance` decisions through, yielding otherwise.
class GatedAdversary : public Adversary {
public:
    explicit GatedAdversary(AdversaryP inner) : inner_(std::move(inner)) {}
    GatedAdversary(const GatedAdversary& o) : inner_(o.inner_->clone()), allowance_(o.allowance_) {}
    Decision decide() override;
    void observe(const Observation& o) override { inner_->observe(o); }
    AdversaryP clone() const override { return std::make_unique<GatedAdversary>(*this); }
    void encode(std::string& out) const override;
    Adversary* inner() override { return inner_.get(); }
    void allow(int n = 1) { allowance_ += n; }

private:
    AdversaryP inner_;
    int allowance_ = 0;
};

// Scripted adversary:
//   accept <from>-><to>
//   emit <from>-><to> <value>
//   when <from>-><to> = <value>: <turn>     (skipped unless the last value seen there matches)
//   dummy                                   (the dummy scheduler from here on)
//   stop
struct ScriptTurn {
    Decision decision;
    bool dummy = false;
    std::optional<Channel> guard_channel;
    Value guard_value;
    int line = 0;
};

struct ScriptError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<ScriptTurn> parse_script(const std::string& text, const HostEnv& env);

class ScriptAdversary : public Adversary {
public:
    ScriptAdversary(std::vector<ScriptTurn> turns, std::vector<Channel> channels);
    Decision decide() override;
    void observe(const Observation& o) override;
    AdversaryP clone() const override { return std::make_unique<ScriptAdversary>(*this); }
    void encode(std::string& out) const override;

private:
    std::shared_ptr<const std::vector<ScriptTurn>> turns_;
    size_t pos_ = 0;
    bool in_dummy_ = false;
    std::vector<std::pair<Channel, Value>> seen_;  // last visible value per channel
    DummyAdversary tail_;
};

// Static interface checks: guards read only channels whose payloads are
// visible, emissions come from the adversary or a malicious host.
std::vector<std::string> validate_script(const std::vector<ScriptTurn>& turns, const HostEnv& env,
                                         const Attack& attack);

// Walks down a simulator stack to the first adversary of type T.
template <class T>
T* find_layer(Adversary* a) {
    for (; a; a = a->inner())
        if (auto* t = dynamic_cast<T*>(a)) return t;
    return nullptr;
}

}  // namespace chorsec
