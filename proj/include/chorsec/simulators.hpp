#pragma once

#include <deque>
#include <optional>
#include <string>

#include "chorsec/adversary.hpp"
#include "chorsec/semantics.hpp"

namespace chorsec {

// Runs a wrapped adversary against a private view of the target and turns
// its decisions into decisions against the source.
class Simulator : public Adversary {
public:
    Simulator(AdversaryP inner, const HostEnv* env, Attack attack);
    Simulator(const Simulator& o);

    Decision decide() override;
    void observe(const Observation& o) override;
    Adversary* inner() override { return inner_.get(); }
    std::string fault() const override;

protected:
    // A decision of the wrapped adversary.
    virtual void translate(const Decision& d) = 0;
    // The source's answer to the last planned accept.
    virtual void on_source(const Observation& o) = 0;

    void plan(const Decision& d) { plan_.push_back(d); }
    void reply(const Observation& o) { reply_ = o; }
    void reply_stalled() { reply_ = Observation::stalled(asked_); }
    void fail(const std::string& why);
    Observation seen(const Action& a) const { return observe_action(a, *env_, attack_); }
    bool malicious(Ep h) const { return h >= 0 && env_->malicious(h, attack_); }
    void encode_base(std::string& out) const;

    AdversaryP inner_;
    const HostEnv* env_;
    Attack attack_;
    Channel asked_{kNoEndpoint, kNoEndpoint};  // the wrapped adversary's pending accept
    int phase_ = 0;

private:
    std::deque<Decision> plan_;
    std::optional<Observation> reply_;
    bool awaiting_ = false;
    std::string fault_;
};

// Target and source coincide.
AdversaryP sim_projection(AdversaryP a);
// Concurrent ideal source, asynchronous real target; the view runs with
// the downgrades turned around.
AdversaryP sim_ideal_execution(AdversaryP a, Configuration target_view, const HostEnv& env, const Attack& attack);
// Sequential source, concurrent target.
AdversaryP sim_sequentialization(AdversaryP a, Configuration target_view, Configuration source_view,
                                 const HostEnv& env, const Attack& attack);
// Uncorrupted source, corrupted target.
AdversaryP sim_corruption(AdversaryP a, Configuration target_view, Configuration source_view, const HostEnv& env,
                          const Attack& attack);
// Source program on the ideal host, choreography target.
AdversaryP sim_host_selection(AdversaryP a, Configuration target_view, const HostEnv& env, const Attack& attack);

}  // namespace chorsec
