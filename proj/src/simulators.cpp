#include "chorsec/simulators.hpp"

namespace chorsec {

Simulator::Simulator(AdversaryP inner, const HostEnv* env, Attack attack)
    : inner_(std::move(inner)), env_(env), attack_(attack) {}

Simulator::Simulator(const Simulator& o)
    : Adversary(o),
      inner_(o.inner_->clone()),
      env_(o.env_),
      attack_(o.attack_),
      asked_(o.asked_),
      phase_(o.phase_),
      plan_(o.plan_),
      reply_(o.reply_),
      awaiting_(o.awaiting_),
      fault_(o.fault_) {}

void Simulator::fail(const std::string& why) {
    if (fault_.empty()) fault_ = why;
}

std::string Simulator::fault() const {
    if (!fault_.empty()) return fault_;
    return inner_->fault();
}

Decision Simulator::decide() {
    for (;;) {
        if (!plan_.empty()) {
            Decision d = plan_.front();
            plan_.pop_front();
            return d;
        }
        if (awaiting_) {
            awaiting_ = false;
            if (!reply_) {
                fail("no answer for " + channel_name(asked_, *env_));
                reply_ = Observation::stalled(asked_);
            }
            Observation o = *reply_;
            reply_.reset();
            inner_->observe(o);
        }
        Decision d = inner_->decide();
        if (d.kind == Decision::Kind::Stop || d.kind == Decision::Kind::Yield) return d;
        if (d.kind == Decision::Kind::Accept) {
            awaiting_ = true;
            asked_ = d.ch;
        }
        translate(d);
    }
}

void Simulator::observe(const Observation& o) { on_source(o); }

void Simulator::encode_base(std::string& out) const {
    out += '<';
    encode_int(out, phase_);
    encode_int(out, asked_.first);
    encode_int(out, asked_.second);
    for (const auto& d : plan_) {
        encode_int(out, static_cast<int>(d.kind));
        encode_int(out, d.ch.first);
        encode_int(out, d.ch.second);
        encode_value(out, d.msg.value);
    }
    out += awaiting_ ? '!' : '.';
    if (reply_) {
        encode_int(out, reply_->delivered);
        if (reply_->value) encode_value(out, *reply_->value);
    }
    out += fault_.empty() ? '.' : 'F';
    inner_->encode(out);
    out += '>';
}

namespace {

// Takes the output enabled on `ch` in a view; false when there is none.
bool view_step(Configuration& c, const Channel& ch, Action* taken = nullptr) {
    auto st = output_on(c, ch);
    if (!st) return false;
    if (taken) *taken = st->second.action;
    apply_output(c, st->first, st->second);
    return true;
}

std::optional<Potential> probe_actor(const Configuration& c, Ep actor) {
    for (const auto& p : c.procs) {
        if (!p.owns(actor)) continue;
        for (const auto& pot : potential_steps(c.sem, p))
            if (pot.stmt_action.actor() == actor) return pot;
    }
    return std::nullopt;
}

std::optional<Potential> probe_first(const Configuration& c) {
    if (c.procs.empty()) return std::nullopt;
    auto pots = potential_steps(c.sem, c.procs[0]);
    if (pots.empty()) return std::nullopt;
    return pots[0];
}

bool is_let(const Stmt* n, ExprKind k) { return n && n->kind == StmtKind::Let && n->expr.kind == k; }

enum Phase { Idle, EnvForward, Mirror, Declassify, Endorse, Output, Unwind, UnwindFinal, Skip, Final };

// ---------------------------------------------------------------- projection

class ProjectionSim : public Adversary {
public:
    explicit ProjectionSim(AdversaryP inner) : inner_(std::move(inner)) {}
    ProjectionSim(const ProjectionSim& o) : Adversary(o), inner_(o.inner_->clone()) {}
    Decision decide() override { return inner_->decide(); }
    void observe(const Observation& o) override { inner_->observe(o); }
    AdversaryP clone() const override { return std::make_unique<ProjectionSim>(*this); }
    void encode(std::string& out) const override { inner_->encode(out); }
    Adversary* inner() override { return inner_.get(); }
    std::string fault() const override { return inner_->fault(); }

private:
    AdversaryP inner_;
};

// ---------------------------------------------------------------- ideal execution

class IdealExecutionSim : public Simulator {
public:
    IdealExecutionSim(AdversaryP a, Configuration view, const HostEnv& env, const Attack& attack)
        : Simulator(std::move(a), &env, attack), view_(std::move(view)) {}
    AdversaryP clone() const override { return std::make_unique<IdealExecutionSim>(*this); }
    void encode(std::string& out) const override {
        encode_config(out, view_);
        encode_base(out);
    }

protected:
    void translate(const Decision& d) override {
        if (d.kind == Decision::Kind::Emit) {
            // Injections towards hosts only matter to the view; the ideal
            // source receives nothing from malicious peers.
            if (d.msg.to == kEnvironment) plan(d);
            else if (d.msg.from != kAdversary) deliver(view_, d.msg);
            return;
        }
        const Channel ch = d.ch;
        if (ch.first == kEnvironment) {
            phase_ = EnvForward;
            plan(d);
            return;
        }
        if (ch.first < 0) return reply_stalled();
        Ep h = ch.first;
        auto pot = probe_actor(view_, h);
        if (!pot) return reply_stalled();
        const Stmt* node = pot->node;
        const Action& sa = pot->stmt_action;
        bool endorse = is_let(node, ExprKind::Endorse) && sa.dir == Dir::Out && sa.msg.to == kAdversary;
        bool declassify = is_let(node, ExprKind::Declassify) && sa.dir == Dir::In && sa.msg.from == kAdversary;
        Channel real = (sa.dir == Dir::Out && !endorse && !sa.is_internal()) ? sa.msg.channel() : Channel{h, h};
        if (real != ch) return reply_stalled();
        if (sa.dir == Dir::In && !declassify && !pot->ready) return reply_stalled();
        if (node->kind == StmtKind::MovePending || node->kind == StmtKind::SelectPending) {
            Action a;
            if (!view_step(view_, ch, &a)) fail("pending receive not enabled in view");
            return reply(seen(a));
        }
        if (declassify) {
            phase_ = Declassify;
            plan(Decision::accept({h, kAdversary}));
        } else if (endorse) {
            phase_ = Endorse;
            plan(Decision::emit({kAdversary, h, sa.msg.value}));
            plan(Decision::accept({h, h}));
        } else if (sa.dir == Dir::Out && sa.msg.to == kEnvironment) {
            phase_ = Output;
            plan(d);
        } else {
            phase_ = Mirror;
            plan(Decision::accept({h, h}));
        }
    }

    void on_source(const Observation& o) override {
        int phase = phase_;
        phase_ = Idle;
        if (phase == EnvForward) {
            if (o.delivered) deliver(view_, {kEnvironment, asked_.second, o.value.value_or(Value::unit())});
            return reply(o);
        }
        if (!o.delivered) {
            fail("ideal source refused " + channel_name(o.ch, *env_));
            return reply_stalled();
        }
        Ep h = asked_.first;
        switch (phase) {
            case Declassify:
                deliver(view_, {kAdversary, h, o.value.value_or(Value::unit())});
                if (!view_step(view_, {h, h})) fail("declassification not enabled in view");
                return reply(seen(Action::internal(h)));
            case Endorse:
                if (!view_step(view_, {h, kAdversary})) fail("endorsement not enabled in view");
                return reply(seen(Action::internal(h)));
            case Output:
                if (!view_step(view_, asked_)) fail("output not enabled in view");
                return reply(o);
            default: {
                Action a;
                if (!view_step(view_, asked_, &a)) fail("step not enabled in view");
                return reply(seen(a));
            }
        }
    }

private:
    Configuration view_;
};

// ---------------------------------------------------------------- sequentialization

class SequentializationSim : public Simulator {
public:
    SequentializationSim(AdversaryP a, Configuration target, Configuration source, const HostEnv& env,
                         const Attack& attack)
        : Simulator(std::move(a), &env, attack), target_(std::move(target)), source_(std::move(source)) {}
    AdversaryP clone() const override { return std::make_unique<SequentializationSim>(*this); }
    void encode(std::string& out) const override {
        encode_config(out, target_);
        encode_config(out, source_);
        encode_int(out, want_.first);
        encode_int(out, want_.second);
        encode_int(out, step_.first);
        encode_int(out, step_.second);
        encode_base(out);
    }

protected:
    void translate(const Decision& d) override {
        if (d.kind == Decision::Kind::Emit) {
            deliver(target_, d.msg);
            deliver(source_, d.msg);
            plan(d);
            return;
        }
        if (d.ch.first == kEnvironment) {
            phase_ = EnvForward;
            plan(d);
            return;
        }
        auto st = output_on(target_, d.ch);
        if (!st) return reply_stalled();
        if (st->second.action.is_internal()) {
            apply_output(target_, st->first, st->second);
            return reply(seen(st->second.action));
        }
        // An externally visible step: catch the sequential run up to it.
        want_ = d.ch;
        advance();
    }

    void advance() {
        auto steps = enabled_config_steps(source_);
        if (steps.empty()) {
            fail("sequential run blocked before " + channel_name(want_, *env_));
            return reply_stalled();
        }
        const Action& a = steps.front().action;
        if (!a.is_internal()) {
            if (a.msg.channel() != want_) {
                fail("sequential run reaches " + channel_name(a.msg.channel(), *env_) + " before " +
                     channel_name(want_, *env_));
                return reply_stalled();
            }
            phase_ = UnwindFinal;
            plan(Decision::accept(want_));
            return;
        }
        phase_ = Unwind;
        step_ = a.msg.channel();
        plan(Decision::accept(step_));
    }

    void on_source(const Observation& o) override {
        int phase = phase_;
        phase_ = Idle;
        if (phase == EnvForward) {
            if (o.delivered) {
                Message m{kEnvironment, asked_.second, o.value.value_or(Value::unit())};
                deliver(target_, m);
                deliver(source_, m);
            }
            return reply(o);
        }
        if (!o.delivered) {
            fail("sequential source refused " + channel_name(o.ch, *env_));
            return reply_stalled();
        }
        if (phase == Unwind) {
            if (!view_step(source_, step_)) fail("sequential view out of step");
            return advance();
        }
        if (!view_step(source_, want_)) fail("sequential view out of step");
        if (!view_step(target_, asked_)) fail("concurrent view out of step");
        reply(o);
    }

private:
    Configuration target_, source_;
    Channel want_{kNoEndpoint, kNoEndpoint};
    Channel step_{kNoEndpoint, kNoEndpoint};
};

// ---------------------------------------------------------------- corruption

class CorruptionSim : public Simulator {
public:
    CorruptionSim(AdversaryP a, Configuration target, Configuration source, const HostEnv& env,
                  const Attack& attack)
        : Simulator(std::move(a), &env, attack), target_(std::move(target)), source_(std::move(source)) {}
    AdversaryP clone() const override { return std::make_unique<CorruptionSim>(*this); }
    void encode(std::string& out) const override {
        encode_config(out, target_);
        encode_config(out, source_);
        encode_int(out, step_.first);
        encode_int(out, step_.second);
        out += external_ ? 'x' : 'i';
        encode_base(out);
    }

protected:
    void translate(const Decision& d) override {
        if (d.kind == Decision::Kind::Emit) {
            deliver(target_, d.msg);
            if (d.msg.to == kEnvironment) {
                plan(d);
            } else if (d.msg.from == kAdversary && d.msg.to >= 0 && !malicious(d.msg.to)) {
                deliver(source_, d.msg);
                plan(d);
            }
            return;
        }
        if (d.ch.first == kEnvironment) {
            phase_ = EnvForward;
            plan(d);
            return;
        }
        auto st = output_on(target_, d.ch);
        if (!st) return reply_stalled();
        external_ = !st->second.action.is_internal();
        advance();
    }

    static bool erased(const Stmt& n, const CorruptionSim& s) {
        switch (n.kind) {
            case StmtKind::Let: return s.malicious(n.h1);
            case StmtKind::Move: return s.malicious(n.h1) && s.malicious(n.h2);
            case StmtKind::Select: return s.malicious(n.h1);
            default: return false;
        }
    }

    // Runs the source through code of malicious hosts, then issues the
    // counterpart of the target step.
    void advance() {
        auto pot = probe_first(source_);
        if (!pot) {
            fail("uncorrupted run blocked");
            return reply_stalled();
        }
        const Stmt& n = *pot->node;
        const Action& sa = pot->stmt_action;
        if (erased(n, *this)) {
            phase_ = Skip;
            if (sa.dir == Dir::In) {
                if (!pot->ready && sa.msg.from == kAdversary) {
                    Message m{kAdversary, sa.msg.to, Value::unit()};
                    deliver(source_, m);
                    plan(Decision::emit(m));
                }
                step_ = {sa.msg.to, sa.msg.to};
            } else {
                step_ = sa.msg.channel();
            }
            plan(Decision::accept(step_));
            return;
        }
        phase_ = Final;
        step_ = (n.kind == StmtKind::Move && malicious(n.h1)) ? Channel{n.h1, n.h1} : asked_;
        plan(Decision::accept(step_));
    }

    void on_source(const Observation& o) override {
        int phase = phase_;
        phase_ = Idle;
        if (phase == EnvForward) {
            if (o.delivered) {
                Message m{kEnvironment, asked_.second, o.value.value_or(Value::unit())};
                deliver(target_, m);
                deliver(source_, m);
            }
            return reply(o);
        }
        if (!o.delivered) {
            fail("uncorrupted source refused " + channel_name(o.ch, *env_));
            return reply_stalled();
        }
        if (!view_step(source_, step_)) fail("uncorrupted view out of step");
        if (phase == Skip) return advance();
        Action a;
        if (!view_step(target_, asked_, &a)) fail("corrupted view out of step");
        reply(external_ ? o : seen(a));
    }

private:
    Configuration target_, source_;
    Channel step_{kNoEndpoint, kNoEndpoint};
    bool external_ = false;
};

// ---------------------------------------------------------------- host selection

class HostSelectionSim : public Simulator {
public:
    HostSelectionSim(AdversaryP a, Configuration target, const HostEnv& env, const Attack& attack)
        : Simulator(std::move(a), &env, attack), target_(std::move(target)) {}
    AdversaryP clone() const override { return std::make_unique<HostSelectionSim>(*this); }
    void encode(std::string& out) const override {
        encode_config(out, target_);
        encode_base(out);
    }

protected:
    void translate(const Decision& d) override {
        if (d.kind == Decision::Kind::Emit) {
            // Endorsement inputs wait in the view until a host consumes them.
            deliver(target_, d.msg);
            if (d.msg.to == kEnvironment) plan(d);
            return;
        }
        if (d.ch.first == kEnvironment) {
            phase_ = EnvForward;
            plan(d);
            return;
        }
        auto st = output_on(target_, d.ch);
        if (!st) return reply_stalled();
        const ProcessStep& ps = st->second;
        const Stmt& n = *ps.node;
        if (n.kind == StmtKind::Move || n.kind == StmtKind::Select) {
            apply_output(target_, st->first, ps);
            return reply(seen(ps.action));
        }
        Channel src{kIdeal, kIdeal};
        if (n.kind == StmtKind::Let && n.expr.is_io()) {
            src = d.ch;
        } else if (!ps.action.is_internal()) {
            src = {kIdeal, ps.action.msg.to};
        }
        if (ps.stmt_action.dir == Dir::In && ps.stmt_action.msg.from == kAdversary)
            plan(Decision::emit({kAdversary, kIdeal, ps.stmt_action.msg.value}));
        phase_ = Final;
        plan(Decision::accept(src));
    }

    void on_source(const Observation& o) override {
        int phase = phase_;
        phase_ = Idle;
        if (phase == EnvForward) {
            if (o.delivered) deliver(target_, {kEnvironment, asked_.second, o.value.value_or(Value::unit())});
            return reply(o);
        }
        if (!o.delivered) {
            fail("source program refused " + channel_name(o.ch, *env_));
            return reply_stalled();
        }
        Action a;
        if (!view_step(target_, asked_, &a)) fail("choreography view out of step");
        if (a.is_internal()) return reply(seen(a));
        reply({asked_, true, o.value});
    }

private:
    Configuration target_;
};

}  // namespace

AdversaryP sim_projection(AdversaryP a) { return std::make_unique<ProjectionSim>(std::move(a)); }

AdversaryP sim_ideal_execution(AdversaryP a, Configuration target_view, const HostEnv& env, const Attack& attack) {
    target_view.sem.mode = Mode::SimulatorView;
    return std::make_unique<IdealExecutionSim>(std::move(a), std::move(target_view), env, attack);
}

AdversaryP sim_sequentialization(AdversaryP a, Configuration target_view, Configuration source_view,
                                 const HostEnv& env, const Attack& attack) {
    return std::make_unique<SequentializationSim>(std::move(a), std::move(target_view), std::move(source_view), env,
                                                  attack);
}

AdversaryP sim_corruption(AdversaryP a, Configuration target_view, Configuration source_view, const HostEnv& env,
                          const Attack& attack) {
    return std::make_unique<CorruptionSim>(std::move(a), std::move(target_view), std::move(source_view), env,
                                           attack);
}

AdversaryP sim_host_selection(AdversaryP a, Configuration target_view, const HostEnv& env, const Attack& attack) {
    return std::make_unique<HostSelectionSim>(std::move(a), std::move(target_view), env, attack);
}

}  // namespace chorsec
