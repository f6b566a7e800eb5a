#include "chorsec/adversary.hpp"

#include <sstream>

namespace chorsec {

namespace {

void encode_channel(std::string& out, const Channel& c) {
    encode_int(out, c.first);
    encode_int(out, c.second);
}

void encode_decision(std::string& out, const Decision& d) {
    out += static_cast<char>('A' + static_cast<int>(d.kind));
    encode_channel(out, d.ch);
    if (d.kind == Decision::Kind::Emit) encode_value(out, d.msg.value);
}

}  // namespace

std::string to_string(const Decision& d, const HostEnv& env) {
    switch (d.kind) {
        case Decision::Kind::Accept: return "accept " + channel_name(d.ch, env);
        case Decision::Kind::Emit: return "emit " + channel_name(d.ch, env) + " " + to_string(d.msg.value);
        case Decision::Kind::Stop: return "stop";
        case Decision::Kind::Yield: return "yield";
    }
    return "?";
}

bool honest_endpoint(Ep e, const HostEnv& env, const Attack& attack) {
    if (e == kEnvironment || e == kIdeal) return true;
    if (e == kAdversary) return false;
    return env.honest(e, attack);
}

bool visible(const Channel& ch, const HostEnv& env, const Attack& attack) {
    return !(honest_endpoint(ch.first, env, attack) && honest_endpoint(ch.second, env, attack));
}

Observation observe_action(const Action& a, const HostEnv& env, const Attack& attack) {
    Observation o;
    o.ch = a.msg.channel();
    o.delivered = true;
    if (a.is_internal() || visible(o.ch, env, attack)) o.value = a.msg.value;
    return o;
}

bool may_emit(const Message& m, const HostEnv& env, const Attack& attack) {
    if (m.from == m.to) return false;
    if (m.from == kAdversary) return true;
    return m.from >= 0 && env.malicious(m.from, attack);
}

std::vector<Channel> schedulable_channels(const HostEnv& env, bool with_ideal) {
    std::vector<Ep> actors;
    for (Ep h = 0; h < env.host_count(); ++h) actors.push_back(h);
    if (with_ideal) actors.push_back(kIdeal);
    std::vector<Channel> out;
    for (Ep h = 0; h < env.host_count(); ++h) out.emplace_back(kEnvironment, h);
    for (Ep a : actors) {
        out.emplace_back(a, a);
        for (Ep b : actors)
            if (b != a) out.emplace_back(a, b);
        out.emplace_back(a, kEnvironment);
        out.emplace_back(a, kAdversary);
    }
    return out;
}

// ---------------------------------------------------------------- dummy

DummyAdversary::DummyAdversary(std::vector<Channel> channels)
    : channels_(std::make_shared<const std::vector<Channel>>(std::move(channels))) {}

Decision DummyAdversary::decide_const() const {
    if (channels_->empty() || stalls_ >= channels_->size()) return Decision::stop();
    return Decision::accept((*channels_)[next_]);
}

void DummyAdversary::observe(const Observation& o) {
    stalls_ = o.delivered ? 0 : stalls_ + 1;
    next_ = (next_ + 1) % channels_->size();
}

void DummyAdversary::encode(std::string& out) const {
    out += 'D';
    encode_int(out, static_cast<long long>(next_));
    encode_int(out, static_cast<long long>(stalls_));
}

// ---------------------------------------------------------------- prefix

PrefixAdversary::PrefixAdversary(Plan plan, std::vector<Channel> channels)
    : plan_(plan.begin(), plan.end()), tail_(std::move(channels)) {}

Decision PrefixAdversary::decide() {
    awaiting_ = false;
    last_.reset();
    if (!plan_.empty()) {
        std::optional<Decision> d = plan_.front();
        plan_.pop_front();
        if (d) {
            awaiting_ = d->kind == Decision::Kind::Accept;
            return *d;
        }
    }
    return tail_.decide();
}

void PrefixAdversary::observe(const Observation& o) {
    last_ = o;
    if (awaiting_) {
        awaiting_ = false;
        return;
    }
    tail_.observe(o);
}

void PrefixAdversary::encode(std::string& out) const {
    out += 'P';
    for (const auto& d : plan_) {
        if (d)
            encode_decision(out, *d);
        else
            out += '_';
    }
    out += awaiting_ ? '!' : '.';
    tail_.encode(out);
}

// ---------------------------------------------------------------- gate

Decision GatedAdversary::decide() {
    if (allowance_ <= 0) return Decision::yield();
    Decision d = inner_->decide();
    if (d.kind != Decision::Kind::Yield) --allowance_;
    return d;
}

void GatedAdversary::encode(std::string& out) const {
    out += 'G';
    encode_int(out, allowance_);
    inner_->encode(out);
}

// ---------------------------------------------------------------- scripts

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

Channel parse_channel(const std::string& text, const HostEnv& env, int line) {
    size_t arrow = text.find("->");
    if (arrow == std::string::npos) throw ScriptError("line " + std::to_string(line) + ": expected <from>-><to>");
    auto a = env.find_endpoint(trim(text.substr(0, arrow)));
    auto b = env.find_endpoint(trim(text.substr(arrow + 2)));
    if (!a || !b) throw ScriptError("line " + std::to_string(line) + ": unknown endpoint in " + text);
    return {*a, *b};
}

Value parse_script_value(const std::string& text, int line) {
    auto v = parse_value(trim(text));
    if (!v) throw ScriptError("line " + std::to_string(line) + ": bad value " + text);
    return *v;
}

ScriptTurn parse_turn(const std::string& text, const HostEnv& env, int line) {
    ScriptTurn t;
    t.line = line;
    std::istringstream in(text);
    std::string verb;
    in >> verb;
    if (verb == "accept") {
        std::string ch;
        in >> ch;
        t.decision = Decision::accept(parse_channel(ch, env, line));
    } else if (verb == "emit") {
        std::string ch, val;
        in >> ch >> val;
        Channel c = parse_channel(ch, env, line);
        t.decision = Decision::emit({c.first, c.second, parse_script_value(val, line)});
    } else if (verb == "stop") {
        t.decision = Decision::stop();
    } else if (verb == "dummy") {
        t.dummy = true;
    } else {
        throw ScriptError("line " + std::to_string(line) + ": unknown turn '" + verb + "'");
    }
    std::string extra;
    if (in >> extra) throw ScriptError("line " + std::to_string(line) + ": trailing text '" + extra + "'");
    return t;
}

}  // namespace

std::vector<ScriptTurn> parse_script(const std::string& text, const HostEnv& env) {
    std::vector<ScriptTurn> out;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = trim(raw.substr(0, raw.find('#')));
        if (s.empty()) continue;
        if (s.rfind("when ", 0) == 0) {
            size_t colon = s.find(':');
            size_t eq = s.find('=');
            if (colon == std::string::npos || eq == std::string::npos || eq > colon)
                throw ScriptError("line " + std::to_string(line) + ": expected when <ch> = <value>: <turn>");
            ScriptTurn t = parse_turn(trim(s.substr(colon + 1)), env, line);
            t.guard_channel = parse_channel(trim(s.substr(5, eq - 5)), env, line);
            t.guard_value = parse_script_value(s.substr(eq + 1, colon - eq - 1), line);
            out.push_back(t);
        } else {
            out.push_back(parse_turn(s, env, line));
        }
    }
    return out;
}

ScriptAdversary::ScriptAdversary(std::vector<ScriptTurn> turns, std::vector<Channel> channels)
    : turns_(std::make_shared<const std::vector<ScriptTurn>>(std::move(turns))), tail_(std::move(channels)) {}

Decision ScriptAdversary::decide() {
    while (!in_dummy_ && pos_ < turns_->size()) {
        const ScriptTurn& t = (*turns_)[pos_];
        if (t.dummy) {
            in_dummy_ = true;
            break;
        }
        ++pos_;
        if (t.guard_channel) {
            bool hit = false;
            for (const auto& [c, v] : seen_)
                if (c == *t.guard_channel) hit = v == t.guard_value;
            if (!hit) continue;
        }
        return t.decision;
    }
    if (in_dummy_) return tail_.decide();
    return Decision::stop();
}

void ScriptAdversary::observe(const Observation& o) {
    if (o.delivered && o.value) {
        bool found = false;
        for (auto& [c, v] : seen_)
            if (c == o.ch) {
                v = *o.value;
                found = true;
            }
        if (!found) seen_.emplace_back(o.ch, *o.value);
    }
    if (in_dummy_) tail_.observe(o);
}

void ScriptAdversary::encode(std::string& out) const {
    out += 'S';
    encode_int(out, static_cast<long long>(pos_));
    out += in_dummy_ ? '!' : '.';
    for (const auto& [c, v] : seen_) {
        encode_channel(out, c);
        encode_value(out, v);
    }
    tail_.encode(out);
}

std::vector<std::string> validate_script(const std::vector<ScriptTurn>& turns, const HostEnv& env,
                                         const Attack& attack) {
    std::vector<std::string> problems;
    for (const auto& t : turns) {
        std::string where = "line " + std::to_string(t.line) + ": ";
        if (t.guard_channel && !visible(*t.guard_channel, env, attack))
            problems.push_back(where + "guard reads the hidden channel " + channel_name(*t.guard_channel, env));
        if (t.decision.kind == Decision::Kind::Emit && !t.dummy && !may_emit(t.decision.msg, env, attack))
            problems.push_back(where + "emission from " + env.name(t.decision.msg.from) +
                               ", which the adversary does not control");
    }
    return problems;
}

}  // namespace chorsec
