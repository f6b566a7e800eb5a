#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chorsec/buffer.hpp"
#include "chorsec/lang.hpp"

namespace chorsec {

enum class Mode { IdealSequential, IdealConcurrent, RealSequential, RealConcurrent, Async, SimulatorView };
const char* to_string(Mode m);
bool is_ideal(Mode m);
bool is_concurrent(Mode m);
// Moves and selections leave a pending receive behind.
bool is_async(Mode m);

struct Semantics {
    Mode mode = Mode::IdealSequential;
    const HostEnv* env = nullptr;
    Attack attack;
    // Delay only when the action shares no host with the frame.
    bool synchronous_delay = false;
};

enum class Dir : std::uint8_t { In, Out };

struct Action {
    Dir dir = Dir::Out;
    Message msg;
    static Action internal(Ep h) { return {Dir::Out, {h, h, Value::unit()}}; }
    Ep actor() const { return dir == Dir::In ? msg.to : msg.from; }
    bool is_internal() const { return dir == Dir::Out && msg.from == msg.to; }
    friend bool operator==(const Action&, const Action&) = default;
    friend auto operator<=>(const Action&, const Action&) = default;
};

std::string to_string(const Action& a, const HostEnv& env);

// Variable store of a process; bindings are never shadowed.
class Store {
public:
    std::optional<Value> get(Var x) const;
    void set(Var x, Value v);
    Value value_of(const Atom& a) const;
    const std::vector<std::pair<Var, Value>>& entries() const { return items_; }

private:
    std::vector<std::pair<Var, Value>> items_;
};

// Replaces every variable bound in `store` by its value.
StmtP materialize(const StmtP& s, const Store& store);

using Binds = std::vector<std::pair<Var, Value>>;

struct ExprStep {
    Action action;
    Value result;
};

struct StmtStep {
    Action action;
    StmtP next;
    Binds binds;
    const Stmt* node = nullptr;  // the statement that stepped
};

// Candidate values for an input on a channel.
using InputSource = std::function<std::vector<Value>(const Channel&)>;

std::vector<ExprStep> enabled_expr_steps(const Semantics& sem, Ep h, const Expr& e, const Store& store,
                                         const InputSource& inputs);
std::vector<StmtStep> enabled_stmt_steps(const Semantics& sem, const StmtP& s, const Store& store,
                                         const InputSource& inputs);
// Statement steps with inputs drawn from a finite domain.
std::vector<StmtStep> enabled_stmt_steps(const Semantics& sem, const StmtP& s, const Store& store,
                                         const std::vector<Value>& domain);

struct ProcessState {
    std::vector<Ep> hosts;  // sorted
    Buffer buffer;
    StmtP stmt;
    Store store;

    bool owns(Ep h) const;
};

struct ProcessStep {
    Action action;          // process-level action
    ProcessState next;
    Action stmt_action;     // statement-level action (an input when a buffered message was consumed)
    const Stmt* node = nullptr;
};

// Statement steps a process could take if the inputs it waits for were
// buffered; `ready` tells whether the needed message is already present.
struct Potential {
    Action stmt_action;
    const Stmt* node = nullptr;
    bool ready = true;
};
std::vector<Potential> potential_steps(const Semantics& sem, const ProcessState& p);

struct NotEnabled : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input totality: buffers relevant messages, discards the rest.
ProcessState step_process_input(const ProcessState& p, const Message& m);
// Outputs and internal steps, including buffer pops that feed the statement.
std::vector<ProcessStep> enabled_process_outputs(const Semantics& sem, const ProcessState& p);
ProcessState step_process(const Semantics& sem, const ProcessState& p, const Action& a);

struct Configuration {
    Semantics sem;
    std::vector<ProcessState> procs;

    bool quiescent_statements() const;  // every statement is Skip
};

struct ConfigStep {
    Action action;
    size_t process;  // emitting process
};

std::vector<ConfigStep> enabled_config_steps(const Configuration& c);
// Applies an output by one process (delivered as input to all others) or an
// external input (delivered to every process).
void apply_output(Configuration& c, size_t process, const ProcessStep& step);
Configuration step_config(const Configuration& c, const Action& a);
void deliver(Configuration& c, const Message& m);
// The enabled output on `ch`, if any. Asserts per-channel output determinism.
std::optional<std::pair<size_t, ProcessStep>> output_on(const Configuration& c, const Channel& ch);

// Canonical encodings for state hashing.
void encode_int(std::string& out, long long v);
void encode_value(std::string& out, const Value& v);
void encode_stmt(std::string& out, const StmtP& s);
void encode_process(std::string& out, const ProcessState& p);
void encode_config(std::string& out, const Configuration& c);

struct DeterminismViolation : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace chorsec
