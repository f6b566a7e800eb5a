#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chorsec/labels.hpp"

namespace chorsec {

struct Value {
    enum class Kind : std::uint8_t { Unit, Bool, Int };
    Kind kind = Kind::Unit;
    std::int64_t i = 0;

    static Value unit() { return {}; }
    static Value boolean(bool b) { return {Kind::Bool, b ? 1 : 0}; }
    static Value integer(std::int64_t v) { return {Kind::Int, v}; }
    bool is_false() const { return kind == Kind::Bool && i == 0; }

    friend bool operator==(const Value&, const Value&) = default;
    friend auto operator<=>(const Value&, const Value&) = default;
};

std::string to_string(const Value& v);
std::optional<Value> parse_value(const std::string& text);
// The default finite domain: unit, true, false, 0, 1, 2.
std::vector<Value> default_domain();

// Variables are interned names; every binding site owns a distinct id.
using Var = int;
constexpr Var kNoVar = -1;
Var intern_var(const std::string& name);
Var fresh_var(const std::string& base);
const std::string& var_name(Var v);

struct Atom {
    Var var = kNoVar;
    Value val;
    static Atom of(Value v) { return {kNoVar, v}; }
    static Atom of(Var x) { return {x, {}}; }
    bool is_var() const { return var != kNoVar; }
};
bool operator==(const Atom& a, const Atom& b);  // compares variable names

enum class Op : std::uint8_t { Add, Sub, Mul, Lt, Eq, And, Or, Not };
int op_arity(Op op);
const char* op_symbol(Op op);
Value eval_op(Op op, const std::vector<Value>& args);

enum class ExprKind : std::uint8_t { Atomic, Operator, Declassify, Endorse, Input, Output, Receive, Send };

struct Expr {
    ExprKind kind = ExprKind::Atomic;
    Op op = Op::Add;
    std::vector<Atom> args;  // operands; atomic/downgrade/output/send use args[0]
    Label from, to;          // downgrades
    Ep host = kNoEndpoint;   // input/output host, receive/send peer

    static Expr atomic(Atom a);
    static Expr operation(Op op, std::vector<Atom> args);
    static Expr declassify(Atom a, Label from, Label to);
    static Expr endorse(Atom a, Label from, Label to);
    static Expr input(Ep h);
    static Expr output(Atom a, Ep h);
    static Expr receive(Ep peer);
    static Expr send(Atom a, Ep peer);

    bool is_io() const { return kind == ExprKind::Input || kind == ExprKind::Output; }
};
bool operator==(const Expr& a, const Expr& b);

struct Pos {
    int line = 0;
    int col = 0;
};
std::string to_string(const Pos& p);

enum class StmtKind : std::uint8_t { Let, Move, Select, If, Case, Skip, MovePending, SelectPending };

struct Stmt;
using StmtP = std::shared_ptr<const Stmt>;

struct Stmt {
    StmtKind kind = StmtKind::Skip;
    Var var = kNoVar;  // Let, Move, MovePending
    Ep h1 = kNoEndpoint;  // Let/If host; Move/Select/Case/pending sender
    Ep h2 = kNoEndpoint;  // Move/Select/Case/pending receiver
    Expr expr;            // Let
    Atom atom;            // Move payload, If guard
    Value val;            // Select/pending value
    StmtP next;           // continuation of Let/Move/Select/pending
    StmtP then_branch, else_branch;
    std::vector<std::pair<Value, StmtP>> cases;  // sorted by value
    Pos pos;
};

StmtP skip();
StmtP mk_let(Var x, Ep h, Expr e, StmtP next, Pos pos = {});
StmtP mk_move(Ep h1, Atom a, Ep h2, Var x, StmtP next, Pos pos = {});
StmtP mk_select(Ep h1, Value v, Ep h2, StmtP next, Pos pos = {});
StmtP mk_if(Atom guard, Ep h, StmtP then_branch, StmtP else_branch, Pos pos = {});
StmtP mk_case(Ep h1, Ep h2, std::vector<std::pair<Value, StmtP>> cases, Pos pos = {});
StmtP mk_move_pending(Ep h1, Value v, Ep h2, Var x, StmtP next);
StmtP mk_select_pending(Ep h1, Value v, Ep h2, StmtP next);
// Copy of `s` with its continuation replaced (Let/Move/Select/pending only).
StmtP with_next(const Stmt& s, StmtP next);

// Structural equality; variables compare by name.
bool stmt_equal(const StmtP& a, const StmtP& b);
// Equality up to consistent renaming of bound variables.
bool alpha_equal(const StmtP& a, const StmtP& b);

enum class Tier : std::uint8_t { Source, Choreography, Distributed, RunTime };
const char* to_string(Tier t);

struct Program {
    Tier tier = Tier::Choreography;
    Ep host = kNoEndpoint;  // distributed programs may name their host
    StmtP body;
};

struct ParseError : std::runtime_error {
    Pos pos;
    ParseError(const std::string& msg, Pos p)
        : std::runtime_error(msg + " at " + to_string(p)), pos(p) {}
};

// Parses a program file. Host names and principals resolve against `env`.
Program parse_program(const std::string& text, const HostEnv& env);
// Parses a statement list without a header, at the given tier.
StmtP parse_stmts(const std::string& text, const HostEnv& env, Tier tier);

std::string pretty_print(const StmtP& s, const HostEnv& env, int indent = 0);
std::string pretty_print(const Program& p, const HostEnv& env);
std::string to_string(const Expr& e, const HostEnv& env);
std::string to_string(const Atom& a);

// Tier restrictions. Returns the list of violations (empty when conforming).
std::vector<std::string> tier_violations(const StmtP& s, Tier tier, const HostEnv& env, Ep host = kNoEndpoint);
Tier tier_of(const StmtP& s);

std::set<Var> free_vars(const StmtP& s);
std::set<Var> bound_vars(const StmtP& s);
// Hosts of an evaluation-context frame.
std::set<Ep> hosts_of_frame(const Stmt& frame);
// Every host mentioned by a statement annotation.
std::set<Ep> hosts_mentioned(const StmtP& s);
int stmt_size(const StmtP& s);

// Capture-free because bound variables are globally unique.
StmtP substitute(const StmtP& s, Var x, const Atom& a);
Expr substitute(const Expr& e, Var x, const Atom& a);
// Renames bound variables so that every binding site has a distinct name.
StmtP alpha_rename(const StmtP& s);
// Replaces every terminal Skip reachable through continuations by `tail`.
StmtP append(const StmtP& s, const StmtP& tail);

}  // namespace chorsec
