#pragma once

#include <stdexcept>

#include "chorsec/lang.hpp"
#include "chorsec/typecheck.hpp"

namespace chorsec {

struct ShapeMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class LowMode { Public, Trusted };

// Equivalent on public (or trusted) data: the values where the two
// statements differ can be abstracted into variables that the type system
// treats as secret (or untrusted).
bool low_equivalent(const StmtP& s1, const StmtP& s2, LowMode mode, const HostEnv& env, const Attack& attack);

// The generalization used by low_equivalent, with the abstracted variables
// bound at the hosts that use them.
struct Generalization {
    StmtP stmt;
    std::vector<std::pair<Var, Ep>> holes;
};
Generalization anti_unify(const StmtP& s1, const StmtP& s2);

}  // namespace chorsec
