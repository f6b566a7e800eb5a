#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "chorsec/buffer.hpp"
#include "chorsec/lang.hpp"
#include "chorsec/syncheck.hpp"
#include "chorsec/typecheck.hpp"

namespace chorsec {

struct TransformError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MaliciousIf : TransformError {
    using TransformError::TransformError;
};
struct MergeFailure : TransformError {
    using TransformError::TransformError;
};

struct HostProgram {
    StmtP stmt;
    Buffer buffer;
};

using DistributedProgram = std::map<Ep, HostProgram>;

StmtP source_of(const StmtP& choreography);

struct SynthesisReport {
    bool extraction = false;
    bool typed = false;
    bool synchronized = false;
    bool ok() const { return extraction && typed && synchronized; }
    std::vector<std::string> messages;
    std::vector<Diagnostic> diagnostics;
    SyncResult sync;
};

SynthesisReport validate_synthesis(const StmtP& source, const StmtP& choreography, const HostEnv& env,
                                   const Attack& attack, SyncInit init = SyncInit::Top);

StmtP corrupt_stmt(const StmtP& s, const HostEnv& env, const Attack& attack);
DistributedProgram corrupt_config(const DistributedProgram& d, const HostEnv& env, const Attack& attack);

StmtP project(const StmtP& s, Ep h);
// Projection of a run-time statement also yields the receiver's in-flight messages.
StmtP project(const StmtP& s, Ep h, Buffer* inflight);
StmtP merge(const StmtP& s1, const StmtP& s2);
DistributedProgram partition(const StmtP& s, const HostEnv& env, const Buffer& buffer = {});
DistributedProgram partition(const StmtP& s, const std::vector<Ep>& hosts, const Buffer& buffer = {});

}  // namespace chorsec
