#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "chorsec/labels.hpp"
#include "chorsec/lang.hpp"

namespace fixtures {

inline std::string read(const std::string& name) {
    std::ifstream in(std::string(CHORSEC_PROGRAMS) + "/" + name);
    if (!in) throw std::runtime_error("missing fixture " + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline chorsec::HostEnv hosts(const std::string& name = "hosts.txt") { return chorsec::parse_host_file(read(name)); }

inline chorsec::Program program(const std::string& name, const chorsec::HostEnv& env) {
    return chorsec::parse_program(read(name), env);
}

inline chorsec::Attack attack(const std::string& name, const chorsec::HostEnv& env) {
    return chorsec::parse_attack_file(read(name), env.atoms());
}

}  // namespace fixtures
