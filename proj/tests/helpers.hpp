#pragma once

#include <string>

#include "fp3d/yal.hpp"

namespace fp3d_test {

inline std::string fixture(const std::string& name) {
    return std::string(FP3D_FIXTURE_DIR) + "/" + name;
}

inline fp3d::Netlist load_fixture(const std::string& name) {
    return fp3d::parse_yal_file(fixture(name));
}

}  // namespace fp3d_test
