#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#ifndef MEDBUILD_FIXTURE_DIR
#error "MEDBUILD_FIXTURE_DIR must point at tests/fixtures"
#endif

inline std::string fixture(const std::string& name) {
    const std::string path = std::string(MEDBUILD_FIXTURE_DIR) + "/" + name;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("missing fixture " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}
