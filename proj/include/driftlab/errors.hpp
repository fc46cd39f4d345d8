#pragma once

#include <stdexcept>
#include <string>

namespace driftlab {

struct cap_exceeded : std::runtime_error {
    explicit cap_exceeded(const std::string& what) : std::runtime_error(what) {}
};

struct length_mismatch : std::invalid_argument {
    explicit length_mismatch(const std::string& what) : std::invalid_argument(what) {}
};

struct singular_system : std::runtime_error {
    explicit singular_system(const std::string& what) : std::runtime_error(what) {}
};

struct optimal_state : std::invalid_argument {
    explicit optimal_state(const std::string& what) : std::invalid_argument(what) {}
};

struct not_linear_like : std::invalid_argument {
    explicit not_linear_like(const std::string& what) : std::invalid_argument(what) {}
};

struct formula_domain_error : std::domain_error {
    explicit formula_domain_error(const std::string& what) : std::domain_error(what) {}
};

struct config_error : std::invalid_argument {
    explicit config_error(const std::string& what) : std::invalid_argument(what) {}
};

} // namespace driftlab
