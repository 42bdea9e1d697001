#ifndef WGTORUS_ERRORS_HPP
#define WGTORUS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace wgtorus {

// Exit-code mapping used by the CLI: config 2, numeric/regime 3, audit 4.

struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct regime_error : numeric_error {
    explicit regime_error(const std::string& msg) : numeric_error(msg) {}
};

struct stability_error : numeric_error {
    explicit stability_error(const std::string& msg) : numeric_error(msg) {}
};

struct geometry_error : numeric_error {
    explicit geometry_error(const std::string& msg) : numeric_error(msg) {}
};

struct audit_error : std::runtime_error {
    explicit audit_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace wgtorus

#endif
