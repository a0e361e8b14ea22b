#pragma once

#include <stdexcept>
#include <string>

namespace tiermon {

enum class error_code {
    invalid_argument,
    validation,
    not_converged,
    io,
    domain,
    too_large,
    internal,
};

class error : public std::runtime_error {
public:
    error(error_code code, const std::string& what) : std::runtime_error(what), code_(code) {}

    error_code code() const { return code_; }

private:
    error_code code_;
};

} // namespace tiermon
