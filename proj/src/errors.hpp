#pragma once

#include <stdexcept>
#include <string>

namespace evac {

// Stable error categories, mirrored one-to-one by the C API status codes.
enum class ErrorCode {
    ok = 0,
    invalid_argument = 1,
    io = 2,
    no_exit = 3,
    invalid_config = 4,
    too_crowded = 5,
    budget_exhausted = 6,
    runtime = 7,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
    if (!cond) fail(code, what);
}

} // namespace evac
