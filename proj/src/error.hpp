#pragma once

#include <stdexcept>
#include <string>

namespace shum {

// Error classes map 1:1 onto CLI exit codes / C API status values.
enum class errc {
    ok = 0,
    verification = 1, // a requested check did not pass
    config = 2,       // invalid argument or configuration
    numeric = 3,      // numerical guard tripped (overflow, non-convergence)
    internal = 4,
};

class error : public std::runtime_error {
public:
    error(errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    errc code() const { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) { throw error(code, msg); }
[[noreturn]] inline void fail_config(const std::string& msg) { fail(errc::config, msg); }
[[noreturn]] inline void fail_numeric(const std::string& msg) { fail(errc::numeric, msg); }

inline void require(bool cond, errc code, const std::string& msg) {
    if (!cond) fail(code, msg);
}

} // namespace shum
