#pragma once

#include <stdexcept>
#include <string>

namespace uavsec {

// Invalid or inconsistent scenario configuration (exit code 2 at the CLI).
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// A metric produced a non-finite value during a run (exit code 3).
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// File/stream failure surfaced with the offending path (exit code 4).
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace uavsec
