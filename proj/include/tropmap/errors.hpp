#ifndef TROPMAP_ERRORS_HPP
#define TROPMAP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tropmap {

// Input could not be parsed or is structurally malformed.
struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

// A documented precondition or structural invariant was violated.
// `name` identifies the invariant for reporting.
struct invariant_error : std::runtime_error {
    std::string name;
    invariant_error(std::string n, const std::string& what)
        : std::runtime_error(n + ": " + what), name(std::move(n)) {}
};

// A numerical routine failed to converge within its budget.
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace tropmap

#endif
