#ifndef NGRAMLR_ERRORS_HPP
#define NGRAMLR_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ngramlr {

/// Input data that cannot be parsed (bad annotation line, corrupt model file).
class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

/// Parse failure with a 1-based line number.
class parse_error : public data_error {
public:
    parse_error(const std::string& what, std::size_t line)
        : data_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// A caller violated an operation's precondition (bad argument, zero total,
/// regularizer that would divide by zero).
class precondition_error : public std::runtime_error {
public:
    explicit precondition_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace ngramlr

#endif
