#pragma once

#include <stdexcept>
#include <string>

namespace tdt {

// Error categories map onto CLI exit codes (usage 2, data 3, numerical 4).
enum class ErrorKind { Usage = 2, Data = 3, Numerical = 4 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error(ErrorKind::Usage, what) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

// Re-throws `e` with the pipeline stage prepended, preserving its kind.
[[noreturn]] inline void rethrow_in_stage(const std::string& stage, const Error& e) {
    throw Error(e.kind(), stage + ": " + e.what());
}

} // namespace tdt
