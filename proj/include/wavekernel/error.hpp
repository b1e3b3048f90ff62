#pragma once
/**
 * @file error.hpp
 * @brief Exception hierarchy. Each category maps onto a CLI exit code.
 */

#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace wk {

enum class ErrorKind {
    Config = 2,      // bad input: config, file format, preconditions
    Numeric = 3,     // instability, singularity, non-finite values
    Validation = 4,  // a verification check failed
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

struct NumericError : Error {
    explicit NumericError(const std::string& what) : Error(ErrorKind::Numeric, what) {}
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

namespace detail {

template <class... Args>
std::string cat(Args&&... args) {
    std::ostringstream os;
    os.precision(17);
    (os << ... << std::forward<Args>(args));
    return os.str();
}

}  // namespace detail

template <class E = ConfigError, class... Args>
inline void require(bool cond, Args&&... args) {
    if (!cond) throw E(detail::cat(std::forward<Args>(args)...));
}

}  // namespace wk
