#pragma once

#include <stdexcept>
#include <string>

namespace nlg {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidFieldError : Error {
    using Error::Error;
};

struct CompatibilityError : Error {
    using Error::Error;
};

struct ConvergenceError : Error {
    using Error::Error;
};

struct ZeroDataError : Error {
    using Error::Error;
};

struct NonPositiveConductivity : Error {
    using Error::Error;
};

struct ProxNoConvergence : Error {
    using Error::Error;
};

struct NotInMg : Error {
    using Error::Error;
};

struct DegenerateNormalization : Error {
    using Error::Error;
};

struct DegenerateRenormalization : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

} // namespace nlg
