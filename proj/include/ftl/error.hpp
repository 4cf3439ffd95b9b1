#pragma once

#include <stdexcept>
#include <string>

namespace ftl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidShape : public Error {
public:
    using Error::Error;
};

class IncompatibleGrids : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class UnknownPoint : public Error {
public:
    explicit UnknownPoint(double t)
        : Error("point " + std::to_string(t) + " is not on the time scale"), t_(t) {}
    double t() const { return t_; }

private:
    double t_;
};

class NoSuccessor : public Error {
public:
    explicit NoSuccessor(double t)
        : Error("point " + std::to_string(t) + " is terminal and has no successor"), t_(t) {}
    double t() const { return t_; }

private:
    double t_;
};

class NonRegressive : public Error {
public:
    NonRegressive(double t, double value)
        : Error("1 + mu(t) p(t) vanishes at t = " + std::to_string(t) + " (value " +
                std::to_string(value) + ")"),
          t_(t) {}
    double t() const { return t_; }

private:
    double t_;
};

/// Contractive solver step whose Hukuhara difference does not exist.
class StepFailure : public Error {
public:
    StepFailure(double t, const std::string& what)
        : Error("step failure at t = " + std::to_string(t) + ": " + what), t_(t), reason_(what) {}
    double t() const { return t_; }
    const std::string& reason() const { return reason_; }

private:
    double t_;
    std::string reason_;
};

/// Non-finite state produced during a solve.
class SolverAbort : public Error {
public:
    SolverAbort(double t, const std::string& what)
        : Error("solver aborted at t = " + std::to_string(t) + ": " + what), t_(t), reason_(what) {}
    double t() const { return t_; }
    const std::string& reason() const { return reason_; }

private:
    double t_;
    std::string reason_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace ftl
