#pragma once

#include <stdexcept>
#include <string>

namespace dpm {

/// Base of every exception thrown by the simulator core.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A sleep or off state was asked to execute instructions.
class NotExecutableState : public Error {
public:
    using Error::Error;
};

class NegativeEnergy : public Error {
public:
    using Error::Error;
};

class NegativeIdle : public Error {
public:
    using Error::Error;
};

/// Explicit-Euler thermal step larger than half the RC time constant.
class UnstableStep : public Error {
public:
    using Error::Error;
};

class InvalidStates : public Error {
public:
    using Error::Error;
};

class UnknownIp : public Error {
public:
    using Error::Error;
};

class UnknownScenario : public Error {
public:
    using Error::Error;
};

/// Scenario document or configuration rejected by validation.
class ConfigInvalid : public Error {
public:
    using Error::Error;
};

/// Baseline with zero energy or zero excess temperature; metrics undefined.
class DegenerateBaseline : public Error {
public:
    using Error::Error;
};

}  // namespace dpm
