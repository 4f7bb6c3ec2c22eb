#pragma once

#include <stdexcept>
#include <string>

namespace andova {

// Invalid user input or violated precondition (CLI exit code 2).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical routine failed to produce a trustworthy answer (CLI exit code 3).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace andova
