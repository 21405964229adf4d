#pragma once

#include <stdexcept>
#include <string>

namespace fp3d {

// Base class for every toolkit error. CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input-side errors (bad file, bad netlist). Exit code 2 in the CLI.
class InputError : public Error {
public:
    using Error::Error;
};

class IoError : public InputError {
public:
    using InputError::InputError;
};

class SyntaxError : public InputError {
public:
    SyntaxError(int line, const std::string& reason)
        : InputError("line " + std::to_string(line) + ": " + reason), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class UnknownModule : public InputError {
public:
    UnknownModule(const std::string& instance, const std::string& module_name)
        : InputError("instance '" + instance + "' references undeclared module '" +
                     module_name + "'") {}
};

class MissingParent : public InputError {
public:
    MissingParent() : InputError("no PARENT module with a NETWORK section found") {}
};

class EmptyNetlist : public InputError {
public:
    EmptyNetlist() : InputError("netlist contains no placeable blocks") {}
};

// Runtime-side errors. Exit code 3 in the CLI.
class UnknownComponent : public Error {
public:
    explicit UnknownComponent(const std::string& what) : Error("unknown component: " + what) {}
};

class GridTooSmall : public Error {
public:
    GridTooSmall(long cells, long components)
        : Error("grid has " + std::to_string(cells) + " cells for " +
                std::to_string(components) + " components") {}
};

class MissingDimensions : public Error {
public:
    explicit MissingDimensions(const std::string& who)
        : Error("component '" + who + "' has no usable dimensions") {}
};

class OverlappingInput : public Error {
public:
    OverlappingInput(const std::string& a, const std::string& b)
        : Error("input boxes overlap: '" + a + "' and '" + b + "'") {}
};

class EmptyNet : public Error {
public:
    EmptyNet() : Error("net has no endpoints") {}
};

class UnplacedComponent : public Error {
public:
    explicit UnplacedComponent(const std::string& who)
        : Error("component '" + who + "' has no placed box") {}
};

class EmptyPlacement : public Error {
public:
    EmptyPlacement() : Error("placement contains no boxes") {}
};

class ConfigInvalid : public Error {
public:
    using Error::Error;
};

class BindFailure : public Error {
public:
    using Error::Error;
};

class ConnectFailure : public Error {
public:
    using Error::Error;
};

}  // namespace fp3d
