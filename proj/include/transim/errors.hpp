#ifndef TRANSIM_ERRORS_HPP
#define TRANSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace transim {

/// Base class for all recoverable simulator errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed textual address; carries the offending token.
struct AddressParseError : Error {
    AddressParseError(const std::string& msg, std::string tok)
        : Error(msg + ": '" + tok + "'"), token(std::move(tok)) {}
    std::string token;
};

struct NotSixToFour : Error {
    explicit NotSixToFour(const std::string& what) : Error(what) {}
};

struct PrefixMismatch : Error {
    explicit PrefixMismatch(const std::string& what) : Error(what) {}
};

struct NestedTunnel : Error {
    explicit NestedTunnel(const std::string& what) : Error(what) {}
};

struct NotTunneled : Error {
    explicit NotTunneled(const std::string& what) : Error(what) {}
};

struct NoRoute : Error {
    explicit NoRoute(const std::string& what) : Error(what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(what) {}
};

struct NotTranslatable : Error {
    explicit NotTranslatable(const std::string& what) : Error(what) {}
};

struct PoolExhausted : Error {
    explicit PoolExhausted(const std::string& what) : Error(what) {}
};

struct NoBinding : Error {
    explicit NoBinding(const std::string& what) : Error(what) {}
};

struct ComparisonError : Error {
    explicit ComparisonError(const std::string& what) : Error(what) {}
};

/// Scenario file problem, annotated with the line it came from.
struct ScenarioError : Error {
    ScenarioError(const std::string& msg, int line_no)
        : Error(msg + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
    int line;
};

/// Scheduling into the past is a programming bug, not a runtime condition.
struct SchedulingError : std::logic_error {
    explicit SchedulingError(const std::string& what) : std::logic_error(what) {}
};

struct EmptyQueue : std::logic_error {
    explicit EmptyQueue(const std::string& what) : std::logic_error(what) {}
};

}  // namespace transim

#endif
