#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace ksync {

// Raised when a configurable exploration guard is exceeded.  The stage names
// the construction that grew past its limit ("nfa-states", "reach-nodes", ...).
class GuardError : public std::runtime_error {
public:
    GuardError(std::string stage, const std::string& detail)
        : std::runtime_error(stage + ": " + detail), stage_(std::move(stage)) {}

    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

// Input-format error with a 1-based source position.
class ParseError : public std::runtime_error {
public:
    ParseError(int line, int column, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ":" + std::to_string(column) +
                             ": " + message),
          line_(line), column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

// Consistency failure inside the library itself; never caused by user input.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Limits for all potentially explosive constructions.  Every limit turns a
// blow-up into a clean GuardError instead of unbounded work.
struct Guards {
    std::size_t nfa_states = 1'000'000;         // lazily materialized automata
    std::size_t product_states = 1'000'000;     // global control product
    std::size_t reach_nodes = 100'000;          // reachable-layout fixpoint
    std::size_t explore_executions = 1'000'000; // bounded simulator
    std::size_t linearization_nodes = 1'000'000;// linearization search nodes
    std::size_t oracle_events = 10;             // max events for enumeration oracles
    std::size_t enumerate_words = 100'000;      // language-enumeration output
    std::size_t pending_slots = 64;             // exact prime-recognizer bookkeeping
};

} // namespace ksync
