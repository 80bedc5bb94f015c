#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ksync/model.hpp"
#include "ksync/msc.hpp"

namespace ksync {

// Control state plus one queue per process; queue entries remember their
// sender so receive matching is deterministic.
struct Configuration {
    GlobalState control;
    std::vector<std::vector<std::pair<ProcId, PayloadId>>> buffers;

    friend auto operator<=>(const Configuration&, const Configuration&) = default;
};

enum class StepFailure { NoControlTransition, EmptyBuffer, BufferHeadMismatch };
const char* step_failure_name(StepFailure f);

struct Execution {
    std::vector<Action> actions;
    Configuration final_config;
};

Configuration initial_configuration(const System& sys);

// One semantic step: a send appends to the receiver's queue, a receive pops a
// matching queue head; the executing process advances its control state.
std::optional<Configuration> try_step(const System& sys, const Configuration& c, const Action& a,
                                      StepFailure* why = nullptr);

struct RunResult {
    std::optional<Execution> execution;  // set on success
    std::size_t failed_index = 0;        // set on failure
    StepFailure failure = StepFailure::NoControlTransition;
};

RunResult run(const System& sys, const std::vector<Action>& actions);

// Actions enabled at c, in canonical order.
std::vector<Action> enabled_actions(const System& sys, const Configuration& c);

// Every execution of length <= max_actions whose queues stay within
// max_buffer entries per process; includes all prefixes and the empty
// execution. Deterministic order: (length, lexicographic actions).
std::vector<Execution> explore(const System& sys, std::size_t max_actions,
                               std::size_t max_buffer, const Guards& guards = {});

struct TraceSearch {
    bool found = false;
    std::optional<Execution> witness;
};

// Bounded trace membership: looks for an explored execution whose MSC is
// isomorphic to m. A negative answer is inconclusive beyond the bounds.
TraceSearch is_trace_bounded(const System& sys, const Msc& m, std::size_t max_prefix_actions,
                             std::size_t max_buffer, const Guards& guards = {});

// Exchange-round exploration: states reachable through sequences of complete
// exchanges (each round's receives consume only that round's sends), plus the
// word of every round seen. This is the desk-scale oracle for reachability of
// exchanges.
struct RoundExploration {
    std::vector<Configuration> layouts;  // reachable between rounds (deduplicated)
    std::vector<SigmaWord> harvested;    // one entry per distinct round exchange
};

RoundExploration explore_exchange_rounds(const System& sys, std::size_t max_rounds,
                                         std::size_t max_round_sends, const Guards& guards = {});

// Replays an exchange word from c (sends first, then the matched receives in
// send order); receives must consume exactly the sends of this word.
std::optional<Configuration> replay_exchange(const System& sys, const Configuration& c,
                                             const SigmaWord& word);

// Searches for a system execution whose chart is exactly m: interleavings of
// the chart's lanes where every receive pops the queue entry of its own
// paired send. Returns one such execution or nothing.
std::optional<std::vector<Action>> realize_msc(const System& sys, const Msc& m,
                                               const Guards& guards = {});

std::string format_trace(const std::vector<Action>& actions, const Vocabulary& vocab);

} // namespace ksync
