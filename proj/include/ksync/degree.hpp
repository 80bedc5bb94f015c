#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ksync/exchange.hpp"
#include "ksync/simulation.hpp"

namespace ksync {

using BigInt = boost::multiprecision::cpp_int;

struct DegreeWitness {
    SigmaWord word;
    int source_node = -1;
    int target_node = -1;
};

struct UnboundedWitness {
    SigmaWord prefix, cycle, suffix;
    int source_node = -1;
    int target_node = -1;
};

// Supremum of the sizes of prime exchanges runnable after exchange sequences:
// a size plus witness, an unbounded pumping witness, or the guard that fired.
struct DegreeVerdict {
    enum class Kind { Finite, Unbounded, GuardExceeded };
    Kind kind = Kind::Finite;
    std::uint64_t k = 0;                       // Finite
    std::optional<DegreeWitness> witness;      // Finite with k > 0
    std::optional<UnboundedWitness> pump;      // Unbounded
    std::string guard_stage;                   // GuardExceeded
};

struct DegreeResult {
    DegreeVerdict verdict;
    std::optional<ReachGraph> graph; // absent when the fixpoint itself tripped a guard
};

DegreeResult degree_bound(const SystemContext& ctx, const Guards& guards = {});

struct ExploreBounds {
    std::size_t max_actions = 8;
    std::size_t max_buffer = 3;
};

// Bounded search for an execution that cannot be cut into blocks of at most k
// messages. Pass is relative to the bounds, never a proof.
struct KCheckResult {
    enum class Kind { Pass, Fail, Inconclusive };
    Kind kind = Kind::Pass;
    std::optional<Execution> counterexample; // Fail
    std::string guard_stage;                 // Inconclusive
};

KCheckResult check_k_bounded(const System& sys, std::size_t k, const ExploreBounds& bounds = {},
                             const Guards& guards = {});

struct SyncVerdict {
    enum class Kind { Synchronizable, NotSynchronizable, Inconclusive };
    enum class Reason { None, UnboundedExchange, BoundedCounterexample };
    Kind kind = Kind::Inconclusive;
    Reason reason = Reason::None;
    std::uint64_t k = 0;                     // Synchronizable
    std::optional<Execution> counterexample; // BoundedCounterexample
    std::optional<UnboundedWitness> pump;    // UnboundedExchange
    std::string guard_stage;                 // Inconclusive
    ExploreBounds bounds;                    // the caveat on Synchronizable
};

SyncVerdict synchronizable(const SystemContext& ctx, const Guards& guards = {},
                           const ExploreBounds& bounds = {});

// |global control states|^2 * 2^(8 |processes|^2), over the full product.
BigInt theoretical_bound(const System& sys);

// Reports; the JSON form parses back via the *_from_json functions.
std::string degree_report_text(const SystemContext& ctx, const DegreeResult& result);
std::string degree_report_json(const SystemContext& ctx, const DegreeResult& result);
std::string sync_report_text(const SystemContext& ctx, const SyncVerdict& verdict);
std::string sync_report_json(const SystemContext& ctx, const SyncVerdict& verdict);

struct DegreeSummary {
    std::string kind;
    std::uint64_t k = 0;
    std::string witness;
    std::string guard_stage;
};
DegreeSummary degree_from_json(const std::string& json_text);

struct SyncSummary {
    std::string kind;
    std::string reason;
    std::uint64_t k = 0;
};
SyncSummary sync_from_json(const std::string& json_text);

} // namespace ksync
