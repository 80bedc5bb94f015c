#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ksync/msc.hpp"

namespace ksync {

// Dependency labels between messages: X happens on the first message, Y on
// the second, both on a shared process.
enum class Dep : int { SS = 0, SR = 1, RS = 2, RR = 3 };
constexpr std::array<Dep, 4> all_deps{Dep::SS, Dep::SR, Dep::RS, Dep::RR};
const char* dep_name(Dep d);

using BoolMatrix = std::vector<std::vector<bool>>;

// One vertex per message; an XY edge v -> v' when v's X event precedes v''s Y
// event on a shared process.
struct ConflictGraph {
    std::vector<Message> vertices;
    std::array<BoolMatrix, 4> edges; // indexed by Dep

    int size() const { return static_cast<int>(vertices.size()); }
    bool edge(Dep d, int i, int j) const {
        return edges[static_cast<std::size_t>(d)][static_cast<std::size_t>(i)]
                    [static_cast<std::size_t>(j)];
    }
};

// Base graph plus the least closure under the mailbox deduction rules:
//   1. every base edge;
//   2. matched v gives v =SR=> v;
//   3. base RR edges give =SS=>;
//   4. matched before unmatched into the same queue gives =SS=>;
//   5. composition XY;YZ gives XZ.
struct ExtendedConflictGraph {
    ConflictGraph base;
    std::array<BoolMatrix, 4> extended;

    bool edge(Dep d, int i, int j) const {
        return extended[static_cast<std::size_t>(d)][static_cast<std::size_t>(i)]
                       [static_cast<std::size_t>(j)];
    }
};

// Per process p: which senders are blocked behind an unmatched message headed
// to p (c_send), and which receivers sit causally after one (c_recv).
struct BufferState {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> sets; // (c_send, c_recv) per process

    static BufferState empty(int process_count);
    int process_count() const { return static_cast<int>(sets.size()); }
    std::uint32_t c_send(ProcId p) const { return sets[static_cast<std::size_t>(p)].first; }
    std::uint32_t c_recv(ProcId p) const { return sets[static_cast<std::size_t>(p)].second; }
    // No process may sit in its own c_recv set.
    bool good() const;
    std::string to_string(const Vocabulary& vocab) const;

    friend auto operator<=>(const BufferState&, const BufferState&) = default;
};

ConflictGraph conflict_graph(const Msc& m);
ExtendedConflictGraph extended_closure(const ConflictGraph& g);

BufferState buffer_state(const ExtendedConflictGraph& ecg, int process_count);
BufferState buffer_state(const Msc& m);

// Causal delivery via closure acyclicity: no v =SS=> v loop.
bool check_causal(const Msc& m);
// The summary-based variant; agrees with check_causal on word MSCs but is
// weaker on arbitrary MSCs (it sees only unmatched-rooted chains).
bool buffer_state_good(const Msc& m);

// Strongly connected components of the base graph (any-label edges), listed
// in topological order of the condensation.
struct Condensation {
    std::vector<std::vector<int>> components; // vertex ids, topological order
    std::vector<int> component_of;            // vertex -> component index
    std::vector<std::pair<int, int>> edges;   // deduplicated, between components
};

Condensation sccs(const ConflictGraph& g);

// Prime: nonempty and the conflict graph is one strongly connected component.
// Throws InternalError when m is not an exchange.
bool is_prime_msc(const Msc& m);

// Chops m at SCC granularity: every component must induce an exchange with at
// most k messages.
bool is_k_synchronizable_msc(const Msc& m, std::size_t k);

// Sub-MSC induced by a set of messages (events of those messages only).
Msc induced_sub_msc(const Msc& m, const std::vector<int>& message_ids);

std::string conflict_to_dot(const ExtendedConflictGraph& ecg, const Vocabulary& vocab);

} // namespace ksync
