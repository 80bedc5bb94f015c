#pragma once

#include <map>
#include <string>
#include <vector>

#include "ksync/conflict.hpp"
#include "ksync/model.hpp"
#include "ksync/nfa.hpp"

namespace ksync {

// Shared per-system analysis inputs.
struct SystemContext {
    System sys;
    GlobalAutomaton product;
    Alphabet alphabet;

    int process_count() const { return sys.vocab.process_count(); }
};

SystemContext make_context(System sys, const Guards& guards = {});

// Automaton of control states for one (in, mid, fin) triple: a send-side copy
// of the control product runs from `in` to `mid` on the send projection while
// a receive-side copy runs from `mid` to `fin` on the receive projection.
// Unmatched symbols advance the send side only; matched symbols advance both.
Nfa build_asr(const SystemContext& ctx, int l_in, int l_mid, int l_fin,
              const Guards& guards = {});

// Deterministic update of the buffer-condemnation summary when one exchange
// symbol is read. `base` is the summary the whole exchange started from; its
// receive sets take part in the matched-send update.
BufferState cd_step(const BufferState& b, const SigmaSymbol& s, const BufferState& base);

// Automaton over buffer summaries: runs cd_step from b0 and accepts at b1.
Nfa build_cd(const SystemContext& ctx, const BufferState& b0, const BufferState& b1,
             const Guards& guards = {});

// Exchanges from l_in to l_fin that take the buffer summary from b to b1:
// the union over all mid states of the control automaton intersected with the
// summary automaton.
Nfa feasible(const SystemContext& ctx, int l_in, int l_fin, const BufferState& b,
             const BufferState& b1, const Guards& guards = {});

struct ReachNode {
    int control;         // index into ctx.product.states
    BufferState buffers; // in the good set

    friend auto operator<=>(const ReachNode&, const ReachNode&) = default;
};

struct ReachEdge {
    int from, to;  // node indices
    Nfa language;  // nonempty feasible language
};

// Layouts reachable through sequences of exchanges, with the (nonempty)
// exchange language of every discovered edge. Edges whose language is just
// the empty word are omitted.
struct ReachGraph {
    std::vector<ReachNode> nodes;
    std::vector<ReachEdge> edges;
    int root = 0;
};

ReachGraph reach_fixpoint(const SystemContext& ctx, const Guards& guards = {});

// Recognizer of all exchanges runnable after some exchange sequence: the
// union of every edge language plus the empty word.
Nfa reach_language(const SystemContext& ctx, const ReachGraph& graph);

std::string reach_to_dot(const SystemContext& ctx, const ReachGraph& graph);

} // namespace ksync
