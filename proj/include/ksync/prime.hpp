#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "ksync/model.hpp"
#include "ksync/nfa.hpp"

namespace ksync {

// Message signature: the queue-matching identity of a send.
using Signature = std::tuple<ProcId, ProcId, PayloadId>; // (sender, receiver, payload)

// Exact message-dependency graph of the exchange read so far: one vertex per
// symbol, unlabeled edges wherever any dependency holds. A matched symbol
// donates its receive to the oldest same-signature send still waiting, which
// is how queue matching pairs them.
struct FullPGraph {
    struct Vertex {
        ProcId sender;
        ProcId receiver;
        PayloadId payload;
        bool has_receive;
    };
    std::vector<Vertex> verts;
    std::vector<std::vector<bool>> adj;

    int size() const { return static_cast<int>(verts.size()); }
    bool strongly_connected() const;
};

FullPGraph pstep_full(FullPGraph g, const SigmaSymbol& s);

// Nonempty and a single strongly connected dependency component.
bool is_prime_oracle(const SigmaWord& w);

// Abstracted dependency graph: vertices carry sender/receiver label sets;
// merged components, redundant labels erased, unlabeled interior vertices
// swept. Pending queues remember, per signature, which vertex still owns the
// next receive.
struct PGraph {
    struct Vertex {
        std::uint32_t lam_s = 0;
        std::uint32_t lam_r = 0;
    };
    std::vector<Vertex> verts;
    std::vector<std::vector<bool>> adj;
    std::map<Signature, std::vector<std::pair<int, int>>> pending; // fifo of (vertex, count)

    int size() const { return static_cast<int>(verts.size()); }
    bool vertex_has_pending(int v) const;
    std::size_t pending_total() const;
};

enum class PrimeMode {
    // Track pending unmatched sends exactly; sound for every word.
    Exact,
    // Assume no matched symbol ever follows a same-signature unmatched one
    // (true of every word that keeps causal delivery); pendings are not
    // tracked and the state space stays bounded.
    CausalWords,
};

// Abstraction: contract strongly connected components, drop redundant labels
// (a sender label stays only on the last vertex of its chain, a receiver
// label on the first and last), sweep unlabeled pending-free vertices that
// sit strictly between others, shortcutting around them. Idempotent.
PGraph alpha(PGraph g);

// alpha after extending g by one symbol; the recognizer's transition function.
PGraph prime_step(PGraph g, const SigmaSymbol& s, PrimeMode mode = PrimeMode::Exact,
                  std::size_t pending_guard = Guards{}.pending_slots);

// Deterministic recognizer of the words whose exchange is prime: states are
// abstracted graphs, a word is accepted when everything collapsed to a single
// vertex.
Nfa prime_nfa(const Alphabet& alphabet, PrimeMode mode = PrimeMode::Exact,
              const Guards& guards = {});

// Product of `a` with the prime recognizer, materializing recognizer states
// only along words of a; the language is L(a) restricted to prime exchanges.
Nfa prime_product(const Nfa& a, PrimeMode mode = PrimeMode::CausalWords,
                  const Guards& guards = {});

std::string pgraph_to_dot(const PGraph& g, const Vocabulary& vocab);

// Stable renaming key; equal keys imply isomorphic states.
std::string pgraph_key(const PGraph& g);

} // namespace ksync
