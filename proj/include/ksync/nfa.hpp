#pragma once

#include <deque>
#include <map>
#include <string>
#include <vector>

#include "ksync/common.hpp"
#include "ksync/model.hpp"

namespace ksync {

// Finite automaton over a materialized exchange alphabet. Symbols are indices
// into the alphabet; states are dense ints with optional display names.
struct Nfa {
    Alphabet alphabet;
    int num_states = 0;
    std::vector<std::string> state_names;                    // optional; empty = unnamed
    std::vector<int> initials;                               // sorted
    std::vector<int> finals;                                 // sorted
    std::vector<std::vector<std::pair<int, int>>> adj;       // per state: (symbol, to), sorted

    bool is_final(int s) const;
    bool accepts(const SigmaWord& w) const;
    bool accepts_symbols(const std::vector<int>& symbol_ids) const;
    std::string to_dot() const;
};

// Materializes a lazily defined automaton by BFS from the initial states.
// `succ` must return successors sorted by symbol id (duplicates allowed);
// `name_of` may return an empty string.
template <typename State, typename Succ, typename Final, typename Namer>
Nfa materialize_nfa(Alphabet alphabet, std::vector<State> initial_states, Succ&& succ,
                    Final&& is_final, Namer&& name_of, std::size_t state_guard,
                    const std::string& guard_stage) {
    Nfa nfa;
    nfa.alphabet = std::move(alphabet);
    std::map<State, int> index;
    std::vector<State> order;
    std::deque<int> work;

    auto intern = [&](const State& s) {
        auto it = index.find(s);
        if (it != index.end()) return it->second;
        if (order.size() >= state_guard)
            throw GuardError(guard_stage,
                             "state guard of " + std::to_string(state_guard) + " exceeded");
        int id = static_cast<int>(order.size());
        index.emplace(s, id);
        order.push_back(s);
        work.push_back(id);
        return id;
    };
    for (const State& s : initial_states) nfa.initials.push_back(intern(s));
    std::sort(nfa.initials.begin(), nfa.initials.end());
    nfa.initials.erase(std::unique(nfa.initials.begin(), nfa.initials.end()), nfa.initials.end());

    while (!work.empty()) {
        int id = work.front();
        work.pop_front();
        State s = order[static_cast<std::size_t>(id)];
        std::vector<std::pair<int, int>> edges;
        for (const auto& [sym, t] : succ(s)) edges.emplace_back(sym, intern(t));
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        if (nfa.adj.size() <= static_cast<std::size_t>(id)) nfa.adj.resize(order.size());
        nfa.adj[static_cast<std::size_t>(id)] = std::move(edges);
    }
    nfa.num_states = static_cast<int>(order.size());
    nfa.adj.resize(static_cast<std::size_t>(nfa.num_states));
    for (int i = 0; i < nfa.num_states; ++i) {
        if (is_final(order[static_cast<std::size_t>(i)])) nfa.finals.push_back(i);
        nfa.state_names.push_back(name_of(order[static_cast<std::size_t>(i)]));
    }
    return nfa;
}

// Product automaton; language is the intersection. Requires equal alphabets.
Nfa intersect(const Nfa& a, const Nfa& b, std::size_t state_guard = Guards{}.nfa_states);

// Disjoint union; language is the union. Requires equal alphabets.
Nfa nfa_union(const std::vector<const Nfa*>& parts);

// One-state automaton accepting only the empty word.
Nfa epsilon_nfa(Alphabet alphabet);

struct LengthVerdict {
    enum class Kind { Empty, Finite, Infinite };
    Kind kind = Kind::Empty;
    std::size_t max_len = 0; // Finite
    SigmaWord witness;       // Finite: an accepted word of length max_len
    SigmaWord prefix, cycle, suffix; // Infinite: prefix.cycle^i.suffix accepted for all i >= 0
};

// Finiteness and longest accepted word, after trimming to reachable and
// co-reachable states.
LengthVerdict longest_word(const Nfa& a);

// All accepted words of length <= max_len in length-lexicographic order.
std::vector<SigmaWord> enumerate_language(const Nfa& a, std::size_t max_len,
                                          std::size_t output_cap = Guards{}.enumerate_words);

} // namespace ksync
