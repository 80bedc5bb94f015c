#include "ksync/nfa.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace ksync {

bool Nfa::is_final(int s) const { return std::binary_search(finals.begin(), finals.end(), s); }

bool Nfa::accepts_symbols(const std::vector<int>& symbol_ids) const {
    std::vector<int> cur = initials;
    for (int sym : symbol_ids) {
        std::set<int> next;
        for (int s : cur)
            for (const auto& [edge_sym, t] : adj[static_cast<std::size_t>(s)])
                if (edge_sym == sym) next.insert(t);
        cur.assign(next.begin(), next.end());
        if (cur.empty()) return false;
    }
    for (int s : cur)
        if (is_final(s)) return true;
    return false;
}

bool Nfa::accepts(const SigmaWord& w) const {
    std::vector<int> ids;
    for (const SigmaSymbol& s : w) {
        int id = alphabet.id_of(s);
        if (id < 0) return false;
        ids.push_back(id);
    }
    return accepts_symbols(ids);
}

std::string Nfa::to_dot() const {
    std::ostringstream out;
    out << "digraph nfa {\n  rankdir=LR;\n  node [shape=circle];\n";
    for (int s : initials) out << "  start" << s << " [shape=point];\n";
    for (int i = 0; i < num_states; ++i) {
        out << "  q" << i << " [";
        if (is_final(i)) out << "shape=doublecircle, ";
        std::string label = state_names.empty() ? "" : state_names[static_cast<std::size_t>(i)];
        out << "label=\"" << (label.empty() ? "q" + std::to_string(i) : label) << "\"];\n";
    }
    for (int s : initials) out << "  start" << s << " -> q" << s << ";\n";
    for (int i = 0; i < num_states; ++i)
        for (const auto& [sym, t] : adj[static_cast<std::size_t>(i)])
            out << "  q" << i << " -> q" << t << " [label=\""
                << to_string(alphabet.symbols[static_cast<std::size_t>(sym)], alphabet.vocab)
                << "\"];\n";
    out << "}\n";
    return out.str();
}

Nfa intersect(const Nfa& a, const Nfa& b, std::size_t state_guard) {
    if (!(a.alphabet == b.alphabet)) throw InternalError("intersect: alphabets differ");
    std::vector<std::pair<int, int>> initials;
    for (int x : a.initials)
        for (int y : b.initials) initials.emplace_back(x, y);
    auto succ = [&](const std::pair<int, int>& s) {
        std::vector<std::pair<int, std::pair<int, int>>> out;
        const auto& ea = a.adj[static_cast<std::size_t>(s.first)];
        const auto& eb = b.adj[static_cast<std::size_t>(s.second)];
        for (const auto& [sym_a, ta] : ea)
            for (const auto& [sym_b, tb] : eb)
                if (sym_a == sym_b) out.push_back({sym_a, {ta, tb}});
        std::sort(out.begin(), out.end());
        return out;
    };
    auto is_final = [&](const std::pair<int, int>& s) {
        return a.is_final(s.first) && b.is_final(s.second);
    };
    auto name_of = [&](const std::pair<int, int>&) { return std::string(); };
    return materialize_nfa(a.alphabet, std::move(initials), succ, is_final, name_of, state_guard,
                           "intersect-states");
}

Nfa nfa_union(const std::vector<const Nfa*>& parts) {
    if (parts.empty()) throw InternalError("nfa_union: no parts");
    Nfa out;
    out.alphabet = parts.front()->alphabet;
    int offset = 0;
    for (const Nfa* p : parts) {
        if (!(p->alphabet == out.alphabet)) throw InternalError("nfa_union: alphabets differ");
        for (int s : p->initials) out.initials.push_back(s + offset);
        for (int s : p->finals) out.finals.push_back(s + offset);
        for (int i = 0; i < p->num_states; ++i) {
            std::vector<std::pair<int, int>> edges;
            for (const auto& [sym, t] : p->adj[static_cast<std::size_t>(i)])
                edges.emplace_back(sym, t + offset);
            out.adj.push_back(std::move(edges));
            out.state_names.push_back(p->state_names.empty()
                                          ? std::string()
                                          : p->state_names[static_cast<std::size_t>(i)]);
        }
        offset += p->num_states;
    }
    out.num_states = offset;
    std::sort(out.initials.begin(), out.initials.end());
    std::sort(out.finals.begin(), out.finals.end());
    return out;
}

Nfa epsilon_nfa(Alphabet alphabet) {
    Nfa out;
    out.alphabet = std::move(alphabet);
    out.num_states = 1;
    out.state_names = {""};
    out.initials = {0};
    out.finals = {0};
    out.adj.resize(1);
    return out;
}

namespace {

std::vector<char> forward_reachable(const Nfa& a) {
    std::vector<char> seen(static_cast<std::size_t>(a.num_states), 0);
    std::vector<int> stack;
    for (int s : a.initials) {
        seen[static_cast<std::size_t>(s)] = 1;
        stack.push_back(s);
    }
    while (!stack.empty()) {
        int s = stack.back();
        stack.pop_back();
        for (const auto& [sym, t] : a.adj[static_cast<std::size_t>(s)])
            if (!seen[static_cast<std::size_t>(t)]) {
                seen[static_cast<std::size_t>(t)] = 1;
                stack.push_back(t);
            }
    }
    return seen;
}

std::vector<char> backward_reachable(const Nfa& a) {
    std::vector<std::vector<int>> rev(static_cast<std::size_t>(a.num_states));
    for (int s = 0; s < a.num_states; ++s)
        for (const auto& [sym, t] : a.adj[static_cast<std::size_t>(s)])
            rev[static_cast<std::size_t>(t)].push_back(s);
    std::vector<char> seen(static_cast<std::size_t>(a.num_states), 0);
    std::vector<int> stack;
    for (int s : a.finals) {
        seen[static_cast<std::size_t>(s)] = 1;
        stack.push_back(s);
    }
    while (!stack.empty()) {
        int s = stack.back();
        stack.pop_back();
        for (int t : rev[static_cast<std::size_t>(s)])
            if (!seen[static_cast<std::size_t>(t)]) {
                seen[static_cast<std::size_t>(t)] = 1;
                stack.push_back(t);
            }
    }
    return seen;
}

// Shortest symbol path between state sets within the trimmed automaton;
// `from` may be several sources. Returns the path as symbol ids plus the
// reached state.
struct PathResult {
    std::vector<int> symbols;
    int state = -1;
};

PathResult shortest_path(const Nfa& a, const std::vector<char>& alive, std::vector<int> from,
                         const std::vector<char>& target) {
    std::vector<int> parent(static_cast<std::size_t>(a.num_states), -1);
    std::vector<int> parent_sym(static_cast<std::size_t>(a.num_states), -1);
    std::vector<char> seen(static_cast<std::size_t>(a.num_states), 0);
    std::deque<int> work;
    for (int s : from)
        if (alive[static_cast<std::size_t>(s)] && !seen[static_cast<std::size_t>(s)]) {
            seen[static_cast<std::size_t>(s)] = 1;
            work.push_back(s);
        }
    while (!work.empty()) {
        int s = work.front();
        work.pop_front();
        if (target[static_cast<std::size_t>(s)]) {
            PathResult r;
            r.state = s;
            int cur = s;
            while (parent_sym[static_cast<std::size_t>(cur)] >= 0) {
                r.symbols.push_back(parent_sym[static_cast<std::size_t>(cur)]);
                cur = parent[static_cast<std::size_t>(cur)];
            }
            std::reverse(r.symbols.begin(), r.symbols.end());
            return r;
        }
        for (const auto& [sym, t] : a.adj[static_cast<std::size_t>(s)]) {
            if (!alive[static_cast<std::size_t>(t)] || seen[static_cast<std::size_t>(t)]) continue;
            seen[static_cast<std::size_t>(t)] = 1;
            parent[static_cast<std::size_t>(t)] = s;
            parent_sym[static_cast<std::size_t>(t)] = sym;
            work.push_back(t);
        }
    }
    return {};
}

SigmaWord symbols_to_word(const Nfa& a, const std::vector<int>& symbols) {
    SigmaWord w;
    for (int sym : symbols) w.push_back(a.alphabet.symbols[static_cast<std::size_t>(sym)]);
    return w;
}

} // namespace

LengthVerdict longest_word(const Nfa& a) {
    LengthVerdict verdict;
    auto fwd = forward_reachable(a);
    auto bwd = backward_reachable(a);
    std::vector<char> alive(static_cast<std::size_t>(a.num_states), 0);
    bool any = false;
    for (int s = 0; s < a.num_states; ++s) {
        alive[static_cast<std::size_t>(s)] = fwd[static_cast<std::size_t>(s)] &&
                                             bwd[static_cast<std::size_t>(s)];
        any = any || alive[static_cast<std::size_t>(s)];
    }
    if (!any) return verdict; // Empty

    // Cycle detection on the trimmed part (iterative DFS, colors).
    std::vector<int> color(static_cast<std::size_t>(a.num_states), 0); // 0 white 1 gray 2 black
    int cycle_head = -1;
    std::vector<int> cycle_tail_sym; // symbols around the detected cycle
    for (int root = 0; root < a.num_states && cycle_head < 0; ++root) {
        if (!alive[static_cast<std::size_t>(root)] || color[static_cast<std::size_t>(root)] != 0)
            continue;
        struct Frame { int state; std::size_t edge; };
        std::vector<Frame> stack{{root, 0}};
        color[static_cast<std::size_t>(root)] = 1;
        while (!stack.empty() && cycle_head < 0) {
            int state = stack.back().state;
            std::size_t edge = stack.back().edge;
            const auto& edges = a.adj[static_cast<std::size_t>(state)];
            if (edge >= edges.size()) {
                color[static_cast<std::size_t>(state)] = 2;
                stack.pop_back();
                continue;
            }
            stack.back().edge = edge + 1;
            auto [sym, t] = edges[edge];
            if (!alive[static_cast<std::size_t>(t)]) continue;
            if (color[static_cast<std::size_t>(t)] == 1) {
                // Edge state->t closes a cycle; rebuild it as the shortest
                // path t ->* state plus this edge.
                cycle_head = t;
                if (t == state) {
                    cycle_tail_sym = {sym};
                } else {
                    std::vector<char> target(static_cast<std::size_t>(a.num_states), 0);
                    target[static_cast<std::size_t>(state)] = 1;
                    PathResult p = shortest_path(a, alive, {t}, target);
                    cycle_tail_sym = p.symbols;
                    cycle_tail_sym.push_back(sym);
                }
            } else if (color[static_cast<std::size_t>(t)] == 0) {
                color[static_cast<std::size_t>(t)] = 1;
                stack.push_back({t, 0});
            }
        }
    }

    if (cycle_head >= 0) {
        verdict.kind = LengthVerdict::Kind::Infinite;
        std::vector<char> head_set(static_cast<std::size_t>(a.num_states), 0);
        head_set[static_cast<std::size_t>(cycle_head)] = 1;
        PathResult pre = shortest_path(a, alive, a.initials, head_set);
        std::vector<char> final_set(static_cast<std::size_t>(a.num_states), 0);
        for (int s : a.finals)
            if (alive[static_cast<std::size_t>(s)]) final_set[static_cast<std::size_t>(s)] = 1;
        PathResult post = shortest_path(a, alive, {cycle_head}, final_set);
        verdict.prefix = symbols_to_word(a, pre.symbols);
        verdict.cycle = symbols_to_word(a, cycle_tail_sym);
        verdict.suffix = symbols_to_word(a, post.symbols);
        return verdict;
    }

    // DAG: longest path from initials to finals with parent reconstruction.
    // Topological order via repeated selection (n is small; O(n^2) is fine).
    std::vector<int> indeg(static_cast<std::size_t>(a.num_states), 0);
    for (int s = 0; s < a.num_states; ++s) {
        if (!alive[static_cast<std::size_t>(s)]) continue;
        for (const auto& [sym, t] : a.adj[static_cast<std::size_t>(s)])
            if (alive[static_cast<std::size_t>(t)]) ++indeg[static_cast<std::size_t>(t)];
    }
    std::deque<int> topo_work;
    std::vector<int> topo;
    for (int s = 0; s < a.num_states; ++s)
        if (alive[static_cast<std::size_t>(s)] && indeg[static_cast<std::size_t>(s)] == 0)
            topo_work.push_back(s);
    while (!topo_work.empty()) {
        int s = topo_work.front();
        topo_work.pop_front();
        topo.push_back(s);
        for (const auto& [sym, t] : a.adj[static_cast<std::size_t>(s)]) {
            if (!alive[static_cast<std::size_t>(t)]) continue;
            if (--indeg[static_cast<std::size_t>(t)] == 0) topo_work.push_back(t);
        }
    }

    constexpr long kMinusInf = -1;
    std::vector<long> dist(static_cast<std::size_t>(a.num_states), kMinusInf);
    std::vector<int> parent(static_cast<std::size_t>(a.num_states), -1);
    std::vector<int> parent_sym(static_cast<std::size_t>(a.num_states), -1);
    for (int s : a.initials)
        if (alive[static_cast<std::size_t>(s)]) dist[static_cast<std::size_t>(s)] = 0;
    for (int s : topo) {
        if (dist[static_cast<std::size_t>(s)] < 0) continue;
        for (const auto& [sym, t] : a.adj[static_cast<std::size_t>(s)]) {
            if (!alive[static_cast<std::size_t>(t)]) continue;
            if (dist[static_cast<std::size_t>(t)] < dist[static_cast<std::size_t>(s)] + 1) {
                dist[static_cast<std::size_t>(t)] = dist[static_cast<std::size_t>(s)] + 1;
                parent[static_cast<std::size_t>(t)] = s;
                parent_sym[static_cast<std::size_t>(t)] = sym;
            }
        }
    }
    long best = kMinusInf;
    int best_state = -1;
    for (int s : a.finals) {
        if (!alive[static_cast<std::size_t>(s)]) continue;
        if (dist[static_cast<std::size_t>(s)] > best) {
            best = dist[static_cast<std::size_t>(s)];
            best_state = s;
        }
    }
    if (best_state < 0) return verdict; // Empty (cannot happen after trim, kept for safety)
    verdict.kind = LengthVerdict::Kind::Finite;
    verdict.max_len = static_cast<std::size_t>(best);
    std::vector<int> syms;
    for (int cur = best_state; parent_sym[static_cast<std::size_t>(cur)] >= 0;
         cur = parent[static_cast<std::size_t>(cur)])
        syms.push_back(parent_sym[static_cast<std::size_t>(cur)]);
    std::reverse(syms.begin(), syms.end());
    verdict.witness = symbols_to_word(a, syms);
    return verdict;
}

std::vector<SigmaWord> enumerate_language(const Nfa& a, std::size_t max_len,
                                          std::size_t output_cap) {
    std::vector<SigmaWord> out;
    auto bwd = backward_reachable(a);
    // Frontier of viable prefixes: word -> reachable state set (co-reachable
    // states only, so dead prefixes are dropped early).
    std::map<std::vector<int>, std::vector<int>> frontier;
    std::vector<int> start;
    for (int s : a.initials)
        if (bwd[static_cast<std::size_t>(s)]) start.push_back(s);
    if (!start.empty()) frontier[{}] = start;

    for (std::size_t len = 0; len <= max_len; ++len) {
        for (const auto& [word, states] : frontier) {
            bool accept = false;
            for (int s : states)
                if (a.is_final(s)) { accept = true; break; }
            if (accept) {
                if (out.size() >= output_cap)
                    throw GuardError("enumerate-language", "output cap exceeded");
                out.push_back(symbols_to_word(a, word));
            }
        }
        if (len == max_len) break;
        std::map<std::vector<int>, std::vector<int>> next;
        for (const auto& [word, states] : frontier) {
            std::map<int, std::set<int>> by_symbol;
            for (int s : states)
                for (const auto& [sym, t] : a.adj[static_cast<std::size_t>(s)])
                    if (bwd[static_cast<std::size_t>(t)]) by_symbol[sym].insert(t);
            for (const auto& [sym, targets] : by_symbol) {
                std::vector<int> w = word;
                w.push_back(sym);
                next.emplace(std::move(w),
                             std::vector<int>(targets.begin(), targets.end()));
            }
        }
        if (next.size() > output_cap * 16 + 1024)
            throw GuardError("enumerate-language", "frontier cap exceeded");
        frontier = std::move(next);
    }
    return out;
}

} // namespace ksync
