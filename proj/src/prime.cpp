#include "ksync/prime.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace ksync {

namespace {

// Tarjan over a bool-matrix adjacency; components in topological order.
struct SccResult {
    std::vector<std::vector<int>> components;
    std::vector<int> component_of;
};

SccResult scc_of_matrix(const std::vector<std::vector<bool>>& adj) {
    int n = static_cast<int>(adj.size());
    SccResult res;
    res.component_of.assign(static_cast<std::size_t>(n), -1);
    std::vector<int> low(static_cast<std::size_t>(n)), num(static_cast<std::size_t>(n), -1);
    std::vector<int> stack;
    std::vector<char> on_stack(static_cast<std::size_t>(n), 0);
    int counter = 0;
    std::function<void(int)> dfs = [&](int v) {
        std::size_t sv = static_cast<std::size_t>(v);
        num[sv] = low[sv] = counter++;
        stack.push_back(v);
        on_stack[sv] = 1;
        for (int w = 0; w < n; ++w) {
            if (w == v || !adj[sv][static_cast<std::size_t>(w)]) continue;
            std::size_t sw = static_cast<std::size_t>(w);
            if (num[sw] < 0) {
                dfs(w);
                low[sv] = std::min(low[sv], low[sw]);
            } else if (on_stack[sw]) {
                low[sv] = std::min(low[sv], num[sw]);
            }
        }
        if (low[sv] == num[sv]) {
            std::vector<int> comp;
            while (true) {
                int w = stack.back();
                stack.pop_back();
                on_stack[static_cast<std::size_t>(w)] = 0;
                comp.push_back(w);
                if (w == v) break;
            }
            std::sort(comp.begin(), comp.end());
            for (int w : comp)
                res.component_of[static_cast<std::size_t>(w)] =
                    static_cast<int>(res.components.size());
            res.components.push_back(std::move(comp));
        }
    };
    for (int v = 0; v < n; ++v)
        if (num[static_cast<std::size_t>(v)] < 0) dfs(v);
    std::reverse(res.components.begin(), res.components.end());
    int ncomp = static_cast<int>(res.components.size());
    for (int& c : res.component_of) c = ncomp - 1 - c;
    return res;
}

std::vector<std::vector<bool>> reachability(const std::vector<std::vector<bool>>& adj) {
    int n = static_cast<int>(adj.size());
    auto reach = adj;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            if (reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)])
                for (int j = 0; j < n; ++j)
                    if (reach[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)])
                        reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = true;
    return reach;
}

} // namespace

// ---------------------------------------------------------------------------
// Exact graph
// ---------------------------------------------------------------------------

bool FullPGraph::strongly_connected() const {
    if (verts.empty()) return false;
    return scc_of_matrix(adj).components.size() == 1;
}

FullPGraph pstep_full(FullPGraph g, const SigmaSymbol& s) {
    int v0 = g.size();
    g.verts.push_back({s.sender, s.receiver, s.payload, false});
    for (auto& row : g.adj) row.push_back(false);
    g.adj.emplace_back(static_cast<std::size_t>(g.size()), false);

    // The new send follows every send by the same process and precedes every
    // receive already delivered to it.
    for (int v = 0; v < v0; ++v) {
        if (g.verts[static_cast<std::size_t>(v)].sender == s.sender)
            g.adj[static_cast<std::size_t>(v)][static_cast<std::size_t>(v0)] = true;
        if (g.verts[static_cast<std::size_t>(v)].has_receive &&
            g.verts[static_cast<std::size_t>(v)].receiver == s.sender)
            g.adj[static_cast<std::size_t>(v0)][static_cast<std::size_t>(v)] = true;
    }
    if (s.matched) {
        // The receive pairs with the oldest same-signature send still
        // waiting, and follows every event already on the receiving process.
        int vstar = v0;
        for (int v = 0; v < v0; ++v) {
            const auto& vv = g.verts[static_cast<std::size_t>(v)];
            if (!vv.has_receive && vv.sender == s.sender && vv.receiver == s.receiver &&
                vv.payload == s.payload) {
                vstar = v;
                break;
            }
        }
        for (int v = 0; v <= v0; ++v) {
            if (v == vstar) continue;
            const auto& vv = g.verts[static_cast<std::size_t>(v)];
            bool event_at_q = vv.sender == s.receiver ||
                              (vv.has_receive && vv.receiver == s.receiver);
            if (event_at_q)
                g.adj[static_cast<std::size_t>(v)][static_cast<std::size_t>(vstar)] = true;
        }
        g.verts[static_cast<std::size_t>(vstar)].has_receive = true;
    }
    return g;
}

bool is_prime_oracle(const SigmaWord& w) {
    FullPGraph g;
    for (const SigmaSymbol& s : w) g = pstep_full(std::move(g), s);
    return g.strongly_connected();
}

// ---------------------------------------------------------------------------
// Abstracted graph
// ---------------------------------------------------------------------------

bool PGraph::vertex_has_pending(int v) const {
    for (const auto& [sig, queue] : pending)
        for (const auto& [vid, count] : queue)
            if (vid == v) return true;
    return false;
}

std::size_t PGraph::pending_total() const {
    std::size_t total = 0;
    for (const auto& [sig, queue] : pending)
        for (const auto& [vid, count] : queue) total += static_cast<std::size_t>(count);
    return total;
}

namespace {

PGraph merge_components(const PGraph& g) {
    SccResult scc = scc_of_matrix(g.adj);
    int m = static_cast<int>(scc.components.size());
    PGraph out;
    out.verts.resize(static_cast<std::size_t>(m));
    out.adj.assign(static_cast<std::size_t>(m),
                   std::vector<bool>(static_cast<std::size_t>(m), false));
    for (int v = 0; v < g.size(); ++v) {
        int c = scc.component_of[static_cast<std::size_t>(v)];
        out.verts[static_cast<std::size_t>(c)].lam_s |= g.verts[static_cast<std::size_t>(v)].lam_s;
        out.verts[static_cast<std::size_t>(c)].lam_r |= g.verts[static_cast<std::size_t>(v)].lam_r;
    }
    for (int v = 0; v < g.size(); ++v)
        for (int w = 0; w < g.size(); ++w) {
            if (v == w || !g.adj[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)])
                continue;
            int cv = scc.component_of[static_cast<std::size_t>(v)];
            int cw = scc.component_of[static_cast<std::size_t>(w)];
            if (cv != cw) out.adj[static_cast<std::size_t>(cv)][static_cast<std::size_t>(cw)] = true;
        }
    // Remap pending queues; entries merged into one component coalesce. They
    // are always adjacent in the queue because the sends of one signature
    // form a chain, so anything between two merged entries merges too.
    for (const auto& [sig, queue] : g.pending) {
        std::vector<std::pair<int, int>> mapped;
        for (const auto& [vid, count] : queue) {
            int c = scc.component_of[static_cast<std::size_t>(vid)];
            if (!mapped.empty() && mapped.back().first == c) mapped.back().second += count;
            else mapped.emplace_back(c, count);
        }
        std::set<int> distinct;
        for (const auto& [vid, count] : mapped)
            if (!distinct.insert(vid).second)
                throw InternalError("pgraph: pending queue lost chain contiguity");
        if (!mapped.empty()) out.pending[sig] = std::move(mapped);
    }
    return out;
}

void erase_labels(PGraph& g) {
    auto reach = reachability(g.adj);
    auto comparable = [&](int u, int v) {
        return reach[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] ||
               reach[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)];
    };
    int nprocs = 32;
    for (int p = 0; p < nprocs; ++p) {
        std::uint32_t bit = 1u << p;
        for (int side = 0; side < 2; ++side) {
            std::vector<int> carriers;
            for (int v = 0; v < g.size(); ++v) {
                std::uint32_t lam = side == 0 ? g.verts[static_cast<std::size_t>(v)].lam_s
                                              : g.verts[static_cast<std::size_t>(v)].lam_r;
                if (lam & bit) carriers.push_back(v);
            }
            if (carriers.size() <= 1) continue;
            for (std::size_t i = 0; i < carriers.size(); ++i)
                for (std::size_t j = i + 1; j < carriers.size(); ++j)
                    if (!comparable(carriers[i], carriers[j]))
                        throw InternalError("pgraph: label chain not totally ordered");
            auto is_before = [&](int u, int v) {
                return u != v && reach[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)];
            };
            int minimal = carriers[0], maximal = carriers[0];
            for (int v : carriers) {
                if (is_before(v, minimal)) minimal = v;
                if (is_before(maximal, v)) maximal = v;
            }
            for (int v : carriers) {
                bool keep = side == 0 ? (v == maximal) : (v == minimal || v == maximal);
                if (keep) continue;
                if (side == 0) g.verts[static_cast<std::size_t>(v)].lam_s &= ~bit;
                else g.verts[static_cast<std::size_t>(v)].lam_r &= ~bit;
            }
        }
    }
}

void remove_vertex(PGraph& g, int victim) {
    int n = g.size();
    // Shortcut edges first.
    for (int u = 0; u < n; ++u) {
        if (u == victim || !g.adj[static_cast<std::size_t>(u)][static_cast<std::size_t>(victim)])
            continue;
        for (int w = 0; w < n; ++w) {
            if (w == victim || w == u ||
                !g.adj[static_cast<std::size_t>(victim)][static_cast<std::size_t>(w)])
                continue;
            g.adj[static_cast<std::size_t>(u)][static_cast<std::size_t>(w)] = true;
        }
    }
    g.verts.erase(g.verts.begin() + victim);
    g.adj.erase(g.adj.begin() + victim);
    for (auto& row : g.adj) row.erase(row.begin() + victim);
    for (auto& [sig, queue] : g.pending)
        for (auto& [vid, count] : queue)
            if (vid > victim) --vid;
}

void sweep(PGraph& g) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (int v = 0; v < g.size(); ++v) {
            const auto& vv = g.verts[static_cast<std::size_t>(v)];
            if (vv.lam_s != 0 || vv.lam_r != 0 || g.vertex_has_pending(v)) continue;
            bool has_pred = false, has_succ = false;
            for (int u = 0; u < g.size(); ++u) {
                if (u == v) continue;
                if (g.adj[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)]) has_pred = true;
                if (g.adj[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)]) has_succ = true;
            }
            if (!has_pred || !has_succ) continue;
            remove_vertex(g, v);
            changed = true;
            break;
        }
    }
}

} // namespace

PGraph alpha(PGraph g) {
    PGraph merged = merge_components(g);
    erase_labels(merged);
    sweep(merged);
    return merged;
}

PGraph prime_step(PGraph g, const SigmaSymbol& s, PrimeMode mode, std::size_t pending_guard) {
    int v0 = g.size();
    g.verts.push_back({1u << s.sender, 0});
    for (auto& row : g.adj) row.push_back(false);
    g.adj.emplace_back(static_cast<std::size_t>(g.size()), false);
    std::uint32_t pbit = 1u << s.sender;
    std::uint32_t qbit = 1u << s.receiver;
    for (int v = 0; v < v0; ++v) {
        if (g.verts[static_cast<std::size_t>(v)].lam_s & pbit)
            g.adj[static_cast<std::size_t>(v)][static_cast<std::size_t>(v0)] = true;
        if (g.verts[static_cast<std::size_t>(v)].lam_r & pbit)
            g.adj[static_cast<std::size_t>(v0)][static_cast<std::size_t>(v)] = true;
    }
    Signature sig{s.sender, s.receiver, s.payload};
    if (s.matched) {
        int vstar = v0;
        if (mode == PrimeMode::Exact) {
            auto it = g.pending.find(sig);
            if (it != g.pending.end() && !it->second.empty()) {
                vstar = it->second.front().first;
                if (--it->second.front().second == 0)
                    it->second.erase(it->second.begin());
                if (it->second.empty()) g.pending.erase(it);
            }
        }
        for (int v = 0; v <= v0; ++v) {
            if (v == vstar) continue;
            const auto& vv = g.verts[static_cast<std::size_t>(v)];
            if ((vv.lam_s | vv.lam_r) & qbit)
                g.adj[static_cast<std::size_t>(v)][static_cast<std::size_t>(vstar)] = true;
        }
        g.verts[static_cast<std::size_t>(vstar)].lam_r |= qbit;
    } else if (mode == PrimeMode::Exact) {
        g.pending[sig].emplace_back(v0, 1);
        if (g.pending_total() > pending_guard)
            throw GuardError("prime-pending", "pending-send bookkeeping exceeds " +
                                                  std::to_string(pending_guard) + " slots");
    }
    return alpha(std::move(g));
}

// ---------------------------------------------------------------------------
// Canonical key and recognizer
// ---------------------------------------------------------------------------

std::string pgraph_key(const PGraph& g) {
    int n = g.size();
    // Initial colors: labels plus pending roles (signature, count, queue slot).
    std::vector<std::string> color(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
        std::ostringstream c;
        c << g.verts[static_cast<std::size_t>(v)].lam_s << ":"
          << g.verts[static_cast<std::size_t>(v)].lam_r;
        for (const auto& [sig, queue] : g.pending)
            for (std::size_t slot = 0; slot < queue.size(); ++slot)
                if (queue[slot].first == v)
                    c << ";p" << std::get<0>(sig) << "," << std::get<1>(sig) << ","
                      << std::get<2>(sig) << "@" << slot << "x" << queue[slot].second;
        color[static_cast<std::size_t>(v)] = c.str();
    }
    // Refine by neighborhood colors until stable.
    for (int round = 0; round < n; ++round) {
        std::vector<std::string> next(static_cast<std::size_t>(n));
        for (int v = 0; v < n; ++v) {
            std::vector<std::string> outs, ins;
            for (int w = 0; w < n; ++w) {
                if (g.adj[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)])
                    outs.push_back(color[static_cast<std::size_t>(w)]);
                if (g.adj[static_cast<std::size_t>(w)][static_cast<std::size_t>(v)])
                    ins.push_back(color[static_cast<std::size_t>(w)]);
            }
            std::sort(outs.begin(), outs.end());
            std::sort(ins.begin(), ins.end());
            std::ostringstream c;
            c << color[static_cast<std::size_t>(v)] << "|O";
            for (const auto& s : outs) c << "(" << s << ")";
            c << "|I";
            for (const auto& s : ins) c << "(" << s << ")";
            next[static_cast<std::size_t>(v)] = c.str();
        }
        if (next == color) break;
        color = std::move(next);
    }
    // Stable renumbering by (color, construction index).
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) order[static_cast<std::size_t>(v)] = v;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return color[static_cast<std::size_t>(a)] < color[static_cast<std::size_t>(b)];
    });
    std::vector<int> pos(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pos[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i;

    std::ostringstream key;
    key << n << "#";
    for (int i = 0; i < n; ++i) {
        int v = order[static_cast<std::size_t>(i)];
        key << g.verts[static_cast<std::size_t>(v)].lam_s << ":"
            << g.verts[static_cast<std::size_t>(v)].lam_r << ";";
    }
    key << "E";
    for (int i = 0; i < n; ++i) {
        int v = order[static_cast<std::size_t>(i)];
        for (int j = 0; j < n; ++j) {
            int w = order[static_cast<std::size_t>(j)];
            key << (g.adj[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)] ? '1' : '0');
        }
    }
    key << "P";
    for (const auto& [sig, queue] : g.pending) {
        key << std::get<0>(sig) << "," << std::get<1>(sig) << "," << std::get<2>(sig) << "=";
        for (const auto& [vid, count] : queue)
            key << pos[static_cast<std::size_t>(vid)] << "x" << count << ",";
        key << ";";
    }
    return key.str();
}

Nfa prime_nfa(const Alphabet& alphabet, PrimeMode mode, const Guards& guards) {
    struct State {
        PGraph g;
        std::string key;
        bool operator<(const State& other) const { return key < other.key; }
    };
    State initial{PGraph{}, pgraph_key(PGraph{})};
    auto succ = [&, mode](const State& s) {
        std::vector<std::pair<int, State>> out;
        for (int sym = 0; sym < alphabet.size(); ++sym) {
            PGraph next = prime_step(s.g, alphabet.symbols[static_cast<std::size_t>(sym)], mode,
                                     guards.pending_slots);
            std::string key = pgraph_key(next);
            out.push_back({sym, State{std::move(next), std::move(key)}});
        }
        return out;
    };
    auto is_final = [](const State& s) { return s.g.size() == 1; };
    auto name_of = [](const State& s) { return std::to_string(s.g.size()) + "v"; };
    return materialize_nfa(alphabet, std::vector<State>{initial}, succ, is_final, name_of,
                           guards.nfa_states, "prime-states");
}

Nfa prime_product(const Nfa& a, PrimeMode mode, const Guards& guards) {
    struct State {
        int host;
        PGraph g;
        std::string key;
        bool operator<(const State& other) const {
            if (host != other.host) return host < other.host;
            return key < other.key;
        }
    };
    State initial{0, PGraph{}, pgraph_key(PGraph{})};
    std::vector<State> initials;
    for (int s : a.initials) initials.push_back({s, initial.g, initial.key});
    auto succ = [&, mode](const State& s) {
        std::vector<std::pair<int, State>> out;
        // Step the recognizer once per distinct symbol leaving this state.
        std::map<int, std::pair<PGraph, std::string>> stepped;
        for (const auto& [sym, t] : a.adj[static_cast<std::size_t>(s.host)]) {
            auto it = stepped.find(sym);
            if (it == stepped.end()) {
                PGraph next = prime_step(s.g, a.alphabet.symbols[static_cast<std::size_t>(sym)],
                                         mode, guards.pending_slots);
                std::string key = pgraph_key(next);
                it = stepped.emplace(sym, std::make_pair(std::move(next), std::move(key))).first;
            }
            out.push_back({sym, State{t, it->second.first, it->second.second}});
        }
        return out;
    };
    auto is_final = [&](const State& s) { return a.is_final(s.host) && s.g.size() == 1; };
    auto name_of = [](const State&) { return std::string(); };
    return materialize_nfa(a.alphabet, std::move(initials), succ, is_final, name_of,
                           guards.nfa_states, "prime-product-states");
}

std::string pgraph_to_dot(const PGraph& g, const Vocabulary& vocab) {
    auto set_str = [&](std::uint32_t mask) {
        std::string out = "{";
        bool first = true;
        for (int p = 0; p < vocab.process_count(); ++p)
            if (mask & (1u << p)) {
                if (!first) out += ",";
                out += vocab.processes[static_cast<std::size_t>(p)];
                first = false;
            }
        return out + "}";
    };
    std::ostringstream out;
    out << "digraph pgraph {\n  node [shape=box];\n";
    for (int v = 0; v < g.size(); ++v)
        out << "  v" << v << " [label=\"S:" << set_str(g.verts[static_cast<std::size_t>(v)].lam_s)
            << " R:" << set_str(g.verts[static_cast<std::size_t>(v)].lam_r) << "\"];\n";
    for (int v = 0; v < g.size(); ++v)
        for (int w = 0; w < g.size(); ++w)
            if (v != w && g.adj[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)])
                out << "  v" << v << " -> v" << w << ";\n";
    out << "}\n";
    return out.str();
}

} // namespace ksync
