#include "ksync/conflict.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace ksync {

const char* dep_name(Dep d) {
    switch (d) {
        case Dep::SS: return "SS";
        case Dep::SR: return "SR";
        case Dep::RS: return "RS";
        case Dep::RR: return "RR";
    }
    return "??";
}

BufferState BufferState::empty(int process_count) {
    BufferState b;
    b.sets.assign(static_cast<std::size_t>(process_count), {0u, 0u});
    return b;
}

bool BufferState::good() const {
    for (std::size_t p = 0; p < sets.size(); ++p)
        if (sets[p].second & (1u << p)) return false;
    return true;
}

std::string BufferState::to_string(const Vocabulary& vocab) const {
    auto set_str = [&](std::uint32_t mask) {
        std::string out = "{";
        bool first = true;
        for (int p = 0; p < static_cast<int>(vocab.processes.size()); ++p)
            if (mask & (1u << p)) {
                if (!first) out += ",";
                out += vocab.processes[static_cast<std::size_t>(p)];
                first = false;
            }
        return out + "}";
    };
    std::string out;
    for (std::size_t p = 0; p < sets.size(); ++p) {
        if (sets[p].first == 0 && sets[p].second == 0) continue;
        if (!out.empty()) out += " ";
        out += "S(" + vocab.processes[p] + ")=" + set_str(sets[p].first);
        out += " R(" + vocab.processes[p] + ")=" + set_str(sets[p].second);
    }
    return out.empty() ? "{}" : out;
}

namespace {

BoolMatrix zero_matrix(int n) {
    return BoolMatrix(static_cast<std::size_t>(n),
                      std::vector<bool>(static_cast<std::size_t>(n), false));
}

// Event of message `msg` on side X; -1 when absent.
int side_event(const Message& msg, int x /*0=S, 1=R*/) {
    return x == 0 ? msg.send_event : msg.receive_event;
}

} // namespace

ConflictGraph conflict_graph(const Msc& m) {
    ConflictGraph g;
    g.vertices = messages(m);
    int n = g.size();
    for (auto& mat : g.edges) mat = zero_matrix(n);

    // Position of each event within its process lane.
    std::vector<int> lane_pos(static_cast<std::size_t>(m.event_count()), 0);
    for (const auto& lane : m.by_process)
        for (std::size_t i = 0; i < lane.size(); ++i)
            lane_pos[static_cast<std::size_t>(lane[i])] = static_cast<int>(i);

    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int x = 0; x < 2; ++x) {
                int ei = side_event(g.vertices[static_cast<std::size_t>(i)], x);
                if (ei < 0) continue;
                for (int y = 0; y < 2; ++y) {
                    int ej = side_event(g.vertices[static_cast<std::size_t>(j)], y);
                    if (ej < 0 || ei == ej) continue;
                    if (m.process_of(ei) != m.process_of(ej)) continue;
                    if (lane_pos[static_cast<std::size_t>(ei)] <
                        lane_pos[static_cast<std::size_t>(ej)]) {
                        Dep d = static_cast<Dep>(x * 2 + y); // (S,S)=0 (S,R)=1 (R,S)=2 (R,R)=3
                        g.edges[static_cast<std::size_t>(d)][static_cast<std::size_t>(i)]
                               [static_cast<std::size_t>(j)] = true;
                    }
                }
            }
        }
    }
    return g;
}

ExtendedConflictGraph extended_closure(const ConflictGraph& g) {
    ExtendedConflictGraph ecg;
    ecg.base = g;
    int n = g.size();
    for (auto& mat : ecg.extended) mat = zero_matrix(n);
    auto& ext = ecg.extended;
    auto at = [&](Dep d) -> BoolMatrix& { return ext[static_cast<std::size_t>(d)]; };

    // Rule 1: every base edge.
    for (Dep d : all_deps)
        at(d) = g.edges[static_cast<std::size_t>(d)];
    for (int i = 0; i < n; ++i) {
        const Message& vi = g.vertices[static_cast<std::size_t>(i)];
        // Rule 2: matched messages order their own send before their receive.
        if (vi.matched())
            at(Dep::SR)[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = true;
        for (int j = 0; j < n; ++j) {
            const Message& vj = g.vertices[static_cast<std::size_t>(j)];
            // Rule 3: same-queue receive order forces send order.
            if (g.edge(Dep::RR, i, j))
                at(Dep::SS)[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = true;
            // Rule 4: a matched message must enter the queue before an
            // unmatched one headed to the same process.
            if (i != j && vi.matched() && !vj.matched() && vi.receiver == vj.receiver)
                at(Dep::SS)[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = true;
        }
    }

    // Rule 5: compose through matching middle letters until fixpoint.
    bool changed = true;
    while (changed) {
        changed = false;
        for (int x = 0; x < 2; ++x)
            for (int ymid = 0; ymid < 2; ++ymid)
                for (int z = 0; z < 2; ++z) {
                    Dep dxy = static_cast<Dep>(x * 2 + ymid);
                    Dep dyz = static_cast<Dep>(ymid * 2 + z);
                    Dep dxz = static_cast<Dep>(x * 2 + z);
                    for (int i = 0; i < n; ++i)
                        for (int k = 0; k < n; ++k) {
                            if (!ext[static_cast<std::size_t>(dxy)][static_cast<std::size_t>(i)]
                                    [static_cast<std::size_t>(k)])
                                continue;
                            for (int j = 0; j < n; ++j)
                                if (ext[static_cast<std::size_t>(dyz)][static_cast<std::size_t>(k)]
                                       [static_cast<std::size_t>(j)] &&
                                    !ext[static_cast<std::size_t>(dxz)][static_cast<std::size_t>(i)]
                                        [static_cast<std::size_t>(j)]) {
                                    ext[static_cast<std::size_t>(dxz)][static_cast<std::size_t>(i)]
                                       [static_cast<std::size_t>(j)] = true;
                                    changed = true;
                                }
                        }
                }
    }
    return ecg;
}

BufferState buffer_state(const ExtendedConflictGraph& ecg, int process_count) {
    BufferState b = BufferState::empty(process_count);
    int n = ecg.base.size();
    for (int up = 0; up < n; ++up) {
        const Message& vu = ecg.base.vertices[static_cast<std::size_t>(up)];
        if (vu.matched()) continue;
        std::size_t p = static_cast<std::size_t>(vu.receiver);
        // The unmatched message itself blocks its sender.
        b.sets[p].first |= 1u << vu.sender;
        for (int j = 0; j < n; ++j) {
            if (!ecg.edge(Dep::SS, up, j)) continue;
            const Message& vj = ecg.base.vertices[static_cast<std::size_t>(j)];
            b.sets[p].first |= 1u << vj.sender;
            if (vj.matched()) b.sets[p].second |= 1u << vj.receiver;
        }
    }
    return b;
}

BufferState buffer_state(const Msc& m) {
    return buffer_state(extended_closure(conflict_graph(m)), m.vocab.process_count());
}

bool check_causal(const Msc& m) {
    ExtendedConflictGraph ecg = extended_closure(conflict_graph(m));
    for (int i = 0; i < ecg.base.size(); ++i)
        if (ecg.edge(Dep::SS, i, i)) return false;
    return true;
}

bool buffer_state_good(const Msc& m) { return buffer_state(m).good(); }

// ---------------------------------------------------------------------------
// Strongly connected components (Tarjan)
// ---------------------------------------------------------------------------

Condensation sccs(const ConflictGraph& g) {
    int n = g.size();
    std::vector<std::vector<int>> succ(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            for (Dep d : all_deps)
                if (g.edge(d, i, j)) {
                    succ[static_cast<std::size_t>(i)].push_back(j);
                    break;
                }
        }

    Condensation c;
    c.component_of.assign(static_cast<std::size_t>(n), -1);
    std::vector<int> low(static_cast<std::size_t>(n), 0), num(static_cast<std::size_t>(n), -1);
    std::vector<int> stack;
    std::vector<char> on_stack(static_cast<std::size_t>(n), 0);
    int counter = 0;

    std::function<void(int)> dfs = [&](int v) {
        std::size_t sv = static_cast<std::size_t>(v);
        num[sv] = low[sv] = counter++;
        stack.push_back(v);
        on_stack[sv] = 1;
        for (int w : succ[sv]) {
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
            for (int w : comp) c.component_of[static_cast<std::size_t>(w)] =
                static_cast<int>(c.components.size());
            c.components.push_back(std::move(comp));
        }
    };
    for (int v = 0; v < n; ++v)
        if (num[static_cast<std::size_t>(v)] < 0) dfs(v);

    // Tarjan emits components in reverse topological order.
    std::reverse(c.components.begin(), c.components.end());
    int ncomp = static_cast<int>(c.components.size());
    for (int& id : c.component_of) id = ncomp - 1 - id;

    std::set<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        for (int w : succ[static_cast<std::size_t>(i)]) {
            int a = c.component_of[static_cast<std::size_t>(i)];
            int b = c.component_of[static_cast<std::size_t>(w)];
            if (a != b) edges.insert({a, b});
        }
    c.edges.assign(edges.begin(), edges.end());
    return c;
}

bool is_prime_msc(const Msc& m) {
    if (!is_exchange(m)) throw InternalError("is_prime_msc: input is not an exchange");
    ConflictGraph g = conflict_graph(m);
    if (g.size() == 0) return false;
    return sccs(g).components.size() == 1;
}

Msc induced_sub_msc(const Msc& m, const std::vector<int>& message_ids) {
    std::vector<Message> msgs = messages(m);
    std::set<int> keep_events;
    for (int id : message_ids) {
        const Message& msg = msgs.at(static_cast<std::size_t>(id));
        keep_events.insert(msg.send_event);
        if (msg.matched()) keep_events.insert(msg.receive_event);
    }
    Msc sub;
    sub.vocab = m.vocab;
    sub.by_process.resize(m.by_process.size());
    std::vector<int> remap(static_cast<std::size_t>(m.event_count()), -1);
    for (const auto& lane : m.by_process)
        for (int ev : lane)
            if (keep_events.count(ev)) {
                remap[static_cast<std::size_t>(ev)] = sub.event_count();
                sub.by_process[static_cast<std::size_t>(m.process_of(ev))].push_back(
                    sub.event_count());
                sub.events.push_back(m.events[static_cast<std::size_t>(ev)]);
            }
    for (const auto& [s, r] : m.src)
        if (keep_events.count(s) && keep_events.count(r))
            sub.src.emplace_back(remap[static_cast<std::size_t>(s)],
                                 remap[static_cast<std::size_t>(r)]);
    std::sort(sub.src.begin(), sub.src.end());
    return sub;
}

bool is_k_synchronizable_msc(const Msc& m, std::size_t k) {
    ConflictGraph g = conflict_graph(m);
    if (g.size() == 0) return true;
    Condensation c = sccs(g);
    for (const auto& comp : c.components) {
        if (comp.size() > k) return false;
        Msc sub = induced_sub_msc(m, comp);
        if (!is_exchange(sub)) return false;
    }
    return true;
}

std::string conflict_to_dot(const ExtendedConflictGraph& ecg, const Vocabulary& vocab) {
    std::ostringstream out;
    out << "digraph conflict {\n";
    int n = ecg.base.size();
    for (int i = 0; i < n; ++i) {
        const Message& msg = ecg.base.vertices[static_cast<std::size_t>(i)];
        out << "  v" << i << " [label=\"v" << i << ": "
            << (msg.matched() ? "!?" : "!") << vocab.payloads[static_cast<std::size_t>(msg.payload)]
            << "(" << vocab.processes[static_cast<std::size_t>(msg.sender)] << "->"
            << vocab.processes[static_cast<std::size_t>(msg.receiver)] << ")\"];\n";
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            std::string solid, dashed;
            for (Dep d : all_deps) {
                if (ecg.base.edge(d, i, j)) {
                    if (!solid.empty()) solid += ",";
                    solid += dep_name(d);
                } else if (ecg.edge(d, i, j)) {
                    if (!dashed.empty()) dashed += ",";
                    dashed += dep_name(d);
                }
            }
            if (!solid.empty())
                out << "  v" << i << " -> v" << j << " [label=\"" << solid << "\"];\n";
            if (!dashed.empty())
                out << "  v" << i << " -> v" << j << " [label=\"" << dashed
                    << "\", style=dashed];\n";
        }
    out << "}\n";
    return out.str();
}

} // namespace ksync
