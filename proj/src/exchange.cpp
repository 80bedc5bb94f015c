#include "ksync/exchange.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <tuple>

namespace ksync {

SystemContext make_context(System sys, const Guards& guards) {
    SystemContext ctx;
    ctx.product = global_product(sys, guards.product_states);
    ctx.alphabet = system_alphabet(sys);
    ctx.sys = std::move(sys);
    return ctx;
}

namespace {

struct ProjectedMoves {
    // Per product state: send transitions (symbol index uses matched=false)
    // and receive transitions keyed by action.
    std::vector<std::vector<std::pair<Action, int>>> sends;
    std::vector<std::vector<std::pair<Action, int>>> receives;
};

ProjectedMoves project_moves(const SystemContext& ctx) {
    ProjectedMoves pm;
    std::size_t n = ctx.product.states.size();
    pm.sends.resize(n);
    pm.receives.resize(n);
    for (std::size_t s = 0; s < n; ++s)
        for (const GlobalTransition& t : ctx.product.adj[s]) {
            if (t.action.kind == ActionKind::Send) pm.sends[s].emplace_back(t.action, t.to);
            else pm.receives[s].emplace_back(t.action, t.to);
        }
    return pm;
}

} // namespace

Nfa build_asr(const SystemContext& ctx, int l_in, int l_mid, int l_fin, const Guards& guards) {
    std::size_t n = ctx.product.states.size();
    if (l_in < 0 || static_cast<std::size_t>(l_in) >= n || l_mid < 0 ||
        static_cast<std::size_t>(l_mid) >= n || l_fin < 0 || static_cast<std::size_t>(l_fin) >= n)
        throw InternalError("build_asr: state index out of range");
    ProjectedMoves pm = project_moves(ctx);

    using State = std::pair<int, int>; // (send side, receive side)
    auto succ = [&](const State& s) {
        std::vector<std::pair<int, State>> out;
        for (const auto& [act, to] : pm.sends[static_cast<std::size_t>(s.first)]) {
            SigmaSymbol unmatched{false, act.sender, act.receiver, act.payload};
            out.push_back({ctx.alphabet.id_of(unmatched), State{to, s.second}});
            Action recv{ActionKind::Receive, act.sender, act.receiver, act.payload};
            for (const auto& [ract, rto] : pm.receives[static_cast<std::size_t>(s.second)])
                if (ract == recv) {
                    SigmaSymbol matched{true, act.sender, act.receiver, act.payload};
                    out.push_back({ctx.alphabet.id_of(matched), State{to, rto}});
                }
        }
        std::sort(out.begin(), out.end());
        return out;
    };
    auto is_final = [&](const State& s) { return s.first == l_mid && s.second == l_fin; };
    auto name_of = [&](const State& s) {
        return ctx.product.state_name(s.first, ctx.sys) + "," +
               ctx.product.state_name(s.second, ctx.sys);
    };
    return materialize_nfa(ctx.alphabet, std::vector<State>{{l_in, l_mid}}, succ, is_final,
                           name_of, guards.nfa_states, "asr-states");
}

BufferState cd_step(const BufferState& b, const SigmaSymbol& s, const BufferState& base) {
    BufferState next = b;
    std::uint32_t pbit = 1u << s.sender;
    if (s.matched) {
        std::size_t q = static_cast<std::size_t>(s.receiver);
        std::uint32_t qbit = 1u << s.receiver;
        for (std::size_t r = 0; r < b.sets.size(); ++r) {
            std::uint32_t c_send = b.sets[r].first;
            std::uint32_t c_recv = b.sets[r].second;
            std::uint32_t interim = c_send;
            if ((base.sets[r].second & pbit) || (c_recv & qbit)) interim |= pbit;
            if (interim & pbit) {
                next.sets[r].first = interim | b.sets[q].first;
                next.sets[r].second = c_recv | qbit | b.sets[q].second;
            }
        }
    } else {
        std::uint32_t qbit = 1u << s.receiver;
        for (std::size_t r = 0; r < b.sets.size(); ++r) {
            if (static_cast<int>(r) == s.receiver || (b.sets[r].second & qbit))
                next.sets[r].first |= pbit;
        }
    }
    return next;
}

Nfa build_cd(const SystemContext& ctx, const BufferState& b0, const BufferState& b1,
             const Guards& guards) {
    // With a good target the bad region is unreachable from any accepted run
    // (cd_step only grows its sets), so it can be cut during materialization.
    bool prune_bad = b1.good();
    auto succ = [&, prune_bad](const BufferState& b) {
        std::vector<std::pair<int, BufferState>> out;
        for (int sym = 0; sym < ctx.alphabet.size(); ++sym) {
            BufferState nb = cd_step(b, ctx.alphabet.symbols[static_cast<std::size_t>(sym)], b0);
            if (prune_bad && !nb.good()) continue;
            out.push_back({sym, std::move(nb)});
        }
        return out;
    };
    auto is_final = [&](const BufferState& b) { return b == b1; };
    auto name_of = [&](const BufferState& b) { return b.to_string(ctx.sys.vocab); };
    return materialize_nfa(ctx.alphabet, std::vector<BufferState>{b0}, succ, is_final, name_of,
                           guards.nfa_states, "cd-states");
}

Nfa feasible(const SystemContext& ctx, int l_in, int l_fin, const BufferState& b,
             const BufferState& b1, const Guards& guards) {
    Nfa cd = build_cd(ctx, b, b1, guards);
    std::vector<Nfa> parts;
    for (int mid = 0; mid < static_cast<int>(ctx.product.states.size()); ++mid)
        parts.push_back(intersect(build_asr(ctx, l_in, mid, l_fin, guards), cd,
                                  guards.nfa_states));
    std::vector<const Nfa*> ptrs;
    for (const Nfa& p : parts) ptrs.push_back(&p);
    return nfa_union(ptrs);
}

// ---------------------------------------------------------------------------
// Reachable layouts
// ---------------------------------------------------------------------------

namespace {

// Product state for discovering which (control, buffers) layouts an exchange
// from one source layout can reach: the chosen mid state, the send side, the
// receive side and the running buffer summary. Summaries that left the good
// set are pruned; cd_step never shrinks its sets, so they cannot recover.
struct DiscoveryState {
    int mid;
    int send_side;
    int recv_side;
    BufferState buffers;

    friend auto operator<=>(const DiscoveryState&, const DiscoveryState&) = default;
};

} // namespace

ReachGraph reach_fixpoint(const SystemContext& ctx, const Guards& guards) {
    ReachGraph graph;
    ProjectedMoves pm = project_moves(ctx);
    std::map<ReachNode, int> node_index;

    ReachNode root{ctx.product.initial, BufferState::empty(ctx.process_count())};
    graph.nodes.push_back(root);
    node_index[root] = 0;
    graph.root = 0;

    std::set<std::pair<int, int>> edge_seen;
    std::vector<int> work{0};
    while (!work.empty()) {
        int src_id = work.back();
        work.pop_back();
        ReachNode src = graph.nodes[static_cast<std::size_t>(src_id)];

        // All (control, summary) pairs reachable by one exchange from src.
        std::set<DiscoveryState> seen;
        std::vector<DiscoveryState> frontier;
        for (int mid = 0; mid < static_cast<int>(ctx.product.states.size()); ++mid) {
            DiscoveryState s{mid, src.control, mid, src.buffers};
            if (seen.insert(s).second) frontier.push_back(s);
        }
        std::set<ReachNode> targets;
        while (!frontier.empty()) {
            DiscoveryState s = frontier.back();
            frontier.pop_back();
            if (s.send_side == s.mid && s.buffers.good())
                targets.insert(ReachNode{s.recv_side, s.buffers});
            for (const auto& [act, to] : pm.sends[static_cast<std::size_t>(s.send_side)]) {
                SigmaSymbol unmatched{false, act.sender, act.receiver, act.payload};
                BufferState nb = cd_step(s.buffers, unmatched, src.buffers);
                if (nb.good()) {
                    DiscoveryState t{s.mid, to, s.recv_side, nb};
                    if (seen.size() >= guards.reach_nodes)
                        throw GuardError("reach-discovery", "state cap exceeded");
                    if (seen.insert(t).second) frontier.push_back(t);
                }
                Action recv{ActionKind::Receive, act.sender, act.receiver, act.payload};
                for (const auto& [ract, rto] : pm.receives[static_cast<std::size_t>(s.recv_side)])
                    if (ract == recv) {
                        SigmaSymbol matched{true, act.sender, act.receiver, act.payload};
                        BufferState mb = cd_step(s.buffers, matched, src.buffers);
                        if (!mb.good()) continue;
                        DiscoveryState t{s.mid, to, rto, mb};
                        if (seen.size() >= guards.reach_nodes)
                            throw GuardError("reach-discovery", "state cap exceeded");
                        if (seen.insert(t).second) frontier.push_back(t);
                    }
            }
        }

        for (const ReachNode& target : targets) {
            auto it = node_index.find(target);
            int tgt_id;
            if (it == node_index.end()) {
                if (graph.nodes.size() >= guards.reach_nodes)
                    throw GuardError("reach-nodes", "node cap exceeded");
                tgt_id = static_cast<int>(graph.nodes.size());
                node_index[target] = tgt_id;
                graph.nodes.push_back(target);
                work.push_back(tgt_id);
            } else {
                tgt_id = it->second;
            }
            if (edge_seen.insert({src_id, tgt_id}).second) {
                Nfa lang = feasible(ctx, src.control, target.control, src.buffers, target.buffers,
                                    guards);
                LengthVerdict lv = longest_word(lang);
                bool trivial = (src_id == tgt_id) && lv.kind == LengthVerdict::Kind::Finite &&
                               lv.max_len == 0;
                if (lv.kind != LengthVerdict::Kind::Empty && !trivial)
                    graph.edges.push_back({src_id, tgt_id, std::move(lang)});
            }
        }
    }
    return graph;
}

Nfa reach_language(const SystemContext& ctx, const ReachGraph& graph) {
    Nfa eps = epsilon_nfa(ctx.alphabet);
    std::vector<const Nfa*> parts{&eps};
    for (const ReachEdge& e : graph.edges) parts.push_back(&e.language);
    return nfa_union(parts);
}

std::string reach_to_dot(const SystemContext& ctx, const ReachGraph& graph) {
    std::ostringstream out;
    out << "digraph reach {\n  node [shape=box];\n";
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        const ReachNode& n = graph.nodes[i];
        out << "  n" << i << " [label=\"" << ctx.product.state_name(n.control, ctx.sys) << "\\n"
            << n.buffers.to_string(ctx.sys.vocab) << "\"";
        if (static_cast<int>(i) == graph.root) out << ", style=bold";
        out << "];\n";
    }
    std::vector<std::pair<int, int>> edges;
    for (const ReachEdge& e : graph.edges) edges.emplace_back(e.from, e.to);
    std::sort(edges.begin(), edges.end());
    for (const auto& [from, to] : edges) out << "  n" << from << " -> n" << to << ";\n";
    out << "}\n";
    return out.str();
}

} // namespace ksync
