#include "ksync/simulation.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace ksync {

const char* step_failure_name(StepFailure f) {
    switch (f) {
        case StepFailure::NoControlTransition: return "no control transition";
        case StepFailure::EmptyBuffer: return "empty buffer";
        case StepFailure::BufferHeadMismatch: return "buffer head mismatch";
    }
    return "?";
}

Configuration initial_configuration(const System& sys) {
    Configuration c;
    for (const auto& la : sys.processes) c.control.push_back(la.initial);
    c.buffers.resize(sys.processes.size());
    return c;
}

std::optional<Configuration> try_step(const System& sys, const Configuration& c, const Action& a,
                                      StepFailure* why) {
    ProcId p = a.executing();
    const LocalAutomaton& la = sys.process(p);
    int from = c.control[static_cast<std::size_t>(p)];
    int to = -1;
    for (const LocalTransition& t : la.transitions)
        if (t.from == from && t.action == a) { to = t.to; break; }
    if (to < 0) {
        if (why) *why = StepFailure::NoControlTransition;
        return std::nullopt;
    }
    Configuration next = c;
    next.control[static_cast<std::size_t>(p)] = to;
    if (a.kind == ActionKind::Send) {
        next.buffers[static_cast<std::size_t>(a.receiver)].emplace_back(a.sender, a.payload);
    } else {
        auto& buf = next.buffers[static_cast<std::size_t>(a.receiver)];
        if (buf.empty()) {
            if (why) *why = StepFailure::EmptyBuffer;
            return std::nullopt;
        }
        if (buf.front() != std::make_pair(a.sender, a.payload)) {
            if (why) *why = StepFailure::BufferHeadMismatch;
            return std::nullopt;
        }
        buf.erase(buf.begin());
    }
    return next;
}

RunResult run(const System& sys, const std::vector<Action>& actions) {
    Configuration c = initial_configuration(sys);
    for (std::size_t i = 0; i < actions.size(); ++i) {
        StepFailure why;
        auto next = try_step(sys, c, actions[i], &why);
        if (!next) return {std::nullopt, i, why};
        c = *std::move(next);
    }
    RunResult r;
    r.execution = Execution{actions, std::move(c)};
    return r;
}

std::vector<Action> enabled_actions(const System& sys, const Configuration& c) {
    std::vector<Action> out;
    for (std::size_t pi = 0; pi < sys.processes.size(); ++pi) {
        int from = c.control[pi];
        for (const LocalTransition& t : sys.processes[pi].transitions) {
            if (t.from != from) continue;
            if (t.action.kind == ActionKind::Receive) {
                const auto& buf = c.buffers[static_cast<std::size_t>(t.action.receiver)];
                if (buf.empty() || buf.front() != std::make_pair(t.action.sender, t.action.payload))
                    continue;
            }
            out.push_back(t.action);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<Execution> explore(const System& sys, std::size_t max_actions, std::size_t max_buffer,
                               const Guards& guards) {
    std::vector<Execution> out;
    struct Frame {
        std::vector<Action> actions;
        Configuration config;
    };
    std::deque<Frame> work;
    work.push_back({{}, initial_configuration(sys)});
    while (!work.empty()) {
        Frame f = std::move(work.front());
        work.pop_front();
        if (out.size() >= guards.explore_executions)
            throw GuardError("explore", "execution cap exceeded");
        out.push_back({f.actions, f.config});
        if (f.actions.size() >= max_actions) continue;
        for (const Action& a : enabled_actions(sys, f.config)) {
            if (a.kind == ActionKind::Send &&
                f.config.buffers[static_cast<std::size_t>(a.receiver)].size() >= max_buffer)
                continue;
            auto next = try_step(sys, f.config, a);
            if (!next) continue;
            Frame g;
            g.actions = f.actions;
            g.actions.push_back(a);
            g.config = *std::move(next);
            work.push_back(std::move(g));
        }
    }
    std::sort(out.begin(), out.end(), [](const Execution& a, const Execution& b) {
        if (a.actions.size() != b.actions.size()) return a.actions.size() < b.actions.size();
        return a.actions < b.actions;
    });
    return out;
}

TraceSearch is_trace_bounded(const System& sys, const Msc& m, std::size_t max_prefix_actions,
                             std::size_t max_buffer, const Guards& guards) {
    TraceSearch result;
    if (!(m.vocab == sys.vocab)) return result;
    for (Execution& e : explore(sys, max_prefix_actions, max_buffer, guards)) {
        if (e.actions.size() != static_cast<std::size_t>(m.event_count())) continue;
        if (msc_isomorphic(msc_of_execution(sys.vocab, e.actions), m)) {
            result.found = true;
            result.witness = std::move(e);
            return result;
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Exchange rounds
// ---------------------------------------------------------------------------

namespace {

// Queue entries tagged with whether they belong to the round in progress.
struct TaggedConfig {
    GlobalState control;
    std::vector<std::vector<std::tuple<ProcId, PayloadId, bool>>> buffers;

    friend auto operator<=>(const TaggedConfig&, const TaggedConfig&) = default;
};

TaggedConfig tag(const Configuration& c) {
    TaggedConfig t;
    t.control = c.control;
    t.buffers.resize(c.buffers.size());
    for (std::size_t p = 0; p < c.buffers.size(); ++p)
        for (const auto& [s, m] : c.buffers[p]) t.buffers[p].emplace_back(s, m, false);
    return t;
}

Configuration untag(const TaggedConfig& t) {
    Configuration c;
    c.control = t.control;
    c.buffers.resize(t.buffers.size());
    for (std::size_t p = 0; p < t.buffers.size(); ++p)
        for (const auto& [s, m, fresh] : t.buffers[p]) c.buffers[p].emplace_back(s, m);
    return c;
}

} // namespace

RoundExploration explore_exchange_rounds(const System& sys, std::size_t max_rounds,
                                         std::size_t max_round_sends, const Guards& guards) {
    RoundExploration result;
    std::set<Configuration> seen_layouts;
    std::set<SigmaWord> seen_words;
    std::deque<std::pair<Configuration, std::size_t>> work; // (layout, rounds used)

    Configuration init = initial_configuration(sys);
    seen_layouts.insert(init);
    result.layouts.push_back(init);
    work.push_back({init, 0});

    std::size_t visited = 0;
    while (!work.empty()) {
        auto [layout, depth] = std::move(work.front());
        work.pop_front();
        if (depth >= max_rounds) continue;

        // Enumerate complete rounds from this layout: up to max_round_sends
        // sends, then receives consuming only this round's messages.
        struct RoundFrame {
            TaggedConfig config;
            SigmaWord word;       // sends of the round, flags updated on receive
            std::size_t receives; // receives done so far
            bool receiving;
        };
        std::deque<RoundFrame> rounds;
        rounds.push_back({tag(layout), {}, 0, false});
        while (!rounds.empty()) {
            if (++visited > guards.explore_executions)
                throw GuardError("explore-rounds", "round exploration cap exceeded");
            RoundFrame f = std::move(rounds.front());
            rounds.pop_front();

            if (!f.word.empty()) {
                // A round may stop here: unmatched round messages stay queued.
                SigmaWord w = f.word;
                Configuration next = untag(f.config);
                if (seen_words.insert(w).second) result.harvested.push_back(w);
                if (seen_layouts.insert(next).second) {
                    result.layouts.push_back(next);
                    work.push_back({next, depth + 1});
                }
            }

            // Sends (only before the first receive).
            if (!f.receiving && f.word.size() < max_round_sends) {
                for (std::size_t pi = 0; pi < sys.processes.size(); ++pi) {
                    for (const LocalTransition& t : sys.processes[pi].transitions) {
                        if (t.from != f.config.control[pi] ||
                            t.action.kind != ActionKind::Send)
                            continue;
                        RoundFrame g = f;
                        g.config.control[pi] = t.to;
                        g.config.buffers[static_cast<std::size_t>(t.action.receiver)]
                            .emplace_back(t.action.sender, t.action.payload, true);
                        g.word.push_back(
                            {false, t.action.sender, t.action.receiver, t.action.payload});
                        rounds.push_back(std::move(g));
                    }
                }
            }
            // Receives: queue head must be a message of this round.
            for (std::size_t pi = 0; pi < sys.processes.size(); ++pi) {
                for (const LocalTransition& t : sys.processes[pi].transitions) {
                    if (t.from != f.config.control[pi] ||
                        t.action.kind != ActionKind::Receive)
                        continue;
                    auto& buf = f.config.buffers[static_cast<std::size_t>(t.action.receiver)];
                    if (buf.empty()) continue;
                    auto [s, m, fresh] = buf.front();
                    if (!fresh || s != t.action.sender || m != t.action.payload) continue;
                    RoundFrame g = f;
                    g.config.control[pi] = t.to;
                    g.config.buffers[static_cast<std::size_t>(t.action.receiver)].erase(
                        g.config.buffers[static_cast<std::size_t>(t.action.receiver)].begin());
                    g.receiving = true;
                    // Flag the matching send: the oldest same-signature
                    // unmatched symbol of the round.
                    bool flagged = false;
                    for (SigmaSymbol& sym : g.word)
                        if (!sym.matched && sym.sender == t.action.sender &&
                            sym.receiver == t.action.receiver && sym.payload == t.action.payload) {
                            sym.matched = true;
                            flagged = true;
                            break;
                        }
                    if (!flagged) continue; // head predates the round; cannot happen for fresh
                    ++g.receives;
                    rounds.push_back(std::move(g));
                }
            }
        }
    }
    std::sort(result.harvested.begin(), result.harvested.end());
    std::sort(result.layouts.begin(), result.layouts.end());
    return result;
}

std::optional<Configuration> replay_exchange(const System& sys, const Configuration& c,
                                             const SigmaWord& word) {
    TaggedConfig t = tag(c);
    // Sends first.
    for (const SigmaSymbol& sym : word) {
        ProcId p = sym.sender;
        int from = t.control[static_cast<std::size_t>(p)];
        Action send{ActionKind::Send, sym.sender, sym.receiver, sym.payload};
        int to = -1;
        for (const LocalTransition& tr : sys.process(p).transitions)
            if (tr.from == from && tr.action == send) { to = tr.to; break; }
        if (to < 0) return std::nullopt;
        t.control[static_cast<std::size_t>(p)] = to;
        t.buffers[static_cast<std::size_t>(sym.receiver)].emplace_back(sym.sender, sym.payload,
                                                                       true);
    }
    // Then matched receives in send order; each must pop a head from this word.
    for (const SigmaSymbol& sym : word) {
        if (!sym.matched) continue;
        ProcId q = sym.receiver;
        auto& buf = t.buffers[static_cast<std::size_t>(q)];
        if (buf.empty()) return std::nullopt;
        auto [s, m, fresh] = buf.front();
        if (!fresh || s != sym.sender || m != sym.payload) return std::nullopt;
        Action recv{ActionKind::Receive, sym.sender, sym.receiver, sym.payload};
        int from = t.control[static_cast<std::size_t>(q)];
        int to = -1;
        for (const LocalTransition& tr : sys.process(q).transitions)
            if (tr.from == from && tr.action == recv) { to = tr.to; break; }
        if (to < 0) return std::nullopt;
        t.control[static_cast<std::size_t>(q)] = to;
        buf.erase(buf.begin());
    }
    return untag(t);
}

std::optional<std::vector<Action>> realize_msc(const System& sys, const Msc& m,
                                               const Guards& guards) {
    if (!(m.vocab == sys.vocab)) return std::nullopt;
    // Search state: per-process lane position and local control state, plus
    // per-process queues of send event ids.
    struct SearchState {
        std::vector<int> pos;
        std::vector<int> control;
        std::vector<std::vector<int>> queues;

        auto operator<=>(const SearchState&) const = default;
    };
    std::size_t nprocs = sys.processes.size();
    SearchState init;
    init.pos.assign(nprocs, 0);
    for (const auto& la : sys.processes) init.control.push_back(la.initial);
    init.queues.resize(nprocs);

    std::map<SearchState, std::pair<SearchState, Action>> parent;
    std::set<SearchState> seen{init};
    std::deque<SearchState> work{init};
    std::size_t visited = 0;
    while (!work.empty()) {
        SearchState s = work.front();
        work.pop_front();
        if (++visited > guards.explore_executions)
            throw GuardError("realize-msc", "search cap exceeded");
        bool done = true;
        for (std::size_t p = 0; p < nprocs; ++p)
            if (static_cast<std::size_t>(s.pos[p]) < m.by_process[p].size()) done = false;
        if (done) {
            std::vector<Action> actions;
            SearchState cur = s;
            while (!(cur == init)) {
                auto it = parent.find(cur);
                actions.push_back(it->second.second);
                cur = it->second.first;
            }
            std::reverse(actions.begin(), actions.end());
            return actions;
        }
        for (std::size_t p = 0; p < nprocs; ++p) {
            if (static_cast<std::size_t>(s.pos[p]) >= m.by_process[p].size()) continue;
            int ev = m.by_process[p][static_cast<std::size_t>(s.pos[p])];
            const Action& a = m.events[static_cast<std::size_t>(ev)];
            if (a.kind == ActionKind::Receive) {
                const auto& queue = s.queues[static_cast<std::size_t>(a.receiver)];
                if (queue.empty() || queue.front() != m.send_of(ev)) continue;
            }
            for (const LocalTransition& t : sys.processes[p].transitions) {
                if (t.from != s.control[p] || !(t.action == a)) continue;
                SearchState next = s;
                ++next.pos[p];
                next.control[p] = t.to;
                if (a.kind == ActionKind::Send)
                    next.queues[static_cast<std::size_t>(a.receiver)].push_back(ev);
                else
                    next.queues[static_cast<std::size_t>(a.receiver)].erase(
                        next.queues[static_cast<std::size_t>(a.receiver)].begin());
                if (seen.insert(next).second) {
                    parent.emplace(next, std::make_pair(s, a));
                    work.push_back(next);
                }
            }
        }
    }
    return std::nullopt;
}

std::string format_trace(const std::vector<Action>& actions, const Vocabulary& vocab) {
    std::string out;
    for (std::size_t i = 0; i < actions.size(); ++i) {
        if (i) out += " ";
        out += to_string(actions[i], vocab);
    }
    return out;
}

} // namespace ksync
