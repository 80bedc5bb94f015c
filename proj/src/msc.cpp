#include "ksync/msc.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace ksync {

int Msc::receive_of(int send_ev) const {
    for (const auto& [s, r] : src)
        if (s == send_ev) return r;
    return -1;
}

int Msc::send_of(int receive_ev) const {
    for (const auto& [s, r] : src)
        if (r == receive_ev) return s;
    return -1;
}

std::vector<Message> messages(const Msc& m) {
    std::vector<Message> out;
    for (int ev = 0; ev < m.event_count(); ++ev) {
        const Action& a = m.events[static_cast<std::size_t>(ev)];
        if (a.kind != ActionKind::Send) continue;
        Message msg;
        msg.id = static_cast<int>(out.size());
        msg.send_event = ev;
        msg.receive_event = m.receive_of(ev);
        msg.sender = a.sender;
        msg.receiver = a.receiver;
        msg.payload = a.payload;
        out.push_back(msg);
    }
    return out;
}

namespace {

// Successor lists of the event order: consecutive per-process pairs plus src.
std::vector<std::vector<int>> order_successors(const Msc& m) {
    std::vector<std::vector<int>> succ(static_cast<std::size_t>(m.event_count()));
    for (const auto& chain : m.by_process)
        for (std::size_t i = 0; i + 1 < chain.size(); ++i)
            succ[static_cast<std::size_t>(chain[i])].push_back(chain[i + 1]);
    for (const auto& [s, r] : m.src) succ[static_cast<std::size_t>(s)].push_back(r);
    return succ;
}

bool order_acyclic(const Msc& m) {
    auto succ = order_successors(m);
    int n = m.event_count();
    std::vector<int> indeg(static_cast<std::size_t>(n), 0);
    for (const auto& outs : succ)
        for (int t : outs) ++indeg[static_cast<std::size_t>(t)];
    std::vector<int> stack;
    for (int v = 0; v < n; ++v)
        if (indeg[static_cast<std::size_t>(v)] == 0) stack.push_back(v);
    int seen = 0;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        ++seen;
        for (int t : succ[static_cast<std::size_t>(v)])
            if (--indeg[static_cast<std::size_t>(t)] == 0) stack.push_back(t);
    }
    return seen == n;
}

void validate(const Msc& m) {
    int n = m.event_count();
    std::vector<int> proc_hits(static_cast<std::size_t>(n), 0);
    for (std::size_t p = 0; p < m.by_process.size(); ++p)
        for (int ev : m.by_process[p]) {
            if (ev < 0 || ev >= n) throw InternalError("msc: event index out of range");
            if (m.process_of(ev) != static_cast<int>(p))
                throw InternalError("msc: event listed under the wrong process");
            ++proc_hits[static_cast<std::size_t>(ev)];
        }
    for (int h : proc_hits)
        if (h != 1) throw InternalError("msc: per-process chains must cover every event once");

    std::set<int> sends, recvs;
    for (const auto& [s, r] : m.src) {
        const Action& as = m.events[static_cast<std::size_t>(s)];
        const Action& ar = m.events[static_cast<std::size_t>(r)];
        if (as.kind != ActionKind::Send || ar.kind != ActionKind::Receive)
            throw InternalError("msc: src must pair a send with a receive");
        if (as.sender != ar.sender || as.receiver != ar.receiver || as.payload != ar.payload)
            throw InternalError("msc: src pair labels disagree");
        if (!sends.insert(s).second || !recvs.insert(r).second)
            throw InternalError("msc: src is not injective");
    }
    for (int ev = 0; ev < n; ++ev)
        if (m.events[static_cast<std::size_t>(ev)].kind == ActionKind::Receive &&
            recvs.count(ev) == 0)
            throw InternalError("msc: receive without a src pair");
    if (!order_acyclic(m)) throw InternalError("msc: event order has a cycle");
}

} // namespace

Msc make_msc(const Vocabulary& vocab, const std::vector<std::vector<Action>>& per_process,
             const std::vector<std::pair<std::pair<int, int>, std::pair<int, int>>>& src_pairs) {
    Msc m;
    m.vocab = vocab;
    m.by_process.resize(static_cast<std::size_t>(vocab.process_count()));
    std::map<std::pair<int, int>, int> at;
    for (std::size_t p = 0; p < per_process.size(); ++p) {
        for (std::size_t i = 0; i < per_process[p].size(); ++i) {
            const Action& a = per_process[p][i];
            if (a.executing() != static_cast<int>(p))
                throw InternalError("make_msc: action on the wrong process lane");
            at[{static_cast<int>(p), static_cast<int>(i)}] = m.event_count();
            m.by_process[p].push_back(m.event_count());
            m.events.push_back(a);
        }
    }
    for (const auto& [sp, rp] : src_pairs) {
        auto is = at.find(sp);
        auto ir = at.find(rp);
        if (is == at.end() || ir == at.end()) throw InternalError("make_msc: src position out of range");
        m.src.emplace_back(is->second, ir->second);
    }
    std::sort(m.src.begin(), m.src.end());
    validate(m);
    return m;
}

Msc msc_of_execution(const Vocabulary& vocab, const std::vector<Action>& actions) {
    Msc m;
    m.vocab = vocab;
    m.by_process.resize(static_cast<std::size_t>(vocab.process_count()));
    // Signature -> event indices of its sends, and count of receives seen.
    std::map<std::tuple<ProcId, ProcId, PayloadId>, std::vector<int>> sig_sends;
    std::map<std::tuple<ProcId, ProcId, PayloadId>, std::size_t> sig_recvs;
    for (std::size_t i = 0; i < actions.size(); ++i) {
        const Action& a = actions[i];
        int ev = static_cast<int>(i);
        m.events.push_back(a);
        m.by_process[static_cast<std::size_t>(a.executing())].push_back(ev);
        auto sig = std::make_tuple(a.sender, a.receiver, a.payload);
        if (a.kind == ActionKind::Send) {
            sig_sends[sig].push_back(ev);
        } else {
            std::size_t rank = sig_recvs[sig]++;
            const auto& sends = sig_sends[sig];
            if (rank >= sends.size())
                throw InternalError("msc_of_execution: receive at position " + std::to_string(i) +
                                    " has no matching earlier send");
            m.src.emplace_back(sends[rank], ev);
        }
    }
    std::sort(m.src.begin(), m.src.end());
    validate(m);
    return m;
}

Msc msc_of_word(const SigmaWord& word, const Vocabulary& vocab) {
    std::vector<Action> actions;
    for (const SigmaSymbol& s : word)
        actions.push_back({ActionKind::Send, s.sender, s.receiver, s.payload});
    for (const SigmaSymbol& s : word)
        if (s.matched) actions.push_back({ActionKind::Receive, s.sender, s.receiver, s.payload});
    return msc_of_execution(vocab, actions);
}

Msc msc_of_word(const ParsedWord& pw) { return msc_of_word(pw.word, pw.vocab); }

SigmaWord word_of_exchange(const Msc& m) {
    if (!is_exchange(m)) throw InternalError("word_of_exchange: input is not an exchange");
    SigmaWord w;
    for (const Message& msg : messages(m))
        w.push_back({msg.matched(), msg.sender, msg.receiver, msg.payload});
    return w;
}

Msc empty_msc(const Vocabulary& vocab) {
    Msc m;
    m.vocab = vocab;
    m.by_process.resize(static_cast<std::size_t>(vocab.process_count()));
    return m;
}

Msc concat(const Msc& a, const Msc& b) {
    if (!(a.vocab == b.vocab)) throw InternalError("concat: vocabularies differ");
    Msc m;
    m.vocab = a.vocab;
    m.events = a.events;
    m.events.insert(m.events.end(), b.events.begin(), b.events.end());
    int shift = a.event_count();
    m.by_process.resize(a.by_process.size());
    for (std::size_t p = 0; p < a.by_process.size(); ++p) {
        m.by_process[p] = a.by_process[p];
        for (int ev : b.by_process[p]) m.by_process[p].push_back(ev + shift);
    }
    m.src = a.src;
    for (const auto& [s, r] : b.src) m.src.emplace_back(s + shift, r + shift);
    std::sort(m.src.begin(), m.src.end());
    validate(m);
    return m;
}

// ---------------------------------------------------------------------------
// Linearizations and oracles
// ---------------------------------------------------------------------------

namespace {

struct LinearizationSearch {
    const Msc& m;
    std::vector<std::vector<int>> succ;
    std::vector<int> indeg;
    std::vector<int> prefix;
    std::size_t nodes = 0;
    std::size_t node_cap;

    LinearizationSearch(const Msc& msc, std::size_t cap)
        : m(msc), succ(order_successors(msc)),
          indeg(static_cast<std::size_t>(msc.event_count()), 0), node_cap(cap) {
        for (const auto& outs : succ)
            for (int t : outs) ++indeg[static_cast<std::size_t>(t)];
    }

    // Visit leaves (complete linearizations); `accept` may stop the search by
    // returning true. `admit` prunes prefixes. Returns true when stopped.
    template <typename Admit, typename Accept>
    bool run(Admit&& admit, Accept&& accept) {
        if (++nodes > node_cap) throw GuardError("linearizations", "search node cap exceeded");
        if (prefix.size() == static_cast<std::size_t>(m.event_count())) return accept(prefix);
        for (int ev = 0; ev < m.event_count(); ++ev) {
            std::size_t e = static_cast<std::size_t>(ev);
            if (indeg[e] != 0) continue;
            if (!admit(prefix, ev)) continue;
            prefix.push_back(ev);
            indeg[e] = -1; // mark placed
            for (int t : succ[e]) --indeg[static_cast<std::size_t>(t)];
            bool stop = run(admit, accept);
            for (int t : succ[e]) ++indeg[static_cast<std::size_t>(t)];
            indeg[e] = 0;
            prefix.pop_back();
            if (stop) return true;
        }
        return false;
    }
};

} // namespace

std::vector<std::vector<Action>> linearizations(const Msc& m, std::size_t cap) {
    std::vector<std::vector<Action>> out;
    LinearizationSearch search(m, cap == 0 ? 1 : cap * static_cast<std::size_t>(m.event_count() + 1));
    search.run([](const std::vector<int>&, int) { return true; },
               [&](const std::vector<int>& order) {
                   if (out.size() >= cap) throw GuardError("linearizations", "enumeration cap exceeded");
                   std::vector<Action> lin;
                   for (int ev : order) lin.push_back(m.events[static_cast<std::size_t>(ev)]);
                   out.push_back(std::move(lin));
                   return false;
               });
    return out;
}

bool satisfies_causal_delivery_oracle(const Msc& m, const Guards& guards) {
    if (static_cast<std::size_t>(m.event_count()) > guards.oracle_events)
        throw GuardError("causal-oracle", "event cap exceeded");
    // A linearization witnesses causal delivery iff along it (a) no matched
    // send follows an unmatched send to the same destination and (b) receives
    // of matched sends to the same destination respect the send order.
    std::vector<Message> msgs = messages(m);
    std::vector<int> message_of_send(static_cast<std::size_t>(m.event_count()), -1);
    for (const Message& msg : msgs) message_of_send[static_cast<std::size_t>(msg.send_event)] = msg.id;

    LinearizationSearch search(m, guards.linearization_nodes);
    auto admit = [&](const std::vector<int>& prefix, int ev) {
        const Action& a = m.events[static_cast<std::size_t>(ev)];
        if (a.kind == ActionKind::Send) {
            bool matched = m.receive_of(ev) >= 0;
            if (!matched) return true;
            for (int prior : prefix) {
                const Action& b = m.events[static_cast<std::size_t>(prior)];
                if (b.kind == ActionKind::Send && b.receiver == a.receiver &&
                    m.receive_of(prior) < 0)
                    return false; // matched send after unmatched one to the same queue
            }
            return true;
        }
        // Receive: all matched sends to the same destination placed before our
        // send must already have their receives placed.
        int my_send = m.send_of(ev);
        std::size_t send_pos = 0;
        for (std::size_t i = 0; i < prefix.size(); ++i)
            if (prefix[i] == my_send) { send_pos = i; break; }
        for (std::size_t i = 0; i < send_pos; ++i) {
            const Action& b = m.events[static_cast<std::size_t>(prefix[i])];
            if (b.kind != ActionKind::Send || b.receiver != a.receiver) continue;
            int r = m.receive_of(prefix[i]);
            if (r < 0) continue;
            bool placed = false;
            for (int e : prefix)
                if (e == r) { placed = true; break; }
            if (!placed) return false;
        }
        return true;
    };
    return search.run(admit, [](const std::vector<int>&) { return true; });
}

std::size_t send_count(const Msc& m) {
    std::size_t n = 0;
    for (const Action& a : m.events)
        if (a.kind == ActionKind::Send) ++n;
    return n;
}

std::size_t receive_count(const Msc& m) { return m.src.size(); }

bool is_exchange(const Msc& m) {
    // An all-sends-first linearization exists iff no receive precedes a send
    // in the transitive order.
    auto succ = order_successors(m);
    int n = m.event_count();
    for (int ev = 0; ev < n; ++ev) {
        if (m.events[static_cast<std::size_t>(ev)].kind != ActionKind::Receive) continue;
        // BFS from the receive; finding a send means failure.
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        std::vector<int> stack{ev};
        seen[static_cast<std::size_t>(ev)] = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            if (v != ev && m.events[static_cast<std::size_t>(v)].kind == ActionKind::Send)
                return false;
            for (int t : succ[static_cast<std::size_t>(v)])
                if (!seen[static_cast<std::size_t>(t)]) {
                    seen[static_cast<std::size_t>(t)] = 1;
                    stack.push_back(t);
                }
        }
    }
    return true;
}

bool is_k_exchange(const Msc& m, std::size_t k) {
    return send_count(m) <= k && receive_count(m) <= k && is_exchange(m);
}

namespace {

// (process, position, action) triples plus positional src pairs.
struct CanonicalForm {
    std::vector<std::vector<Action>> lanes;
    std::vector<std::pair<std::pair<int, int>, std::pair<int, int>>> pairs;

    bool operator==(const CanonicalForm&) const = default;
};

CanonicalForm canonical(const Msc& m) {
    CanonicalForm c;
    std::vector<std::pair<int, int>> pos(static_cast<std::size_t>(m.event_count()));
    c.lanes.resize(m.by_process.size());
    for (std::size_t p = 0; p < m.by_process.size(); ++p)
        for (std::size_t i = 0; i < m.by_process[p].size(); ++i) {
            int ev = m.by_process[p][i];
            pos[static_cast<std::size_t>(ev)] = {static_cast<int>(p), static_cast<int>(i)};
            c.lanes[p].push_back(m.events[static_cast<std::size_t>(ev)]);
        }
    for (const auto& [s, r] : m.src)
        c.pairs.emplace_back(pos[static_cast<std::size_t>(s)], pos[static_cast<std::size_t>(r)]);
    std::sort(c.pairs.begin(), c.pairs.end());
    return c;
}

} // namespace

bool msc_isomorphic(const Msc& a, const Msc& b) {
    if (!(a.vocab == b.vocab)) return false;
    return canonical(a) == canonical(b);
}

std::string msc_to_dot(const Msc& m) {
    std::ostringstream out;
    out << "digraph msc {\n  rankdir=TB;\n  node [shape=plaintext];\n";
    for (std::size_t p = 0; p < m.by_process.size(); ++p) {
        out << "  subgraph cluster_" << p << " {\n";
        out << "    label=\"" << m.vocab.processes[p] << "\";\n";
        std::string prev;
        for (std::size_t i = 0; i < m.by_process[p].size(); ++i) {
            int ev = m.by_process[p][i];
            std::string id = "e" + std::to_string(ev);
            out << "    " << id << " [label=\""
                << to_string(m.events[static_cast<std::size_t>(ev)], m.vocab) << "\"];\n";
            if (!prev.empty()) out << "    " << prev << " -> " << id << " [style=invis];\n";
            prev = id;
        }
        out << "  }\n";
    }
    for (const auto& [s, r] : m.src)
        out << "  e" << s << " -> e" << r << ";\n";
    for (const Message& msg : messages(m))
        if (!msg.matched()) {
            out << "  u" << msg.id << " [shape=point];\n";
            out << "  e" << msg.send_event << " -> u" << msg.id << " [style=dashed];\n";
        }
    out << "}\n";
    return out.str();
}

} // namespace ksync
