#pragma once

// Fixtures and independent oracles shared across the test suites. The oracles
// here are deliberately brute force and stay independent of the library code
// paths they check.

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ksync/conflict.hpp"
#include "ksync/model.hpp"
#include "ksync/msc.hpp"

namespace ksync::testing {

inline const char* kS1 = R"(system s1
process p
  init 0
  0 -> 1 : ! a to r
  1 -> 2 : ! c to q
process q
  init 0
  0 -> 1 : ? b from r
process r
  init 0
  0 -> 1 : ! b to q
  1 -> 2 : ? a from p
)";

inline const char* kFlood = R"(system flood
process p
  init 0
  0 -> 0 : ! m to q
  0 -> 1 : ? n from q
  1 -> 1 : ? n from q
process q
  init 0
  0 -> 0 : ! n to p
  0 -> 1 : ? m from p
  1 -> 1 : ? m from p
)";

inline Msc word_msc(const std::string& text) { return msc_of_word(parse_sigma_word(text)); }

// mu1: two crossing pairs, one between p and q, then one between q and r.
inline Msc mu1() {
    ParsedWord pw = parse_sigma_word("!?m1(p->q) !?m2(q->p) !?m3(q->r) !?m4(r->q)");
    Msc half1 = msc_of_word({pw.word[0], pw.word[1]}, pw.vocab);
    Msc half2 = msc_of_word({pw.word[2], pw.word[3]}, pw.vocab);
    return concat(half1, half2);
}

inline Msc mu1_half() { return word_msc("!?m1(p->q) !?m2(q->p)"); }

inline Msc mu2() { return word_msc("!?m1(p->q) !?m2(r->q)"); }

// mu3 is not an exchange: q sends m1 to p, p answers m2 after receiving it,
// and q also sends m3 to r before taking m2.
inline Msc mu3() {
    Vocabulary v;
    ProcId p = v.intern_process("p"), q = v.intern_process("q"), r = v.intern_process("r");
    PayloadId m1 = v.intern_payload("m1"), m2 = v.intern_payload("m2"),
              m3 = v.intern_payload("m3");
    std::vector<Action> e{{ActionKind::Send, q, p, m1},    {ActionKind::Receive, q, p, m1},
                          {ActionKind::Send, q, r, m3},    {ActionKind::Send, p, q, m2},
                          {ActionKind::Receive, p, q, m2}, {ActionKind::Receive, q, r, m3}};
    return msc_of_execution(v, e);
}

// mu6: messages from s and p into the queues of q and r, received against the
// send order; fine peer-to-peer, impossible with mailboxes.
inline Msc mu6() {
    Vocabulary v;
    ProcId p = v.intern_process("p"), q = v.intern_process("q"), r = v.intern_process("r"),
           s = v.intern_process("s");
    PayloadId m1 = v.intern_payload("m1"), m2 = v.intern_payload("m2"),
              m3 = v.intern_payload("m3"), m4 = v.intern_payload("m4");
    std::vector<std::vector<Action>> lanes(4);
    lanes[static_cast<std::size_t>(s)] = {{ActionKind::Send, s, r, m1},
                                          {ActionKind::Send, s, q, m2}};
    lanes[static_cast<std::size_t>(p)] = {{ActionKind::Send, p, q, m3},
                                          {ActionKind::Send, p, r, m4}};
    lanes[static_cast<std::size_t>(q)] = {{ActionKind::Receive, s, q, m2},
                                          {ActionKind::Receive, p, q, m3}};
    lanes[static_cast<std::size_t>(r)] = {{ActionKind::Receive, p, r, m4},
                                          {ActionKind::Receive, s, r, m1}};
    return make_msc(v, lanes,
                    {{{s, 0}, {r, 1}}, {{s, 1}, {q, 0}}, {{p, 0}, {q, 1}}, {{p, 1}, {r, 0}}});
}

// ---------------------------------------------------------------------------
// Brute-force oracles
// ---------------------------------------------------------------------------

// Lane positions of every event of the given messages.
inline bool is_lane_prefix(const Msc& m, const std::set<int>& part) {
    std::vector<Message> msgs = messages(m);
    std::set<int> part_events;
    for (int id : part) {
        part_events.insert(msgs[static_cast<std::size_t>(id)].send_event);
        if (msgs[static_cast<std::size_t>(id)].matched())
            part_events.insert(msgs[static_cast<std::size_t>(id)].receive_event);
    }
    for (const auto& lane : m.by_process) {
        bool seen_outside = false;
        for (int ev : lane) {
            bool inside = part_events.count(ev) > 0;
            if (inside && seen_outside) return false;
            if (!inside) seen_outside = true;
        }
    }
    return true;
}

// Prime by definition: an exchange with no cut into two nonempty exchanges.
inline bool split_oracle_prime(const Msc& m) {
    if (!is_exchange(m)) throw InternalError("split_oracle_prime: not an exchange");
    int n = static_cast<int>(messages(m).size());
    if (n == 0) return false;
    if (n == 1) return true;
    for (int mask = 1; mask < (1 << n) - 1; ++mask) {
        std::set<int> part;
        std::vector<int> part_vec, rest_vec;
        for (int i = 0; i < n; ++i) {
            if (mask & (1 << i)) {
                part.insert(i);
                part_vec.push_back(i);
            } else {
                rest_vec.push_back(i);
            }
        }
        if (!is_lane_prefix(m, part)) continue;
        if (is_exchange(induced_sub_msc(m, part_vec)) &&
            is_exchange(induced_sub_msc(m, rest_vec)))
            return false;
    }
    return true;
}

// k-synchronizable by definition: recursive search over leading exchanges.
inline bool chop_oracle(const Msc& m, std::size_t k) {
    int n = static_cast<int>(messages(m).size());
    if (n == 0) return true;
    if (n > 20) throw InternalError("chop_oracle: too many messages");
    std::map<unsigned, bool> memo;
    std::function<bool(unsigned)> solve = [&](unsigned remaining) -> bool {
        if (remaining == 0) return true;
        auto it = memo.find(remaining);
        if (it != memo.end()) return it->second;
        std::vector<int> rem_ids;
        for (int i = 0; i < n; ++i)
            if (remaining & (1u << i)) rem_ids.push_back(i);
        Msc rem = induced_sub_msc(m, rem_ids);
        // `rem`'s message ids are positions within rem_ids.
        int rn = static_cast<int>(rem_ids.size());
        bool ok = false;
        for (int mask = 1; mask < (1 << rn) && !ok; ++mask) {
            if (static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(mask))) > k)
                continue;
            std::set<int> part;
            std::vector<int> part_vec;
            for (int i = 0; i < rn; ++i)
                if (mask & (1 << i)) {
                    part.insert(i);
                    part_vec.push_back(i);
                }
            if (!is_lane_prefix(rem, part)) continue;
            if (!is_exchange(induced_sub_msc(rem, part_vec))) continue;
            unsigned next = remaining;
            for (int i = 0; i < rn; ++i)
                if (mask & (1 << i)) next &= ~(1u << rem_ids[static_cast<std::size_t>(i)]);
            ok = solve(next);
        }
        memo[remaining] = ok;
        return ok;
    };
    return solve((n == 32 ? ~0u : (1u << n) - 1u));
}

// ---------------------------------------------------------------------------
// Random generation
// ---------------------------------------------------------------------------

// Arbitrary well-formed MSCs over 3 processes and 2 payloads, including
// structures no queue discipline could produce.
inline Msc random_msc(std::mt19937& rng, int max_messages = 4) {
    Vocabulary v;
    v.intern_process("p");
    v.intern_process("q");
    v.intern_process("r");
    v.intern_payload("a");
    v.intern_payload("b");
    std::uniform_int_distribution<int> proc(0, 2), pay(0, 1), coin(0, 1);
    int n = std::uniform_int_distribution<int>(1, max_messages)(rng);

    struct Ev {
        Action action;
        int message;
        bool is_send;
    };
    std::vector<Ev> order;
    for (int i = 0; i < n; ++i) {
        ProcId s = proc(rng), r = proc(rng);
        PayloadId m = pay(rng);
        bool matched = coin(rng) == 1;
        std::size_t send_pos =
            std::uniform_int_distribution<std::size_t>(0, order.size())(rng);
        order.insert(order.begin() + static_cast<std::ptrdiff_t>(send_pos),
                     {{ActionKind::Send, s, r, m}, i, true});
        if (matched) {
            std::size_t recv_pos =
                std::uniform_int_distribution<std::size_t>(send_pos + 1, order.size())(rng);
            order.insert(order.begin() + static_cast<std::ptrdiff_t>(recv_pos),
                         {{ActionKind::Receive, s, r, m}, i, false});
        }
    }
    std::vector<std::vector<Action>> lanes(3);
    std::map<std::pair<int, bool>, std::pair<int, int>> pos; // (message, is_send) -> (proc, idx)
    for (const Ev& e : order) {
        int lane = e.action.executing();
        pos[{e.message, e.is_send}] = {lane, static_cast<int>(lanes[static_cast<std::size_t>(lane)].size())};
        lanes[static_cast<std::size_t>(lane)].push_back(e.action);
    }
    std::vector<std::pair<std::pair<int, int>, std::pair<int, int>>> src;
    for (int i = 0; i < n; ++i) {
        auto send = pos.find({i, true});
        auto recv = pos.find({i, false});
        if (recv != pos.end()) src.push_back({send->second, recv->second});
    }
    return make_msc(v, lanes, src);
}

// Random small systems: every receive transition answers a send signature
// that exists somewhere, so communication can actually happen.
inline System random_system(std::mt19937& rng, int max_procs = 3, int max_states = 3) {
    int nprocs = std::uniform_int_distribution<int>(2, max_procs)(rng);
    int npayloads = std::uniform_int_distribution<int>(1, 2)(rng);
    std::string text = "system rnd\n";
    std::uniform_int_distribution<int> coin(0, 1);

    std::vector<int> states(static_cast<std::size_t>(nprocs));
    for (int p = 0; p < nprocs; ++p)
        states[static_cast<std::size_t>(p)] =
            std::uniform_int_distribution<int>(1, max_states)(rng);

    struct Sig {
        int sender, receiver, payload;
    };
    std::vector<Sig> send_sigs;
    std::vector<std::string> blocks(static_cast<std::size_t>(nprocs));
    for (int p = 0; p < nprocs; ++p) {
        std::string b = "process P" + std::to_string(p) + "\n  init 0\n";
        int ntrans = std::uniform_int_distribution<int>(1, 3)(rng);
        for (int t = 0; t < ntrans; ++t) {
            int from = std::uniform_int_distribution<int>(0, states[static_cast<std::size_t>(p)] - 1)(rng);
            int to = std::uniform_int_distribution<int>(0, states[static_cast<std::size_t>(p)] - 1)(rng);
            int other = std::uniform_int_distribution<int>(0, nprocs - 2)(rng);
            if (other >= p) ++other;
            int pay = std::uniform_int_distribution<int>(0, npayloads - 1)(rng);
            b += "  " + std::to_string(from) + " -> " + std::to_string(to) + " : ! m" +
                 std::to_string(pay) + " to P" + std::to_string(other) + "\n";
            send_sigs.push_back({p, other, pay});
        }
        blocks[static_cast<std::size_t>(p)] = b;
    }
    // Receives answering random send signatures.
    for (int p = 0; p < nprocs; ++p) {
        std::vector<Sig> inbound;
        for (const Sig& s : send_sigs)
            if (s.receiver == p) inbound.push_back(s);
        if (inbound.empty()) continue;
        int ntrans = std::uniform_int_distribution<int>(0, 2)(rng);
        for (int t = 0; t < ntrans; ++t) {
            const Sig& s = inbound[std::uniform_int_distribution<std::size_t>(
                0, inbound.size() - 1)(rng)];
            int from = std::uniform_int_distribution<int>(0, states[static_cast<std::size_t>(p)] - 1)(rng);
            int to = std::uniform_int_distribution<int>(0, states[static_cast<std::size_t>(p)] - 1)(rng);
            blocks[static_cast<std::size_t>(p)] += "  " + std::to_string(from) + " -> " +
                                                   std::to_string(to) + " : ? m" +
                                                   std::to_string(s.payload) + " from P" +
                                                   std::to_string(s.sender) + "\n";
        }
    }
    for (const std::string& b : blocks) text += b;
    return parse_system(text);
}

// Exhaustive word streams over a fixed alphabet.
inline std::vector<SigmaWord> all_words(const std::vector<SigmaSymbol>& alphabet,
                                        std::size_t max_len) {
    std::vector<SigmaWord> out{{}};
    std::vector<SigmaWord> frontier{{}};
    for (std::size_t len = 1; len <= max_len; ++len) {
        std::vector<SigmaWord> next;
        for (const SigmaWord& w : frontier)
            for (const SigmaSymbol& s : alphabet) {
                SigmaWord w2 = w;
                w2.push_back(s);
                next.push_back(w2);
            }
        out.insert(out.end(), next.begin(), next.end());
        frontier = std::move(next);
    }
    return out;
}

} // namespace ksync::testing
