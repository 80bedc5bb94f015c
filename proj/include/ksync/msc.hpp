#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ksync/common.hpp"
#include "ksync/model.hpp"

namespace ksync {

// A message sequence chart: events carrying send/receive actions, a total
// order per process, and a pairing of a subset of sends with all receives.
// Events are identified by their construction index; the per-process order is
// the order within `by_process`.
struct Msc {
    Vocabulary vocab;
    std::vector<Action> events;                 // label per event
    std::vector<std::vector<int>> by_process;   // per process: events in order
    std::vector<std::pair<int, int>> src;       // (send event, receive event), sorted

    int event_count() const { return static_cast<int>(events.size()); }
    ProcId process_of(int ev) const { return events[static_cast<std::size_t>(ev)].executing(); }
    // Partner lookup; -1 when absent.
    int receive_of(int send_ev) const;
    int send_of(int receive_ev) const;
};

// One vertex of the message view: a send event plus its receive when matched.
struct Message {
    int id;
    int send_event;
    int receive_event; // -1 when unmatched
    ProcId sender;
    ProcId receiver;
    PayloadId payload;

    bool matched() const { return receive_event >= 0; }
};

// Messages ordered by send event index.
std::vector<Message> messages(const Msc& m);

// Builds an MSC from explicit per-process action labels plus explicit pairing.
// `src_pairs` are ((proc, idx), (proc, idx)) positions. Throws on violations of
// well-formedness (acyclicity, pairing bijective onto receives, label match).
Msc make_msc(const Vocabulary& vocab, const std::vector<std::vector<Action>>& per_process,
             const std::vector<std::pair<std::pair<int, int>, std::pair<int, int>>>& src_pairs);

// MSC of an action sequence: per-process order from shared processes, pairing
// by FIFO signature matching (the l-th receive of a signature pairs with the
// l-th send of that signature). Throws on a receive without a partner.
Msc msc_of_execution(const Vocabulary& vocab, const std::vector<Action>& actions);

// MSC of an exchange word: all sends first, then receives of matched symbols
// in symbol order; built through msc_of_execution.
Msc msc_of_word(const SigmaWord& word, const Vocabulary& vocab);
Msc msc_of_word(const ParsedWord& pw);

// The canonical send-order encoding of an exchange: flags reflect the MSC's
// own pairing. Throws if m is not an exchange.
SigmaWord word_of_exchange(const Msc& m);

Msc concat(const Msc& a, const Msc& b);
Msc empty_msc(const Vocabulary& vocab);

// All action sequences extending the event partial order; throws GuardError
// past the cap.
std::vector<std::vector<Action>> linearizations(const Msc& m, std::size_t cap = 1'000'000);

// True iff some linearization delivers same-destination messages in send
// order (unmatched sends exempt). Search is pruned but exact.
bool satisfies_causal_delivery_oracle(const Msc& m, const Guards& guards = {});

// True iff some linearization is k sends followed by at most k receives.
bool is_k_exchange(const Msc& m, std::size_t k);
bool is_exchange(const Msc& m);

std::size_t send_count(const Msc& m);
std::size_t receive_count(const Msc& m);

// Structure equality with events keyed by (process, position).
bool msc_isomorphic(const Msc& a, const Msc& b);

std::string msc_to_dot(const Msc& m);

} // namespace ksync
