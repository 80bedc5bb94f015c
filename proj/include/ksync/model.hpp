#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "ksync/common.hpp"

namespace ksync {

using ProcId = int;
using PayloadId = int;

// Interned process and payload names.  Processes keep declaration order, which
// fixes the component order of global control states.
struct Vocabulary {
    std::vector<std::string> processes;
    std::vector<std::string> payloads;

    ProcId process_id(const std::string& name) const;
    PayloadId payload_id(const std::string& name) const;
    ProcId intern_process(const std::string& name);
    PayloadId intern_payload(const std::string& name);

    int process_count() const { return static_cast<int>(processes.size()); }
    int payload_count() const { return static_cast<int>(payloads.size()); }

    bool operator==(const Vocabulary&) const = default;
};

enum class ActionKind { Send, Receive };

// send(m, p, q) or receive(m, p, q); a send executes on the sender, a receive
// on the receiver.
struct Action {
    ActionKind kind;
    ProcId sender;
    ProcId receiver;
    PayloadId payload;

    ProcId executing() const { return kind == ActionKind::Send ? sender : receiver; }

    friend auto operator<=>(const Action&, const Action&) = default;
};

// One alphabet letter of an exchange word: a send, flagged matched ("!?") or
// unmatched ("!").
struct SigmaSymbol {
    bool matched;
    ProcId sender;
    ProcId receiver;
    PayloadId payload;

    friend auto operator<=>(const SigmaSymbol&, const SigmaSymbol&) = default;
};

using SigmaWord = std::vector<SigmaSymbol>;

struct LocalTransition {
    int from;
    Action action;
    int to;

    friend auto operator<=>(const LocalTransition&, const LocalTransition&) = default;
};

struct LocalAutomaton {
    std::vector<std::string> state_names;
    int initial = 0;
    std::vector<LocalTransition> transitions;

    int state_id(const std::string& name) const;
};

struct ParseOptions {
    bool allow_self_sends = true;
};

struct System {
    std::string name;
    Vocabulary vocab;
    std::vector<LocalAutomaton> processes; // index = ProcId

    const LocalAutomaton& process(ProcId p) const { return processes.at(static_cast<std::size_t>(p)); }
};

// One local state per process, in declared process order.
using GlobalState = std::vector<int>;

struct GlobalTransition {
    Action action;
    int to; // index into GlobalAutomaton::states
};

// Control product trimmed to the states reachable from the initial tuple.
struct GlobalAutomaton {
    std::vector<GlobalState> states;
    std::map<GlobalState, int> index;
    int initial = 0;
    std::vector<std::vector<GlobalTransition>> adj; // per state, sorted by (action, to)

    int state_of(const GlobalState& gs) const;
    std::string state_name(int s, const System& sys) const;
};

// The alphabet of exchange symbols materialized for one system: both flags for
// every (payload, sender, receiver) triple that occurs in a send transition.
struct Alphabet {
    Vocabulary vocab;
    std::vector<SigmaSymbol> symbols; // sorted
    std::map<SigmaSymbol, int> index;

    int id_of(const SigmaSymbol& s) const;
    int size() const { return static_cast<int>(symbols.size()); }

    static Alphabet from_symbols(Vocabulary vocab, std::vector<SigmaSymbol> symbols);
    bool operator==(const Alphabet& other) const {
        return vocab == other.vocab && symbols == other.symbols;
    }
};

System parse_system(const std::string& text, const ParseOptions& opts = {});
std::string pretty_print(const System& sys);

GlobalAutomaton global_product(const System& sys, std::size_t state_guard = Guards{}.product_states);

Alphabet system_alphabet(const System& sys);

// Word parsing.  Without a vocabulary context, names are interned on the fly;
// with one, unknown names are rejected.
struct ParsedWord {
    SigmaWord word;
    Vocabulary vocab;
};
ParsedWord parse_sigma_word(const std::string& text, const Vocabulary* context = nullptr);

struct ParsedTrace {
    std::vector<Action> actions;
    Vocabulary vocab;
};
ParsedTrace parse_action_trace(const std::string& text, const Vocabulary* context = nullptr);

// Printing helpers; formats round-trip through the parsers above.
std::string to_string(const SigmaSymbol& s, const Vocabulary& vocab);
std::string to_string(const SigmaWord& w, const Vocabulary& vocab);
std::string to_string(const Action& a, const Vocabulary& vocab);
std::string global_state_name(const GlobalState& gs, const System& sys);

// Comma-separated local state names in declared process order, e.g. "0,2,1".
GlobalState parse_global_state(const std::string& text, const System& sys);

} // namespace ksync
