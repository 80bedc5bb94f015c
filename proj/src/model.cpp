#include "ksync/model.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <set>
#include <sstream>

namespace ksync {

namespace {

int find_name(const std::vector<std::string>& names, const std::string& name) {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    return -1;
}

} // namespace

ProcId Vocabulary::process_id(const std::string& name) const { return find_name(processes, name); }
PayloadId Vocabulary::payload_id(const std::string& name) const { return find_name(payloads, name); }

ProcId Vocabulary::intern_process(const std::string& name) {
    int id = process_id(name);
    if (id >= 0) return id;
    processes.push_back(name);
    return static_cast<int>(processes.size()) - 1;
}

PayloadId Vocabulary::intern_payload(const std::string& name) {
    int id = payload_id(name);
    if (id >= 0) return id;
    payloads.push_back(name);
    return static_cast<int>(payloads.size()) - 1;
}

int LocalAutomaton::state_id(const std::string& name) const { return find_name(state_names, name); }

int GlobalAutomaton::state_of(const GlobalState& gs) const {
    auto it = index.find(gs);
    return it == index.end() ? -1 : it->second;
}

std::string GlobalAutomaton::state_name(int s, const System& sys) const {
    return global_state_name(states.at(static_cast<std::size_t>(s)), sys);
}

int Alphabet::id_of(const SigmaSymbol& s) const {
    auto it = index.find(s);
    return it == index.end() ? -1 : it->second;
}

Alphabet Alphabet::from_symbols(Vocabulary vocab, std::vector<SigmaSymbol> symbols) {
    std::sort(symbols.begin(), symbols.end());
    symbols.erase(std::unique(symbols.begin(), symbols.end()), symbols.end());
    Alphabet a;
    a.vocab = std::move(vocab);
    a.symbols = std::move(symbols);
    for (std::size_t i = 0; i < a.symbols.size(); ++i) a.index[a.symbols[i]] = static_cast<int>(i);
    return a;
}

// ---------------------------------------------------------------------------
// System file parsing
// ---------------------------------------------------------------------------

namespace {

struct Token {
    std::string text;
    int line;
    int column;
};

std::vector<std::vector<Token>> tokenize_lines(const std::string& text) {
    std::vector<std::vector<Token>> lines;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::vector<Token> toks;
        std::size_t i = 0;
        while (i < raw.size()) {
            if (raw[i] == '#') break;
            if (std::isspace(static_cast<unsigned char>(raw[i]))) { ++i; continue; }
            std::size_t j = i;
            while (j < raw.size() && !std::isspace(static_cast<unsigned char>(raw[j])) &&
                   raw[j] != '#')
                ++j;
            toks.push_back({raw.substr(i, j - i), lineno, static_cast<int>(i) + 1});
            i = j;
        }
        if (!toks.empty()) lines.push_back(std::move(toks));
    }
    return lines;
}

[[noreturn]] void fail(const Token& t, const std::string& msg) {
    throw ParseError(t.line, t.column, msg);
}

bool valid_name(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

struct RawTransition {
    Token from, to, payload, peer;
    bool is_send;
};

struct RawProcess {
    Token name;
    std::optional<Token> init;
    std::vector<RawTransition> transitions;
};

} // namespace

System parse_system(const std::string& text, const ParseOptions& opts) {
    auto lines = tokenize_lines(text);
    if (lines.empty()) throw ParseError(1, 1, "no processes");

    System sys;
    std::vector<RawProcess> raw;

    std::size_t li = 0;
    if (lines[li][0].text == "system") {
        if (lines[li].size() != 2 || !valid_name(lines[li][1].text))
            fail(lines[li][0], "expected: system <name>");
        sys.name = lines[li][1].text;
        ++li;
    }

    for (; li < lines.size(); ++li) {
        const auto& toks = lines[li];
        const std::string& head = toks[0].text;
        if (head == "process") {
            if (toks.size() != 2 || !valid_name(toks[1].text))
                fail(toks[0], "expected: process <pid>");
            for (const auto& p : raw)
                if (p.name.text == toks[1].text)
                    fail(toks[1], "duplicate process '" + toks[1].text + "'");
            raw.push_back({toks[1], std::nullopt, {}});
        } else if (head == "init") {
            if (raw.empty()) fail(toks[0], "init outside a process block");
            if (toks.size() != 2 || !valid_name(toks[1].text))
                fail(toks[0], "expected: init <state>");
            if (raw.back().init)
                fail(toks[1], "duplicate init for process '" + raw.back().name.text + "'");
            raw.back().init = toks[1];
        } else {
            // <state> -> <state> : ! <payload> to <pid>
            // <state> -> <state> : ? <payload> from <pid>
            if (raw.empty()) fail(toks[0], "transition outside a process block");
            if (toks.size() != 8 || toks[1].text != "->" || toks[3].text != ":")
                fail(toks[0], "expected: <state> -> <state> : !|? <payload> to|from <pid>");
            bool is_send;
            if (toks[4].text == "!") is_send = true;
            else if (toks[4].text == "?") is_send = false;
            else fail(toks[4], "expected '!' or '?'");
            if (!valid_name(toks[0].text) || !valid_name(toks[2].text))
                fail(toks[0], "invalid state name");
            if (!valid_name(toks[5].text)) fail(toks[5], "invalid payload name");
            const std::string& link = toks[6].text;
            if (is_send && link != "to") fail(toks[6], "expected 'to' after a send payload");
            if (!is_send && link != "from") fail(toks[6], "expected 'from' after a receive payload");
            if (!valid_name(toks[7].text)) fail(toks[7], "invalid process name");
            raw.back().transitions.push_back({toks[0], toks[2], toks[5], toks[7], is_send});
        }
    }

    if (raw.empty()) throw ParseError(lines.back().back().line, 1, "no processes");

    for (const auto& p : raw) sys.vocab.intern_process(p.name.text);

    for (std::size_t pi = 0; pi < raw.size(); ++pi) {
        const RawProcess& rp = raw[pi];
        LocalAutomaton la;
        if (!rp.init) fail(rp.name, "missing init for process '" + rp.name.text + "'");
        auto intern_state = [&la](const std::string& name) {
            int id = la.state_id(name);
            if (id >= 0) return id;
            la.state_names.push_back(name);
            return static_cast<int>(la.state_names.size()) - 1;
        };
        la.initial = intern_state(rp.init->text);
        ProcId self = static_cast<ProcId>(pi);
        for (const RawTransition& rt : rp.transitions) {
            int peer = sys.vocab.process_id(rt.peer.text);
            if (peer < 0) fail(rt.peer, "undeclared process '" + rt.peer.text + "'");
            if (!opts.allow_self_sends && peer == self)
                fail(rt.peer, "self-send on process '" + rt.peer.text + "' (strict mode)");
            PayloadId m = sys.vocab.intern_payload(rt.payload.text);
            Action act;
            if (rt.is_send) act = {ActionKind::Send, self, peer, m};
            else act = {ActionKind::Receive, peer, self, m};
            la.transitions.push_back({intern_state(rt.from.text), act, intern_state(rt.to.text)});
        }
        std::sort(la.transitions.begin(), la.transitions.end());
        la.transitions.erase(std::unique(la.transitions.begin(), la.transitions.end()),
                             la.transitions.end());
        sys.processes.push_back(std::move(la));
    }
    return sys;
}

std::string pretty_print(const System& sys) {
    std::ostringstream out;
    out << "system " << (sys.name.empty() ? std::string("s") : sys.name) << "\n";
    for (std::size_t pi = 0; pi < sys.processes.size(); ++pi) {
        const LocalAutomaton& la = sys.processes[pi];
        out << "process " << sys.vocab.processes[pi] << "\n";
        out << "  init " << la.state_names[static_cast<std::size_t>(la.initial)] << "\n";
        for (const LocalTransition& t : la.transitions) {
            out << "  " << la.state_names[static_cast<std::size_t>(t.from)] << " -> "
                << la.state_names[static_cast<std::size_t>(t.to)] << " : ";
            if (t.action.kind == ActionKind::Send)
                out << "! " << sys.vocab.payloads[static_cast<std::size_t>(t.action.payload)]
                    << " to " << sys.vocab.processes[static_cast<std::size_t>(t.action.receiver)];
            else
                out << "? " << sys.vocab.payloads[static_cast<std::size_t>(t.action.payload)]
                    << " from " << sys.vocab.processes[static_cast<std::size_t>(t.action.sender)];
            out << "\n";
        }
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Control product
// ---------------------------------------------------------------------------

GlobalAutomaton global_product(const System& sys, std::size_t state_guard) {
    GlobalAutomaton ga;
    GlobalState init;
    for (const auto& la : sys.processes) init.push_back(la.initial);
    ga.states.push_back(init);
    ga.index[init] = 0;
    ga.initial = 0;
    ga.adj.emplace_back();

    std::deque<int> work{0};
    while (!work.empty()) {
        int s = work.front();
        work.pop_front();
        GlobalState gs = ga.states[static_cast<std::size_t>(s)];
        std::vector<std::pair<Action, GlobalState>> moves;
        for (std::size_t pi = 0; pi < sys.processes.size(); ++pi) {
            for (const LocalTransition& t : sys.processes[pi].transitions) {
                if (t.from != gs[pi]) continue;
                GlobalState next = gs;
                next[pi] = t.to;
                moves.emplace_back(t.action, std::move(next));
            }
        }
        std::sort(moves.begin(), moves.end());
        for (auto& [act, next] : moves) {
            auto it = ga.index.find(next);
            int tid;
            if (it == ga.index.end()) {
                if (ga.states.size() >= state_guard)
                    throw GuardError("product-states",
                                     "control product exceeds " + std::to_string(state_guard) +
                                         " states");
                tid = static_cast<int>(ga.states.size());
                ga.index[next] = tid;
                ga.states.push_back(next);
                ga.adj.emplace_back();
                work.push_back(tid);
            } else {
                tid = it->second;
            }
            ga.adj[static_cast<std::size_t>(s)].push_back({act, tid});
        }
    }
    return ga;
}

Alphabet system_alphabet(const System& sys) {
    std::vector<SigmaSymbol> symbols;
    for (const auto& la : sys.processes)
        for (const LocalTransition& t : la.transitions)
            if (t.action.kind == ActionKind::Send) {
                symbols.push_back({false, t.action.sender, t.action.receiver, t.action.payload});
                symbols.push_back({true, t.action.sender, t.action.receiver, t.action.payload});
            }
    return Alphabet::from_symbols(sys.vocab, std::move(symbols));
}

// ---------------------------------------------------------------------------
// Word and trace parsing
// ---------------------------------------------------------------------------

namespace {

// Parses `m(p->q)` starting after the prefix; returns (payload, sender, receiver).
std::tuple<std::string, std::string, std::string> parse_message_core(const std::string& tok,
                                                                     std::size_t start, int line,
                                                                     int col) {
    auto open = tok.find('(', start);
    auto arrow = tok.find("->", start);
    auto close = tok.find(')', start);
    if (open == std::string::npos || arrow == std::string::npos || close == std::string::npos ||
        !(start < open && open < arrow && arrow < close) || close != tok.size() - 1)
        throw ParseError(line, col, "malformed token '" + tok + "'");
    std::string payload = tok.substr(start, open - start);
    std::string sender = tok.substr(open + 1, arrow - open - 1);
    std::string receiver = tok.substr(arrow + 2, close - arrow - 2);
    if (!valid_name(payload) || !valid_name(sender) || !valid_name(receiver))
        throw ParseError(line, col, "malformed token '" + tok + "'");
    return {payload, sender, receiver};
}

std::vector<Token> tokenize_flat(const std::string& text) {
    std::vector<Token> toks;
    for (auto& line : tokenize_lines(text))
        for (auto& t : line) toks.push_back(t);
    return toks;
}

} // namespace

ParsedWord parse_sigma_word(const std::string& text, const Vocabulary* context) {
    ParsedWord result;
    if (context) result.vocab = *context;
    for (const Token& tok : tokenize_flat(text)) {
        bool matched;
        std::size_t start;
        if (tok.text.rfind("!?", 0) == 0) { matched = true; start = 2; }
        else if (tok.text.rfind("!", 0) == 0) { matched = false; start = 1; }
        else throw ParseError(tok.line, tok.column, "malformed token '" + tok.text + "'");
        auto [payload, sender, receiver] = parse_message_core(tok.text, start, tok.line, tok.column);
        SigmaSymbol s;
        if (context) {
            s.sender = result.vocab.process_id(sender);
            s.receiver = result.vocab.process_id(receiver);
            s.payload = result.vocab.payload_id(payload);
            if (s.sender < 0) throw ParseError(tok.line, tok.column, "unknown process '" + sender + "'");
            if (s.receiver < 0)
                throw ParseError(tok.line, tok.column, "unknown process '" + receiver + "'");
            if (s.payload < 0) throw ParseError(tok.line, tok.column, "unknown payload '" + payload + "'");
        } else {
            s.sender = result.vocab.intern_process(sender);
            s.receiver = result.vocab.intern_process(receiver);
            s.payload = result.vocab.intern_payload(payload);
        }
        s.matched = matched;
        result.word.push_back(s);
    }
    return result;
}

ParsedTrace parse_action_trace(const std::string& text, const Vocabulary* context) {
    ParsedTrace result;
    if (context) result.vocab = *context;
    for (const Token& tok : tokenize_flat(text)) {
        ActionKind kind;
        std::size_t start;
        if (tok.text.rfind("!", 0) == 0) { kind = ActionKind::Send; start = 1; }
        else if (tok.text.rfind("?", 0) == 0) { kind = ActionKind::Receive; start = 1; }
        else throw ParseError(tok.line, tok.column, "malformed token '" + tok.text + "'");
        auto [payload, sender, receiver] = parse_message_core(tok.text, start, tok.line, tok.column);
        Action a;
        a.kind = kind;
        if (context) {
            a.sender = result.vocab.process_id(sender);
            a.receiver = result.vocab.process_id(receiver);
            a.payload = result.vocab.payload_id(payload);
            if (a.sender < 0) throw ParseError(tok.line, tok.column, "unknown process '" + sender + "'");
            if (a.receiver < 0)
                throw ParseError(tok.line, tok.column, "unknown process '" + receiver + "'");
            if (a.payload < 0) throw ParseError(tok.line, tok.column, "unknown payload '" + payload + "'");
        } else {
            a.sender = result.vocab.intern_process(sender);
            a.receiver = result.vocab.intern_process(receiver);
            a.payload = result.vocab.intern_payload(payload);
        }
        result.actions.push_back(a);
    }
    return result;
}

std::string to_string(const SigmaSymbol& s, const Vocabulary& vocab) {
    return std::string(s.matched ? "!?" : "!") +
           vocab.payloads[static_cast<std::size_t>(s.payload)] + "(" +
           vocab.processes[static_cast<std::size_t>(s.sender)] + "->" +
           vocab.processes[static_cast<std::size_t>(s.receiver)] + ")";
}

std::string to_string(const SigmaWord& w, const Vocabulary& vocab) {
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) out += " ";
        out += to_string(w[i], vocab);
    }
    return out;
}

std::string to_string(const Action& a, const Vocabulary& vocab) {
    return std::string(a.kind == ActionKind::Send ? "!" : "?") +
           vocab.payloads[static_cast<std::size_t>(a.payload)] + "(" +
           vocab.processes[static_cast<std::size_t>(a.sender)] + "->" +
           vocab.processes[static_cast<std::size_t>(a.receiver)] + ")";
}

std::string global_state_name(const GlobalState& gs, const System& sys) {
    std::string out = "(";
    for (std::size_t i = 0; i < gs.size(); ++i) {
        if (i) out += ",";
        out += sys.processes[i].state_names[static_cast<std::size_t>(gs[i])];
    }
    return out + ")";
}

GlobalState parse_global_state(const std::string& text, const System& sys) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == ',') { parts.push_back(cur); cur.clear(); }
        else if (!std::isspace(static_cast<unsigned char>(c))) cur += c;
    }
    parts.push_back(cur);
    if (parts.size() != sys.processes.size())
        throw ParseError(1, 1, "expected " + std::to_string(sys.processes.size()) +
                                   " comma-separated local states");
    GlobalState gs;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        int id = sys.processes[i].state_id(parts[i]);
        if (id < 0)
            throw ParseError(1, 1, "unknown state '" + parts[i] + "' for process '" +
                                       sys.vocab.processes[i] + "'");
        gs.push_back(id);
    }
    return gs;
}

} // namespace ksync
