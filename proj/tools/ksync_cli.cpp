// Command-line front end: parsing, simulation, exchange analysis and DOT
// export for mailbox communicating systems.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ksync/degree.hpp"
#include "ksync/prime.hpp"

using namespace ksync;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitInputError = 2;
constexpr int kExitGuard = 3;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, 0, "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Options {
    std::string file;
    std::string actions;
    std::string word;
    std::string in_state, mid_state, fin_state;
    std::string format = "text";
    std::string dot_path;
    bool strict = false;
    std::size_t max_actions = 8;
    std::size_t max_buffer = 3;
    std::size_t max_len = 8;
    Guards guards;
};

System load_system(const Options& opt) {
    ParseOptions popts;
    popts.allow_self_sends = !opt.strict;
    return parse_system(slurp(opt.file), popts);
}

void write_dot(const std::string& path, const std::string& dot) {
    std::ofstream out(path);
    if (!out) throw ParseError(0, 0, "cannot write '" + path + "'");
    out << dot;
}

int cmd_parse(const Options& opt) {
    System sys = load_system(opt);
    std::size_t states = 0, transitions = 0;
    for (const auto& la : sys.processes) {
        states += la.state_names.size();
        transitions += la.transitions.size();
    }
    std::cout << "system: " << sys.name << "\n"
              << "processes: " << sys.processes.size() << "\n"
              << "local states: " << states << "\n"
              << "transitions: " << transitions << "\n"
              << "payloads: " << sys.vocab.payloads.size() << "\n";
    std::cout << pretty_print(sys);
    return kExitOk;
}

int cmd_simulate(const Options& opt) {
    System sys = load_system(opt);
    ParsedTrace trace = parse_action_trace(opt.actions, &sys.vocab);
    RunResult r = run(sys, trace.actions);
    if (!r.execution) {
        std::cout << "error at index " << r.failed_index << ": "
                  << step_failure_name(r.failure) << " ("
                  << to_string(trace.actions[r.failed_index], sys.vocab) << ")\n";
        return kExitOk;
    }
    std::cout << "final control: "
              << global_state_name(r.execution->final_config.control, sys) << "\n";
    for (std::size_t p = 0; p < r.execution->final_config.buffers.size(); ++p) {
        const auto& buf = r.execution->final_config.buffers[p];
        if (buf.empty()) continue;
        std::cout << "buffer " << sys.vocab.processes[p] << ":";
        for (const auto& [s, m] : buf)
            std::cout << " " << sys.vocab.payloads[static_cast<std::size_t>(m)] << "(from "
                      << sys.vocab.processes[static_cast<std::size_t>(s)] << ")";
        std::cout << "\n";
    }
    return kExitOk;
}

int cmd_explore(const Options& opt) {
    System sys = load_system(opt);
    auto executions = explore(sys, opt.max_actions, opt.max_buffer, opt.guards);
    std::cout << "executions: " << executions.size() << "\n";
    for (const Execution& e : executions)
        std::cout << (e.actions.empty() ? "(empty)" : format_trace(e.actions, sys.vocab)) << "\n";
    return kExitOk;
}

int cmd_causal(const Options& opt) {
    ParsedWord pw = parse_sigma_word(opt.word);
    Msc m = msc_of_word(pw);
    bool ok = check_causal(m);
    std::cout << "causal delivery: " << (ok ? "yes" : "no") << "\n";
    return kExitOk;
}

int cmd_prime(const Options& opt) {
    ParsedWord pw = parse_sigma_word(opt.word);
    bool prime = is_prime_oracle(pw.word);
    std::cout << (prime ? "prime" : "not prime") << "\n";
    return kExitOk;
}

int cmd_asr(const Options& opt) {
    System sys = load_system(opt);
    SystemContext ctx = make_context(std::move(sys), opt.guards);
    int l_in = ctx.product.state_of(parse_global_state(opt.in_state, ctx.sys));
    int l_mid = ctx.product.state_of(parse_global_state(opt.mid_state, ctx.sys));
    int l_fin = ctx.product.state_of(parse_global_state(opt.fin_state, ctx.sys));
    if (l_in < 0 || l_mid < 0 || l_fin < 0)
        throw ParseError(0, 0, "state not reachable in the control product");
    Nfa asr = build_asr(ctx, l_in, l_mid, l_fin, opt.guards);
    if (!opt.dot_path.empty()) write_dot(opt.dot_path, asr.to_dot());
    LengthVerdict lv = longest_word(asr);
    switch (lv.kind) {
        case LengthVerdict::Kind::Empty:
            std::cout << "language: empty\n";
            return kExitOk;
        case LengthVerdict::Kind::Infinite:
            std::cout << "language: infinite\n";
            break;
        case LengthVerdict::Kind::Finite:
            std::cout << "language: finite, longest word has " << lv.max_len << " symbols\n";
            break;
    }
    for (const SigmaWord& w : enumerate_language(asr, opt.max_len, opt.guards.enumerate_words))
        std::cout << (w.empty() ? "(empty word)" : to_string(w, ctx.sys.vocab)) << "\n";
    return kExitOk;
}

int cmd_reach(const Options& opt) {
    System sys = load_system(opt);
    SystemContext ctx = make_context(std::move(sys), opt.guards);
    ReachGraph graph = reach_fixpoint(ctx, opt.guards);
    if (!opt.dot_path.empty()) write_dot(opt.dot_path, reach_to_dot(ctx, graph));
    std::cout << "nodes: " << graph.nodes.size() << "\n"
              << "edges: " << graph.edges.size() << "\n";
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        const ReachNode& n = graph.nodes[i];
        std::cout << "node " << i << ": " << ctx.product.state_name(n.control, ctx.sys) << " "
                  << n.buffers.to_string(ctx.sys.vocab) << "\n";
    }
    return kExitOk;
}

int cmd_degree(const Options& opt) {
    System sys = load_system(opt);
    SystemContext ctx = make_context(std::move(sys), opt.guards);
    DegreeResult result = degree_bound(ctx, opt.guards);
    std::cout << (opt.format == "json" ? degree_report_json(ctx, result)
                                       : degree_report_text(ctx, result));
    if (result.verdict.kind == DegreeVerdict::Kind::GuardExceeded) return kExitGuard;
    return kExitOk;
}

int cmd_synchronizable(const Options& opt) {
    System sys = load_system(opt);
    SystemContext ctx = make_context(std::move(sys), opt.guards);
    ExploreBounds bounds{opt.max_actions, opt.max_buffer};
    SyncVerdict verdict = synchronizable(ctx, opt.guards, bounds);
    std::cout << (opt.format == "json" ? sync_report_json(ctx, verdict)
                                       : sync_report_text(ctx, verdict));
    switch (verdict.kind) {
        case SyncVerdict::Kind::Synchronizable: return kExitOk;
        case SyncVerdict::Kind::NotSynchronizable: return kExitNegative;
        case SyncVerdict::Kind::Inconclusive: return kExitGuard;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"analysis of mailbox communicating systems"};
    app.require_subcommand(1);
    Options opt;

    app.add_option("--state-guard", opt.guards.nfa_states, "automaton state cap");
    app.add_option("--enumerate-cap", opt.guards.enumerate_words, "word enumeration cap");

    auto add_file = [&](CLI::App* sub) {
        sub->add_option("file", opt.file, "system description (.sys)")->required();
    };

    CLI::App* parse = app.add_subcommand("parse", "parse and validate a system file");
    add_file(parse);
    parse->add_flag("--strict", opt.strict, "reject self-sends");

    CLI::App* simulate = app.add_subcommand("simulate", "run an action trace");
    add_file(simulate);
    simulate->add_option("--actions", opt.actions, "trace, e.g. \"!a(p->r) ?a(p->r)\"")
        ->required();

    CLI::App* explore_cmd = app.add_subcommand("explore", "enumerate bounded executions");
    add_file(explore_cmd);
    explore_cmd->add_option("--max-actions", opt.max_actions, "action bound");
    explore_cmd->add_option("--max-buffer", opt.max_buffer, "per-process buffer bound");

    CLI::App* causal = app.add_subcommand("causal", "check causal delivery of an exchange word");
    causal->add_option("--msc-word", opt.word, "exchange word")->required();

    CLI::App* prime = app.add_subcommand("prime", "check primality of an exchange word");
    prime->add_option("--word", opt.word, "exchange word")->required();

    CLI::App* asr = app.add_subcommand("asr", "control automaton of one state triple");
    add_file(asr);
    asr->add_option("--in", opt.in_state, "start control state, e.g. 0,0,0")->required();
    asr->add_option("--mid", opt.mid_state, "state between sends and receives")->required();
    asr->add_option("--fin", opt.fin_state, "final control state")->required();
    asr->add_option("--max-len", opt.max_len, "enumeration length bound");
    asr->add_option("--dot", opt.dot_path, "write the automaton as GraphViz");

    CLI::App* reach = app.add_subcommand("reach", "reachable-layout graph");
    add_file(reach);
    reach->add_option("--dot", opt.dot_path, "write the graph as GraphViz");

    CLI::App* degree = app.add_subcommand("degree", "synchronizability degree");
    add_file(degree);
    degree->add_option("--format", opt.format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));

    CLI::App* sync = app.add_subcommand("synchronizable", "degree plus bounded verification");
    add_file(sync);
    sync->add_option("--format", opt.format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));
    sync->add_option("--max-actions", opt.max_actions, "verification action bound");
    sync->add_option("--max-buffer", opt.max_buffer, "verification buffer bound");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInputError;
    }

    try {
        if (parse->parsed()) return cmd_parse(opt);
        if (simulate->parsed()) return cmd_simulate(opt);
        if (explore_cmd->parsed()) return cmd_explore(opt);
        if (causal->parsed()) return cmd_causal(opt);
        if (prime->parsed()) return cmd_prime(opt);
        if (asr->parsed()) return cmd_asr(opt);
        if (reach->parsed()) return cmd_reach(opt);
        if (degree->parsed()) return cmd_degree(opt);
        if (sync->parsed()) return cmd_synchronizable(opt);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const GuardError& e) {
        std::cerr << "guard exceeded: " << e.what() << "\n";
        return kExitGuard;
    } catch (const InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitOk;
}
