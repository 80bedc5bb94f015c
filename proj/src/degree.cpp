#include "ksync/degree.hpp"

#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ksync/prime.hpp"

namespace ksync {

using nlohmann::json;

DegreeResult degree_bound(const SystemContext& ctx, const Guards& guards) {
    DegreeResult result;
    ReachGraph graph;
    try {
        graph = reach_fixpoint(ctx, guards);
    } catch (const GuardError& e) {
        result.verdict.kind = DegreeVerdict::Kind::GuardExceeded;
        result.verdict.guard_stage = e.stage();
        return result;
    }

    DegreeVerdict verdict;
    verdict.kind = DegreeVerdict::Kind::Finite;
    verdict.k = 0;
    try {
        // Pending bookkeeping is unreachable on words that keep causal
        // delivery, which every feasible edge word does; the bounded-state
        // recognizer mode is exact here. Its states materialize lazily along
        // each edge language.
        for (const ReachEdge& edge : graph.edges) {
            Nfa product = prime_product(edge.language, PrimeMode::CausalWords, guards);
            LengthVerdict lv = longest_word(product);
            switch (lv.kind) {
                case LengthVerdict::Kind::Empty:
                    break;
                case LengthVerdict::Kind::Infinite: {
                    verdict.kind = DegreeVerdict::Kind::Unbounded;
                    UnboundedWitness w;
                    w.prefix = lv.prefix;
                    w.cycle = lv.cycle;
                    w.suffix = lv.suffix;
                    w.source_node = edge.from;
                    w.target_node = edge.to;
                    verdict.pump = std::move(w);
                    result.verdict = std::move(verdict);
                    result.graph = std::move(graph);
                    return result;
                }
                case LengthVerdict::Kind::Finite:
                    if (lv.max_len > verdict.k) {
                        verdict.k = lv.max_len;
                        if (lv.max_len > 0)
                            verdict.witness = DegreeWitness{lv.witness, edge.from, edge.to};
                    }
                    break;
            }
        }
    } catch (const GuardError& e) {
        result.verdict.kind = DegreeVerdict::Kind::GuardExceeded;
        result.verdict.guard_stage = e.stage();
        result.graph = std::move(graph);
        return result;
    }
    result.verdict = std::move(verdict);
    result.graph = std::move(graph);
    return result;
}

KCheckResult check_k_bounded(const System& sys, std::size_t k, const ExploreBounds& bounds,
                             const Guards& guards) {
    KCheckResult result;
    try {
        for (const Execution& e : explore(sys, bounds.max_actions, bounds.max_buffer, guards)) {
            Msc m = msc_of_execution(sys.vocab, e.actions);
            if (!is_k_synchronizable_msc(m, k)) {
                result.kind = KCheckResult::Kind::Fail;
                result.counterexample = e;
                return result;
            }
        }
    } catch (const GuardError& e) {
        result.kind = KCheckResult::Kind::Inconclusive;
        result.guard_stage = e.stage();
    }
    return result;
}

SyncVerdict synchronizable(const SystemContext& ctx, const Guards& guards,
                           const ExploreBounds& bounds) {
    SyncVerdict verdict;
    verdict.bounds = bounds;
    DegreeResult degree = degree_bound(ctx, guards);
    switch (degree.verdict.kind) {
        case DegreeVerdict::Kind::GuardExceeded:
            verdict.kind = SyncVerdict::Kind::Inconclusive;
            verdict.guard_stage = degree.verdict.guard_stage;
            return verdict;
        case DegreeVerdict::Kind::Unbounded:
            verdict.kind = SyncVerdict::Kind::NotSynchronizable;
            verdict.reason = SyncVerdict::Reason::UnboundedExchange;
            verdict.pump = degree.verdict.pump;
            return verdict;
        case DegreeVerdict::Kind::Finite:
            break;
    }
    KCheckResult check = check_k_bounded(ctx.sys, degree.verdict.k, bounds, guards);
    switch (check.kind) {
        case KCheckResult::Kind::Fail:
            verdict.kind = SyncVerdict::Kind::NotSynchronizable;
            verdict.reason = SyncVerdict::Reason::BoundedCounterexample;
            verdict.counterexample = check.counterexample;
            return verdict;
        case KCheckResult::Kind::Inconclusive:
            verdict.kind = SyncVerdict::Kind::Inconclusive;
            verdict.guard_stage = check.guard_stage;
            return verdict;
        case KCheckResult::Kind::Pass:
            verdict.kind = SyncVerdict::Kind::Synchronizable;
            verdict.k = degree.verdict.k;
            return verdict;
    }
    return verdict;
}

BigInt theoretical_bound(const System& sys) {
    BigInt states = 1;
    for (const auto& la : sys.processes) states *= static_cast<int>(la.state_names.size());
    BigInt procs = static_cast<int>(sys.processes.size());
    BigInt exponent = 8 * procs * procs;
    BigInt power = BigInt(1) << static_cast<unsigned>(exponent);
    return states * states * power;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

namespace {

std::string node_label(const SystemContext& ctx, const ReachGraph& graph, int node) {
    if (node < 0 || static_cast<std::size_t>(node) >= graph.nodes.size()) return "?";
    const ReachNode& n = graph.nodes[static_cast<std::size_t>(node)];
    return ctx.product.state_name(n.control, ctx.sys) + " " +
           n.buffers.to_string(ctx.sys.vocab);
}

json guards_json(const Guards& g) {
    return json{{"nfa_states", g.nfa_states},
                {"reach_nodes", g.reach_nodes},
                {"explore_executions", g.explore_executions}};
}

} // namespace

std::string degree_report_text(const SystemContext& ctx, const DegreeResult& result) {
    std::ostringstream out;
    const DegreeVerdict& v = result.verdict;
    switch (v.kind) {
        case DegreeVerdict::Kind::Finite:
            out << "degree: " << v.k << "\n";
            if (v.witness) {
                out << "witness: " << to_string(v.witness->word, ctx.sys.vocab) << "\n";
                if (result.graph)
                    out << "context: " << node_label(ctx, *result.graph, v.witness->source_node)
                        << " -> " << node_label(ctx, *result.graph, v.witness->target_node)
                        << "\n";
            }
            break;
        case DegreeVerdict::Kind::Unbounded:
            out << "degree: unbounded\n";
            if (v.pump) {
                out << "pump: prefix=\"" << to_string(v.pump->prefix, ctx.sys.vocab)
                    << "\" cycle=\"" << to_string(v.pump->cycle, ctx.sys.vocab) << "\" suffix=\""
                    << to_string(v.pump->suffix, ctx.sys.vocab) << "\"\n";
                if (result.graph)
                    out << "context: " << node_label(ctx, *result.graph, v.pump->source_node)
                        << " -> " << node_label(ctx, *result.graph, v.pump->target_node) << "\n";
            }
            break;
        case DegreeVerdict::Kind::GuardExceeded:
            out << "degree: guard exceeded (" << v.guard_stage << ")\n";
            break;
    }
    out << "theoretical-bound: " << theoretical_bound(ctx.sys).str() << "\n";
    return out.str();
}

std::string degree_report_json(const SystemContext& ctx, const DegreeResult& result) {
    const DegreeVerdict& v = result.verdict;
    json j;
    j["report"] = "degree";
    j["system"] = ctx.sys.name;
    switch (v.kind) {
        case DegreeVerdict::Kind::Finite: j["kind"] = "finite"; break;
        case DegreeVerdict::Kind::Unbounded: j["kind"] = "unbounded"; break;
        case DegreeVerdict::Kind::GuardExceeded: j["kind"] = "guard-exceeded"; break;
    }
    j["k"] = v.k;
    if (v.witness) {
        j["witness"] = to_string(v.witness->word, ctx.sys.vocab);
        if (result.graph) {
            j["source"] = node_label(ctx, *result.graph, v.witness->source_node);
            j["target"] = node_label(ctx, *result.graph, v.witness->target_node);
        }
    }
    if (v.pump) {
        j["pump"] = {{"prefix", to_string(v.pump->prefix, ctx.sys.vocab)},
                     {"cycle", to_string(v.pump->cycle, ctx.sys.vocab)},
                     {"suffix", to_string(v.pump->suffix, ctx.sys.vocab)}};
    }
    if (!v.guard_stage.empty()) j["guard_stage"] = v.guard_stage;
    j["theoretical_bound"] = theoretical_bound(ctx.sys).str();
    j["guards"] = guards_json(Guards{});
    return j.dump(2) + "\n";
}

std::string sync_report_text(const SystemContext& ctx, const SyncVerdict& verdict) {
    std::ostringstream out;
    switch (verdict.kind) {
        case SyncVerdict::Kind::Synchronizable:
            out << "synchronizable: yes (k=" << verdict.k << ", verified up to "
                << verdict.bounds.max_actions << " actions / buffer "
                << verdict.bounds.max_buffer << ")\n";
            break;
        case SyncVerdict::Kind::NotSynchronizable:
            out << "synchronizable: no\n";
            if (verdict.reason == SyncVerdict::Reason::UnboundedExchange) {
                out << "reason: unbounded prime exchange\n";
                if (verdict.pump)
                    out << "pump: prefix=\"" << to_string(verdict.pump->prefix, ctx.sys.vocab)
                        << "\" cycle=\"" << to_string(verdict.pump->cycle, ctx.sys.vocab)
                        << "\" suffix=\"" << to_string(verdict.pump->suffix, ctx.sys.vocab)
                        << "\"\n";
            } else {
                out << "reason: bounded counterexample\n";
                if (verdict.counterexample)
                    out << "counterexample: "
                        << format_trace(verdict.counterexample->actions, ctx.sys.vocab) << "\n";
            }
            break;
        case SyncVerdict::Kind::Inconclusive:
            out << "synchronizable: inconclusive (" << verdict.guard_stage << ")\n";
            break;
    }
    return out.str();
}

std::string sync_report_json(const SystemContext& ctx, const SyncVerdict& verdict) {
    json j;
    j["report"] = "synchronizable";
    j["system"] = ctx.sys.name;
    switch (verdict.kind) {
        case SyncVerdict::Kind::Synchronizable: j["kind"] = "synchronizable"; break;
        case SyncVerdict::Kind::NotSynchronizable: j["kind"] = "not-synchronizable"; break;
        case SyncVerdict::Kind::Inconclusive: j["kind"] = "inconclusive"; break;
    }
    switch (verdict.reason) {
        case SyncVerdict::Reason::None: j["reason"] = "none"; break;
        case SyncVerdict::Reason::UnboundedExchange: j["reason"] = "unbounded-exchange"; break;
        case SyncVerdict::Reason::BoundedCounterexample:
            j["reason"] = "bounded-counterexample";
            break;
    }
    j["k"] = verdict.k;
    j["bounds"] = {{"max_actions", verdict.bounds.max_actions},
                   {"max_buffer", verdict.bounds.max_buffer}};
    if (verdict.counterexample)
        j["counterexample"] = format_trace(verdict.counterexample->actions, ctx.sys.vocab);
    if (verdict.pump)
        j["pump"] = {{"prefix", to_string(verdict.pump->prefix, ctx.sys.vocab)},
                     {"cycle", to_string(verdict.pump->cycle, ctx.sys.vocab)},
                     {"suffix", to_string(verdict.pump->suffix, ctx.sys.vocab)}};
    if (!verdict.guard_stage.empty()) j["guard_stage"] = verdict.guard_stage;
    return j.dump(2) + "\n";
}

DegreeSummary degree_from_json(const std::string& json_text) {
    json j = json::parse(json_text);
    DegreeSummary s;
    s.kind = j.at("kind").get<std::string>();
    s.k = j.at("k").get<std::uint64_t>();
    if (j.contains("witness")) s.witness = j["witness"].get<std::string>();
    if (j.contains("guard_stage")) s.guard_stage = j["guard_stage"].get<std::string>();
    return s;
}

SyncSummary sync_from_json(const std::string& json_text) {
    json j = json::parse(json_text);
    SyncSummary s;
    s.kind = j.at("kind").get<std::string>();
    s.reason = j.at("reason").get<std::string>();
    s.k = j.at("k").get<std::uint64_t>();
    return s;
}

} // namespace ksync
