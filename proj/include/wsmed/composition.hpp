#ifndef WSMED_COMPOSITION_HPP
#define WSMED_COMPOSITION_HPP

// Process-graph execution with mediator insertion, watchdog failure
// detection, community substitution and post-substitution consistency
// verification.
//
// Steps execute in declaration order, once per round. Every step execution
// counts one invocation attempt against the stub originally bound to it;
// a scheduled failure keeps the stub down until its optional recovery index.
// When the watchdog sees a bound stub fail it runs the substitution sequence
// (FAIL, CFP, BID..., ADOPT, SELECT, REBIND) against the community offering
// the step's functionality and retries the step through a community proxy
// that fronts the selected primary slave. Every value passing through the
// proxy is converted between the community's (adopted) context and the
// slave's own context. If the serving slave fails, the best support slave is
// promoted and the step retried; a recovered original is rebound in place of
// the proxy.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <fmt/format.h>

#include "wsmed/community.hpp"
#include "wsmed/errors.hpp"
#include "wsmed/mediation.hpp"
#include "wsmed/ontology.hpp"
#include "wsmed/scenario.hpp"

namespace wsmed {

enum class TraceKind { Invoke, Mediate, Fail, Cfp, Bid, Select, Adopt, Convert, Rebind, Check };

inline const char* to_string(TraceKind k) {
    switch (k) {
        case TraceKind::Invoke: return "INVOKE";
        case TraceKind::Mediate: return "MEDIATE";
        case TraceKind::Fail: return "FAIL";
        case TraceKind::Cfp: return "CFP";
        case TraceKind::Bid: return "BID";
        case TraceKind::Select: return "SELECT";
        case TraceKind::Adopt: return "ADOPT";
        case TraceKind::Convert: return "CONVERT";
        case TraceKind::Rebind: return "REBIND";
        case TraceKind::Check: return "CHECK";
    }
    return "?";
}

struct TraceEvent {
    int idx = 0;
    TraceKind kind = TraceKind::Invoke;
    std::string subject;
    std::string detail;
};

struct ExecutionTrace {
    std::vector<TraceEvent> events;

    void emit(TraceKind kind, std::string subject, std::string detail) {
        events.push_back({static_cast<int>(events.size()), kind, std::move(subject), std::move(detail)});
    }

    std::string to_text() const {
        std::string out;
        for (const auto& e : events)
            out += fmt::format("{} {} {} {}\n", e.idx, to_string(e.kind), e.subject, e.detail);
        return out;
    }

    std::size_t count(TraceKind kind) const {
        std::size_t n = 0;
        for (const auto& e : events)
            if (e.kind == kind) ++n;
        return n;
    }
};

struct ProxyBinding {
    std::string community;
    std::string primary_slave;
};

struct Step {
    std::string id;              // step identity; equals the originally bound service
    std::string service;         // originally bound service (stub registry key)
    std::string operation;
    AnnotatedDescriptor descriptor; // interface the composition sees (proxied after substitution)
    std::optional<ProxyBinding> proxy;
};

struct DataEdge {
    std::string from_step;
    std::string from_part;
    std::string to_step;
    std::string to_part;
    Concept concept_id;

    std::string id() const { return fmt::format("{}.{}->{}.{}", from_step, from_part, to_step, to_part); }

    bool operator==(const DataEdge&) const = default;
};

struct MediatorNode {
    std::size_t edge_index = 0;
    Context source;
    Context target;
};

struct ProcessGraph {
    std::vector<Step> steps;
    std::vector<DataEdge> edges;
    std::vector<MediatorNode> mediators;

    Step* find_step(const std::string& id) {
        for (auto& s : steps)
            if (s.id == id) return &s;
        return nullptr;
    }
    const Step* find_step(const std::string& id) const {
        for (const auto& s : steps)
            if (s.id == id) return &s;
        return nullptr;
    }
};

inline ProcessGraph build_process_graph(const KnowledgeBase& kb, const Scenario& scenario) {
    ProcessGraph graph;
    for (const auto& spec : scenario.steps) {
        const StubSpec* stub = scenario.find_service(spec.service);
        if (!stub) throw UnboundStepError(fmt::format("step '{}' is not bound to a service", spec.service));
        graph.steps.push_back({spec.service, spec.service, spec.operation, stub->descriptor, std::nullopt});
    }
    for (const auto& spec : scenario.edges) {
        const Step* from = graph.find_step(spec.from_step);
        if (!from) throw UnboundStepError(fmt::format("edge references unknown step '{}'", spec.from_step));
        const MessagePart& part = find_part(from->descriptor, from->operation, spec.from_part, Direction::Output);
        graph.edges.push_back({spec.from_step, spec.from_part, spec.to_step, spec.to_part,
                               resolve_concept(kb, part.annotation)});
    }
    return graph;
}

namespace detail {

struct EdgeContexts {
    Context source;
    Context target;
};

inline EdgeContexts edge_contexts(const KnowledgeBase& kb, const ProcessGraph& graph, const DataEdge& edge) {
    const Step* from = graph.find_step(edge.from_step);
    const Step* to = graph.find_step(edge.to_step);
    if (!from) throw UnboundStepError(fmt::format("edge references unknown step '{}'", edge.from_step));
    if (!to) throw UnboundStepError(fmt::format("edge references unknown step '{}'", edge.to_step));
    const MessagePart* from_part;
    const MessagePart* to_part;
    try {
        from_part = &find_part(from->descriptor, from->operation, edge.from_part, Direction::Output);
        to_part = &find_part(to->descriptor, to->operation, edge.to_part, Direction::Input);
    } catch (const NotFoundError& e) {
        throw UnboundStepError(e.what());
    }
    return {part_context(kb, *from_part), part_context(kb, *to_part)};
}

inline bool edge_mediated(const ProcessGraph& graph, std::size_t edge_index,
                          const EdgeContexts& contexts) {
    for (const auto& m : graph.mediators)
        if (m.edge_index == edge_index && context_equal(m.source, contexts.source) &&
            context_equal(m.target, contexts.target))
            return true;
    return false;
}

inline std::vector<std::size_t> conflicting_edges(const KnowledgeBase& kb, const ProcessGraph& graph) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < graph.edges.size(); ++i) {
        EdgeContexts contexts = edge_contexts(kb, graph, graph.edges[i]);
        if (context_equal(contexts.source, contexts.target)) continue;
        if (!edge_mediated(graph, i, contexts)) out.push_back(i);
    }
    return out;
}

} // namespace detail

// edges whose endpoint contexts differ without a mediator built for exactly
// those contexts
inline std::vector<DataEdge> detect_conflicts(const KnowledgeBase& kb, const ProcessGraph& graph) {
    std::vector<DataEdge> out;
    for (std::size_t i : detail::conflicting_edges(kb, graph)) out.push_back(graph.edges[i]);
    return out;
}

inline ProcessGraph insert_mediators(const KnowledgeBase& kb, ProcessGraph graph) {
    for (std::size_t i : detail::conflicting_edges(kb, graph)) {
        detail::EdgeContexts contexts = detail::edge_contexts(kb, graph, graph.edges[i]);
        graph.mediators.push_back({i, std::move(contexts.source), std::move(contexts.target)});
    }
    return graph;
}

inline bool verify_consistency(const KnowledgeBase& kb, const ProcessGraph& graph) {
    return detail::conflicting_edges(kb, graph).empty();
}

// Rebind a substituted step to its recovered original. The community keeps
// the adopted master context; the serving primary falls back to support.
inline void reinstate_original(Community& community, Step& step, const AnnotatedDescriptor& original,
                               bool recovered) {
    if (!recovered)
        throw NotRecoveredError(fmt::format("service '{}' has not recovered", step.service));
    if (!step.proxy) return;
    for (auto& slave : community.slaves)
        if (slave.state == SlaveState::Primary) slave.state = SlaveState::Support;
    step.proxy.reset();
    step.descriptor = original;
}

// The substitution sequence for a failed step: call for bids, context
// adoption by the master (unless disabled for diagnosis), QoS selection, and
// rebinding of the step to a community proxy exposing the original interface
// under the community's context.
inline void substitute(const KnowledgeBase& kb, ProcessGraph& graph, const std::string& failed_step,
                       Community& community, const Scenario& scenario, ExecutionTrace& trace,
                       bool adopt = true) {
    Step* step = graph.find_step(failed_step);
    if (!step) throw UnboundStepError(fmt::format("unknown step '{}'", failed_step));
    const StubSpec* original = scenario.find_service(step->service);
    if (!original) throw UnboundStepError(fmt::format("step '{}' has no bound service", failed_step));
    if (community.functionality != original->descriptor.functionality)
        throw NoCommunityError(fmt::format("community '{}' offers '{}', step '{}' needs '{}'", community.name,
                                           community.functionality, failed_step,
                                           original->descriptor.functionality));

    std::set<std::string> exclude{step->service};
    for (const auto& slave : community.slaves)
        if (slave.state == SlaveState::Failed) exclude.insert(slave.name());

    std::string excluded = "-";
    if (!exclude.empty()) {
        excluded.clear();
        for (const auto& name : exclude) excluded += excluded.empty() ? name : "," + name;
    }
    trace.emit(TraceKind::Cfp, community.name,
               fmt::format("functionality={} exclude={}", community.functionality, excluded));

    std::vector<BidResponse> bids = call_for_bids(community, exclude);
    for (const auto& bid : bids)
        trace.emit(TraceKind::Bid, bid.slave_name, bid.positive ? "positive" : "negative");

    if (adopt) {
        community.master = adopt_context(kb, community.master, original->descriptor);
        std::string concepts;
        for (const auto& [concept_id, ctx] : extract_context(kb, original->descriptor))
            concepts += (concepts.empty() ? "" : ",") + concept_id.name;
        trace.emit(TraceKind::Adopt, community.master.service_name,
                   fmt::format("from={} concepts={}", original->descriptor.service_name, concepts));
    }

    Selection selection = select_substitute(community, bids, scenario.weights, scenario.t_max);
    std::string support = "-";
    if (!selection.support.empty()) {
        support.clear();
        for (const auto& name : selection.support) support += support.empty() ? name : "," + name;
    }
    trace.emit(TraceKind::Select, selection.primary, fmt::format("support={}", support));

    // the proxy keeps the original part names but presents the community's
    // context for each concept
    step->descriptor = adopt_context(kb, original->descriptor, community.master);
    step->proxy = ProxyBinding{community.name, selection.primary};
    trace.emit(TraceKind::Rebind, step->id, fmt::format("to=proxy primary={}", selection.primary));
}

struct ExecOptions {
    bool adopt = true;
};

struct ExecutionResult {
    ExecutionTrace trace;
    ProcessGraph graph;
    std::map<std::tuple<int, std::string, std::string>, std::string> deliveries; // (round, step, part)
    bool consistent = true;
    bool completed = false;
    std::vector<DataEdge> conflicts;
};

namespace detail {

class Engine {
public:
    Engine(const KnowledgeBase& kb, ProcessGraph graph, const Scenario& scenario, ExecOptions opts)
        : kb_(kb), scenario_(scenario), opts_(opts) {
        result_.graph = std::move(graph);
        for (const auto& spec : scenario.services) stubs_[spec.name()] = {&spec, 0, false};
        for (const auto& spec : scenario.communities) {
            Community community{spec.name, spec.functionality, spec.master, {}};
            for (const auto& slave : spec.slaves)
                community.slaves.push_back(
                    {slave.descriptor, slave.qos, SlaveState::Member, slave.bid, 0.0});
            communities_.push_back(std::move(community));
        }
    }

    ExecutionResult run() {
        if (!check()) return finish(false);
        for (int round = 1; round <= scenario_.rounds; ++round) {
            outputs_.clear();
            for (auto& step : result_.graph.steps)
                if (!run_step(step, round)) return finish(false);
        }
        bool consistent = check();
        return finish(consistent);
    }

private:
    struct StubState {
        const StubSpec* spec = nullptr;
        std::int64_t attempts = 0;
        bool down = false;
    };

    const KnowledgeBase& kb_;
    const Scenario& scenario_;
    ExecOptions opts_;
    ExecutionResult result_;
    std::vector<Community> communities_;
    std::map<std::string, StubState> stubs_;
    std::map<std::pair<std::string, std::string>, std::string> outputs_; // (step, part) -> raw

    ExecutionResult finish(bool consistent) {
        result_.consistent = consistent;
        result_.completed = consistent;
        if (!consistent) result_.conflicts = detect_conflicts(kb_, result_.graph);
        return std::move(result_);
    }

    bool check() {
        std::vector<DataEdge> conflicts = detect_conflicts(kb_, result_.graph);
        if (conflicts.empty()) {
            result_.trace.emit(TraceKind::Check, "composition", "CONSISTENT");
            return true;
        }
        std::string ids;
        for (const auto& e : conflicts) ids += (ids.empty() ? "" : ",") + e.id();
        result_.trace.emit(TraceKind::Check, "composition", fmt::format("INCONSISTENT conflicts={}", ids));
        return false;
    }

    StubState& stub(const std::string& service) {
        auto it = stubs_.find(service);
        if (it == stubs_.end()) throw ScenarioError(fmt::format("no stub data for service '{}'", service));
        return it->second;
    }

    Community& community_for(const std::string& functionality) {
        for (auto& c : communities_)
            if (c.functionality == functionality) return c;
        throw NoCommunityError(fmt::format("no community offers functionality '{}'", functionality));
    }

    void deliver(int round, const std::string& step_id, const std::string& part, const std::string& raw) {
        result_.deliveries[{round, step_id, part}] = raw;
    }

    // move values across incoming edges (through mediators where attached)
    // and pick up scenario-level initial inputs
    std::map<std::string, std::string> collect_inputs(Step& step, int round) {
        std::map<std::string, std::string> inputs;
        for (std::size_t i = 0; i < result_.graph.edges.size(); ++i) {
            const DataEdge& edge = result_.graph.edges[i];
            if (edge.to_step != step.id) continue;
            auto produced = outputs_.find({edge.from_step, edge.from_part});
            if (produced == outputs_.end())
                throw ScenarioError(fmt::format("edge {} has no produced value", edge.id()));
            const Step* from = result_.graph.find_step(edge.from_step);
            const MessagePart& from_part =
                find_part(from->descriptor, from->operation, edge.from_part, Direction::Output);
            const MessagePart& to_part =
                find_part(step.descriptor, step.operation, edge.to_part, Direction::Input);
            EdgeContexts contexts{part_context(kb_, from_part), part_context(kb_, to_part)};

            std::string raw = produced->second;
            if (!context_equal(contexts.source, contexts.target)) {
                if (!edge_mediated(result_.graph, i, contexts))
                    throw ScenarioError(fmt::format("edge {} conflicts and has no mediator", edge.id()));
                result_.trace.emit(TraceKind::Mediate, edge.id(),
                                   fmt::format("concept={}", edge.concept_id.name));
                SemanticObject source = build_semantic_object(kb_, from_part, raw);
                auto [converted, report] = convert(kb_, source, contexts.target);
                std::string rendered = render_raw(converted.value, converted.type);
                result_.trace.emit(TraceKind::Convert, edge.from_part,
                                   fmt::format("value={} -> {}", raw, rendered));
                raw = rendered;
            } else {
                build_semantic_object(kb_, to_part, raw); // value must fit the receiving context
            }
            inputs[edge.to_part] = raw;
            deliver(round, step.id, edge.to_part, raw);
        }
        for (const auto& [key, raw] : scenario_.initial_inputs) {
            if (key.first != step.id) continue;
            const MessagePart& to_part =
                find_part(step.descriptor, step.operation, key.second, Direction::Input);
            build_semantic_object(kb_, to_part, raw);
            inputs[key.second] = raw;
            deliver(round, step.id, key.second, raw);
        }
        return inputs;
    }

    bool run_step(Step& step, int round) {
        std::map<std::string, std::string> inputs = collect_inputs(step, round);

        // one attempt against the originally bound stub per step execution
        StubState& original = stub(step.service);
        ++original.attempts;
        if (original.down && original.spec->recovery_at &&
            original.attempts >= *original.spec->recovery_at) {
            original.down = false;
            if (step.proxy) {
                Community& community = community_for(step.descriptor.functionality);
                reinstate_original(community, step, original.spec->descriptor, true);
                result_.trace.emit(TraceKind::Rebind, step.id, fmt::format("to={}", step.service));
            }
        }
        if (!original.down && original.spec->failure_at.count(original.attempts)) original.down = true;

        for (;;) {
            if (!step.proxy) {
                result_.trace.emit(TraceKind::Invoke, step.id,
                                   fmt::format("op={} via={} round={}", step.operation, step.service, round));
                if (original.down) {
                    result_.trace.emit(TraceKind::Fail, step.service,
                                       fmt::format("step={} invocation={}", step.id, original.attempts));
                    Community& community = community_for(step.descriptor.functionality);
                    substitute(kb_, result_.graph, step.id, community, scenario_, result_.trace, opts_.adopt);
                    if (!check()) return false;
                    continue; // retry through the proxy
                }
                serve_original(step);
                return true;
            }

            StubState& slave = stub(step.proxy->primary_slave);
            ++slave.attempts;
            if (!slave.down && slave.spec->failure_at.count(slave.attempts)) slave.down = true;
            result_.trace.emit(TraceKind::Invoke, step.id,
                               fmt::format("op={} via={} round={}", step.operation,
                                           step.proxy->primary_slave, round));
            if (slave.down) {
                result_.trace.emit(TraceKind::Fail, step.proxy->primary_slave,
                                   fmt::format("step={} invocation={}", step.id, slave.attempts));
                Community& community = community_for(step.descriptor.functionality);
                if (SlaveEntry* entry = community.find_slave(step.proxy->primary_slave))
                    entry->state = SlaveState::Failed;
                std::string promoted = promote_support(community);
                result_.trace.emit(TraceKind::Select, promoted, "promoted");
                step.proxy->primary_slave = promoted;
                continue; // retry with the promoted support
            }
            serve_proxy(step, inputs);
            return true;
        }
    }

    void serve_original(Step& step) {
        const StubSpec* spec = stub(step.service).spec;
        const ServiceOperation& op = find_operation(spec->descriptor, step.operation);
        for (const auto& part : op.outputs) {
            auto canned = spec->outputs.find({op.name, part.name});
            if (canned != spec->outputs.end()) outputs_[{step.id, part.name}] = canned->second;
        }
    }

    // pair parts of the exposed and the slave interface by concept, in order
    static std::vector<std::pair<const MessagePart*, const MessagePart*>> match_parts(
        const KnowledgeBase& kb, const std::vector<MessagePart>& exposed,
        const std::vector<MessagePart>& slave, const std::string& slave_name) {
        std::vector<std::pair<const MessagePart*, const MessagePart*>> matched;
        std::map<std::string, std::vector<const MessagePart*>> by_concept;
        for (const auto& part : slave) by_concept[resolve_concept(kb, part.annotation).name].push_back(&part);
        std::map<std::string, std::size_t> used;
        for (const auto& part : exposed) {
            std::string concept_name = resolve_concept(kb, part.annotation).name;
            auto& candidates = by_concept[concept_name];
            std::size_t& next = used[concept_name];
            if (next >= candidates.size())
                throw ScenarioError(fmt::format("slave '{}' lacks a {} part matching '{}'", slave_name,
                                                concept_name, part.name));
            matched.emplace_back(&part, candidates[next++]);
        }
        return matched;
    }

    void serve_proxy(Step& step, const std::map<std::string, std::string>& inputs) {
        const std::string& slave_name = step.proxy->primary_slave;
        const StubSpec* slave_spec = stub(slave_name).spec;
        const ServiceOperation* slave_op = nullptr;
        for (const auto& op : slave_spec->descriptor.operations)
            if (op.name == step.operation) slave_op = &op;
        if (!slave_op && slave_spec->descriptor.operations.size() == 1)
            slave_op = &slave_spec->descriptor.operations.front();
        if (!slave_op)
            throw ScenarioError(fmt::format("slave '{}' offers no operation for '{}'", slave_name,
                                            step.operation));

        const ServiceOperation& exposed_op = find_operation(step.descriptor, step.operation);

        // inputs travel community -> slave
        for (const auto& [exposed_part, slave_part] :
             match_parts(kb_, exposed_op.inputs, slave_op->inputs, slave_name)) {
            auto it = inputs.find(exposed_part->name);
            if (it == inputs.end()) continue;
            Context slave_ctx = part_context(kb_, *slave_part);
            SemanticObject source = build_semantic_object(kb_, *exposed_part, it->second);
            if (context_equal(source.context, slave_ctx)) continue;
            auto [converted, report] = convert(kb_, source, slave_ctx);
            result_.trace.emit(TraceKind::Convert, exposed_part->name,
                               fmt::format("value={} -> {}", it->second,
                                           render_raw(converted.value, converted.type)));
        }

        // outputs travel slave -> community
        for (const auto& [exposed_part, slave_part] :
             match_parts(kb_, exposed_op.outputs, slave_op->outputs, slave_name)) {
            auto canned = slave_spec->outputs.find({slave_op->name, slave_part->name});
            if (canned == slave_spec->outputs.end()) continue;
            Context exposed_ctx = part_context(kb_, *exposed_part);
            SemanticObject source = build_semantic_object(kb_, *slave_part, canned->second);
            std::string raw = canned->second;
            if (!context_equal(source.context, exposed_ctx)) {
                auto [converted, report] = convert(kb_, source, exposed_ctx);
                raw = render_raw(converted.value, converted.type);
                result_.trace.emit(TraceKind::Convert, exposed_part->name,
                                   fmt::format("value={} -> {}", canned->second, raw));
            }
            outputs_[{step.id, exposed_part->name}] = raw;
        }
    }
};

} // namespace detail

inline ExecutionResult execute(const KnowledgeBase& kb, const ProcessGraph& graph, const Scenario& scenario,
                               const ExecOptions& opts = {}) {
    detail::Engine engine(kb, graph, scenario, opts);
    return engine.run();
}

// build the graph, insert mediators, execute
inline ExecutionResult run_scenario(const KnowledgeBase& kb, const Scenario& scenario,
                                    const ExecOptions& opts = {}) {
    ProcessGraph graph = insert_mediators(kb, build_process_graph(kb, scenario));
    return execute(kb, graph, scenario, opts);
}

} // namespace wsmed

#endif
