#ifndef WSMED_SCENARIO_HPP
#define WSMED_SCENARIO_HPP

// Scenario documents describe a desk-scale run: the service stubs with their
// canned outputs and failure schedules, the communities standing by, the
// process (steps, data edges, rounds, initial inputs) and the QoS selection
// parameters. TOML layout:
//
//   t_max = 1000.0
//   seed = 7
//   [qos_weights]
//   availability = 1.0
//   reliability = 1.0
//   response_time = 1.0
//
//   [[services]]
//   descriptor = "descriptors/flight_booking.desc"
//   failure_at = [2]          # 1-based invocation indices; failure persists
//   recovery_at = 4           # invocation index at which the stub serves again
//   [services.outputs]
//   "reserve.Date_de_Reservation" = "25/12/2012"
//
//   [[communities]]
//   name = "FlightBooking"
//   functionality = "flight-booking"
//   master = "descriptors/master_flight_booking.desc"
//   [[communities.slaves]]
//   descriptor = "descriptors/uk_flight_booking.desc"
//   availability = 0.99
//   reliability = 0.98
//   response_time = 200.0
//   bid = true
//
//   [process]
//   rounds = 2
//   steps = ["FlightBooking.reserve", ...]
//   edges = ["FlightBooking.reserve.Date_de_Reservation -> HotelBooking.book.CheckinDate", ...]
//   [process.inputs]
//   "FlightBooking.Date_de_Depart" = "20/12/2012"
//
// Slaves that may end up serving need a [[services]] stub entry of the same
// service name to supply canned outputs and failure schedules.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "wsmed/community.hpp"
#include "wsmed/descriptor.hpp"
#include "wsmed/detail/io.hpp"
#include "wsmed/detail/tomlmini.hpp"
#include "wsmed/errors.hpp"
#include "wsmed/ontology.hpp"

namespace wsmed {

struct StubSpec {
    AnnotatedDescriptor descriptor;
    std::map<std::pair<std::string, std::string>, std::string> outputs; // (operation, part) -> raw
    std::set<std::int64_t> failure_at;
    std::optional<std::int64_t> recovery_at;

    const std::string& name() const { return descriptor.service_name; }
};

struct SlaveSpec {
    AnnotatedDescriptor descriptor;
    QoS qos;
    bool bid = false;
};

struct CommunitySpec {
    std::string name;
    std::string functionality;
    AnnotatedDescriptor master;
    std::vector<SlaveSpec> slaves;
};

struct StepSpec {
    std::string service; // doubles as the step id
    std::string operation;
};

struct EdgeSpec {
    std::string from_step;
    std::string from_part;
    std::string to_step;
    std::string to_part;
};

struct Scenario {
    std::vector<StubSpec> services;
    std::vector<CommunitySpec> communities;
    std::vector<StepSpec> steps;
    std::vector<EdgeSpec> edges;
    std::map<std::pair<std::string, std::string>, std::string> initial_inputs; // (step, part) -> raw
    int rounds = 1;
    QosWeights weights;
    double t_max = 1000.0;
    std::uint64_t seed = 0;

    const StubSpec* find_service(const std::string& name) const {
        for (const auto& s : services)
            if (s.name() == name) return &s;
        return nullptr;
    }
    const CommunitySpec* find_community_for(const std::string& functionality) const {
        for (const auto& c : communities)
            if (c.functionality == functionality) return &c;
        return nullptr;
    }
    const StepSpec* find_step(const std::string& service) const {
        for (const auto& s : steps)
            if (s.service == service) return &s;
        return nullptr;
    }
};

namespace detail {

inline std::pair<std::string, std::string> split_first_dot(std::string_view text, const std::string& what) {
    std::size_t dot = text.find('.');
    if (dot == std::string_view::npos || dot == 0 || dot + 1 >= text.size())
        throw ScenarioError(fmt::format("{}: expected 'a.b', got '{}'", what, text));
    return {std::string(text.substr(0, dot)), std::string(text.substr(dot + 1))};
}

inline std::string_view trim_view(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    return s;
}

} // namespace detail

inline Scenario load_scenario(const KnowledgeBase& kb, std::string_view text,
                              const std::filesystem::path& base_dir) {
    using detail::toml::Table;
    Table doc;
    try {
        doc = detail::toml::parse(text);
    } catch (const ParseError& e) {
        throw ScenarioError(fmt::format("scenario: {}", e.what()));
    }

    Scenario scenario;
    if (const auto* v = doc.find("t_max")) scenario.t_max = v->as_number("t_max");
    if (!(scenario.t_max > 0)) throw ScenarioError("t_max must be positive");
    if (const auto* v = doc.find("seed")) scenario.seed = static_cast<std::uint64_t>(v->as_int("seed"));
    if (const Table* w = doc.find_table("qos_weights")) {
        scenario.weights.availability = w->get_number("availability", "qos_weights");
        scenario.weights.reliability = w->get_number("reliability", "qos_weights");
        scenario.weights.response_time = w->get_number("response_time", "qos_weights");
    }
    if (scenario.weights.availability < 0 || scenario.weights.reliability < 0 ||
        scenario.weights.response_time < 0 ||
        scenario.weights.availability + scenario.weights.reliability + scenario.weights.response_time <= 0)
        throw InvalidWeightsError("qos_weights must be nonnegative with a positive sum");

    auto load_descriptor = [&](const std::string& rel, const std::string& what) {
        std::filesystem::path path = base_dir / rel;
        try {
            return parse_descriptor(detail::read_file(path));
        } catch (const DocumentError& e) {
            throw ParseError(fmt::format("{} '{}': {}", what, path.string(), e.what()));
        }
    };

    if (const auto* services = doc.find_array("services")) {
        for (const Table& entry : *services) {
            StubSpec stub;
            stub.descriptor = load_descriptor(entry.get_string("descriptor", "services"), "service descriptor");
            std::string what = fmt::format("services '{}'", stub.name());
            if (scenario.find_service(stub.name()))
                throw ScenarioError(fmt::format("{}: duplicate service", what));
            if (const auto* fails = entry.find("failure_at")) {
                for (const auto& v : fails->as_array(what + ".failure_at")) {
                    std::int64_t idx = v.as_int(what + ".failure_at[]");
                    if (idx < 1) throw ScenarioError(fmt::format("{}: failure_at indices are 1-based", what));
                    stub.failure_at.insert(idx);
                }
            }
            if (const auto* rec = entry.find("recovery_at")) {
                stub.recovery_at = rec->as_int(what + ".recovery_at");
                if (*stub.recovery_at < 1)
                    throw ScenarioError(fmt::format("{}: recovery_at is 1-based", what));
            }
            if (const Table* outputs = entry.find_table("outputs")) {
                for (const auto& [key, v] : outputs->values) {
                    auto [op_name, part_name] = detail::split_first_dot(key, what + ".outputs");
                    const MessagePart* part;
                    try {
                        part = &find_part(stub.descriptor, op_name, part_name, Direction::Output);
                    } catch (const NotFoundError& e) {
                        throw ScenarioError(fmt::format("{}.outputs: {}", what, e.what()));
                    }
                    std::string raw = v.as_string(fmt::format("{}.outputs.{}", what, key));
                    try {
                        build_semantic_object(kb, *part, raw);
                    } catch (const Error& e) {
                        throw ScenarioError(
                            fmt::format("{}: canned output {} does not fit its context: {}", what, key, e.what()));
                    }
                    stub.outputs[{op_name, part_name}] = raw;
                }
            }
            scenario.services.push_back(std::move(stub));
        }
    }

    if (const auto* communities = doc.find_array("communities")) {
        for (const Table& entry : *communities) {
            CommunitySpec spec;
            spec.name = entry.get_string("name", "communities");
            std::string what = fmt::format("community '{}'", spec.name);
            spec.functionality = entry.get_string("functionality", what);
            spec.master = load_descriptor(entry.get_string("master", what), what + " master");
            if (const auto* slaves = entry.find_array("slaves")) {
                for (const Table& se : *slaves) {
                    SlaveSpec slave;
                    slave.descriptor = load_descriptor(se.get_string("descriptor", what), what + " slave");
                    slave.qos.availability = se.get_number("availability", what);
                    slave.qos.reliability = se.get_number("reliability", what);
                    slave.qos.response_time = se.get_number("response_time", what);
                    slave.bid = se.get_bool("bid", what);
                    if (slave.qos.availability < 0 || slave.qos.availability > 1 ||
                        slave.qos.reliability < 0 || slave.qos.reliability > 1)
                        throw ScenarioError(
                            fmt::format("{}: availability/reliability must lie in [0,1]", what));
                    if (!(slave.qos.response_time > 0) || slave.qos.response_time > scenario.t_max)
                        throw ScenarioError(
                            fmt::format("{}: response_time must lie in (0, t_max]", what));
                    spec.slaves.push_back(std::move(slave));
                }
            }
            Community check{spec.name, spec.functionality, spec.master, {}};
            for (const auto& s : spec.slaves) check.slaves.push_back({s.descriptor, s.qos});
            try {
                check.validate();
            } catch (const ConsistencyError& e) {
                throw ScenarioError(e.what());
            }
            scenario.communities.push_back(std::move(spec));
        }
    }

    const Table* process = doc.find_table("process");
    if (!process) throw ScenarioError("scenario: missing [process]");
    if (const auto* v = process->find("rounds")) {
        std::int64_t rounds = v->as_int("process.rounds");
        if (rounds < 1) throw ScenarioError("process.rounds must be >= 1");
        scenario.rounds = static_cast<int>(rounds);
    }

    for (const std::string& ref : process->get_string_array("steps", "process")) {
        auto [service, operation] = detail::split_first_dot(ref, "process.steps");
        const StubSpec* stub = scenario.find_service(service);
        if (!stub) throw ScenarioError(fmt::format("process.steps: unknown service '{}'", service));
        try {
            find_operation(stub->descriptor, operation);
        } catch (const NotFoundError& e) {
            throw ScenarioError(fmt::format("process.steps: {}", e.what()));
        }
        if (scenario.find_step(service))
            throw ScenarioError(fmt::format("process.steps: service '{}' bound twice", service));
        scenario.steps.push_back({service, operation});
    }
    if (scenario.steps.empty()) throw ScenarioError("process.steps is empty");

    auto step_index = [&](const std::string& service) -> std::size_t {
        for (std::size_t i = 0; i < scenario.steps.size(); ++i)
            if (scenario.steps[i].service == service) return i;
        throw ScenarioError(fmt::format("process.edges: unknown step '{}'", service));
    };

    std::set<std::pair<std::string, std::string>> fed;
    for (const std::string& ref : process->get_string_array("edges", "process")) {
        std::size_t arrow = ref.find("->");
        if (arrow == std::string::npos)
            throw ScenarioError(fmt::format("process.edges: expected 'from -> to' in '{}'", ref));
        auto parse_endpoint = [&](std::string_view side, Direction dir) {
            side = detail::trim_view(side);
            std::size_t d1 = side.find('.');
            std::size_t d2 = d1 == std::string_view::npos ? std::string_view::npos : side.find('.', d1 + 1);
            if (d1 == std::string_view::npos || d2 == std::string_view::npos)
                throw ScenarioError(fmt::format("process.edges: expected 'step.op.part' in '{}'", side));
            std::string service(side.substr(0, d1));
            std::string op(side.substr(d1 + 1, d2 - d1 - 1));
            std::string part(side.substr(d2 + 1));
            std::size_t idx = step_index(service);
            if (scenario.steps[idx].operation != op)
                throw ScenarioError(
                    fmt::format("process.edges: step '{}' runs '{}', not '{}'", service, scenario.steps[idx].operation, op));
            const MessagePart* mp;
            try {
                mp = &find_part(scenario.find_service(service)->descriptor, op, part, dir);
            } catch (const NotFoundError& e) {
                throw ScenarioError(fmt::format("process.edges: {}", e.what()));
            }
            return std::tuple<std::string, std::string, std::size_t, const MessagePart*>(service, part, idx, mp);
        };
        auto [from_service, from_part, from_idx, from_mp] =
            parse_endpoint(std::string_view(ref).substr(0, arrow), Direction::Output);
        auto [to_service, to_part, to_idx, to_mp] =
            parse_endpoint(std::string_view(ref).substr(arrow + 2), Direction::Input);
        if (from_idx >= to_idx)
            throw ScenarioError(fmt::format("process.edges: '{}' does not flow forward", ref));
        Concept from_concept = resolve_concept(kb, from_mp->annotation);
        Concept to_concept = resolve_concept(kb, to_mp->annotation);
        if (from_concept != to_concept)
            throw ScenarioError(fmt::format("process.edges: '{}' connects concept '{}' to '{}'", ref,
                                            from_concept.name, to_concept.name));
        if (!fed.insert({to_service, to_part}).second)
            throw ScenarioError(fmt::format("process.edges: input {}.{} fed twice", to_service, to_part));
        scenario.edges.push_back({from_service, from_part, to_service, to_part});
    }

    if (const Table* inputs = process->find_table("inputs")) {
        for (const auto& [key, v] : inputs->values) {
            auto [service, part_name] = detail::split_first_dot(key, "process.inputs");
            const StepSpec* step = scenario.find_step(service);
            if (!step) throw ScenarioError(fmt::format("process.inputs: unknown step '{}'", service));
            const MessagePart* part;
            try {
                part = &find_part(scenario.find_service(service)->descriptor, step->operation, part_name,
                                  Direction::Input);
            } catch (const NotFoundError& e) {
                throw ScenarioError(fmt::format("process.inputs: {}", e.what()));
            }
            if (fed.count({service, part_name}))
                throw ScenarioError(
                    fmt::format("process.inputs: {}.{} is already fed by an edge", service, part_name));
            std::string raw = v.as_string("process.inputs." + key);
            try {
                build_semantic_object(kb, *part, raw);
            } catch (const Error& e) {
                throw ScenarioError(
                    fmt::format("process.inputs: {}.{} does not fit its context: {}", service, part_name, e.what()));
            }
            scenario.initial_inputs[{service, part_name}] = raw;
        }
    }

    return scenario;
}

inline Scenario load_scenario_file(const KnowledgeBase& kb, const std::filesystem::path& path) {
    std::string text;
    try {
        text = detail::read_file(path);
    } catch (const ParseError& e) {
        throw ScenarioError(e.what());
    }
    return load_scenario(kb, text, path.parent_path());
}

} // namespace wsmed

#endif
