#ifndef WSMED_COMMUNITY_HPP
#define WSMED_COMMUNITY_HPP

// Community of same-functionality services: a master descriptor fronting a
// slave registry. On failure of a supported service the master calls for
// bids, adopts the failed service's context (its annotations overwrite the
// master's, concept by concept), and selects the best-scoring positive
// bidder as primary; the other positive bidders stand by as support.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "wsmed/descriptor.hpp"
#include "wsmed/errors.hpp"
#include "wsmed/ontology.hpp"
#include "wsmed/semantic_object.hpp"

namespace wsmed {

struct QoS {
    double availability = 0;  // fraction in [0,1]
    double reliability = 0;   // fraction in [0,1]
    double response_time = 1; // milliseconds, > 0
};

struct QosWeights {
    double availability = 1;
    double reliability = 1;
    double response_time = 1;
};

enum class SlaveState { Member, Bidder, Primary, Support, Failed };

inline const char* to_string(SlaveState s) {
    switch (s) {
        case SlaveState::Member: return "member";
        case SlaveState::Bidder: return "bidder";
        case SlaveState::Primary: return "primary";
        case SlaveState::Support: return "support";
        case SlaveState::Failed: return "failed";
    }
    return "?";
}

struct SlaveEntry {
    AnnotatedDescriptor descriptor;
    QoS qos;
    SlaveState state = SlaveState::Member;
    bool scripted_bid = false; // scenario-scripted answer to a call for bids
    double last_score = 0;

    const std::string& name() const { return descriptor.service_name; }
};

struct BidResponse {
    std::string slave_name;
    bool positive = false;
};

struct Community {
    std::string name;
    std::string functionality;
    AnnotatedDescriptor master;
    std::vector<SlaveEntry> slaves;

    SlaveEntry* find_slave(const std::string& slave_name) {
        for (auto& s : slaves)
            if (s.name() == slave_name) return &s;
        return nullptr;
    }
    const SlaveEntry* primary() const {
        for (const auto& s : slaves)
            if (s.state == SlaveState::Primary) return &s;
        return nullptr;
    }
    void validate() const {
        if (master.functionality != functionality)
            throw ConsistencyError(fmt::format("community '{}': master functionality '{}' does not match '{}'",
                                               name, master.functionality, functionality));
        for (const auto& s : slaves)
            if (s.descriptor.functionality != functionality)
                throw ConsistencyError(fmt::format("community '{}': slave '{}' offers '{}', expected '{}'",
                                                   name, s.name(), s.descriptor.functionality, functionality));
    }
};

namespace detail {

// per-concept static context and the first-seen annotation term sequence;
// parts sharing a concept must agree on their resolved modifiers
struct ExtractedContexts {
    std::map<Concept, Context> contexts;
    std::map<Concept, std::vector<QualifiedTerm>> term_sequences;
};

inline ExtractedContexts extract_annotations(const KnowledgeBase& kb, const AnnotatedDescriptor& d) {
    ExtractedContexts out;
    for (const auto& op : d.operations) {
        auto scan = [&](const std::vector<MessagePart>& parts) {
            for (const auto& part : parts) {
                Context ctx = static_context(kb, part.annotation);
                auto it = out.contexts.find(ctx.domain());
                if (it == out.contexts.end()) {
                    out.term_sequences[ctx.domain()] = part.annotation.static_terms;
                    out.contexts.emplace(ctx.domain(), std::move(ctx));
                } else if (!context_equal(it->second, ctx)) {
                    throw ConflictingAnnotationsError(
                        fmt::format("service '{}': parts annotate concept '{}' with different contexts",
                                    d.service_name, ctx.domain().name));
                }
            }
        };
        scan(op.inputs);
        scan(op.outputs);
    }
    return out;
}

} // namespace detail

// Phase 1, extraction: one statics-only context per concept of the failed
// service; dynamic modifiers play no role here.
inline std::map<Concept, Context> extract_context(const KnowledgeBase& kb, const AnnotatedDescriptor& failed) {
    return detail::extract_annotations(kb, failed).contexts;
}

// Phase 1, adoption: overwrite every master annotation with the failed
// service's terms for the matching concept. Only context attributes change.
inline AnnotatedDescriptor adopt_context(const KnowledgeBase& kb, const AnnotatedDescriptor& master,
                                         const AnnotatedDescriptor& failed) {
    detail::ExtractedContexts extracted = detail::extract_annotations(kb, failed);
    AnnotatedDescriptor adopted = master;
    for (auto& op : adopted.operations) {
        auto rewrite = [&](std::vector<MessagePart>& parts) {
            for (auto& part : parts) {
                Concept concept_id = resolve_concept(kb, part.annotation);
                auto it = extracted.term_sequences.find(concept_id);
                if (it == extracted.term_sequences.end())
                    throw ConceptNotCoveredError(
                        fmt::format("failed service '{}' has no context for concept '{}' used by '{}'",
                                    failed.service_name, concept_id.name, master.service_name));
                part.annotation.static_terms = it->second;
            }
        };
        rewrite(op.inputs);
        rewrite(op.outputs);
    }
    return adopted;
}

inline std::vector<BidResponse> call_for_bids(Community& community, const std::set<std::string>& exclude) {
    if (community.slaves.empty())
        throw EmptyCommunityError(fmt::format("community '{}' has no slaves", community.name));
    std::vector<BidResponse> responses;
    for (auto& slave : community.slaves) {
        if (exclude.count(slave.name())) continue;
        responses.push_back({slave.name(), slave.scripted_bid});
        if (slave.state != SlaveState::Failed)
            slave.state = slave.scripted_bid ? SlaveState::Bidder : SlaveState::Member;
    }
    return responses;
}

inline double qos_score(const QoS& q, const QosWeights& w, double t_max) {
    if (w.availability < 0 || w.reliability < 0 || w.response_time < 0 ||
        w.availability + w.reliability + w.response_time <= 0)
        throw InvalidWeightsError("QoS weights must be nonnegative with a positive sum");
    if (!(t_max > 0)) throw OutOfRangeError("t_max must be positive");
    if (!(q.response_time > 0) || q.response_time > t_max)
        throw OutOfRangeError(fmt::format("response time {} outside (0, {}]", q.response_time, t_max));
    return w.availability * q.availability + w.reliability * q.reliability +
           w.response_time * (1.0 - q.response_time / t_max);
}

struct Selection {
    std::string primary;
    std::vector<std::string> support; // descending score, ties by name
};

inline Selection select_substitute(Community& community, const std::vector<BidResponse>& bids,
                                   const QosWeights& weights, double t_max) {
    std::vector<std::pair<double, std::string>> candidates;
    for (const auto& bid : bids) {
        if (!bid.positive) continue;
        SlaveEntry* slave = community.find_slave(bid.slave_name);
        if (!slave)
            throw NotFoundError(fmt::format("community '{}' has no slave '{}'", community.name, bid.slave_name));
        slave->last_score = qos_score(slave->qos, weights, t_max);
        candidates.emplace_back(slave->last_score, slave->name());
    }
    if (candidates.empty())
        throw NoBiddersError(fmt::format("no positive bids in community '{}'", community.name));
    std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });

    Selection selection;
    selection.primary = candidates.front().second;
    for (std::size_t i = 1; i < candidates.size(); ++i) selection.support.push_back(candidates[i].second);

    for (auto& slave : community.slaves)
        if (slave.state == SlaveState::Primary) slave.state = SlaveState::Support;
    community.find_slave(selection.primary)->state = SlaveState::Primary;
    for (const auto& name : selection.support) community.find_slave(name)->state = SlaveState::Support;
    return selection;
}

inline std::string promote_support(Community& community) {
    if (community.primary())
        throw ScenarioError(fmt::format("community '{}' still has an active primary", community.name));
    SlaveEntry* best = nullptr;
    for (auto& slave : community.slaves) {
        if (slave.state != SlaveState::Support) continue;
        if (!best || slave.last_score > best->last_score ||
            (slave.last_score == best->last_score && slave.name() < best->name()))
            best = &slave;
    }
    if (!best)
        throw NoSupportError(fmt::format("community '{}' has no support slave to promote", community.name));
    best->state = SlaveState::Primary;
    return best->name();
}

// days per year a service at the given availability percentage may be down
inline double availability_downtime(double percent) {
    if (percent < 0 || percent > 100)
        throw OutOfRangeError(fmt::format("availability {}% outside [0, 100]", percent));
    return 365.0 * (100.0 - percent) / 100.0;
}

} // namespace wsmed

#endif
