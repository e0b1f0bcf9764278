#ifndef INFNET_POSET_HPP
#define INFNET_POSET_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "infnet/quantify.hpp"

namespace infnet {

enum class EventKind { emission, reception, observer_reception };
enum class ChainRole { particle, observer };

inline std::string to_string(EventKind k) {
    switch (k) {
        case EventKind::emission: return "emission";
        case EventKind::reception: return "reception";
        case EventKind::observer_reception: return "observer-reception";
    }
    return "?";
}

inline std::string to_string(ChainRole r) {
    return r == ChainRole::particle ? "particle" : "observer";
}

/// One event of influencing or being influenced.  Valuations label the chain
/// with uniform increments; two adjacent events may share a valuation only
/// when the later one is marked indistinguishable (the observers cannot tell
/// them apart, so the spacetime picture gives them one label while the poset
/// keeps both nodes).
struct Event {
    std::string id;
    int chain = -1;
    std::int64_t valuation = 0;
    EventKind kind = EventKind::emission;
    std::optional<Side> side;              // which side it influences / was influenced from
    bool indistinguishable_from_previous = false;
};

struct Chain {
    std::string id;
    ChainRole role = ChainRole::particle;
    std::optional<Side> side;  // for observer chains: which side of the particle
    std::vector<int> events;   // indices into the network event table, chain order
};

struct InfluenceEdge {
    int source = -1;  // emission event
    int target = -1;  // reception / observer-reception event
};

/// A coordination pair between observer chains; contributes the order
/// relation lower <= upper.
struct CoordinationPair {
    int lower = -1;
    int upper = -1;
};

struct CollinearityViolation {
    std::string emission_id;
    std::string reception_id;
    Side side = Side::q;
    std::size_t position = 0;  // index of the emission within its chain
};

/**
 * Partially ordered set of influence events organized into totally ordered
 * chains, with directed influence edges between them.
 *
 * Build phase: add chains, events, influence and coordination edges, then
 * call finalize().  finalize() validates the structure and precomputes the
 * full reachability relation, after which the network is immutable and every
 * query is const, pure, and safe for concurrent readers.
 */
class InfluenceNetwork {
public:
    int add_chain(const std::string& id, ChainRole role,
                  std::optional<Side> side = std::nullopt) {
        require_mutable();
        if (chain_index_.count(id)) {
            throw std::invalid_argument("duplicate chain id: " + id);
        }
        chain_index_[id] = static_cast<int>(chains_.size());
        chains_.push_back(Chain{id, role, side, {}});
        return static_cast<int>(chains_.size()) - 1;
    }

    int add_event(const std::string& chain_id, const std::string& event_id,
                  std::int64_t valuation, EventKind kind,
                  std::optional<Side> side = std::nullopt,
                  bool indistinguishable_from_previous = false) {
        require_mutable();
        Chain& chain = chains_.at(chain_at(chain_id));
        if (event_index_.count(event_id)) {
            throw std::invalid_argument("duplicate event id: " + event_id);
        }
        const int idx = static_cast<int>(events_.size());
        event_index_[event_id] = idx;
        events_.push_back(Event{event_id, chain_at(chain_id), valuation, kind, side,
                                indistinguishable_from_previous});
        chain.events.push_back(idx);
        return idx;
    }

    void add_influence(const std::string& source_id, const std::string& target_id) {
        require_mutable();
        influences_.push_back(InfluenceEdge{event_at(source_id), event_at(target_id)});
    }

    void add_coordination(const std::string& lower_id, const std::string& upper_id) {
        require_mutable();
        coordination_.push_back(CoordinationPair{event_at(lower_id), event_at(upper_id)});
    }

    /// Validates the structure and freezes the network.
    void finalize() {
        require_mutable();
        validate_chains();
        validate_influences();
        validate_coordination();
        build_successors();
        compute_reachability();  // throws on a cycle
        finalized_ = true;
    }

    bool finalized() const { return finalized_; }

    // --- order queries -----------------------------------------------------

    /// x <= y: y is reachable from x through chain successors, influence
    /// edges, and coordination pairs (reflexively).
    bool leq(const std::string& x_id, const std::string& y_id) const {
        require_finalized();
        return reaches(event_at(x_id), event_at(y_id));
    }

    /// Least event on the target chain that includes e; nullopt when the
    /// chain has no such event (a value, not an error: free-particle chains
    /// legitimately lack projections).
    std::optional<std::string> forward_project(const std::string& event_id,
                                               const std::string& chain_id) const {
        require_finalized();
        const int e = event_at(event_id);
        for (int idx : chains_.at(chain_at(chain_id)).events) {
            if (reaches(e, idx)) return events_[idx].id;
        }
        return std::nullopt;
    }

    /// Greatest event on the target chain that e includes.  Defined through
    /// actual order relations only.
    std::optional<std::string> back_project(const std::string& event_id,
                                            const std::string& chain_id) const {
        require_finalized();
        const int e = event_at(event_id);
        const auto& chain_events = chains_.at(chain_at(chain_id)).events;
        for (auto it = chain_events.rbegin(); it != chain_events.rend(); ++it) {
            if (reaches(*it, e)) return events_[*it].id;
        }
        return std::nullopt;
    }

    // --- collinearity admissibility -----------------------------------------

    /// Scans a particle chain for adjacent (emission toward S, reception from
    /// S) pairs, which the collinearity assumption forbids.  Every event on
    /// the chain must carry a side tag.
    std::vector<CollinearityViolation> collinearity_scan(const std::string& chain_id) const {
        require_finalized();
        const Chain& chain = chains_.at(chain_at(chain_id));
        if (chain.role != ChainRole::particle) {
            throw std::invalid_argument("collinearity_scan: chain '" + chain_id +
                                        "' is not a particle chain");
        }
        std::vector<CollinearityViolation> violations;
        for (std::size_t i = 0; i < chain.events.size(); ++i) {
            const Event& ev = events_[chain.events[i]];
            if (!ev.side) {
                throw std::invalid_argument("collinearity_scan: event '" + ev.id +
                                            "' has no side tag");
            }
            if (i == 0) continue;
            const Event& prev = events_[chain.events[i - 1]];
            if (prev.kind == EventKind::emission && ev.kind == EventKind::reception &&
                *prev.side == *ev.side) {
                violations.push_back(
                    CollinearityViolation{prev.id, ev.id, *ev.side, i - 1});
            }
        }
        return violations;
    }

    // --- accessors ----------------------------------------------------------

    const std::vector<Chain>& chains() const { return chains_; }
    const std::vector<Event>& events() const { return events_; }
    const std::vector<InfluenceEdge>& influences() const { return influences_; }
    const std::vector<CoordinationPair>& coordination() const { return coordination_; }

    const Event& event(const std::string& id) const { return events_.at(event_at(id)); }
    const Chain& chain(const std::string& id) const { return chains_.at(chain_at(id)); }
    bool has_event(const std::string& id) const { return event_index_.count(id) > 0; }
    bool has_chain(const std::string& id) const { return chain_index_.count(id) > 0; }

    /// Stored covering edges (chain successor, influence, coordination), as
    /// index pairs.  Used by the exporter and by brute-force test oracles.
    std::vector<std::pair<int, int>> stored_edges() const {
        std::vector<std::pair<int, int>> edges;
        for (const Chain& chain : chains_) {
            for (std::size_t i = 1; i < chain.events.size(); ++i) {
                edges.emplace_back(chain.events[i - 1], chain.events[i]);
            }
        }
        for (const auto& e : influences_) edges.emplace_back(e.source, e.target);
        for (const auto& c : coordination_) edges.emplace_back(c.lower, c.upper);
        return edges;
    }

    bool reaches_index(int from, int to) const {
        require_finalized();
        return reaches(from, to);
    }

private:
    void require_mutable() const {
        if (finalized_) throw std::logic_error("network is finalized");
    }

    void require_finalized() const {
        if (!finalized_) throw std::logic_error("network not finalized; call finalize()");
    }

    int event_at(const std::string& id) const {
        auto it = event_index_.find(id);
        if (it == event_index_.end()) {
            throw std::out_of_range("unknown event id: " + id);
        }
        return it->second;
    }

    int chain_at(const std::string& id) const {
        auto it = chain_index_.find(id);
        if (it == chain_index_.end()) {
            throw std::out_of_range("unknown chain id: " + id);
        }
        return it->second;
    }

    void validate_chains() const {
        for (const Chain& chain : chains_) {
            for (std::size_t i = 1; i < chain.events.size(); ++i) {
                const Event& prev = events_[chain.events[i - 1]];
                const Event& cur = events_[chain.events[i]];
                if (cur.valuation < prev.valuation) {
                    throw std::invalid_argument("chain '" + chain.id +
                                                "': valuations must not decrease");
                }
                if (cur.valuation == prev.valuation && !cur.indistinguishable_from_previous) {
                    throw std::invalid_argument(
                        "chain '" + chain.id + "': events '" + prev.id + "' and '" + cur.id +
                        "' share a valuation without an indistinguishable mark");
                }
            }
        }
    }

    void validate_influences() const {
        for (const auto& edge : influences_) {
            const Event& src = events_[edge.source];
            const Event& dst = events_[edge.target];
            if (src.kind != EventKind::emission) {
                throw std::invalid_argument("influence source '" + src.id +
                                            "' must be an emission event");
            }
            if (dst.kind != EventKind::reception && dst.kind != EventKind::observer_reception) {
                throw std::invalid_argument("influence target '" + dst.id +
                                            "' must be a reception event");
            }
            if (src.chain == dst.chain) {
                throw std::invalid_argument("influence edge '" + src.id + "' -> '" + dst.id +
                                            "' joins events on the same chain");
            }
        }
    }

    /// Coordinated chains must have equal lengths of corresponding intervals:
    /// successive pairs between one chain pair must advance both valuations
    /// by the same amount.
    void validate_coordination() const {
        std::map<std::pair<int, int>, std::vector<std::pair<std::int64_t, std::int64_t>>>
            per_chain_pair;
        for (const auto& pair : coordination_) {
            const Event& lo = events_[pair.lower];
            const Event& hi = events_[pair.upper];
            if (chains_[lo.chain].role != ChainRole::observer ||
                chains_[hi.chain].role != ChainRole::observer) {
                throw std::invalid_argument("coordination pair '" + lo.id + "' ~ '" + hi.id +
                                            "' must join observer chains");
            }
            if (lo.chain == hi.chain) {
                throw std::invalid_argument("coordination pair '" + lo.id + "' ~ '" + hi.id +
                                            "' joins events on the same chain");
            }
            per_chain_pair[{lo.chain, hi.chain}].emplace_back(lo.valuation, hi.valuation);
        }
        for (auto& [chains, pairs] : per_chain_pair) {
            std::sort(pairs.begin(), pairs.end());
            for (std::size_t i = 1; i < pairs.size(); ++i) {
                const auto lo_step = pairs[i].first - pairs[i - 1].first;
                const auto hi_step = pairs[i].second - pairs[i - 1].second;
                if (lo_step != hi_step) {
                    throw std::invalid_argument(
                        "coordination between '" + chains_[chains.first].id + "' and '" +
                        chains_[chains.second].id + "' has unequal corresponding intervals");
                }
            }
        }
    }

    void build_successors() {
        successors_.assign(events_.size(), {});
        for (const auto& [from, to] : stored_edges()) {
            successors_[from].push_back(to);
        }
    }

    /// Reachability closure as one bitset row per event, filled in reverse
    /// topological order so each row is the union of its successors' rows.
    void compute_reachability() {
        const std::size_t n = events_.size();
        const std::size_t words = (n + 63) / 64;
        std::vector<int> indegree(n, 0);
        for (const auto& succ : successors_) {
            for (int t : succ) ++indegree[t];
        }
        std::vector<int> order;
        order.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (indegree[i] == 0) order.push_back(static_cast<int>(i));
        }
        for (std::size_t head = 0; head < order.size(); ++head) {
            for (int t : successors_[order[head]]) {
                if (--indegree[t] == 0) order.push_back(t);
            }
        }
        if (order.size() != n) {
            throw std::invalid_argument(
                "influence network is cyclic: not a valid partial order");
        }
        reach_.assign(n * words, 0);
        reach_words_ = words;
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const int v = *it;
            std::uint64_t* row = &reach_[static_cast<std::size_t>(v) * words];
            row[v / 64] |= std::uint64_t{1} << (v % 64);
            for (int t : successors_[v]) {
                const std::uint64_t* succ_row = &reach_[static_cast<std::size_t>(t) * words];
                for (std::size_t w = 0; w < words; ++w) row[w] |= succ_row[w];
            }
        }
    }

    bool reaches(int from, int to) const {
        return (reach_[static_cast<std::size_t>(from) * reach_words_ + to / 64] >>
                (to % 64)) & 1u;
    }

    std::vector<Chain> chains_;
    std::vector<Event> events_;
    std::vector<InfluenceEdge> influences_;
    std::vector<CoordinationPair> coordination_;
    std::unordered_map<std::string, int> chain_index_;
    std::unordered_map<std::string, int> event_index_;
    std::vector<std::vector<int>> successors_;
    std::vector<std::uint64_t> reach_;
    std::size_t reach_words_ = 0;
    bool finalized_ = false;
};

} // namespace infnet

#endif // INFNET_POSET_HPP
