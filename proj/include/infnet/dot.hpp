#ifndef INFNET_DOT_HPP
#define INFNET_DOT_HPP

#include <set>
#include <sstream>
#include <string>
#include <utility>

#include "infnet/poset.hpp"

namespace infnet {

namespace detail {

inline std::string dot_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace detail

/// Renders the Hasse diagram (transitive reduction) of a finalized network as
/// a Graphviz digraph.  Chain edges are solid, influence edges dashed,
/// coordination edges dotted; output is deterministic.
inline std::string export_hasse(const InfluenceNetwork& net) {
    std::ostringstream out;
    out << "digraph influence_network {\n";
    if (!net.events().empty()) {
        out << "  rankdir=BT;\n";
        out << "  node [shape=circle, fontsize=11];\n";
    }
    for (const Chain& chain : net.chains()) {
        for (int idx : chain.events) {
            const Event& ev = net.events()[idx];
            out << "  " << detail::dot_quote(ev.id) << " [label=" << detail::dot_quote(ev.id);
            if (net.events()[idx].kind == EventKind::observer_reception ||
                chain.role == ChainRole::observer) {
                out << ", shape=box";
            }
            out << "];\n";
        }
    }

    std::set<std::pair<int, int>> influence_pairs;
    for (const auto& e : net.influences()) influence_pairs.insert({e.source, e.target});
    std::set<std::pair<int, int>> coordination_pairs;
    for (const auto& c : net.coordination()) coordination_pairs.insert({c.lower, c.upper});

    for (const auto& [from, to] : net.stored_edges()) {
        // keep only covering edges: drop u->v when some w lies strictly between
        bool redundant = false;
        for (std::size_t w = 0; w < net.events().size() && !redundant; ++w) {
            const int wi = static_cast<int>(w);
            if (wi == from || wi == to) continue;
            if (net.reaches_index(from, wi) && net.reaches_index(wi, to)) redundant = true;
        }
        if (redundant) continue;
        out << "  " << detail::dot_quote(net.events()[from].id) << " -> "
            << detail::dot_quote(net.events()[to].id);
        if (influence_pairs.count({from, to})) {
            out << " [style=dashed, color=gray40]";
        } else if (coordination_pairs.count({from, to})) {
            out << " [style=dotted, color=gray60]";
        }
        out << ";\n";
    }
    out << "}\n";
    return out.str();
}

} // namespace infnet

#endif // INFNET_DOT_HPP
