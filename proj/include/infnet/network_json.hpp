#ifndef INFNET_NETWORK_JSON_HPP
#define INFNET_NETWORK_JSON_HPP

#include <optional>
#include <string>

#include <json.hpp>

#include "infnet/poset.hpp"

namespace infnet {

inline constexpr const char* network_schema = "influence-network/1";

inline std::string to_string(Side s) { return s == Side::p ? "P" : "Q"; }

inline Side side_from_string(const std::string& text) {
    if (text == "P" || text == "p") return Side::p;
    if (text == "Q" || text == "q") return Side::q;
    throw std::invalid_argument("unknown side: '" + text + "'");
}

inline EventKind event_kind_from_string(const std::string& text) {
    if (text == "emission") return EventKind::emission;
    if (text == "reception") return EventKind::reception;
    if (text == "observer-reception") return EventKind::observer_reception;
    throw std::invalid_argument("unknown event kind: '" + text + "'");
}

inline ChainRole chain_role_from_string(const std::string& text) {
    if (text == "particle") return ChainRole::particle;
    if (text == "observer") return ChainRole::observer;
    throw std::invalid_argument("unknown chain role: '" + text + "'");
}

/// Builds and finalizes a network from its JSON description.
inline InfluenceNetwork network_from_json(const nlohmann::json& j) {
    if (!j.is_object() || j.value("schema", "") != network_schema) {
        throw std::invalid_argument(std::string("network JSON must declare schema '") +
                                    network_schema + "'");
    }
    InfluenceNetwork net;
    for (const auto& jc : j.value("chains", nlohmann::json::array())) {
        std::optional<Side> chain_side;
        if (jc.contains("side")) chain_side = side_from_string(jc.at("side").get<std::string>());
        net.add_chain(jc.at("id").get<std::string>(),
                      chain_role_from_string(jc.at("role").get<std::string>()), chain_side);
        for (const auto& je : jc.value("events", nlohmann::json::array())) {
            std::optional<Side> side;
            if (je.contains("side")) side = side_from_string(je.at("side").get<std::string>());
            net.add_event(jc.at("id").get<std::string>(), je.at("id").get<std::string>(),
                          je.at("valuation").get<std::int64_t>(),
                          event_kind_from_string(je.at("kind").get<std::string>()), side,
                          je.value("indistinguishable", false));
        }
    }
    for (const auto& ji : j.value("influences", nlohmann::json::array())) {
        net.add_influence(ji.at("from").get<std::string>(), ji.at("to").get<std::string>());
    }
    for (const auto& jo : j.value("coordination", nlohmann::json::array())) {
        net.add_coordination(jo.at("from").get<std::string>(), jo.at("to").get<std::string>());
    }
    net.finalize();
    return net;
}

inline nlohmann::json network_to_json(const InfluenceNetwork& net) {
    nlohmann::json j;
    j["schema"] = network_schema;
    j["chains"] = nlohmann::json::array();
    for (const Chain& chain : net.chains()) {
        nlohmann::json jc;
        jc["id"] = chain.id;
        jc["role"] = to_string(chain.role);
        if (chain.side) jc["side"] = to_string(*chain.side);
        jc["events"] = nlohmann::json::array();
        for (int idx : chain.events) {
            const Event& ev = net.events()[idx];
            nlohmann::json je;
            je["id"] = ev.id;
            je["valuation"] = ev.valuation;
            je["kind"] = to_string(ev.kind);
            if (ev.side) je["side"] = to_string(*ev.side);
            if (ev.indistinguishable_from_previous) je["indistinguishable"] = true;
            jc["events"].push_back(je);
        }
        j["chains"].push_back(jc);
    }
    j["influences"] = nlohmann::json::array();
    for (const auto& e : net.influences()) {
        j["influences"].push_back({{"from", net.events()[e.source].id},
                                   {"to", net.events()[e.target].id}});
    }
    j["coordination"] = nlohmann::json::array();
    for (const auto& c : net.coordination()) {
        j["coordination"].push_back({{"from", net.events()[c.lower].id},
                                     {"to", net.events()[c.upper].id}});
    }
    return j;
}

} // namespace infnet

#endif // INFNET_NETWORK_JSON_HPP
