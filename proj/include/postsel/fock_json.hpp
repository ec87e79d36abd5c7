#ifndef POSTSEL_FOCK_JSON_HPP
#define POSTSEL_FOCK_JSON_HPP

#include <json.hpp>

#include "postsel/fock_oracle.hpp"

namespace postsel::oracle {

/// [[level, re, im], ...] for every stored level.
[[nodiscard]] inline nlohmann::json to_json(const FockVector& v) {
    nlohmann::json out = nlohmann::json::array();
    for (int k = 0; k < v.size(); ++k) {
        out.push_back({k, v.amplitudes[k].real(), v.amplitudes[k].imag()});
    }
    return out;
}

[[nodiscard]] inline FockVector fock_vector_from_json(const nlohmann::json& j) {
    FockVector v;
    for (const auto& e : j) {
        const int k = e.at(0).get<int>();
        if (k < 0) throw std::invalid_argument("fock json: negative level");
        if (k >= v.size()) v.amplitudes.resize(k + 1, 0.0);
        v.amplitudes[k] = {e.at(1).get<double>(), e.at(2).get<double>()};
    }
    for (const auto& a : v.amplitudes) v.probability += std::norm(a);
    v.negligible = v.probability < 1e-14;
    return v;
}

} // namespace postsel::oracle

#endif // POSTSEL_FOCK_JSON_HPP
