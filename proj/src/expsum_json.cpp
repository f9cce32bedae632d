#include "creepdiv/expsum_json.hpp"

#include <vector>

namespace creepdiv {

void to_json(nlohmann::ordered_json& j, const ExpPolySum& f) {
    j = nlohmann::ordered_json::array();
    for (const auto& t : f.terms()) {
        j.push_back({{"coeff", t.coeff}, {"power", t.power}, {"rate", t.rate}});
    }
}

void from_json(const nlohmann::ordered_json& j, ExpPolySum& f) {
    std::vector<ExpTerm> terms;
    for (const auto& item : j) {
        terms.push_back({item.at("coeff").get<double>(), item.at("power").get<int>(),
                         item.at("rate").get<double>()});
    }
    f = ExpPolySum(std::move(terms));
}

}  // namespace creepdiv
