#include "creepdiv/model_io.hpp"

#include "creepdiv/errors.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace creepdiv {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_number(const std::string& value, int line) {
    double out = 0.0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last) {
        throw InvalidConfig("line " + std::to_string(line) + ": '" + value + "' is not a number");
    }
    return out;
}

LevyModel parse_key_value(const std::string& text) {
    LevyModel::Params p;
    std::set<std::string> seen;
    bool in_jump = false;
    bool have_lambda = false;
    bool have_p = false;
    JumpPhase current;

    auto close_jump = [&](int line) {
        if (!in_jump) return;
        if (!have_lambda || !have_p) {
            throw InvalidConfig("line " + std::to_string(line) + ": [jump] section needs both lambda and p");
        }
        p.jumps.push_back(current);
        in_jump = false;
    };

    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::size_t hash = raw.find('#');
        const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) continue;
        if (s == "[jump]") {
            close_jump(line);
            in_jump = true;
            have_lambda = have_p = false;
            current = {};
            continue;
        }
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos) throw InvalidConfig("line " + std::to_string(line) + ": expected key = value");
        const std::string key = trim(s.substr(0, eq));
        const double v = parse_number(trim(s.substr(eq + 1)), line);
        if (in_jump && (key == "lambda" || key == "p")) {
            bool& flag = key == "lambda" ? have_lambda : have_p;
            if (flag) throw InvalidConfig("line " + std::to_string(line) + ": duplicate " + key + " in [jump]");
            flag = true;
            (key == "lambda" ? current.arrival_rate : current.decay) = v;
            continue;
        }
        if (in_jump) throw InvalidConfig("line " + std::to_string(line) + ": unknown jump key '" + key + "'");
        if (!seen.insert(key).second) throw InvalidConfig("line " + std::to_string(line) + ": duplicate key " + key);
        if (key == "c") p.c = v;
        else if (key == "sigma") p.sigma = v;
        else if (key == "q") p.q = v;
        else if (key == "delta") p.delta = v;
        else if (key == "S") p.S = v;
        else throw InvalidConfig("line " + std::to_string(line) + ": unknown key '" + key + "'");
    }
    close_jump(line);
    for (const char* k : {"c", "sigma", "q", "delta", "S"}) {
        if (!seen.count(k)) throw InvalidConfig(std::string("missing key '") + k + "'");
    }
    return LevyModel(std::move(p));
}

double json_number(const nlohmann::ordered_json& j, const char* key) {
    if (!j.contains(key)) throw InvalidConfig(std::string("missing key '") + key + "'");
    if (!j.at(key).is_number()) throw InvalidConfig(std::string("key '") + key + "' must be a number");
    return j.at(key).get<double>();
}

}  // namespace

LevyModel model_from_json(const nlohmann::ordered_json& j) {
    if (!j.is_object()) throw InvalidConfig("model JSON must be an object");
    LevyModel::Params p;
    p.c = json_number(j, "c");
    p.sigma = json_number(j, "sigma");
    p.q = json_number(j, "q");
    p.delta = json_number(j, "delta");
    p.S = json_number(j, "S");
    if (j.contains("jumps")) {
        if (!j.at("jumps").is_array()) throw InvalidConfig("'jumps' must be an array");
        for (const auto& jj : j.at("jumps")) {
            if (!jj.is_object()) throw InvalidConfig("each jump must be an object");
            p.jumps.push_back({json_number(jj, "lambda"), json_number(jj, "p")});
        }
    }
    return LevyModel(std::move(p));
}

LevyModel parse_model(const std::string& text) {
    const std::string t = trim(text);
    if (!t.empty() && t.front() == '{') {
        nlohmann::ordered_json j;
        try {
            j = nlohmann::ordered_json::parse(t);
        } catch (const nlohmann::json::exception& e) {
            throw InvalidConfig(std::string("malformed JSON model: ") + e.what());
        }
        return model_from_json(j);
    }
    return parse_key_value(text);
}

LevyModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidConfig("cannot open model config " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str());
}

nlohmann::ordered_json model_to_json(const LevyModel& m) {
    nlohmann::ordered_json j;
    j["c"] = m.c();
    j["sigma"] = m.sigma();
    j["q"] = m.q();
    j["delta"] = m.delta();
    j["S"] = m.S();
    j["jumps"] = nlohmann::ordered_json::array();
    for (const auto& jp : m.jumps()) j["jumps"].push_back({{"lambda", jp.arrival_rate}, {"p", jp.decay}});
    return j;
}

}  // namespace creepdiv
