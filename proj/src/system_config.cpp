#include "ius/system_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ius {

SystemConfig lte_preset() {
    SystemConfig cfg;
    cfg.N = 6144;
    cfg.N_g = 768;
    cfg.M = 839;
    cfg.j1 = 0;
    cfg.T_s = 130e-9;
    cfg.gamma = 1.3;
    cfg.tau_d = 1.0;
    cfg.T_SEQ = 800.0;
    cfg.n_g = 2;
    cfg.P_max = 35;
    cfg.D = 70;
    cfg.N1 = 105;
    cfg.subcarrier_spacing = 1250.0;
    return cfg;
}

std::vector<std::string> validate(const SystemConfig& cfg) {
    std::vector<std::string> v;
    auto fail = [&v](const std::string& msg) { v.push_back(msg); };

    if (cfg.N <= 0) fail("N > 0");
    if (cfg.M <= 0) fail("M > 0");
    if (cfg.M < 5) fail("M >= 5");  // ceil(pi*sqrt(2))
    if (cfg.N > 0 && 2 * cfg.M > cfg.N) fail("M <= N/2");
    if (cfg.j1 < 0) fail("j1 >= 0");
    if (cfg.j1 + cfg.M > cfg.N) fail("j1 + M <= N");
    if (cfg.N1 != cfg.P_max + cfg.D) fail("N1 = P_max + D");
    if (cfg.N1 < 1) fail("N1 >= 1");
    if (cfg.N1 >= cfg.M) fail("N1 < M");
    if (cfg.N_g < 0) fail("N_g >= 0");
    if (cfg.T_s <= 0.0) fail("T_s > 0");
    if (cfg.T_SEQ <= 0.0) fail("T_SEQ > 0");
    if (cfg.P_max < 0) fail("P_max >= 0");
    if (cfg.D < 0) fail("D >= 0");
    if (cfg.n_g < 0) fail("n_g >= 0");
    return v;
}

int ncs_lower_bound(double gamma_km, double tau_d_us, double t_seq_us, int M, int n_g) {
    if (t_seq_us <= 0.0) throw invalid_config_error("ncs_lower_bound: T_SEQ must be positive");
    if (M <= 0) throw invalid_config_error("ncs_lower_bound: M must be positive");
    if (gamma_km < 0.0) throw invalid_config_error("ncs_lower_bound: gamma must be non-negative");
    double inner = (20.0 / 3.0 * gamma_km - tau_d_us) * static_cast<double>(M) / t_seq_us;
    long long n = static_cast<long long>(std::ceil(inner)) + n_g;
    if (n < 0) n = 0;
    return static_cast<int>(n);
}

namespace {

using nlohmann::json;

const char* const kFields[] = {"N",   "N_g",   "M",     "j1",    "T_s",  "gamma",  "tau_d",
                               "T_SEQ", "n_g", "P_max", "D",     "N1",   "subcarrier_spacing"};

}  // namespace

SystemConfig config_from_json_text(const std::string& text) {
    json doc = json::parse(text);
    if (!doc.is_object()) throw invalid_config_error("config: expected a JSON object");
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        bool known = false;
        for (const char* f : kFields)
            if (it.key() == f) known = true;
        if (!known) throw invalid_config_error("config: unknown key '" + it.key() + "'");
    }
    for (const char* f : kFields)
        if (!doc.contains(f)) throw invalid_config_error(std::string("config: missing key '") + f + "'");

    SystemConfig cfg;
    cfg.N = doc["N"].get<int>();
    cfg.N_g = doc["N_g"].get<int>();
    cfg.M = doc["M"].get<int>();
    cfg.j1 = doc["j1"].get<int>();
    cfg.T_s = doc["T_s"].get<double>();
    cfg.gamma = doc["gamma"].get<double>();
    cfg.tau_d = doc["tau_d"].get<double>();
    cfg.T_SEQ = doc["T_SEQ"].get<double>();
    cfg.n_g = doc["n_g"].get<int>();
    cfg.P_max = doc["P_max"].get<int>();
    cfg.D = doc["D"].get<int>();
    cfg.N1 = doc["N1"].get<int>();
    cfg.subcarrier_spacing = doc["subcarrier_spacing"].get<double>();
    return cfg;
}

std::string config_to_json_text(const SystemConfig& cfg) {
    json doc;
    doc["N"] = cfg.N;
    doc["N_g"] = cfg.N_g;
    doc["M"] = cfg.M;
    doc["j1"] = cfg.j1;
    doc["T_s"] = cfg.T_s;
    doc["gamma"] = cfg.gamma;
    doc["tau_d"] = cfg.tau_d;
    doc["T_SEQ"] = cfg.T_SEQ;
    doc["n_g"] = cfg.n_g;
    doc["P_max"] = cfg.P_max;
    doc["D"] = cfg.D;
    doc["N1"] = cfg.N1;
    doc["subcarrier_spacing"] = cfg.subcarrier_spacing;
    return doc.dump(2);
}

SystemConfig load_config(const std::string& path_or_preset) {
    if (path_or_preset == "lte") return lte_preset();
    std::ifstream in(path_or_preset);
    if (!in) throw invalid_config_error("config: cannot open '" + path_or_preset + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return config_from_json_text(ss.str());
}

}  // namespace ius
