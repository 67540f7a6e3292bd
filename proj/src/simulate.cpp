#include "ius/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

namespace ius {

namespace {

inline long long mod_pos(long long x, long long m) {
    long long r = x % m;
    return r < 0 ? r + m : r;
}

// exp(-i 2 pi t / N) for t in [0, N).
CVec dft_table(int N) {
    CVec tw(N);
    for (int t = 0; t < N; ++t) tw[t] = std::polar(1.0, -2.0 * M_PI * t / static_cast<double>(N));
    return tw;
}

}  // namespace

Scenario sample_scenario(int K, const CodeMatrix& codes, const SystemConfig& cfg, double noise_variance,
                         Rng& rng) {
    const int G = codes.G();
    if (K < 0 || K > G)
        throw infeasible_error("sample_scenario: K must lie in [0, G], got " + std::to_string(K));

    // Draw order is fixed: active codes, then per user (profile, delay, taps).
    std::vector<int> pool(G);
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < K; ++i) {
        int j = rng.uniform_int(i, G - 1);
        std::swap(pool[i], pool[j]);
    }
    std::vector<int> chosen(pool.begin(), pool.begin() + K);
    std::sort(chosen.begin(), chosen.end());

    Scenario s;
    s.noise_variance = noise_variance;
    for (int c : chosen) {
        const auto& profiles = itu_mixed_set();
        const ChannelProfile& prof = profiles[static_cast<size_t>(rng.uniform_int(0, 2))];
        int delay = rng.uniform_int(0, cfg.D);
        ChannelDraw draw = sample_channel(prof, cfg.T_s, cfg.P_max, rng);
        s.users.push_back({c, delay, draw.taps, draw.model, draw.speed_mps});
    }
    return s;
}

CVec synthesize_time_domain(const Scenario& scenario, const CodeMatrix& codes, const SystemConfig& cfg) {
    const int N = cfg.N, M = cfg.M;
    const CVec tw = dft_table(N);
    const double scale = 1.0 / std::sqrt(static_cast<double>(N));

    CVec v(N, cplx(0.0, 0.0));
    CVec s(N);
    for (const ScenarioUser& user : scenario.users) {
        const cplx* code = codes.entries.col(user.code);
        // Subcarrier-mapped symbol stream s(q), modulated onto bins j_1..j_M.
        for (int q = 0; q < N; ++q) {
            cplx acc(0.0, 0.0);
            for (int m = 1; m <= M; ++m) {
                long long t = mod_pos(-static_cast<long long>(cfg.subcarrier_index(m)) * q, N);
                acc += code[m - 1] * tw[t];  // conj: +i 2 pi j_m q / N
            }
            s[q] = scale * acc;
        }
        // Circular convolution with the channel, delayed by the user offset.
        for (int k = 0; k < N; ++k) {
            cplx acc(0.0, 0.0);
            for (size_t p = 0; p < user.taps.size(); ++p) {
                long long idx = mod_pos(k - static_cast<long long>(p) - user.delay, N);
                acc += user.taps[p] * s[idx];
            }
            v[k] += acc;
        }
    }
    return v;
}

CVec extract_prach_observation(const CVec& time_signal, const SystemConfig& cfg) {
    const int N = cfg.N, M = cfg.M;
    if (static_cast<int>(time_signal.size()) != N)
        throw numeric_error("extract_prach_observation: signal length must equal N");
    const CVec tw = dft_table(N);
    const double scale = 1.0 / std::sqrt(static_cast<double>(N));
    CVec out(M);
    for (int m = 1; m <= M; ++m) {
        const long long jm = cfg.subcarrier_index(m);
        cplx acc(0.0, 0.0);
        for (int k = 0; k < N; ++k) acc += time_signal[k] * tw[static_cast<size_t>(jm * k % N)];
        out[m - 1] = scale * acc;
    }
    return out;
}

Observation synthesize_frequency_domain(const Scenario& scenario, const Dictionary& dict, Rng& rng) {
    const int N1 = dict.N1;
    Observation obs;
    obs.true_x.assign(dict.flat_cols(), cplx(0.0, 0.0));
    obs.true_power.assign(dict.G, 0.0);

    for (const ScenarioUser& user : scenario.users) {
        if (user.delay + static_cast<int>(user.taps.size()) > N1)
            throw infeasible_error("scenario: delay + channel order exceeds N1 for code " +
                                   std::to_string(user.code));
        const DictionaryBlock& blk = dict.blocks[user.code];
        cplx rot = std::polar(1.0, -blk.phi);
        cplx* xb = obs.true_x.data() + static_cast<size_t>(user.code) * N1;
        for (size_t p = 0; p < user.taps.size(); ++p) xb[user.delay + p] = rot * user.taps[p];
        obs.true_power[user.code] = received_power(user.taps, dict.cfg);
        obs.active.push_back(user.code);
    }
    std::sort(obs.active.begin(), obs.active.end());

    obs.y.assign(dict.M, cplx(0.0, 0.0));
    dict.matvec(obs.true_x.data(), obs.y.data());
    if (scenario.noise_variance > 0.0)
        for (int q = 0; q < dict.M; ++q) obs.y[q] += rng.cgaussian(scenario.noise_variance);
    return obs;
}

Observation observe_via_time_domain(const Scenario& scenario, const CodeMatrix& codes, const Dictionary& dict,
                                    Rng& rng) {
    Rng noise_stream = rng;  // keep the same noise realization as the fast path
    Observation obs = synthesize_frequency_domain(scenario, dict, rng);
    CVec v = synthesize_time_domain(scenario, codes, dict.cfg);
    obs.y = extract_prach_observation(v, dict.cfg);
    if (scenario.noise_variance > 0.0)
        for (int q = 0; q < dict.M; ++q) obs.y[q] += noise_stream.cgaussian(scenario.noise_variance);
    return obs;
}

double received_power(const CVec& taps, const SystemConfig& cfg) {
    double acc = 0.0;
    for (int m = 1; m <= cfg.M; ++m) {
        cplx h(0.0, 0.0);
        for (size_t p = 0; p < taps.size(); ++p) {
            double ang = -2.0 * M_PI * static_cast<double>(p) * cfg.subcarrier_index(m) / cfg.N;
            h += taps[p] * std::polar(1.0, ang);
        }
        acc += std::norm(h);
    }
    return acc / static_cast<double>(cfg.M);
}

double snr_to_noise_variance(double snr_db, double sigma_h_sq) {
    if (sigma_h_sq <= 0.0) throw invalid_config_error("snr_to_noise_variance: sigma_h^2 must be positive");
    return sigma_h_sq / std::pow(10.0, snr_db / 10.0);
}

std::string scenario_to_json_text(const Scenario& s) {
    nlohmann::json doc;
    doc["noise_variance"] = s.noise_variance;
    doc["seed"] = s.seed;
    nlohmann::json users = nlohmann::json::array();
    for (const ScenarioUser& u : s.users) {
        nlohmann::json ju;
        ju["code"] = u.code;
        ju["delay"] = u.delay;
        ju["model"] = u.model;
        ju["speed_mps"] = u.speed_mps;
        nlohmann::json taps = nlohmann::json::array();
        for (const cplx& t : u.taps) taps.push_back({t.real(), t.imag()});
        ju["taps"] = taps;
        users.push_back(ju);
    }
    doc["users"] = users;
    return doc.dump(2);
}

Scenario scenario_from_json_text(const std::string& text) {
    nlohmann::json doc = nlohmann::json::parse(text);
    Scenario s;
    s.noise_variance = doc.at("noise_variance").get<double>();
    s.seed = doc.at("seed").get<uint64_t>();
    for (const auto& ju : doc.at("users")) {
        ScenarioUser u;
        u.code = ju.at("code").get<int>();
        u.delay = ju.at("delay").get<int>();
        u.model = ju.at("model").get<std::string>();
        u.speed_mps = ju.at("speed_mps").get<double>();
        for (const auto& t : ju.at("taps")) u.taps.push_back(cplx(t.at(0).get<double>(), t.at(1).get<double>()));
        s.users.push_back(std::move(u));
    }
    return s;
}

}  // namespace ius
