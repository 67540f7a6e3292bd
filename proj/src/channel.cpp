#include "ius/channel.hpp"

#include <cmath>
#include <map>

namespace ius {

const ChannelProfile& pedestrian_a() {
    static const ChannelProfile p{
        "PedA", {0e-9, 110e-9, 190e-9, 410e-9}, {0.0, -9.7, -19.2, -22.8}, 0.0, 5.0};
    return p;
}

const ChannelProfile& pedestrian_b() {
    static const ChannelProfile p{"PedB",
                                  {0e-9, 200e-9, 800e-9, 1200e-9, 2300e-9, 3700e-9},
                                  {0.0, -0.9, -4.9, -8.0, -7.8, -23.9},
                                  0.0,
                                  5.0};
    return p;
}

const ChannelProfile& vehicular_a() {
    static const ChannelProfile p{"VehA",
                                  {0e-9, 310e-9, 710e-9, 1090e-9, 1730e-9, 2510e-9},
                                  {0.0, -1.0, -9.0, -10.0, -15.0, -20.0},
                                  5.0,
                                  20.0};
    return p;
}

const std::vector<ChannelProfile>& itu_mixed_set() {
    static const std::vector<ChannelProfile> set{pedestrian_a(), pedestrian_b(), vehicular_a()};
    return set;
}

std::vector<int> quantized_tap_indices(const ChannelProfile& profile, double T_s) {
    std::vector<int> idx;
    int last = -1;
    for (double d : profile.tap_delays_s) {
        int i = static_cast<int>(std::lround(d / T_s));
        if (i != last) idx.push_back(i);
        last = i;
    }
    return idx;
}

ChannelDraw sample_channel(const ChannelProfile& profile, double T_s, int P_max, Rng& rng) {
    // Merge same-sample taps by summing their linear powers.
    std::map<int, double> power_at;
    double total = 0.0;
    for (size_t t = 0; t < profile.tap_delays_s.size(); ++t) {
        int i = static_cast<int>(std::lround(profile.tap_delays_s[t] / T_s));
        double p = std::pow(10.0, profile.tap_powers_db[t] / 10.0);
        power_at[i] += p;
        total += p;
    }
    int order = power_at.rbegin()->first + 1;
    if (order > P_max)
        throw invalid_config_error("sample_channel: profile '" + profile.name + "' exceeds P_max after quantization");

    ChannelDraw draw;
    draw.model = profile.name;
    draw.order = order;
    draw.taps.assign(order, cplx(0.0, 0.0));
    for (const auto& [i, p] : power_at) draw.taps[i] = rng.cgaussian(p / total);
    draw.speed_mps = profile.speed_min_mps + (profile.speed_max_mps - profile.speed_min_mps) * rng.uniform();
    return draw;
}

}  // namespace ius
