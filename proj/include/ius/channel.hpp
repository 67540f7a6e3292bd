#pragma once

// ITU IMT-2000 tapped-delay-line profiles (Ped-A, Ped-B, Veh-A) quantized to
// the receiver sample grid, with unit expected total power.

#include <string>
#include <vector>

#include "ius/rng.hpp"
#include "ius/types.hpp"

namespace ius {

struct ChannelProfile {
    std::string name;
    std::vector<double> tap_delays_s;   // sorted, first = 0
    std::vector<double> tap_powers_db;  // relative
    double speed_min_mps = 0.0;
    double speed_max_mps = 0.0;
};

const ChannelProfile& pedestrian_a();
const ChannelProfile& pedestrian_b();
const ChannelProfile& vehicular_a();
const std::vector<ChannelProfile>& itu_mixed_set();

// Tap indices after quantizing the profile delays to multiples of T_s;
// delays landing on the same sample are merged (powers summed).
std::vector<int> quantized_tap_indices(const ChannelProfile& profile, double T_s);

struct ChannelDraw {
    CVec taps;          // length = order, trailing tap nonzero by construction
    int order = 0;      // last occupied sample + 1
    std::string model;
    double speed_mps = 0.0;
};

// Rayleigh-fades each quantized tap with variance from the power profile,
// normalized so E[sum |h|^2] = 1. order <= P_max is enforced.
ChannelDraw sample_channel(const ChannelProfile& profile, double T_s, int P_max, Rng& rng);

}  // namespace ius
