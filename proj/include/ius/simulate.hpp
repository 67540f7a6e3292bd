#pragma once

// Multi-user PRACH observation synthesis, two ways: the full time-domain
// OFDM path (modulate, circularly convolve, DFT, select PRACH bins) and the
// fast frequency-domain superposition y = A x + e. Noiseless, the two agree
// to machine precision; noise is injected per PRACH component in both.

#include <string>
#include <vector>

#include "ius/channel.hpp"
#include "ius/dictionary.hpp"
#include "ius/rng.hpp"
#include "ius/system_config.hpp"
#include "ius/types.hpp"
#include "ius/zc.hpp"

namespace ius {

struct ScenarioUser {
    int code = 0;    // 0-based column of the code matrix
    int delay = 0;   // samples, 0..D
    CVec taps;       // channel impulse response, order <= P_max
    std::string model;
    double speed_mps = 0.0;
};

struct Scenario {
    std::vector<ScenarioUser> users;  // distinct codes
    double noise_variance = 0.0;      // per PRACH component
    uint64_t seed = 0;
};

struct Observation {
    CVec y;                           // length M
    CVec true_x;                      // length G*N1, block-sparse ground truth
    std::vector<double> true_power;   // per code, 0 for inactive
    std::vector<int> active;          // sorted active code list
};

// K distinct codes chosen uniformly; per user a uniform ITU profile, a
// uniform integer delay in [0, D], and a fresh channel draw.
Scenario sample_scenario(int K, const CodeMatrix& codes, const SystemConfig& cfg, double noise_variance,
                         Rng& rng);

// Received window v(0..N-1): per user the subcarrier-mapped code symbol
// stream circularly convolved with its delayed channel, summed over users.
// Noise is added later, at the PRACH-bin level.
CVec synthesize_time_domain(const Scenario& scenario, const CodeMatrix& codes, const SystemConfig& cfg);

// N-point DFT scaled by 1/sqrt(N), restricted to the PRACH bins; the scale
// makes the end-to-end chain match the dictionary model with unit gain.
CVec extract_prach_observation(const CVec& time_signal, const SystemConfig& cfg);

// Ground-truth stacked vector, y = A x + e, and per-code received powers.
Observation synthesize_frequency_domain(const Scenario& scenario, const Dictionary& dict, Rng& rng);

// Time-domain pipeline end to end, with the same noise convention.
Observation observe_via_time_domain(const Scenario& scenario, const CodeMatrix& codes, const Dictionary& dict,
                                    Rng& rng);

// Average received PRACH power of a tap vector (or recovered block).
double received_power(const CVec& taps, const SystemConfig& cfg);

double snr_to_noise_variance(double snr_db, double sigma_h_sq);

std::string scenario_to_json_text(const Scenario& s);
Scenario scenario_from_json_text(const std::string& text);

}  // namespace ius
