#pragma once

// LTE-like PRACH numerology: every quantity the code generator, dictionary
// builder and link simulator need, plus the regulatory lower bound on the
// cyclic-shift step.

#include <string>
#include <vector>

#include "ius/types.hpp"

namespace ius {

struct SystemConfig {
    int N = 0;                        // subcarrier count (DFT size)
    int N_g = 0;                      // cyclic-prefix length, samples
    int M = 0;                        // PRACH subcarrier count
    int j1 = 0;                       // first PRACH subcarrier, 0-based
    double T_s = 0.0;                 // sample interval, seconds
    double gamma = 0.0;               // cell radius, km
    double tau_d = 1.0;               // maximum delay spread, microseconds
    double T_SEQ = 0.0;               // preamble duration, microseconds
    int n_g = 2;                      // extra guard samples in the n_cs bound
    int P_max = 0;                    // maximum channel order, taps
    int D = 0;                        // maximum delay, samples
    int N1 = 0;                       // truncated block width, = P_max + D
    double subcarrier_spacing = 0.0;  // Hz

    // m is 1-based; PRACH bins are contiguous starting at j1.
    int subcarrier_index(int m) const { return j1 + m - 1; }
};

// 839-subcarrier preamble in a 6144-bin grid, 1.25 kHz spacing, 1.3 km cell.
SystemConfig lte_preset();

// Returns one human-readable message per violated invariant; empty means ok.
std::vector<std::string> validate(const SystemConfig& cfg);

// Smallest admissible cyclic-shift step for a cell of radius gamma_km:
// ceil((20/3*gamma - tau_d) * M / T_SEQ) + n_g, clamped below at zero.
int ncs_lower_bound(double gamma_km, double tau_d_us, double t_seq_us, int M, int n_g);

// Strict JSON schema: exactly the struct's field names, unknown keys rejected.
SystemConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const SystemConfig& cfg);

// Accepts a file path or the preset name "lte".
SystemConfig load_config(const std::string& path_or_preset);

}  // namespace ius
