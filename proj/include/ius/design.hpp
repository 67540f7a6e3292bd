#pragma once

// Random-access code matrix design: the conventional procedure (smallest
// regulatory step, fixed root) and the coherence-driven generators that pick
// the step and roots so the dictionary coherence lands at S(1).

#include <map>
#include <string>
#include <vector>

#include "ius/system_config.hpp"
#include "ius/types.hpp"
#include "ius/zc.hpp"

namespace ius {

enum class DesignMethod { cra, ccg_single, ccg_multi };

struct DesignPlan {
    DesignMethod method = DesignMethod::cra;
    int n_cs_used = 0;                              // step of the first family
    std::vector<std::pair<int, int>> roots_used;    // (root, codes generated)
    std::map<int, int> ncs_by_root;
    int G_requested = 0;
    int G_delivered = 0;
    double predicted_mu = 0.0;
};

struct DesignOutput {
    CodeMatrix codes;
    DesignPlan plan;
};

// Smallest step n_cs >= n_hat_cs with n_cs * u >= M * N1 / N.
int min_ncs_for_root(int u, int n_hat_cs, int M, int N, int N1);
int min_ncs_for_root(int u, int n_hat_cs, const SystemConfig& cfg);

// floor(1 + M (N - N1) / (N n_cs u)), clamped to the cyclic-separation limit
// floor(M / n_cs).
int max_codes_per_root(int u, int n_cs, int M, int N, int N1);
int max_codes_per_root(int u, int n_cs, const SystemConfig& cfg);

// Conventional generation: n_cs = n_hat_cs, G codes from the single root u.
DesignOutput design_cra(int u, int n_hat_cs, int G, const SystemConfig& cfg);

// Coherence-based single-root generation: derives n_cs and G, delivers all.
DesignOutput design_ccg_single(int u, int n_hat_cs, const SystemConfig& cfg);

// Coherence-based multi-root generation: scans roots u = 1, 2, ... and admits
// one family at a time until G codes are delivered.
DesignOutput design_ccg_multi(int G, int n_hat_cs, const SystemConfig& cfg, int threads = 1);

std::string design_plan_to_json_text(const DesignPlan& plan);
std::string design_label(const DesignPlan& plan);

}  // namespace ius
