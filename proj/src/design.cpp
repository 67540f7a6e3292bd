#include "ius/design.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "ius/coherence.hpp"

namespace ius {

namespace {

long long ceil_div(long long a, long long b) { return (a + b - 1) / b; }

void check_root(int u, int M) {
    if (u <= 0 || u >= M) throw invalid_root_error("design: root must satisfy 0 < u < M");
}

}  // namespace

int min_ncs_for_root(int u, int n_hat_cs, int M, int N, int N1) {
    if (u < 1) throw invalid_root_error("min_ncs_for_root: root must be positive");
    // n_cs * u >= M * N1 / N, as a real inequality.
    long long lower = ceil_div(static_cast<long long>(M) * N1, static_cast<long long>(N) * u);
    long long n = std::max<long long>({1, n_hat_cs, lower});
    return static_cast<int>(n);
}

int min_ncs_for_root(int u, int n_hat_cs, const SystemConfig& cfg) {
    return min_ncs_for_root(u, n_hat_cs, cfg.M, cfg.N, cfg.N1);
}

int max_codes_per_root(int u, int n_cs, int M, int N, int N1) {
    if (u < 1 || n_cs < 1) throw invalid_root_error("max_codes_per_root: bad root or step");
    if (static_cast<long long>(n_cs) * u * N < static_cast<long long>(M) * N1)
        throw bound_violation_error("max_codes_per_root: n_cs u N/M < N1");
    long long from_bound = 1 + static_cast<long long>(M) * (N - N1) / (static_cast<long long>(N) * n_cs * u);
    long long from_shift = M / n_cs;  // cyclic-separation limit of the shift grid
    return static_cast<int>(std::min(from_bound, from_shift));
}

int max_codes_per_root(int u, int n_cs, const SystemConfig& cfg) {
    return max_codes_per_root(u, n_cs, cfg.M, cfg.N, cfg.N1);
}

DesignOutput design_cra(int u, int n_hat_cs, int G, const SystemConfig& cfg) {
    check_root(u, cfg.M);
    if (n_hat_cs < 1) throw invalid_config_error("design_cra: n_hat_cs must be >= 1");
    if (G < 1) throw invalid_config_error("design_cra: G must be >= 1");
    int capacity = cfg.M / n_hat_cs;
    if (G > capacity)
        throw capacity_error("design_cra: requested " + std::to_string(G) + " codes, root capacity is " +
                             std::to_string(capacity));
    DesignOutput out;
    out.codes = build_code_matrix({{u, G}}, n_hat_cs, cfg.M);
    out.plan.method = DesignMethod::cra;
    out.plan.n_cs_used = n_hat_cs;
    out.plan.roots_used = {{u, G}};
    out.plan.ncs_by_root = {{u, n_hat_cs}};
    out.plan.G_requested = G;
    out.plan.G_delivered = G;
    out.plan.predicted_mu = G >= 2 ? coherence_closed_form(u, n_hat_cs, G, cfg.N1, cfg.M, cfg.N).mu
                                   : sinc_ratio_value(1.0, cfg.M, cfg.N);
    return out;
}

DesignOutput design_ccg_single(int u, int n_hat_cs, const SystemConfig& cfg) {
    check_root(u, cfg.M);
    int n_cs = min_ncs_for_root(u, n_hat_cs, cfg);
    int G = max_codes_per_root(u, n_cs, cfg);
    DesignOutput out;
    out.codes = build_code_matrix({{u, G}}, n_cs, cfg.M);
    out.plan.method = DesignMethod::ccg_single;
    out.plan.n_cs_used = n_cs;
    out.plan.roots_used = {{u, G}};
    out.plan.ncs_by_root = {{u, n_cs}};
    out.plan.G_requested = G;
    out.plan.G_delivered = G;
    out.plan.predicted_mu = G >= 2 ? coherence_closed_form(u, n_cs, G, cfg.N1, cfg.M, cfg.N).mu
                                   : sinc_ratio_value(1.0, cfg.M, cfg.N);
    return out;
}

DesignOutput design_ccg_multi(int G, int n_hat_cs, const SystemConfig& cfg, int threads) {
    if (G < 1) throw invalid_config_error("design_ccg_multi: G must be >= 1");
    std::vector<FamilyPlan> plan;
    std::vector<RootFamily> admitted;
    int delivered = 0;
    for (int u = 1; delivered < G; ++u) {
        if (u >= cfg.M)
            throw capacity_error("design_ccg_multi: roots exhausted after delivering " +
                                 std::to_string(delivered) + " of " + std::to_string(G) + " codes");
        int n_cs = min_ncs_for_root(u, n_hat_cs, cfg);
        int G_u = max_codes_per_root(u, n_cs, cfg);
        if (G_u < 1) continue;
        // Screen the full prospective family before generating from it.
        AdmissionCheck chk = multi_root_admissible(u, n_cs, G_u, admitted, cfg.N1, cfg.M, cfg.N, threads);
        if (!chk.admissible) continue;
        int take = std::min(G_u, G - delivered);
        plan.push_back({u, take, n_cs});
        admitted.push_back({u, n_cs, take});
        delivered += take;
    }

    DesignOutput out;
    out.codes = build_code_matrix(plan, cfg.M);
    out.plan.method = DesignMethod::ccg_multi;
    out.plan.n_cs_used = plan.front().n_cs;
    for (const FamilyPlan& f : plan) {
        out.plan.roots_used.push_back({f.u, f.count});
        out.plan.ncs_by_root[f.u] = f.n_cs;
    }
    out.plan.G_requested = G;
    out.plan.G_delivered = delivered;
    out.plan.predicted_mu = sinc_ratio_value(1.0, cfg.M, cfg.N);
    return out;
}

std::string design_plan_to_json_text(const DesignPlan& plan) {
    nlohmann::json doc;
    switch (plan.method) {
        case DesignMethod::cra: doc["method"] = "cra"; break;
        case DesignMethod::ccg_single: doc["method"] = "ccg-single"; break;
        case DesignMethod::ccg_multi: doc["method"] = "ccg-multi"; break;
    }
    doc["n_cs_used"] = plan.n_cs_used;
    nlohmann::json roots = nlohmann::json::array();
    for (const auto& [u, count] : plan.roots_used) roots.push_back({u, count});
    doc["roots_used"] = roots;
    nlohmann::json fam = nlohmann::json::array();
    for (const auto& [u, step] : plan.ncs_by_root) fam.push_back({u, step});
    doc["ncs_by_root"] = fam;
    doc["G_requested"] = plan.G_requested;
    doc["G_delivered"] = plan.G_delivered;
    doc["predicted_mu"] = plan.predicted_mu;
    return doc.dump(2);
}

std::string design_label(const DesignPlan& plan) {
    std::ostringstream ss;
    switch (plan.method) {
        case DesignMethod::cra: ss << "cra"; break;
        case DesignMethod::ccg_single: ss << "ccg1"; break;
        case DesignMethod::ccg_multi: ss << "ccgm"; break;
    }
    ss << "-u" << plan.roots_used.front().first << "-ncs" << plan.n_cs_used << "-G" << plan.G_delivered;
    return ss.str();
}

}  // namespace ius
