#include "ius/zc.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace ius {

namespace {

// exp(-i pi t / M) with t already reduced into [0, 2M).
inline cplx unit_phase(long long t, int M) {
    return std::polar(1.0, -M_PI * static_cast<double>(t) / static_cast<double>(M));
}

inline long long mod_pos(long long x, long long m) {
    long long r = x % m;
    return r < 0 ? r + m : r;
}

}  // namespace

cplx zc_element(int u, long long k, int M) {
    // Caller guarantees 0 <= k < M; the exponent's integer argument is
    // reduced mod 2M so the phase handed to sin/cos stays in [-2pi, 0].
    long long t = mod_pos(static_cast<long long>(u) % (2LL * M) * (k % (2LL * M)) % (2LL * M) * ((k + 1) % (2LL * M)),
                          2LL * M);
    return unit_phase(t, M);
}

CVec zc_root_sequence(int u, int M) {
    if (M <= 0) throw invalid_root_error("zc_root_sequence: M must be positive");
    if (u <= 0 || u >= M)
        throw invalid_root_error("zc_root_sequence: root must satisfy 0 < u < M, got u=" + std::to_string(u));
    CVec z(M);
    for (int k = 0; k < M; ++k) z[k] = zc_element(u, k, M);
    return z;
}

CVec cyclic_shift_code(int u, int ell, int n_cs, int M) {
    if (ell < 0) throw shift_overflow_error("cyclic_shift_code: shift count must be non-negative");
    long long offset = static_cast<long long>(ell) * n_cs;
    if (offset >= M)
        throw shift_overflow_error("cyclic_shift_code: ell*n_cs = " + std::to_string(offset) +
                                   " >= M = " + std::to_string(M));
    CVec root = zc_root_sequence(u, M);
    CVec out(M);
    for (int k = 0; k < M; ++k) out[k] = root[(k + offset) % M];
    return out;
}

CodeMatrix build_code_matrix(const std::vector<std::pair<int, int>>& root_plan, int n_cs, int M) {
    std::vector<FamilyPlan> plan;
    plan.reserve(root_plan.size());
    for (const auto& [u, count] : root_plan) plan.push_back({u, count, n_cs});
    return build_code_matrix(plan, M);
}

CodeMatrix build_code_matrix(const std::vector<FamilyPlan>& plan, int M) {
    int G = 0;
    for (const FamilyPlan& f : plan) {
        if (f.count < 1) throw invalid_root_error("build_code_matrix: family code count must be >= 1");
        if (f.n_cs < 1) throw invalid_root_error("build_code_matrix: n_cs must be >= 1");
        if (static_cast<long long>(f.count) * f.n_cs > M)
            throw shift_overflow_error("build_code_matrix: root " + std::to_string(f.u) + " needs " +
                                       std::to_string(static_cast<long long>(f.count) * f.n_cs) +
                                       " shift samples but M = " + std::to_string(M));
        G += f.count;
    }
    if (G < 1) throw invalid_root_error("build_code_matrix: empty plan");

    CodeMatrix cm;
    cm.M = M;
    cm.n_cs = plan.front().n_cs;
    cm.entries = CMat(M, G);
    cm.roots.resize(G);
    cm.shift_index.resize(G);

    int col = 0;
    for (const FamilyPlan& f : plan) {
        if (std::gcd(f.u, M) != 1)
            std::fprintf(stderr, "build_code_matrix: warning: gcd(u=%d, M=%d) != 1, shifted codes lose orthogonality\n",
                         f.u, M);
        CVec root = zc_root_sequence(f.u, M);
        for (int s = 0; s < f.count; ++s, ++col) {
            int offset = s * f.n_cs;
            cplx* dst = cm.entries.col(col);
            for (int k = 0; k < M; ++k) dst[k] = root[(k + offset) % M];
            cm.roots[col] = f.u;
            cm.shift_index[col] = s;
        }
        auto it = cm.ncs_by_root.find(f.u);
        if (it != cm.ncs_by_root.end() && it->second != f.n_cs)
            throw invalid_root_error("build_code_matrix: conflicting n_cs for root " + std::to_string(f.u));
        cm.ncs_by_root[f.u] = f.n_cs;
    }
    return cm;
}

std::string code_matrix_to_json_text(const CodeMatrix& codes) {
    nlohmann::json doc;
    doc["M"] = codes.M;
    doc["n_cs"] = codes.n_cs;
    nlohmann::json fam = nlohmann::json::array();
    for (const auto& [u, step] : codes.ncs_by_root) fam.push_back({u, step});
    doc["ncs_by_root"] = fam;
    nlohmann::json cols = nlohmann::json::array();
    for (int c = 0; c < codes.G(); ++c) {
        nlohmann::json col;
        col["u"] = codes.roots[c];
        col["shift"] = codes.shift_index[c];
        nlohmann::json vals = nlohmann::json::array();
        const cplx* p = codes.entries.col(c);
        for (int k = 0; k < codes.M; ++k) vals.push_back({p[k].real(), p[k].imag()});
        col["values"] = std::move(vals);
        cols.push_back(std::move(col));
    }
    doc["columns"] = std::move(cols);
    return doc.dump();
}

CodeMatrix code_matrix_from_json_text(const std::string& text) {
    nlohmann::json doc = nlohmann::json::parse(text);
    CodeMatrix cm;
    cm.M = doc.at("M").get<int>();
    cm.n_cs = doc.at("n_cs").get<int>();
    for (const auto& pair : doc.at("ncs_by_root")) cm.ncs_by_root[pair.at(0).get<int>()] = pair.at(1).get<int>();
    const auto& cols = doc.at("columns");
    int G = static_cast<int>(cols.size());
    cm.entries = CMat(cm.M, G);
    cm.roots.resize(G);
    cm.shift_index.resize(G);
    for (int c = 0; c < G; ++c) {
        const auto& col = cols.at(c);
        cm.roots[c] = col.at("u").get<int>();
        cm.shift_index[c] = col.at("shift").get<int>();
        const auto& vals = col.at("values");
        if (static_cast<int>(vals.size()) != cm.M)
            throw invalid_config_error("code matrix: column length mismatch");
        cplx* dst = cm.entries.col(c);
        for (int k = 0; k < cm.M; ++k)
            dst[k] = cplx(vals.at(k).at(0).get<double>(), vals.at(k).at(1).get<double>());
    }
    return cm;
}

}  // namespace ius
