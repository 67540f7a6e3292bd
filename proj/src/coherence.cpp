#include "ius/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include <Eigen/Dense>
#include <json.hpp>

#include "ius/parallel.hpp"

namespace ius {

namespace {

inline long long mod_pos(long long x, long long m) {
    long long r = x % m;
    return r < 0 ? r + m : r;
}

inline long long floor_div(long long a, long long b) {
    long long q = a / b, r = a % b;
    return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

using EMat = Eigen::MatrixXcd;
using EMap = Eigen::Map<const EMat>;

EMap as_eigen(const CMat& m) { return EMap(m.data.data(), m.rows, m.cols); }

// Honest inner product of two dictionary columns, normalized.
double normalized_dot(const Dictionary& dict, int block_i, int col_i, int block_j, int col_j) {
    const cplx* a = dict.blocks[block_i].entries.col(col_i);
    const cplx* b = dict.blocks[block_j].entries.col(col_j);
    cplx acc(0.0, 0.0);
    double na = 0.0, nb = 0.0;
    for (int q = 0; q < dict.M; ++q) {
        acc += std::conj(a[q]) * b[q];
        na += std::norm(a[q]);
        nb += std::norm(b[q]);
    }
    return std::abs(acc) / std::sqrt(na * nb);
}

struct MaxTracker {
    double mu = -1.0;
    long long i = 0, j = 0;

    void offer(double value, long long fi, long long fj) {
        if (fi > fj) std::swap(fi, fj);
        if (value > mu || (value == mu && std::make_pair(fi, fj) < std::make_pair(i, j))) {
            mu = value;
            i = fi;
            j = fj;
        }
    }
    void merge(const MaxTracker& other) {
        if (other.mu >= 0.0) offer(other.mu, other.i, other.j);
    }
};

struct Family {
    int u = 0;
    int n_cs = 0;
    std::vector<int> block_ids;  // dictionary block indices, plan order
};

std::vector<Family> group_families(const Dictionary& dict) {
    std::vector<Family> fams;
    for (int b = 0; b < dict.G; ++b) {
        int u = dict.blocks[b].root;
        auto it = std::find_if(fams.begin(), fams.end(), [u](const Family& f) { return f.u == u; });
        if (it == fams.end()) {
            fams.push_back({u, dict.ncs_by_root.count(u) ? dict.ncs_by_root.at(u) : dict.n_cs_base, {b}});
        } else {
            it->block_ids.push_back(b);
        }
    }
    return fams;
}

}  // namespace

SincRatio sinc_ratio(double r, int M, int N) {
    if (M <= 0 || N <= 0) throw invalid_config_error("sinc_ratio: M and N must be positive");
    if (r == 0.0) return {1.0, false};
    double q = r / static_cast<double>(N);
    if (q == std::floor(q)) return {0.0, true};  // raw 0/0 form; periodic continuation is 1
    double num = std::sin(M_PI * r * M / N);
    double den = static_cast<double>(M) * std::sin(M_PI * r / N);
    return {std::abs(num / den), false};
}

double sinc_ratio_value(double r, int M, int N) { return sinc_ratio(r, M, N).value; }

namespace {

struct ZetaResult {
    long long num = 0;  // zeta = num / M
    int a = 0;          // attaining l - m
    int b = 0;          // attaining p - k
};

ZetaResult zeta_scan(int u, int n_cs, int G, int N1, int M, int N) {
    if (G < 2) throw invalid_config_error("zeta: needs at least two codes");
    if (N1 < 1 || M < 1 || N < 1 || n_cs < 1 || u < 1) throw invalid_config_error("zeta: bad parameters");
    const long long nm = static_cast<long long>(N) * M;
    const long long beta_num = static_cast<long long>(n_cs) * u * N;  // beta = beta_num / M
    ZetaResult best;
    best.num = std::numeric_limits<long long>::max();
    for (int a = 1; a <= G - 1; ++a) {
        for (int b = -(N1 - 1); b <= N1 - 1; ++b) {
            long long v = mod_pos(beta_num * a + static_cast<long long>(b) * M, nm);
            // (a, b) attains v; (-a, -b) attains nm - v.
            if (v < best.num) best = {v, a, b};
            long long w = v == 0 ? 0 : nm - v;
            if (w < best.num) best = {w, -a, -b};
        }
    }
    return best;
}

}  // namespace

double zeta(int u, int n_cs, int G, int N1, int M, int N) {
    return static_cast<double>(zeta_scan(u, n_cs, G, N1, M, N).num) / static_cast<double>(M);
}

ClosedFormMu coherence_closed_form(int u, int n_cs, int G, int N1, int M, int N) {
    ClosedFormMu out;
    out.zeta = zeta(u, n_cs, G, N1, M, N);
    out.assumptions_hold = (M >= M_PI * std::sqrt(2.0)) && (2 * M <= N);
    double g = std::min(1.0, out.zeta);
    out.mu = sinc_ratio_value(g, M, N);
    return out;
}

CoherenceReport mutual_coherence_brute(const CMat& matrix) {
    const int T = matrix.cols;
    if (T < 2) throw invalid_config_error("mutual_coherence_brute: need at least two columns");
    std::vector<double> norms(T);
    for (int c = 0; c < T; ++c) {
        norms[c] = col_norm(matrix, c);
        if (norms[c] == 0.0)
            throw degenerate_column_error("mutual_coherence_brute: zero column " + std::to_string(c));
    }
    EMap a = as_eigen(matrix);
    MaxTracker best;
    const int stripe = 256;
    for (int j0 = 0; j0 < T; j0 += stripe) {
        int w = std::min(stripe, T - j0);
        EMat g = a.adjoint() * a.middleCols(j0, w);  // T x w
        for (int jj = 0; jj < w; ++jj) {
            int j = j0 + jj;
            for (int i = 0; i < j; ++i)
                best.offer(std::abs(g(i, jj)) / (norms[i] * norms[j]), i, j);
        }
    }
    CoherenceReport rep;
    rep.mu = best.mu;
    rep.argmax_pair = {best.i, best.j};
    rep.method = CoherenceMethod::brute_force;
    return rep;
}

double block_coherence(const CMat& B, const CMat& D) {
    if (B.rows != D.rows) throw invalid_config_error("block_coherence: row mismatch");
    for (int c = 0; c < B.cols; ++c)
        if (col_norm(B, c) == 0.0) throw degenerate_column_error("block_coherence: zero column in B");
    for (int c = 0; c < D.cols; ++c)
        if (col_norm(D, c) == 0.0) throw degenerate_column_error("block_coherence: zero column in D");
    EMat g = as_eigen(B).adjoint() * as_eigen(D);
    double mu = 0.0;
    for (int j = 0; j < D.cols; ++j)
        for (int i = 0; i < B.cols; ++i)
            mu = std::max(mu, std::abs(g(i, j)) / (col_norm(B, i) * col_norm(D, j)));
    return mu;
}

double cross_root_magnitude_diff(int u1, int u2, int sigma_l, int sigma_m, int col_diff, int M, int N) {
    if (u1 == u2)
        throw wrong_operation_error("cross_root_magnitude: equal roots, use the single-root path");
    const long long w = static_cast<long long>(u2) - u1;

    // theta = 1/2 + (u2 sigma_m - u1 sigma_l + col_diff M / N) / (u2 - u1),
    // kept as an exact rational Tnum / Tden.
    long long delta_num = static_cast<long long>(N) * (static_cast<long long>(u2) * sigma_m -
                                                       static_cast<long long>(u1) * sigma_l) +
                          static_cast<long long>(col_diff) * M;
    long long tnum = static_cast<long long>(N) * w + 2 * delta_num;
    long long tden = 2 * static_cast<long long>(N) * w;
    if (tden < 0) {
        tnum = -tnum;
        tden = -tden;
    }

    // Shifting theta by a multiple of M only rotates the sum by a constant
    // unit phase, so reduce the integer part into [0, M).
    long long ipart = floor_div(tnum, tden);
    long long fnum = tnum - ipart * tden;  // in [0, tden)
    long long ired = mod_pos(ipart, M);

    const double inv_m = 1.0 / static_cast<double>(M);
    const double frac = static_cast<double>(fnum) / static_cast<double>(tden);
    const double c_term = std::fmod(static_cast<double>(w) * frac * frac * inv_m, 2.0);

    double sum_re = 0.0, sum_im = 0.0;
    for (int n = 0; n < M; ++n) {
        long long base = n + ired;  // < 2M
        long long a_term = mod_pos(w % (2LL * M) * ((base * base) % (2LL * M)), 2LL * M);
        __int128 bprod = static_cast<__int128>(2 * w) * base * fnum;
        __int128 bmod = static_cast<__int128>(2LL * M) * tden;
        long long b_term = static_cast<long long>(((bprod % bmod) + bmod) % bmod);
        double phase = -M_PI * (static_cast<double>(a_term) * inv_m +
                                static_cast<double>(b_term) * inv_m / static_cast<double>(tden) + c_term);
        sum_re += std::cos(phase);
        sum_im += std::sin(phase);
    }
    return std::sqrt(sum_re * sum_re + sum_im * sum_im) * inv_m;
}

double cross_root_magnitude(int u1, int u2, int ell, int m, int p, int k, int n_cs, const SystemConfig& cfg) {
    if (ell < 1 || m < 1 || p < 1 || k < 1)
        throw invalid_config_error("cross_root_magnitude: indices are 1-based");
    return cross_root_magnitude_diff(u1, u2, (ell - 1) * n_cs, (m - 1) * n_cs, p - k, cfg.M, cfg.N);
}

AdmissionCheck multi_root_admissible(int u2, int ncs_u2, int G_u2, const std::vector<RootFamily>& existing,
                                     int N1, int M, int N, int threads) {
    AdmissionCheck out;
    out.threshold = sinc_ratio_value(1.0, M, N) + 1e-12;
    if (existing.empty() || G_u2 <= 0) return out;

    struct Pair {
        int u1, ncs1, s_l, s_m;
    };
    std::vector<Pair> pairs;
    for (const RootFamily& f : existing) {
        if (f.u == u2) throw wrong_operation_error("multi_root_admissible: candidate already present");
        for (int sl = 0; sl < f.count; ++sl)
            for (int sm = 0; sm < G_u2; ++sm) pairs.push_back({f.u, f.n_cs, sl, sm});
    }

    std::vector<double> worker_max(static_cast<size_t>(std::max(threads, 1)), 0.0);
    parallel_for(static_cast<long long>(pairs.size()), threads, [&](long long idx, int tid) {
        const Pair& pr = pairs[static_cast<size_t>(idx)];
        double local = worker_max[tid];
        for (int b = -(N1 - 1); b <= N1 - 1; ++b) {
            double mag =
                cross_root_magnitude_diff(pr.u1, u2, pr.s_l * pr.ncs1, pr.s_m * ncs_u2, b, M, N);
            if (mag > local) local = mag;
        }
        worker_max[tid] = local;
    });
    for (double v : worker_max) out.max_magnitude = std::max(out.max_magnitude, v);
    out.admissible = out.max_magnitude <= out.threshold;
    return out;
}

namespace {

// Family-internal coherence via entry dots collapsed over shift/column
// difference classes; returns overall family max plus the intra-block value.
struct FamilyScan {
    MaxTracker all;
    MaxTracker cross_shift;  // distinct codes within the family
    double intra_block = -1.0;
};

FamilyScan scan_family_brute(const Dictionary& dict, const Family& fam) {
    FamilyScan out;
    const int n1 = dict.N1;
    const int first = fam.block_ids.front();
    const long long base_first = static_cast<long long>(first) * n1;

    for (int b = 1; b <= n1 - 1; ++b) {
        double v = normalized_dot(dict, first, 0, first, b);
        out.all.offer(v, base_first, base_first + b);
        if (v > out.intra_block) out.intra_block = v;
    }

    std::set<long long> seen;  // shift-offset differences already measured
    for (size_t i = 0; i < fam.block_ids.size(); ++i) {
        for (size_t j = i + 1; j < fam.block_ids.size(); ++j) {
            int bi = fam.block_ids[i], bj = fam.block_ids[j];
            long long dsig = dict.blocks[bj].shift_offset - dict.blocks[bi].shift_offset;
            if (!seen.insert(dsig).second) continue;
            for (int b = -(n1 - 1); b <= n1 - 1; ++b) {
                int k0 = b >= 0 ? 0 : -b;
                int p0 = k0 + b;
                double v = normalized_dot(dict, bi, k0, bj, p0);
                long long fi = static_cast<long long>(bi) * n1 + k0;
                long long fj = static_cast<long long>(bj) * n1 + p0;
                out.all.offer(v, fi, fj);
                out.cross_shift.offer(v, fi, fj);
            }
        }
    }
    return out;
}

}  // namespace

CoherenceReport full_dictionary_coherence(const Dictionary& dict, CoherenceMethod method, int threads) {
    (void)threads;
    std::vector<Family> fams = group_families(dict);
    CoherenceReport rep;
    rep.method = method;
    rep.per_block_mu.assign(dict.G, 0.0);
    MaxTracker overall;
    MaxTracker cross_like;

    if (method == CoherenceMethod::brute_force) {
        for (const Family& fam : fams) {
            FamilyScan fs = scan_family_brute(dict, fam);
            overall.merge(fs.all);
            cross_like.merge(fs.cross_shift);
            for (int b : fam.block_ids) rep.per_block_mu[b] = fs.intra_block;
        }
        // Cross-family pairs, collapsed over the phase-slope invariant.
        for (size_t f1 = 0; f1 < fams.size(); ++f1) {
            for (size_t f2 = f1 + 1; f2 < fams.size(); ++f2) {
                std::set<long long> seen;
                for (int bi : fams[f1].block_ids) {
                    for (int bj : fams[f2].block_ids) {
                        long long key = static_cast<long long>(fams[f2].u) * dict.blocks[bj].shift_offset -
                                        static_cast<long long>(fams[f1].u) * dict.blocks[bi].shift_offset;
                        if (!seen.insert(key).second) continue;
                        for (int b = -(dict.N1 - 1); b <= dict.N1 - 1; ++b) {
                            int k0 = b >= 0 ? 0 : -b;
                            int p0 = k0 + b;
                            double v = normalized_dot(dict, bi, k0, bj, p0);
                            long long fi = static_cast<long long>(bi) * dict.N1 + k0;
                            long long fj = static_cast<long long>(bj) * dict.N1 + p0;
                            overall.offer(v, fi, fj);
                            cross_like.offer(v, fi, fj);
                        }
                    }
                }
            }
        }
    } else {
        bool assumptions = true;
        for (const Family& fam : fams) {
            const int gf = static_cast<int>(fam.block_ids.size());
            const int first = fam.block_ids.front();
            const long long base = static_cast<long long>(first) * dict.N1;
            double intra = -1.0;
            int intra_b = 1;
            for (int b = 1; b <= dict.N1 - 1; ++b) {
                double v = sinc_ratio_value(static_cast<double>(b), dict.M, dict.N);
                if (v > intra) {
                    intra = v;
                    intra_b = b;
                }
            }
            for (int b : fam.block_ids) rep.per_block_mu[b] = intra;
            if (gf >= 2) {
                ClosedFormMu cf = coherence_closed_form(fam.u, fam.n_cs, gf, dict.N1, dict.M, dict.N);
                assumptions = assumptions && cf.assumptions_hold;
                if (cf.zeta < 1.0) {
                    ZetaResult zr = zeta_scan(fam.u, fam.n_cs, gf, dict.N1, dict.M, dict.N);
                    int a = std::abs(zr.a), b = zr.a > 0 ? zr.b : -zr.b;
                    int k0 = b >= 0 ? 0 : -b;
                    long long fi = base + k0;
                    long long fj = static_cast<long long>(fam.block_ids[a]) * dict.N1 + k0 + b;
                    overall.offer(cf.mu, fi, fj);
                    cross_like.offer(cf.mu, fi, fj);
                } else {
                    overall.offer(cf.mu, base + intra_b - 1, base + intra_b);
                }
            }
            overall.offer(intra, base, base + intra_b);
        }
        for (size_t f1 = 0; f1 < fams.size(); ++f1) {
            for (size_t f2 = f1 + 1; f2 < fams.size(); ++f2) {
                std::set<long long> seen;
                for (int bi : fams[f1].block_ids) {
                    for (int bj : fams[f2].block_ids) {
                        long long key = static_cast<long long>(fams[f2].u) * dict.blocks[bj].shift_offset -
                                        static_cast<long long>(fams[f1].u) * dict.blocks[bi].shift_offset;
                        if (!seen.insert(key).second) continue;
                        for (int b = -(dict.N1 - 1); b <= dict.N1 - 1; ++b) {
                            double v = cross_root_magnitude_diff(fams[f1].u, fams[f2].u,
                                                                 dict.blocks[bi].shift_offset,
                                                                 dict.blocks[bj].shift_offset, b, dict.M, dict.N);
                            int k0 = b >= 0 ? 0 : -b;
                            long long fi = static_cast<long long>(bi) * dict.N1 + k0;
                            long long fj = static_cast<long long>(bj) * dict.N1 + k0 + b;
                            overall.offer(v, fi, fj);
                            cross_like.offer(v, fi, fj);
                        }
                    }
                }
            }
        }
        rep.lemma_assumptions_hold = assumptions;
    }

    rep.mu = overall.mu;
    rep.argmax_pair = {overall.i, overall.j};
    rep.cross_block_max = cross_like.mu >= 0.0 ? cross_like.mu : -1.0;
    return rep;
}

std::string coherence_report_to_json_text(const CoherenceReport& rep) {
    nlohmann::json doc;
    doc["mu"] = rep.mu;
    doc["method"] = rep.method == CoherenceMethod::brute_force ? "brute_force" : "closed_form";
    doc["argmax_pair"] = {rep.argmax_pair.first, rep.argmax_pair.second};
    if (!rep.per_block_mu.empty()) doc["per_block_mu"] = rep.per_block_mu;
    if (rep.cross_block_max >= 0.0) doc["cross_block_max"] = rep.cross_block_max;
    doc["lemma_assumptions_hold"] = rep.lemma_assumptions_hold;
    return doc.dump(2);
}

}  // namespace ius
