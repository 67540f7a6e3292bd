#include "ius/dictionary.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace ius {

namespace {

inline long long mod_pos(long long x, long long m) {
    long long r = x % m;
    return r < 0 ? r + m : r;
}

// exp(-i 2 pi t / N) with integer t.
inline cplx unit_dft_phase(long long t, long long n) {
    return std::polar(1.0, -2.0 * M_PI * static_cast<double>(mod_pos(t, n)) / static_cast<double>(n));
}

}  // namespace

CVec phase_vector(int u, int ell, int n_cs, const SystemConfig& cfg) {
    if (ell < 1) throw invalid_config_error("phase_vector: code index is 1-based");
    long long sigma = static_cast<long long>(ell - 1) * n_cs;
    CVec p(cfg.M);
    for (int m = 1; m <= cfg.M; ++m) {
        // exp(-i 2 pi j_m u sigma / M), integer argument reduced mod M
        long long t = mod_pos(static_cast<long long>(cfg.subcarrier_index(m)) * u % cfg.M * (sigma % cfg.M), cfg.M);
        p[m - 1] = unit_dft_phase(t, cfg.M);
    }
    return p;
}

double code_phase(int u, int sigma, int j1, int M) {
    // pi u sigma (sigma + 1 - 2 j1) / M, reduced mod 2 pi via the integer argument.
    long long t = mod_pos(static_cast<long long>(u) * sigma % (2LL * M) * mod_pos(sigma + 1 - 2LL * j1, 2LL * M),
                          2LL * M);
    return M_PI * static_cast<double>(t) / static_cast<double>(M);
}

DictionaryBlock build_block(int code_index, const CodeMatrix& codes, const SystemConfig& cfg) {
    if (cfg.N1 > cfg.N) throw invalid_config_error("build_block: N1 must not exceed N");
    DictionaryBlock blk;
    blk.code_index = code_index;
    blk.root = codes.roots[code_index];
    blk.shift_offset = codes.shift_offset(code_index);
    blk.phi = code_phase(blk.root, blk.shift_offset, cfg.j1, cfg.M);

    const int M = cfg.M, N1 = cfg.N1;
    blk.modulator.resize(M);
    for (int q = 0; q < M; ++q) {
        // Z_u(q-1 in 1-based terms) times the shift phase at subcarrier j_q.
        long long t = mod_pos(static_cast<long long>(cfg.subcarrier_index(q + 1)) * blk.root % M *
                                  (static_cast<long long>(blk.shift_offset) % M),
                              M);
        blk.modulator[q] = zc_element(blk.root, q, M) * unit_dft_phase(t, M);
    }

    blk.entries = CMat(M, N1);
    for (int k = 0; k < N1; ++k) {
        cplx* dst = blk.entries.col(k);
        for (int q = 0; q < M; ++q) {
            long long t = static_cast<long long>(cfg.subcarrier_index(q + 1)) * k;
            dst[q] = blk.modulator[q] * unit_dft_phase(t, cfg.N);
        }
    }
    return blk;
}

Dictionary assemble(const CodeMatrix& codes, const SystemConfig& cfg) {
    auto violations = validate(cfg);
    if (!violations.empty()) {
        std::string msg = "assemble: invalid config:";
        for (const auto& v : violations) msg += " [" + v + "]";
        throw invalid_config_error(msg);
    }
    if (codes.M != cfg.M) throw invalid_config_error("assemble: code matrix M does not match config");

    Dictionary dict;
    dict.cfg = cfg;
    dict.M = cfg.M;
    dict.N = cfg.N;
    dict.N1 = cfg.N1;
    dict.G = codes.G();
    dict.n_cs_base = codes.n_cs;
    dict.ncs_by_root = codes.ncs_by_root;

    const int M = cfg.M, N1 = cfg.N1, G = dict.G;

    dict.w = CMat(M, N1);
    for (int k = 0; k < N1; ++k) {
        cplx* dst = dict.w.col(k);
        for (int q = 0; q < M; ++q)
            dst[q] = unit_dft_phase(static_cast<long long>(cfg.subcarrier_index(q + 1)) * k, cfg.N);
    }

    dict.blocks.reserve(G);
    for (int c = 0; c < G; ++c) dict.blocks.push_back(build_block(c, codes, cfg));

    dict.w_re_.resize(static_cast<size_t>(M) * N1);
    dict.w_im_.resize(static_cast<size_t>(M) * N1);
    for (int k = 0; k < N1; ++k) {
        const cplx* src = dict.w.col(k);
        double* wr = dict.w_re_.data() + static_cast<size_t>(k) * M;
        double* wi = dict.w_im_.data() + static_cast<size_t>(k) * M;
        for (int q = 0; q < M; ++q) {
            wr[q] = src[q].real();
            wi[q] = src[q].imag();
        }
    }
    dict.mod_re_.resize(static_cast<size_t>(M) * G);
    dict.mod_im_.resize(static_cast<size_t>(M) * G);
    for (int c = 0; c < G; ++c) {
        double* mr = dict.mod_re_.data() + static_cast<size_t>(c) * M;
        double* mi = dict.mod_im_.data() + static_cast<size_t>(c) * M;
        for (int q = 0; q < M; ++q) {
            mr[q] = dict.blocks[c].modulator[q].real();
            mi[q] = dict.blocks[c].modulator[q].imag();
        }
    }

    // Same root and uniform shift grid collapse the Gram matrix onto
    // (code difference, column difference) classes.
    bool single_root = true;
    for (int c = 1; c < G; ++c) {
        if (codes.roots[c] != codes.roots[0] ||
            codes.shift_index[c] != codes.shift_index[c - 1] + 1)
            single_root = false;
    }
    const long long kernel_cells = (2LL * G - 1) * (2LL * N1 - 1);
    if (single_root && G >= 1 && kernel_cells <= (1LL << 22)) {
        dict.gram_re_.assign(kernel_cells, 0.0);
        dict.gram_im_.assign(kernel_cells, 0.0);
        const int nb = 2 * N1 - 1;
        for (int a = -(G - 1); a <= G - 1; ++a) {
            int bi = a >= 0 ? 0 : -a;          // representative pair (bi, bj)
            int bj = bi + a;
            for (int b = -(N1 - 1); b <= N1 - 1; ++b) {
                int k0 = b >= 0 ? 0 : -b;
                int p0 = k0 + b;
                const cplx* ci = dict.blocks[bi].entries.col(k0);
                const cplx* cj = dict.blocks[bj].entries.col(p0);
                cplx acc(0, 0);
                for (int q = 0; q < M; ++q) acc += std::conj(ci[q]) * cj[q];
                // out index (l,k) reads slot b = p - k with the b axis flipped
                // so the inner k loop walks the table forward.
                size_t slot = static_cast<size_t>(a + G - 1) * nb + (N1 - 1 - b);
                dict.gram_re_[slot] = acc.real();
                dict.gram_im_[slot] = acc.imag();
            }
        }
    }
    return dict;
}

void Dictionary::gram_matvec(const cplx* v, cplx* out) const {
    if (!has_gram_kernel()) throw numeric_error("gram_matvec: kernel not available");
    const long long n = flat_cols();
    std::vector<double> or_(n, 0.0), oi_(n, 0.0);
    const int nb = 2 * N1 - 1;
    for (long long t = 0; t < n; ++t) {
        const double vr = v[t].real(), vi = v[t].imag();
        if (vr == 0.0 && vi == 0.0) continue;
        const int m = static_cast<int>(t / N1);
        const int p = static_cast<int>(t % N1);
        for (int l = 0; l < G; ++l) {
            // K(m - l, p - k) for k = 0..N1-1, flipped so reads are forward
            const size_t row = static_cast<size_t>(m - l + G - 1) * nb;
            const double* __restrict kr = gram_re_.data() + row + (N1 - 1 - p);
            const double* __restrict ki = gram_im_.data() + row + (N1 - 1 - p);
            double* __restrict pr = or_.data() + static_cast<size_t>(l) * N1;
            double* __restrict pi = oi_.data() + static_cast<size_t>(l) * N1;
            for (int k = 0; k < N1; ++k) {
                pr[k] += kr[k] * vr - ki[k] * vi;
                pi[k] += kr[k] * vi + ki[k] * vr;
            }
        }
    }
    for (long long t = 0; t < n; ++t) out[t] = cplx(or_[t], oi_[t]);
}

void Dictionary::matvec(const cplx* x, cplx* y) const {
    std::vector<double> tr(M), ti(M), yr(M, 0.0), yi(M, 0.0);
    for (int b = 0; b < G; ++b) {
        const cplx* xb = x + static_cast<size_t>(b) * N1;
        bool any = false;
        for (int k = 0; k < N1; ++k)
            if (xb[k].real() != 0.0 || xb[k].imag() != 0.0) {
                any = true;
                break;
            }
        if (!any) continue;

        std::fill(tr.begin(), tr.end(), 0.0);
        std::fill(ti.begin(), ti.end(), 0.0);
        for (int k = 0; k < N1; ++k) {
            const double xr = xb[k].real(), xi = xb[k].imag();
            if (xr == 0.0 && xi == 0.0) continue;
            const double* __restrict wr = w_re_.data() + static_cast<size_t>(k) * M;
            const double* __restrict wi = w_im_.data() + static_cast<size_t>(k) * M;
            double* __restrict ar = tr.data();
            double* __restrict ai = ti.data();
            for (int q = 0; q < M; ++q) {
                ar[q] += wr[q] * xr - wi[q] * xi;
                ai[q] += wr[q] * xi + wi[q] * xr;
            }
        }
        const double* __restrict mr = mod_re_.data() + static_cast<size_t>(b) * M;
        const double* __restrict mi = mod_im_.data() + static_cast<size_t>(b) * M;
        for (int q = 0; q < M; ++q) {
            yr[q] += mr[q] * tr[q] - mi[q] * ti[q];
            yi[q] += mr[q] * ti[q] + mi[q] * tr[q];
        }
    }
    for (int q = 0; q < M; ++q) y[q] = cplx(yr[q], yi[q]);
}

void Dictionary::adjoint(const cplx* r, cplx* g) const {
    std::vector<double> ur(M), ui(M);
    for (int b = 0; b < G; ++b) {
        const double* __restrict mr = mod_re_.data() + static_cast<size_t>(b) * M;
        const double* __restrict mi = mod_im_.data() + static_cast<size_t>(b) * M;
        for (int q = 0; q < M; ++q) {
            const double rr = r[q].real(), ri = r[q].imag();
            ur[q] = mr[q] * rr + mi[q] * ri;
            ui[q] = mr[q] * ri - mi[q] * rr;
        }
        cplx* gb = g + static_cast<size_t>(b) * N1;
        for (int k = 0; k < N1; ++k) {
            const double* __restrict wr = w_re_.data() + static_cast<size_t>(k) * M;
            const double* __restrict wi = w_im_.data() + static_cast<size_t>(k) * M;
            double sr = 0.0, si = 0.0;
            const double* __restrict pur = ur.data();
            const double* __restrict pui = ui.data();
            for (int q = 0; q < M; ++q) {
                sr += wr[q] * pur[q] + wi[q] * pui[q];
                si += wr[q] * pui[q] - wi[q] * pur[q];
            }
            gb[k] = cplx(sr, si);
        }
    }
}

CVec Dictionary::matvec(const CVec& x) const {
    if (static_cast<long long>(x.size()) != flat_cols())
        throw numeric_error("matvec: x has wrong length");
    CVec y(M);
    matvec(x.data(), y.data());
    return y;
}

CVec Dictionary::adjoint(const CVec& r) const {
    if (static_cast<int>(r.size()) != M) throw numeric_error("adjoint: r has wrong length");
    CVec g(flat_cols());
    adjoint(r.data(), g.data());
    return g;
}

cplx Dictionary::entry(int q, long long t) const {
    int b = static_cast<int>(t / N1);
    int k = static_cast<int>(t % N1);
    return blocks[b].entries(q, k);
}

void Dictionary::column(long long t, cplx* out) const {
    int b = static_cast<int>(t / N1);
    int k = static_cast<int>(t % N1);
    const cplx* src = blocks[b].entries.col(k);
    std::memcpy(out, src, sizeof(cplx) * M);
}

CMat Dictionary::dense() const {
    CMat a(M, static_cast<int>(flat_cols()));
    for (long long t = 0; t < flat_cols(); ++t) column(t, a.col(static_cast<int>(t)));
    return a;
}

void Dictionary::dump_flat(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw numeric_error("dump_flat: cannot open '" + path + "'");
    int64_t header[8] = {M, G, N1, N, cfg.j1, n_cs_base, 0, 0};
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    std::vector<double> row(2 * flat_cols());
    for (int q = 0; q < M; ++q) {
        for (long long t = 0; t < flat_cols(); ++t) {
            cplx z = entry(q, t);
            row[2 * t] = z.real();
            row[2 * t + 1] = z.imag();
        }
        out.write(reinterpret_cast<const char*>(row.data()), sizeof(double) * row.size());
    }
    if (!out) throw numeric_error("dump_flat: write failed for '" + path + "'");
}

double dictionary_op_norm_sq(const Dictionary& dict, int iterations) {
    const long long n = dict.flat_cols();
    CVec v(n), av(dict.M), g(n);
    // Deterministic start vector with no special structure.
    for (long long t = 0; t < n; ++t)
        v[t] = std::polar(1.0, 0.7 * static_cast<double>(t % 977) + 0.13);
    double lambda = 0.0;
    for (int it = 0; it < iterations; ++it) {
        double nv = vec_norm(v);
        if (nv == 0.0) throw numeric_error("power iteration collapsed");
        for (auto& z : v) z /= nv;
        dict.matvec(v.data(), av.data());
        dict.adjoint(av.data(), g.data());
        lambda = vec_norm(g);  // Rayleigh-style estimate of sigma_max^2
        v.swap(g);
    }
    return lambda;
}

}  // namespace ius
