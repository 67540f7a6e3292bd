#pragma once

// Per-code sensing blocks and the stacked PRACH dictionary A = [E_1 ... E_G].
//
// Every block factors as diag(code modulator) * W where W is the shared
// M x N1 slice of the N-point DFT matrix restricted to the PRACH rows.
// The matvec/adjoint operators exploit that factorization; dense storage is
// kept per block so brute-force coherence scans and oracle tests can walk
// real entries.

#include <map>
#include <string>
#include <vector>

#include "ius/system_config.hpp"
#include "ius/types.hpp"
#include "ius/zc.hpp"

namespace ius {

struct DictionaryBlock {
    int code_index = 0;    // 0-based column of the code matrix
    int root = 0;          // u
    int shift_offset = 0;  // cyclic shift in samples (shift_index * n_cs)
    double phi = 0.0;      // known scalar phase of the code, radians
    CVec modulator;        // length M, diag(Z_u) * diag(p)
    CMat entries;          // M x N1
};

// Per-subcarrier phase progression tied to the code's cyclic shift;
// ell is the 1-based code index within its root family, ell = 1 is all-ones.
CVec phase_vector(int u, int ell, int n_cs, const SystemConfig& cfg);

// Known scalar phase of code (root u, cyclic shift sigma samples).
double code_phase(int u, int sigma, int j1, int M);

struct Dictionary {
    SystemConfig cfg;
    int M = 0, N = 0, N1 = 0, G = 0;
    int n_cs_base = 0;
    std::map<int, int> ncs_by_root;
    std::vector<DictionaryBlock> blocks;
    CMat w;  // shared M x N1 partial-DFT factor

    long long flat_cols() const { return static_cast<long long>(G) * N1; }

    // y = A x, y length M, x length G*N1. Skips zero entries of x.
    void matvec(const cplx* x, cplx* y) const;
    // g = A^H r, g length G*N1, r length M.
    void adjoint(const cplx* r, cplx* g) const;

    CVec matvec(const CVec& x) const;
    CVec adjoint(const CVec& r) const;

    cplx entry(int q, long long t) const;      // flat column t, row q
    void column(long long t, cplx* out) const;  // materialize flat column t

    CMat dense() const;  // M x (G*N1)

    // Little-endian binary dump: 8 int64 header (M, G, N1, N, j1, n_cs, 0, 0)
    // then row-major float64 (re, im) pairs.
    void dump_flat(const std::string& path) const;

    // Single-root dictionaries have a Gram matrix that depends only on the
    // (code, column) index differences; the solver uses the collapsed kernel
    // to apply A^H A to sparse iterates far cheaper than two operator passes.
    bool has_gram_kernel() const { return !gram_re_.empty(); }
    void gram_matvec(const cplx* v, cplx* out) const;

  private:
    friend Dictionary assemble(const CodeMatrix&, const SystemConfig&);
    std::vector<double> w_re_, w_im_;      // column-major M*N1
    std::vector<double> mod_re_, mod_im_;  // column-major M*G
    std::vector<double> gram_re_, gram_im_;  // (2G-1) x (2N1-1), b axis flipped
};

DictionaryBlock build_block(int code_index, const CodeMatrix& codes, const SystemConfig& cfg);

Dictionary assemble(const CodeMatrix& codes, const SystemConfig& cfg);

// Largest squared singular value by power iteration on A^H A.
double dictionary_op_norm_sq(const Dictionary& dict, int iterations = 50);

}  // namespace ius
