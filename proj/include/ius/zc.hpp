#pragma once

// Zadoff-Chu root sequences, cyclically shifted random-access codes, and the
// M x G code matrix with per-column provenance (root, shift index, step).
//
// All phases are reduced in exact integer arithmetic before hitting sin/cos,
// so entries are accurate to a few ulp even for long sequences.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ius/types.hpp"

namespace ius {

// Element k of the u-th root sequence: exp(-i pi u k(k+1) / M), 0 <= k < M.
CVec zc_root_sequence(int u, int M);

// Element k of the shifted code: Z_u((k + ell*n_cs) mod M). ell = 0 returns
// the root sequence itself; requires ell*n_cs < M.
CVec cyclic_shift_code(int u, int ell, int n_cs, int M);

// Single entry of the root sequence, exact integer phase reduction.
cplx zc_element(int u, long long k, int M);

struct CodeMatrix {
    int M = 0;
    int n_cs = 0;                   // step of the first root family
    CMat entries;                   // M x G, column per code
    std::vector<int> roots;         // per-column root u
    std::vector<int> shift_index;   // per-column shift count within its family
    std::map<int, int> ncs_by_root; // step per family (multi-root plans may differ)

    int G() const { return entries.cols; }
    int family_ncs(int u) const { return ncs_by_root.at(u); }
    // Cyclic shift of column c in samples.
    int shift_offset(int c) const { return shift_index[c] * family_ncs(roots[c]); }
};

// One family per plan entry: (root u, code count), all with the same step.
// Requires count * n_cs <= M per family so shifts stay cyclically separated.
CodeMatrix build_code_matrix(const std::vector<std::pair<int, int>>& root_plan, int n_cs, int M);

// Same, with an explicit step per family.
struct FamilyPlan {
    int u = 0;
    int count = 0;
    int n_cs = 0;
};
CodeMatrix build_code_matrix(const std::vector<FamilyPlan>& plan, int M);

std::string code_matrix_to_json_text(const CodeMatrix& codes);
CodeMatrix code_matrix_from_json_text(const std::string& text);

}  // namespace ius
