#pragma once

// Mutual and block coherence of the PRACH dictionary: exact brute-force
// scans, the single-root closed form built on the Dirichlet/sinc ratio, the
// zeta lattice statistic, cross-root correlation magnitudes (quadratic Gauss
// sums), and the admission test used by the multi-root code designer.

#include <string>
#include <utility>
#include <vector>

#include "ius/dictionary.hpp"
#include "ius/types.hpp"

namespace ius {

struct SincRatio {
    double value = 0.0;
    // Set when r/N is a nonzero integer, where the raw ratio degenerates to
    // 0/0; periodicity assigns 1 there, the raw formula returns 0.
    bool degenerate = false;
};

// |sinc(r M / N) / sinc(r / N)| with sinc(x) = sin(pi x)/(pi x), sinc(0) = 1.
SincRatio sinc_ratio(double r, int M, int N);
double sinc_ratio_value(double r, int M, int N);

// Minimum wrapped lattice distance over code-pair/column-pair differences:
// min over l != m in {1..G}, p, k in {1..N1} of
//   (n_cs u N / M (l - m) + (p - k)) mod N, mapped into [0, N).
// Evaluated in exact integer arithmetic.
double zeta(int u, int n_cs, int G, int N1, int M, int N);

struct ClosedFormMu {
    double mu = 0.0;
    double zeta = 0.0;
    bool assumptions_hold = true;  // pi*sqrt(2) <= M <= N/2
};

// Single-root dictionary coherence S(min{1, zeta(u)}).
ClosedFormMu coherence_closed_form(int u, int n_cs, int G, int N1, int M, int N);

enum class CoherenceMethod { brute_force, closed_form };

struct CoherenceReport {
    double mu = 0.0;
    std::pair<long long, long long> argmax_pair{0, 0};
    CoherenceMethod method = CoherenceMethod::brute_force;
    std::vector<double> per_block_mu;  // optional, per dictionary block
    double cross_block_max = -1.0;     // optional, -1 when not computed
    bool lemma_assumptions_hold = true;
};

// Exact max over all distinct column pairs; structure-oblivious oracle path.
CoherenceReport mutual_coherence_brute(const CMat& matrix);

// Max normalized correlation between one column of B and one of D.
double block_coherence(const CMat& B, const CMat& D);

// (1/M) |E_l(:,k)^H E_m(:,p)| for codes from two distinct roots, evaluated as
// a quadratic Gauss sum; sigma_l/sigma_m are cyclic shifts in samples and
// col_diff = p - k.
double cross_root_magnitude_diff(int u1, int u2, int sigma_l, int sigma_m, int col_diff, int M, int N);

// Same with 1-based code indices l, m inside root families sharing one n_cs
// and 1-based column indices p, k.
double cross_root_magnitude(int u1, int u2, int ell, int m, int p, int k, int n_cs, const SystemConfig& cfg);

struct RootFamily {
    int u = 0;
    int n_cs = 0;
    int count = 0;  // codes delivered, shifts 0, n_cs, ..., (count-1) n_cs
};

struct AdmissionCheck {
    bool admissible = true;
    double max_magnitude = 0.0;
    double threshold = 0.0;  // S(1) plus absolute slack
};

// Sufficient cross-root screen: candidate root u2 with G_u2 prospective codes
// is admitted when every cross magnitude against the existing families stays
// at or below S(1).
AdmissionCheck multi_root_admissible(int u2, int ncs_u2, int G_u2, const std::vector<RootFamily>& existing,
                                     int N1, int M, int N, int threads = 1);

// Whole-dictionary coherence: per root family combined with the cross-family
// maximum. brute_force walks real entry inner products (collapsed over
// index-difference classes); closed_form combines the single-root lemma with
// the Gauss-sum cross formula.
CoherenceReport full_dictionary_coherence(const Dictionary& dict, CoherenceMethod method, int threads = 1);

std::string coherence_report_to_json_text(const CoherenceReport& rep);

}  // namespace ius
