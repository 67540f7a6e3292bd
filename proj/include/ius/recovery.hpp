#pragma once

// Sparse recovery on the PRACH dictionary: an accelerated proximal-gradient
// Lasso solver (monotone variant, complex soft-thresholding), a block-greedy
// orthogonal matching pursuit baseline, and the rule that turns a sparse
// estimate into detected codes, delays and received powers.

#include <map>
#include <vector>

#include "ius/dictionary.hpp"
#include "ius/types.hpp"

namespace ius {

struct LassoOptions {
    double lambda = 0.0;
    double tol = 1e-6;        // relative objective decrease
    int max_iter = 2000;
    double op_norm_sq = 0.0;  // largest squared singular value; <= 0 recomputes
};

struct LassoResult {
    CVec x;
    int iterations = 0;
    bool converged = false;
    double objective = 0.0;
};

// argmin over complex z of lambda ||z||_1 + 1/2 ||A z - y||_2^2.
LassoResult lasso_solve(const Dictionary& dict, const CVec& y, const LassoOptions& opts);

// sqrt(8 sigma_e^2 (1 + alpha) ln(G N1)).
double default_lambda(double sigma_e_sq, int G, int N1, double alpha = 4.0);

// Karush-Kuhn-Tucker residuals of a candidate solution; used by tests.
struct KktResidual {
    double max_correlation = 0.0;   // max_t |(A^H (A x - y))_t|
    double direction_error = 0.0;   // active set: |(A^H (y - A x))_t - lambda x_t/|x_t||, worst case
};
KktResidual lasso_kkt_residual(const Dictionary& dict, const CVec& y, const CVec& x, double lambda);

struct ExtractOptions {
    double tau_sup = 0.1;   // support threshold, relative to max block norm
    double tau_tap = 0.05;  // first-tap threshold, relative to block peak
    double lambda = 0.0;    // used for the absolute support floor 10 lambda / M
    // Delays are physically bounded by the cell radius: a block whose first
    // surviving tap lands beyond D cannot be a terminal in this cell - it is
    // the wrapped image of another code's channel - and is discarded.
    // Disable by setting false.
    bool enforce_max_delay = true;
};

struct RecoveryResult {
    CVec x_hat;
    std::vector<int> detected;        // sorted 0-based code indices
    std::map<int, int> delays;        // per detected code
    std::map<int, double> powers;     // per detected code
    int solver_iterations = 0;
    double objective = 0.0;
    bool converged = true;
    bool rank_deficient = false;
};

RecoveryResult extract_parameters(const CVec& x_hat, const Dictionary& dict, const ExtractOptions& opts);

struct OmpOptions {
    int max_blocks = 1;
    double tol = 1e-6;  // relative residual-energy decrease
};

RecoveryResult omp_baseline(const Dictionary& dict, const CVec& y, const OmpOptions& opts,
                            const ExtractOptions& extract = {});

}  // namespace ius
