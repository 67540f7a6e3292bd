#include "ius/recovery.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "ius/simulate.hpp"

namespace ius {

namespace {

double l1_norm(const CVec& x) {
    double s = 0.0;
    for (const cplx& z : x) s += std::abs(z);
    return s;
}

double objective_value(const Dictionary& dict, const CVec& y, const CVec& x, double lambda, CVec& ax_buf) {
    dict.matvec(x.data(), ax_buf.data());
    double fit = 0.0;
    for (int q = 0; q < dict.M; ++q) fit += std::norm(ax_buf[q] - y[q]);
    return lambda * l1_norm(x) + 0.5 * fit;
}

inline cplx soft_threshold(const cplx& w, double thr) {
    double mag = std::abs(w);
    if (mag <= thr) return cplx(0.0, 0.0);
    return w * ((mag - thr) / mag);
}

void check_finite(const CVec& v, const char* what) {
    for (const cplx& z : v)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw numeric_error(std::string("lasso_solve: non-finite ") + what);
}

}  // namespace

double default_lambda(double sigma_e_sq, int G, int N1, double alpha) {
    if (sigma_e_sq <= 0.0) throw invalid_config_error("default_lambda: sigma_e^2 must be positive");
    return std::sqrt(8.0 * sigma_e_sq * (1.0 + alpha) * std::log(static_cast<double>(G) * N1));
}

LassoResult lasso_solve(const Dictionary& dict, const CVec& y, const LassoOptions& opts) {
    if (opts.lambda <= 0.0) throw invalid_config_error("lasso_solve: lambda must be positive");
    if (static_cast<int>(y.size()) != dict.M) throw numeric_error("lasso_solve: y has wrong length");
    check_finite(y, "observation");

    const long long n = dict.flat_cols();
    double lip = opts.op_norm_sq > 0.0 ? opts.op_norm_sq : dictionary_op_norm_sq(dict);

    CVec x(n, cplx(0, 0)), x_prev(n, cplx(0, 0)), v(n, cplx(0, 0)), z(n), grad(n);
    CVec av(dict.M), ax(dict.M), aty(n);
    dict.adjoint(y.data(), aty.data());

    // Dense iterates pay for two operator passes; once the support thins out
    // the collapsed Gram kernel applies A^H A directly to the sparse iterate.
    const long long kernel_cutoff = dict.has_gram_kernel() ? dict.M : 0;

    LassoResult res;
    double f_x = objective_value(dict, y, x, opts.lambda, ax);
    double t_k = 1.0;

    // Stall detection looks at the objective drop across a short window;
    // per-iteration drops of an accelerated method say little on their own.
    constexpr int kWindow = 10;
    double window_f[kWindow];
    int accepted = 0;

    for (int it = 1; it <= opts.max_iter; ++it) {
        const double step = 1.0 / lip;
        const double thr = opts.lambda * step;

        long long nnz = 0;
        for (long long t = 0; t < n; ++t)
            if (v[t].real() != 0.0 || v[t].imag() != 0.0) ++nnz;

        if (nnz <= kernel_cutoff && dict.has_gram_kernel()) {
            dict.gram_matvec(v.data(), grad.data());
            for (long long t = 0; t < n; ++t) grad[t] -= aty[t];
        } else {
            dict.matvec(v.data(), av.data());
            for (int q = 0; q < dict.M; ++q) av[q] -= y[q];
            dict.adjoint(av.data(), grad.data());
        }
        for (long long t = 0; t < n; ++t) z[t] = soft_threshold(v[t] - step * grad[t], thr);

        double f_z = objective_value(dict, y, z, opts.lambda, ax);
        if (!std::isfinite(f_z)) throw numeric_error("lasso_solve: objective became non-finite");
        res.iterations = it;

        if (f_z > f_x) {
            // Momentum overshot: restart acceleration from the best iterate.
            // A rejected plain step can only mean the curvature estimate is
            // low, so stiffen it then.
            if (t_k == 1.0) lip *= 1.5;
            v = x;
            t_k = 1.0;
            continue;
        }

        x_prev.swap(x);
        x = z;
        f_x = f_z;

        double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_k * t_k));
        for (long long t = 0; t < n; ++t)
            v[t] = x[t] + ((t_k - 1.0) / t_next) * (x[t] - x_prev[t]);
        t_k = t_next;

        window_f[accepted % kWindow] = f_x;
        ++accepted;
        if (accepted > kWindow) {
            double f_old = window_f[accepted % kWindow];  // oldest surviving entry
            if (f_old - f_x <= opts.tol * std::max(f_x, 1e-300)) {
                res.converged = true;
                break;
            }
        }
    }
    res.x = std::move(x);
    res.objective = f_x;
    return res;
}

KktResidual lasso_kkt_residual(const Dictionary& dict, const CVec& y, const CVec& x, double lambda) {
    CVec ax(dict.M), corr(dict.flat_cols());
    dict.matvec(x.data(), ax.data());
    for (int q = 0; q < dict.M; ++q) ax[q] -= y[q];
    dict.adjoint(ax.data(), corr.data());  // A^H (A x - y)

    KktResidual out;
    double peak = 0.0;
    for (const cplx& z : x) peak = std::max(peak, std::abs(z));
    for (long long t = 0; t < dict.flat_cols(); ++t) {
        out.max_correlation = std::max(out.max_correlation, std::abs(corr[t]));
        double mag = std::abs(x[t]);
        if (mag > 1e-6 * peak && mag > 0.0) {
            cplx want = lambda * x[t] / mag;  // (A^H (y - A x))_t at a fixed point
            out.direction_error = std::max(out.direction_error, std::abs(-corr[t] - want));
        }
    }
    return out;
}

RecoveryResult extract_parameters(const CVec& x_hat, const Dictionary& dict, const ExtractOptions& opts) {
    if (static_cast<long long>(x_hat.size()) != dict.flat_cols())
        throw numeric_error("extract_parameters: x_hat has wrong length");
    const int N1 = dict.N1;

    RecoveryResult res;
    res.x_hat = x_hat;

    std::vector<double> block_norm(dict.G, 0.0);
    double max_norm = 0.0;
    for (int b = 0; b < dict.G; ++b) {
        double s = 0.0;
        const cplx* xb = x_hat.data() + static_cast<size_t>(b) * N1;
        for (int k = 0; k < N1; ++k) s += std::norm(xb[k]);
        block_norm[b] = std::sqrt(s);
        max_norm = std::max(max_norm, block_norm[b]);
    }
    double floor_abs = dict.M > 0 ? 10.0 * opts.lambda / dict.M : 0.0;
    double tau = std::max(opts.tau_sup * max_norm, floor_abs);

    for (int b = 0; b < dict.G; ++b) {
        if (block_norm[b] <= tau || block_norm[b] == 0.0) continue;
        const cplx* xb = x_hat.data() + static_cast<size_t>(b) * N1;
        double peak = 0.0;
        for (int k = 0; k < N1; ++k) peak = std::max(peak, std::abs(xb[k]));
        int first = -1;
        for (int k = 0; k < N1; ++k)
            if (std::abs(xb[k]) > opts.tau_tap * peak) {
                first = k;
                break;
            }
        if (first < 0) continue;
        if (opts.enforce_max_delay && first > dict.cfg.D) continue;
        res.detected.push_back(b);
        res.delays[b] = first;
        CVec block(xb, xb + N1);
        res.powers[b] = received_power(block, dict.cfg);
    }
    return res;
}

RecoveryResult omp_baseline(const Dictionary& dict, const CVec& y, const OmpOptions& opts,
                            const ExtractOptions& extract) {
    if (opts.max_blocks < 1) throw invalid_config_error("omp_baseline: max_blocks must be >= 1");
    if (static_cast<int>(y.size()) != dict.M) throw numeric_error("omp_baseline: y has wrong length");

    const int N1 = dict.N1;
    std::vector<int> support;  // chosen blocks in selection order
    CVec residual = y;
    CVec x(dict.flat_cols(), cplx(0, 0));
    bool rank_deficient = false;
    double res_energy = 0.0;
    for (const cplx& z : residual) res_energy += std::norm(z);
    const double y_energy = res_energy;

    Eigen::VectorXcd sol;
    while (static_cast<int>(support.size()) < opts.max_blocks && res_energy > 0.0) {
        // Pick the block whose adjoint response to the residual is largest.
        CVec corr(dict.flat_cols());
        dict.adjoint(residual.data(), corr.data());
        int best = -1;
        double best_score = -1.0;
        for (int b = 0; b < dict.G; ++b) {
            if (std::find(support.begin(), support.end(), b) != support.end()) continue;
            double s = 0.0;
            const cplx* cb = corr.data() + static_cast<size_t>(b) * N1;
            for (int k = 0; k < N1; ++k) s += std::norm(cb[k]);
            if (s > best_score) {
                best_score = s;
                best = b;
            }
        }
        if (best < 0) break;
        support.push_back(best);

        // Least squares on the stacked support columns.
        const int cols = static_cast<int>(support.size()) * N1;
        Eigen::MatrixXcd B(dict.M, cols);
        for (size_t s = 0; s < support.size(); ++s)
            for (int k = 0; k < N1; ++k)
                for (int q = 0; q < dict.M; ++q)
                    B(q, static_cast<int>(s) * N1 + k) = dict.blocks[support[s]].entries(q, k);
        Eigen::Map<const Eigen::VectorXcd> ye(y.data(), dict.M);
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(B);
        if (cod.rank() < std::min<Eigen::Index>(B.rows(), B.cols())) rank_deficient = true;
        sol = cod.solve(ye);  // minimum-norm solution when rank deficient

        Eigen::VectorXcd fit = B * sol;
        double new_energy = 0.0;
        for (int q = 0; q < dict.M; ++q) {
            residual[q] = y[q] - fit(q);
            new_energy += std::norm(residual[q]);
        }
        double decrease = res_energy - new_energy;
        res_energy = new_energy;
        if (decrease <= opts.tol * std::max(y_energy, 1e-300)) break;
    }

    for (size_t s = 0; s < support.size(); ++s)
        for (int k = 0; k < N1; ++k)
            x[static_cast<size_t>(support[s]) * N1 + k] = sol.size() ? sol(static_cast<int>(s) * N1 + k) : cplx(0, 0);

    RecoveryResult res = extract_parameters(x, dict, extract);
    res.solver_iterations = static_cast<int>(support.size());
    res.rank_deficient = rank_deficient;
    double obj = 0.0;
    for (const cplx& z : residual) obj += std::norm(z);
    res.objective = 0.5 * obj;
    return res;
}

}  // namespace ius
