#pragma once

// Monte-Carlo driver: detection probability, miss-detection probability and
// parameter-estimation MSE over (K, SNR, design) cells. Trials run on a work
// queue with per-trial counter-derived random substreams, so the numbers are
// identical no matter how many threads execute them.

#include <cstdint>
#include <string>
#include <vector>

#include "ius/design.hpp"
#include "ius/dictionary.hpp"
#include "ius/recovery.hpp"
#include "ius/simulate.hpp"
#include "ius/system_config.hpp"

namespace ius {

enum class SolverKind { lasso, omp };

struct SolverSpec {
    SolverKind kind = SolverKind::lasso;
    double lambda = 0.0;  // <= 0: sigma sqrt(2 M ln(G N1)), the noise floor
    double alpha = 4.0;
    // Detection quality keeps improving well past a loose objective stop, so
    // the Monte-Carlo default runs the solver much further than the bare
    // API default.
    double tol = 1e-8;
    int max_iter = 20000;
    double tau_sup = 0.1;
    double tau_tap = 0.05;
    int omp_max_blocks = 12;
};

struct DesignSpec {
    DesignMethod method = DesignMethod::cra;
    int u = 1;         // cra / ccg-single
    int n_hat_cs = 0;
    int G = 0;         // cra / ccg-multi
};

struct ExperimentSpec {
    SystemConfig config;
    std::vector<DesignSpec> designs;
    std::vector<int> K_list;
    std::vector<double> snr_db_list;
    int trials = 200;
    uint64_t seed = 1;
    SolverSpec solver;
    std::string output;  // path stem for emit; empty = stdout only
};

struct TrialRecord {
    bool success = false;       // detected set equals the true set
    bool miss_detection = false;  // an inactive code was declared
    int matched = 0;
    double se_power_sum = 0.0;
    double se_delay_sum = 0.0;
    int solver_iterations = 0;
    bool failed = false;  // solver raised a numeric error
};

struct MetricRow {
    int K = 0;
    double snr_db = 0.0;
    std::string design;
    double P_s = 0.0;
    double P_md = 0.0;
    double mse_power = 0.0;
    double mse_delay = 0.0;
    int trials = 0;
    double mean_solver_iters = 0.0;
    double wall_time_s = 0.0;
    int failed_trials = 0;
};

// One synthesized-and-recovered draw; cell_id tags the (design, K, SNR) cell
// so every trial owns an independent substream.
TrialRecord run_trial(const Dictionary& dict, const CodeMatrix& codes, int K, double snr_db,
                      const SolverSpec& solver, double op_norm_sq, uint64_t seed, uint64_t cell_id,
                      int trial_index);

std::vector<MetricRow> run_experiment(const ExperimentSpec& spec, int threads);

// Fixed-format CSV (header K,snr_db,design,P_s,P_md,mse_power,mse_delay,trials)
// plus a JSON mirror carrying the same rows and run metadata.
void emit_csv(const std::vector<MetricRow>& rows, const std::string& path);
void emit_json(const std::vector<MetricRow>& rows, const std::string& path);
std::string rows_to_csv(const std::vector<MetricRow>& rows);
std::vector<MetricRow> rows_from_json_text(const std::string& text);

ExperimentSpec experiment_from_json_text(const std::string& text);

// Share of failed trials across all rows; the CLI exits nonzero above 1%.
double failed_trial_fraction(const std::vector<MetricRow>& rows);

}  // namespace ius
