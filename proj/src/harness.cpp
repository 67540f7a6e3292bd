#include "ius/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ius/parallel.hpp"

namespace ius {

namespace {

DesignOutput realize_design(const DesignSpec& ds, const SystemConfig& cfg, int threads) {
    switch (ds.method) {
        case DesignMethod::cra: return design_cra(ds.u, ds.n_hat_cs, ds.G, cfg);
        case DesignMethod::ccg_single: return design_ccg_single(ds.u, ds.n_hat_cs, cfg);
        case DesignMethod::ccg_multi: return design_ccg_multi(ds.G, ds.n_hat_cs, cfg, threads);
    }
    throw invalid_config_error("unknown design method");
}

std::string format_fixed(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

TrialRecord run_trial(const Dictionary& dict, const CodeMatrix& codes, int K, double snr_db,
                      const SolverSpec& solver, double op_norm_sq, uint64_t seed, uint64_t cell_id,
                      int trial_index) {
    TrialRecord rec;
    Rng rng(seed, cell_id * 0x100000ULL + static_cast<uint64_t>(trial_index));

    // SNR is defined against unit expected channel power.
    double sigma_e_sq = snr_to_noise_variance(snr_db, 1.0);
    Scenario scenario = sample_scenario(K, codes, dict.cfg, sigma_e_sq, rng);

    try {
        Observation obs = synthesize_frequency_domain(scenario, dict, rng);

        RecoveryResult rr;
        if (solver.kind == SolverKind::lasso) {
            LassoOptions lo;
            // The regularizer must clear the noise-correlation floor of
            // columns with norm sqrt(M): sigma sqrt(2 M ln(G N1)). The
            // textbook sqrt(8 sigma^2 (1+alpha) ln(G N1)) value is the
            // unit-column form of the same rule and feeds the support floor.
            lo.lambda = solver.lambda > 0.0
                            ? solver.lambda
                            : std::sqrt(2.0 * dict.M * sigma_e_sq *
                                        std::log(static_cast<double>(dict.G) * dict.N1));
            lo.tol = solver.tol;
            lo.max_iter = solver.max_iter;
            lo.op_norm_sq = op_norm_sq;
            LassoResult lr = lasso_solve(dict, obs.y, lo);
            ExtractOptions eo;
            eo.tau_sup = solver.tau_sup;
            eo.tau_tap = solver.tau_tap;
            eo.lambda = default_lambda(sigma_e_sq, dict.G, dict.N1, solver.alpha);
            rr = extract_parameters(lr.x, dict, eo);
            rr.solver_iterations = lr.iterations;
            rr.converged = lr.converged;
            rr.objective = lr.objective;
        } else {
            OmpOptions oo{solver.omp_max_blocks, solver.tol};
            ExtractOptions eo;
            eo.tau_sup = solver.tau_sup;
            eo.tau_tap = solver.tau_tap;
            rr = omp_baseline(dict, obs.y, oo, eo);
        }

        rec.success = rr.detected == obs.active;
        for (int b : rr.detected)
            if (!std::binary_search(obs.active.begin(), obs.active.end(), b)) rec.miss_detection = true;

        for (const ScenarioUser& user : scenario.users) {
            auto it = std::find(rr.detected.begin(), rr.detected.end(), user.code);
            if (it == rr.detected.end()) continue;
            ++rec.matched;
            double dp = rr.powers.at(user.code) - obs.true_power[user.code];
            double dd = static_cast<double>(rr.delays.at(user.code) - user.delay);
            rec.se_power_sum += dp * dp;
            rec.se_delay_sum += dd * dd;
        }
        rec.solver_iterations = rr.solver_iterations;
    } catch (const numeric_error&) {
        rec.failed = true;
    }
    return rec;
}

std::vector<MetricRow> run_experiment(const ExperimentSpec& spec, int threads) {
    auto violations = validate(spec.config);
    if (!violations.empty()) throw invalid_config_error("run_experiment: invalid config");
    if (spec.trials < 1) throw invalid_config_error("run_experiment: trials must be >= 1");

    std::vector<MetricRow> rows;
    uint64_t cell_id = 0;
    for (const DesignSpec& ds : spec.designs) {
        DesignOutput design = realize_design(ds, spec.config, threads);
        Dictionary dict = assemble(design.codes, spec.config);
        double op_norm = dictionary_op_norm_sq(dict);
        std::string label = design_label(design.plan);

        for (int K : spec.K_list) {
            if (K > dict.G)
                throw infeasible_error("run_experiment: K exceeds the number of codes");
            for (double snr : spec.snr_db_list) {
                auto t0 = std::chrono::steady_clock::now();
                std::vector<TrialRecord> recs(spec.trials);
                parallel_for(spec.trials, threads, [&](long long t, int) {
                    recs[static_cast<size_t>(t)] = run_trial(dict, design.codes, K, snr, spec.solver,
                                                             op_norm, spec.seed, cell_id,
                                                             static_cast<int>(t));
                });
                auto t1 = std::chrono::steady_clock::now();

                MetricRow row;
                row.K = K;
                row.snr_db = snr;
                row.design = label;
                row.trials = spec.trials;
                long long matched = 0;
                double se_p = 0.0, se_d = 0.0, iters = 0.0;
                int ok = 0, md = 0, failed = 0;
                for (const TrialRecord& r : recs) {
                    if (r.failed) {
                        ++failed;
                        continue;
                    }
                    ok += r.success ? 1 : 0;
                    md += r.miss_detection ? 1 : 0;
                    matched += r.matched;
                    se_p += r.se_power_sum;
                    se_d += r.se_delay_sum;
                    iters += r.solver_iterations;
                }
                int counted = spec.trials - failed;
                row.P_s = counted > 0 ? static_cast<double>(ok) / counted : 0.0;
                row.P_md = counted > 0 ? static_cast<double>(md) / counted : 0.0;
                row.mse_power = matched > 0 ? se_p / matched : 0.0;
                row.mse_delay = matched > 0 ? se_d / matched : 0.0;
                row.mean_solver_iters = counted > 0 ? iters / counted : 0.0;
                row.failed_trials = failed;
                row.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
                rows.push_back(std::move(row));
                ++cell_id;
            }
        }
    }
    return rows;
}

std::string rows_to_csv(const std::vector<MetricRow>& rows) {
    std::ostringstream ss;
    ss << "K,snr_db,design,P_s,P_md,mse_power,mse_delay,trials\n";
    for (const MetricRow& r : rows) {
        ss << r.K << ',' << format_fixed(r.snr_db) << ',' << r.design << ',' << format_fixed(r.P_s) << ','
           << format_fixed(r.P_md) << ',' << format_fixed(r.mse_power) << ',' << format_fixed(r.mse_delay)
           << ',' << r.trials << '\n';
    }
    return ss.str();
}

void emit_csv(const std::vector<MetricRow>& rows, const std::string& path) {
    if (rows.empty()) throw invalid_config_error("emit_csv: no rows");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw numeric_error("emit_csv: cannot open '" + path + "'");
    out << rows_to_csv(rows);
    if (!out) throw numeric_error("emit_csv: write failed");
}

void emit_json(const std::vector<MetricRow>& rows, const std::string& path) {
    if (rows.empty()) throw invalid_config_error("emit_json: no rows");
    nlohmann::json doc;
    nlohmann::json arr = nlohmann::json::array();
    nlohmann::json meta = nlohmann::json::array();
    for (const MetricRow& r : rows) {
        nlohmann::json jr;
        jr["K"] = r.K;
        jr["snr_db"] = r.snr_db;
        jr["design"] = r.design;
        jr["P_s"] = r.P_s;
        jr["P_md"] = r.P_md;
        jr["mse_power"] = r.mse_power;
        jr["mse_delay"] = r.mse_delay;
        jr["trials"] = r.trials;
        arr.push_back(std::move(jr));
        nlohmann::json jm;
        jm["mean_solver_iters"] = r.mean_solver_iters;
        jm["wall_time_s"] = r.wall_time_s;
        jm["failed_trials"] = r.failed_trials;
        meta.push_back(std::move(jm));
    }
    doc["rows"] = std::move(arr);
    doc["meta"] = std::move(meta);
    doc["note"] = "MSE is averaged over matched detections only";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw numeric_error("emit_json: cannot open '" + path + "'");
    out << doc.dump(2) << '\n';
    if (!out) throw numeric_error("emit_json: write failed");
}

std::vector<MetricRow> rows_from_json_text(const std::string& text) {
    nlohmann::json doc = nlohmann::json::parse(text);
    std::vector<MetricRow> rows;
    for (const auto& jr : doc.at("rows")) {
        MetricRow r;
        r.K = jr.at("K").get<int>();
        r.snr_db = jr.at("snr_db").get<double>();
        r.design = jr.at("design").get<std::string>();
        r.P_s = jr.at("P_s").get<double>();
        r.P_md = jr.at("P_md").get<double>();
        r.mse_power = jr.at("mse_power").get<double>();
        r.mse_delay = jr.at("mse_delay").get<double>();
        r.trials = jr.at("trials").get<int>();
        rows.push_back(std::move(r));
    }
    return rows;
}

ExperimentSpec experiment_from_json_text(const std::string& text) {
    nlohmann::json doc = nlohmann::json::parse(text);
    ExperimentSpec spec;

    const auto& jc = doc.at("config");
    spec.config = jc.is_string() ? load_config(jc.get<std::string>())
                                 : config_from_json_text(jc.dump());

    for (const auto& jd : doc.at("designs")) {
        DesignSpec ds;
        std::string m = jd.at("method").get<std::string>();
        if (m == "cra") ds.method = DesignMethod::cra;
        else if (m == "ccg-single") ds.method = DesignMethod::ccg_single;
        else if (m == "ccg-multi") ds.method = DesignMethod::ccg_multi;
        else throw invalid_config_error("experiment: unknown design method '" + m + "'");
        if (jd.contains("u")) ds.u = jd.at("u").get<int>();
        ds.n_hat_cs = jd.at("n_hat_cs").get<int>();
        if (jd.contains("G")) ds.G = jd.at("G").get<int>();
        spec.designs.push_back(ds);
    }
    spec.K_list = doc.at("K").get<std::vector<int>>();
    spec.snr_db_list = doc.at("snr_db").get<std::vector<double>>();
    if (doc.contains("trials")) spec.trials = doc.at("trials").get<int>();
    if (doc.contains("seed")) spec.seed = doc.at("seed").get<uint64_t>();
    if (doc.contains("output")) spec.output = doc.at("output").get<std::string>();
    if (doc.contains("solver")) {
        const auto& js = doc.at("solver");
        if (js.contains("name")) {
            std::string name = js.at("name").get<std::string>();
            if (name == "lasso") spec.solver.kind = SolverKind::lasso;
            else if (name == "omp") spec.solver.kind = SolverKind::omp;
            else throw invalid_config_error("experiment: unknown solver '" + name + "'");
        }
        if (js.contains("lambda")) spec.solver.lambda = js.at("lambda").get<double>();
        if (js.contains("alpha")) spec.solver.alpha = js.at("alpha").get<double>();
        if (js.contains("tol")) spec.solver.tol = js.at("tol").get<double>();
        if (js.contains("max_iter")) spec.solver.max_iter = js.at("max_iter").get<int>();
        if (js.contains("tau_sup")) spec.solver.tau_sup = js.at("tau_sup").get<double>();
        if (js.contains("tau_tap")) spec.solver.tau_tap = js.at("tau_tap").get<double>();
        if (js.contains("omp_max_blocks")) spec.solver.omp_max_blocks = js.at("omp_max_blocks").get<int>();
    }
    return spec;
}

double failed_trial_fraction(const std::vector<MetricRow>& rows) {
    long long failed = 0, total = 0;
    for (const MetricRow& r : rows) {
        failed += r.failed_trials;
        total += r.trials;
    }
    return total > 0 ? static_cast<double>(failed) / total : 0.0;
}

}  // namespace ius
