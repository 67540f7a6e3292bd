// Command-line front end: code-matrix design, dictionary coherence reports,
// scenario replay, and Monte-Carlo detection sweeps.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ius/coherence.hpp"
#include "ius/design.hpp"
#include "ius/harness.hpp"
#include "ius/parallel.hpp"
#include "ius/recovery.hpp"
#include "ius/simulate.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
}

int run_sweep(const std::string& spec_path, const std::string& out_override, uint64_t seed_override,
              bool have_seed, int threads, bool print_rows) {
    ius::ExperimentSpec spec = ius::experiment_from_json_text(slurp(spec_path));
    if (have_seed) spec.seed = seed_override;
    if (!out_override.empty()) spec.output = out_override;

    std::vector<ius::MetricRow> rows = ius::run_experiment(spec, threads);
    if (print_rows || spec.output.empty()) std::cout << ius::rows_to_csv(rows);
    if (!spec.output.empty()) {
        ius::emit_csv(rows, spec.output + ".csv");
        ius::emit_json(rows, spec.output + ".json");
        std::cerr << "wrote " << spec.output << ".csv and .json\n";
    }
    double failed = ius::failed_trial_fraction(rows);
    if (failed > 0.01) {
        std::cerr << "error: " << failed * 100.0 << "% of trials failed\n";
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Zadoff-Chu random-access code design and uplink-synchronization simulation"};
    app.require_subcommand(1);
    int threads = ius::default_threads();
    app.add_option("--threads", threads, "worker threads (default: IUS_THREADS or hardware)");

    // --- design ---------------------------------------------------------
    auto* design = app.add_subcommand("design", "generate a random-access code matrix");
    std::string d_method = "ccg-single", d_config = "lte", d_out;
    int d_root = 1, d_codes = 0, d_ncs_hat = 0;
    design->add_option("--method", d_method, "cra | ccg-single | ccg-multi")
        ->check(CLI::IsMember({"cra", "ccg-single", "ccg-multi"}));
    design->add_option("--root", d_root, "ZC root (cra, ccg-single)");
    design->add_option("--codes", d_codes, "code count (cra, ccg-multi)");
    design->add_option("--ncs-hat", d_ncs_hat, "regulatory lower bound on n_cs; 0 derives it from the config");
    design->add_option("--config", d_config, "config JSON path or 'lte'");
    design->add_option("--out", d_out, "output JSON path (code matrix + plan)");

    // --- coherence ------------------------------------------------------
    auto* coh = app.add_subcommand("coherence", "coherence report for a code matrix");
    std::string c_config = "lte", c_codes, c_method = "brute", c_dump;
    coh->add_option("--config", c_config, "config JSON path or 'lte'");
    coh->add_option("--codes", c_codes, "code matrix JSON (from 'design')")->required();
    coh->add_option("--coh-method", c_method, "brute | closed | both")
        ->check(CLI::IsMember({"brute", "closed", "both"}));
    coh->add_option("--dump", c_dump, "also dump the flat dictionary to a binary file");

    // --- simulate -------------------------------------------------------
    auto* sim = app.add_subcommand("simulate", "run an experiment spec, or replay one scenario");
    std::string s_spec, s_replay, s_codes, s_config = "lte";
    uint64_t s_seed = 0;
    sim->add_option("--spec", s_spec, "experiment spec JSON");
    sim->add_option("--replay", s_replay, "scenario JSON to replay (needs --codes)");
    sim->add_option("--codes", s_codes, "code matrix JSON for --replay");
    sim->add_option("--config", s_config, "config for --replay (default lte)");
    auto* s_seed_opt = sim->add_option("--seed", s_seed, "override the spec seed");

    // --- sweep ----------------------------------------------------------
    auto* sweep = app.add_subcommand("sweep", "run an experiment grid and write CSV + JSON");
    std::string w_spec, w_out;
    uint64_t w_seed = 0;
    sweep->add_option("--spec", w_spec, "experiment spec JSON")->required();
    sweep->add_option("--out", w_out, "output path stem (overrides the spec)");
    auto* w_seed_opt = sweep->add_option("--seed", w_seed, "override the spec seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(design)) {
            ius::SystemConfig cfg = ius::load_config(d_config);
            int n_hat = d_ncs_hat > 0 ? d_ncs_hat
                                      : ius::ncs_lower_bound(cfg.gamma, cfg.tau_d, cfg.T_SEQ, cfg.M, cfg.n_g);
            ius::DesignOutput out;
            if (d_method == "cra") {
                if (d_codes <= 0) throw std::runtime_error("cra needs --codes");
                out = ius::design_cra(d_root, n_hat, d_codes, cfg);
            } else if (d_method == "ccg-single") {
                out = ius::design_ccg_single(d_root, n_hat, cfg);
            } else {
                if (d_codes <= 0) throw std::runtime_error("ccg-multi needs --codes");
                out = ius::design_ccg_multi(d_codes, n_hat, cfg, threads);
            }
            std::string plan = ius::design_plan_to_json_text(out.plan);
            std::cout << plan << '\n';
            if (!d_out.empty()) {
                std::ostringstream doc;
                doc << "{\"plan\":" << plan << ",\"code_matrix\":" << ius::code_matrix_to_json_text(out.codes)
                    << "}\n";
                write_file(d_out, doc.str());
                std::cerr << "wrote " << d_out << '\n';
            }
            return 0;
        }

        if (app.got_subcommand(coh)) {
            ius::SystemConfig cfg = ius::load_config(c_config);
            std::string text = slurp(c_codes);
            // Accept either a bare code matrix or the design tool's output.
            auto doc = nlohmann::json::parse(text);
            ius::CodeMatrix cm = doc.contains("code_matrix")
                                     ? ius::code_matrix_from_json_text(doc.at("code_matrix").dump())
                                     : ius::code_matrix_from_json_text(text);
            ius::Dictionary dict = ius::assemble(cm, cfg);
            if (c_method == "brute" || c_method == "both") {
                auto rep = ius::full_dictionary_coherence(dict, ius::CoherenceMethod::brute_force, threads);
                std::cout << ius::coherence_report_to_json_text(rep) << '\n';
            }
            if (c_method == "closed" || c_method == "both") {
                auto rep = ius::full_dictionary_coherence(dict, ius::CoherenceMethod::closed_form, threads);
                std::cout << ius::coherence_report_to_json_text(rep) << '\n';
            }
            if (!c_dump.empty()) {
                dict.dump_flat(c_dump);
                std::cerr << "wrote " << c_dump << '\n';
            }
            return 0;
        }

        if (app.got_subcommand(sim)) {
            if (!s_replay.empty()) {
                if (s_codes.empty()) throw std::runtime_error("--replay needs --codes");
                ius::SystemConfig cfg = ius::load_config(s_config);
                ius::CodeMatrix cm = ius::code_matrix_from_json_text(slurp(s_codes));
                ius::Dictionary dict = ius::assemble(cm, cfg);
                ius::Scenario scenario = ius::scenario_from_json_text(slurp(s_replay));
                ius::Rng rng(scenario.seed);
                ius::Observation obs = ius::synthesize_frequency_domain(scenario, dict, rng);
                double lambda = scenario.noise_variance > 0.0
                                    ? ius::default_lambda(scenario.noise_variance, dict.G, dict.N1)
                                    : 0.0;
                if (lambda <= 0.0) {
                    ius::CVec corr = dict.adjoint(obs.y);
                    double peak = 0.0;
                    for (const auto& z : corr) peak = std::max(peak, std::abs(z));
                    lambda = std::max(1e-6 * peak, 1e-12);
                }
                ius::LassoOptions lo;
                lo.lambda = lambda;
                lo.tol = 1e-9;
                lo.max_iter = 20000;
                ius::LassoResult lr = ius::lasso_solve(dict, obs.y, lo);
                ius::ExtractOptions eo;
                eo.lambda = lambda;
                ius::RecoveryResult rr = ius::extract_parameters(lr.x, dict, eo);
                std::cout << "true codes:";
                for (int c : obs.active) std::cout << ' ' << c;
                std::cout << "\ndetected:";
                for (int c : rr.detected)
                    std::cout << ' ' << c << " (delay " << rr.delays.at(c) << ", power "
                              << rr.powers.at(c) << ")";
                std::cout << "\nsolver iterations: " << lr.iterations << "\n";
                return 0;
            }
            if (s_spec.empty()) throw std::runtime_error("simulate needs --spec or --replay");
            return run_sweep(s_spec, "", s_seed, s_seed_opt->count() > 0, threads, true);
        }

        if (app.got_subcommand(sweep))
            return run_sweep(w_spec, w_out, w_seed, w_seed_opt->count() > 0, threads, false);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
