// wl1: optimal weights, thresholds, weighted basis pursuit and phase
// transition experiments from the command line.
//
// Exit codes: 0 success, 2 invalid input, 3 numerical failure.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "wl1/io.hpp"
#include "wl1/wl1.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

unsigned default_threads() {
    if (const char* env = std::getenv("WL1_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (...) {
        }
    }
    return 1;
}

struct ModelArgs {
    std::size_t d = 0;
    std::string blocks;
    std::string alpha;

    void add_to(CLI::App* app, bool required = true) {
        auto* o1 = app->add_option("--d", d, "Ambient dimension");
        auto* o2 = app->add_option("--blocks", blocks, "Block sizes |S_i|, comma-separated");
        app->add_option("--alpha", alpha, "Support fractions alpha_i, decimals or fractions like 7/90")->required();
        if (required) {
            o1->required();
            o2->required();
        }
    }
    wl1::PartitionModel build() const {
        return wl1::make_model(d, wl1::io::parse_size_list(blocks), wl1::io::parse_real_list(alpha));
    }
};

struct WeightArgs {
    std::string strategy = "optimal";
    std::string weights;

    void add_to(CLI::App* app) {
        app->add_option("--strategy", strategy,
                        "unit | zero-one[:i,..] | one-minus-alpha | optimal | merged:i,j,..:<rule>")
            ->capture_default_str();
        app->add_option("--weights", weights, "Explicit per-block weights (overrides --strategy)");
    }
    wl1::Weights build(const wl1::PartitionModel& model) const {
        if (!weights.empty()) {
            wl1::Weights w{wl1::io::parse_real_list(weights)};
            wl1::validate_weights(model, w);
            return w;
        }
        return wl1::block_weights(model, wl1::parse_strategy(strategy));
    }
};

void print_values(const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) std::cout << (i ? " " : "") << v[i];
    std::cout << '\n';
}

int cmd_weights(const ModelArgs& args, bool raw) {
    const std::vector<double> alpha = wl1::io::parse_real_list(args.alpha);
    for (double a : alpha)
        if (!(a > 0.0) || a > 1.0)
            throw std::domain_error("alpha = " + std::to_string(a) + " outside (0, 1]");
    std::vector<double> roots;
    if (args.d != 0 || !args.blocks.empty()) {
        const wl1::OptimalWeights ow = wl1::optimal_weights(args.build());
        roots = ow.raw.omega;
    } else {
        for (double a : alpha) roots.push_back(wl1::optimal_weight_single(a));
    }
    const wl1::Weights w{roots};
    print_values(w.normalized().omega);
    if (raw) print_values(w.omega);
    return 0;
}

int cmd_threshold(const ModelArgs& margs, const WeightArgs& wargs, std::optional<double> tau) {
    const wl1::PartitionModel model = margs.build();
    const wl1::Weights w = wargs.build(model);
    const wl1::ThresholdResult r = wl1::minimize_J(model, w);
    std::cout << "m_tilde " << r.m_tilde << '\n'
              << "tau_star " << r.tau_star << '\n'
              << "delta_lower_tight " << r.bounds.lower_tight << '\n'
              << "delta_lower_loose " << r.bounds.lower_loose << '\n'
              << "delta_upper " << r.bounds.upper << '\n'
              << "measurements " << r.m_tilde * static_cast<double>(model.dimension()) << '\n';
    if (tau) std::cout << "J_tau " << wl1::eval_J(model, w, *tau) << '\n';
    return 0;
}

int cmd_estimate(const ModelArgs& margs, const WeightArgs& wargs, double tau, std::size_t n, std::uint64_t seed,
                 unsigned threads) {
    const wl1::PartitionModel model = margs.build();
    const wl1::Weights w = wargs.build(model);
    const wl1::MonteCarloEstimate e = wl1::mc_expected_dist_sq(model, w, tau, n, seed, threads);
    std::cout << "estimate " << e.estimate << '\n'
              << "standard_error " << e.standard_error << '\n'
              << "J_tau " << wl1::eval_J(model, w, tau) << '\n';
    return 0;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw wl1::io::ParseError("cannot open '" + path + "'");
    return in;
}

int cmd_solve(const std::string& matrix_path, const std::string& vector_path, const std::string& weights_path,
              double tol, const std::string& output) {
    wl1::BPProblem p;
    {
        auto in = open_input(matrix_path);
        p.A = wl1::io::read_dense(in);
    }
    {
        auto in = open_input(vector_path);
        p.b = wl1::io::read_vector(in);
    }
    {
        auto in = open_input(weights_path);
        p.w = wl1::io::read_vector(in);
    }
    if (p.b.size() != p.A.rows())
        throw wl1::ValidationError("vector has " + std::to_string(p.b.size()) + " entries, matrix has " +
                                   std::to_string(p.A.rows()) + " rows");
    if (p.w.size() != p.A.cols())
        throw wl1::ValidationError("weights have " + std::to_string(p.w.size()) + " entries, matrix has " +
                                   std::to_string(p.A.cols()) + " columns");
    for (Eigen::Index j = 0; j < p.w.size(); ++j)
        if (!(p.w[j] >= 0.0)) throw wl1::ValidationError("weights must be >= 0");

    wl1::BPOptions opt;
    opt.tol = tol;
    const wl1::BPSolution sol = wl1::weighted_bp(p, opt);
    if (!sol.solved()) {
        std::cerr << "wl1 solve: " << wl1::status_name(sol.status) << '\n';
        return kExitNumerical;
    }
    std::ofstream file;
    std::ostream& os = output.empty() ? std::cout : (file.open(output), file);
    os << "# status " << wl1::status_name(sol.status) << '\n'
       << "# objective " << std::fixed << std::setprecision(6) << sol.objective << '\n';
    wl1::io::write_dense(os, sol.x_hat);
    return 0;
}

int cmd_phase(const std::string& config_path, const std::string& output, std::optional<unsigned> threads) {
    auto in = open_input(config_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw wl1::io::ParseError(std::string("config: ") + e.what());
    }
    wl1::ExperimentConfig cfg = wl1::io::experiment_from_json(j);
    if (threads)
        cfg.threads = *threads;
    else if (!j.contains("threads"))
        cfg.threads = default_threads();
    const wl1::PhaseCurve curve = wl1::run_phase_curve(cfg);
    std::size_t failures = 0;
    for (const auto& p : curve.points) failures += p.solver_failures;
    if (failures) std::cerr << "wl1 phase: " << failures << " solver failures counted as unsuccessful\n";
    if (output.empty()) {
        wl1::write_csv(std::cout, curve);
    } else {
        std::ofstream out(output);
        if (!out) throw wl1::io::ParseError("cannot write '" + output + "'");
        wl1::write_csv(out, curve);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal weights and phase transitions for weighted l1 minimization"};
    app.require_subcommand(1);

    ModelArgs w_model;
    bool raw = false;
    auto* weights = app.add_subcommand("weights", "Optimal per-block weights, normalized to max 1");
    w_model.add_to(weights, false);
    weights->add_flag("--raw", raw, "Also print the unnormalized roots");

    ModelArgs t_model;
    WeightArgs t_weights;
    std::optional<double> t_tau;
    auto* threshold = app.add_subcommand("threshold", "Normalized recovery threshold for given weights");
    t_model.add_to(threshold);
    t_weights.add_to(threshold);
    threshold->add_option("--tau", t_tau, "Also evaluate J at this tau");

    ModelArgs e_model;
    WeightArgs e_weights;
    double e_tau = 1.0;
    std::size_t e_n = 100000;
    std::uint64_t e_seed = 0;
    unsigned e_threads = default_threads();
    auto* estimate = app.add_subcommand("estimate", "Monte Carlo estimate of d^-1 E dist^2 to the scaled subdifferential");
    e_model.add_to(estimate);
    e_weights.add_to(estimate);
    estimate->add_option("--tau", e_tau, "Scale of the subdifferential")->required();
    estimate->add_option("--samples,-n", e_n, "Number of Gaussian samples")->capture_default_str();
    estimate->add_option("--seed", e_seed, "Random seed")->capture_default_str();
    estimate->add_option("--threads", e_threads, "Worker threads (default $WL1_THREADS or 1)");

    std::string s_matrix, s_vector, s_weights, s_output;
    double s_tol = 1e-8;
    auto* solve = app.add_subcommand("solve", "Solve min ||x||_{1,w} s.t. Ax = b");
    solve->add_option("--matrix", s_matrix, "Dense text matrix A (header 'm,d')")->required();
    solve->add_option("--vector", s_vector, "Dense text vector b")->required();
    solve->add_option("--weights", s_weights, "Dense text vector w")->required();
    solve->add_option("--tol", s_tol, "Duality gap / feasibility tolerance")->capture_default_str();
    solve->add_option("--output,-o", s_output, "Write the solution here instead of stdout");

    std::string p_config, p_output;
    std::optional<unsigned> p_threads;
    auto* phase = app.add_subcommand("phase", "Run a seeded phase-transition experiment, emit CSV");
    phase->add_option("--config,-c", p_config, "JSON experiment config")->required();
    phase->add_option("--output,-o", p_output, "CSV path (default stdout)");
    phase->add_option("--threads", p_threads, "Worker threads (default $WL1_THREADS or 1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    std::cout << std::fixed << std::setprecision(6);
    try {
        if (*weights) return cmd_weights(w_model, raw);
        if (*threshold) return cmd_threshold(t_model, t_weights, t_tau);
        if (*estimate) return cmd_estimate(e_model, e_weights, e_tau, e_n, e_seed, e_threads);
        if (*solve) return cmd_solve(s_matrix, s_vector, s_weights, s_tol, s_output);
        if (*phase) return cmd_phase(p_config, p_output, p_threads);
    } catch (const std::invalid_argument& e) {  // includes ValidationError, ParseError
        std::cerr << "wl1: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::domain_error& e) {
        std::cerr << "wl1: domain error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "wl1: numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
    return 0;
}
