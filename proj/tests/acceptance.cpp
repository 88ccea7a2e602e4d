// Acceptance suite: one PASS/FAIL line per criterion, all tolerances fixed
// below. Exit status is non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "generators.hpp"
#include "wl1/wl1.hpp"

using namespace wl1;

namespace {

constexpr double kGoldenTol = 5e-4;
constexpr double kGoldenMs = 10.0;
constexpr double kSynthesisTol = 1e-6;
constexpr double kSynthesisSeconds = 5.0;
constexpr std::size_t kSynthesisModels = 100;
constexpr std::size_t kMcCases = 20;
constexpr std::size_t kMcSamples = 100000;
constexpr double kMcSigmas = 4.0;
constexpr double kMcSeconds = 30.0;
constexpr double kBoundTol = 1e-15;
constexpr std::size_t kPhaseTrials = 200;
constexpr double kCrossingTol = 5.0;
constexpr double kPhaseOffset = 10.0;
constexpr double kHighRate = 0.9;
constexpr double kLowRate = 0.1;
constexpr double kPhaseSeconds = 600.0;
constexpr double kOrderingSigmas = 3.0;
constexpr std::size_t kKktSolves = 1000;
constexpr double kKktTol = 1e-6;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

unsigned worker_threads() {
    if (const char* env = std::getenv("WL1_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail, double secs) {
    if (!ok) ++failures;
    std::printf("[%s] %d %s: %s (%.3f s)\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str(), secs);
    std::fflush(stdout);
}

PartitionModel two_block(std::size_t c1) { return make_model_from_counts(100, {10, 90}, {c1, 10 - c1}); }
PartitionModel four_block() { return make_model_from_counts(100, {5, 10, 15, 70}, {4, 3, 2, 1}); }

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

std::string fmt(double v, int prec = 4) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(prec);
    os << v;
    return os.str();
}

void criterion1() {
    const auto t0 = Clock::now();
    const std::size_t counts[] = {3, 5, 7};
    const double expected[] = {0.5539, 0.3208, 0.1599};
    double got[3];
    for (int i = 0; i < 3; ++i) got[i] = optimal_weights(two_block(counts[i])).normalized.omega[0];
    const double secs = seconds_since(t0);
    bool ok = secs * 1e3 < kGoldenMs;
    std::string detail;
    for (int i = 0; i < 3; ++i) {
        ok = ok && std::abs(got[i] - expected[i]) <= kGoldenTol;
        detail += fmt(got[i]) + (i < 2 ? ", " : "");
    }
    report(1, "golden weights k=2", ok, "w1 = " + detail + " vs 0.5539, 0.3208, 0.1599", secs);
}

void criterion2() {
    const auto t0 = Clock::now();
    const auto m = four_block();
    const auto w4 = optimal_weights(m).normalized.omega;
    const auto w2 = weights_for_strategy(m, Strategy::merged({0, 1, 2}, StrategyKind::Optimal)).omega;
    const double secs = seconds_since(t0);
    const double e4[] = {0.0884, 0.3742, 0.5617, 1.0};
    bool ok = secs * 1e3 < kGoldenMs && w2.size() == 2 && std::abs(w2[0] - 0.3742) <= kGoldenTol &&
              std::abs(w2[1] - 1.0) <= kGoldenTol;
    for (int i = 0; i < 4; ++i) ok = ok && std::abs(w4[static_cast<std::size_t>(i)] - e4[i]) <= kGoldenTol;
    report(2, "golden weights k=4", ok,
           "(" + fmt(w4[0]) + ", " + fmt(w4[1]) + ", " + fmt(w4[2]) + ", " + fmt(w4[3]) + "), merged (" + fmt(w2[0]) +
               ", " + fmt(w2[1]) + ")",
           secs);
}

void criterion3() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(3003);
    double worst = 0.0;
    for (std::size_t i = 0; i < kSynthesisModels; ++i) {
        const auto m = testkit::random_model(rng, 5, 200);
        const double gap = std::abs(synthesis_threshold(m) - minimize_J(m, optimal_weights(m).normalized).m_tilde);
        worst = std::max(worst, gap);
    }
    const double secs = seconds_since(t0);
    report(3, "synthesis identity", worst <= kSynthesisTol && secs < kSynthesisSeconds,
           "max gap " + sci(worst) + " over " + std::to_string(kSynthesisModels) + " models", secs);
}

void criterion4() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(4004);
    std::uniform_real_distribution<double> U(0.1, 2.5);
    std::size_t passed = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < kMcCases; ++i) {
        const auto m = testkit::random_model(rng, 5, 200);
        const auto w = testkit::random_weights(rng, m.num_blocks());
        const double tau = U(rng);
        const auto est = mc_expected_dist_sq(m, w, tau, kMcSamples, rng(), worker_threads());
        const double z = std::abs(est.estimate - eval_J(m, w, tau)) / est.standard_error;
        worst = std::max(worst, z);
        if (z <= kMcSigmas) ++passed;
    }
    const double secs = seconds_since(t0);
    report(4, "Monte Carlo matches J", passed == kMcCases && secs < kMcSeconds,
           std::to_string(passed) + "/" + std::to_string(kMcCases) + " within 4 SE, worst |z| = " + fmt(worst, 2),
           secs);
}

void criterion5() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(5005);
    bool ok = true;
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const auto m = testkit::random_model(rng, 5, 200);
        const auto r = minimize_J(m, testkit::random_weights(rng, m.num_blocks()));
        const double d = static_cast<double>(m.dimension());
        const double e1 = std::abs((r.bounds.upper - r.bounds.lower_tight) - 2.0 / d * std::sqrt(1.0 / m.min_alpha()));
        const double e2 = std::abs((r.bounds.upper - r.bounds.lower_loose) - 2.0 / std::sqrt(d));
        worst = std::max({worst, e1, e2});
        ok = ok && e1 <= kBoundTol && e2 <= kBoundTol && r.bounds.lower_tight >= r.bounds.lower_loose;
    }
    report(5, "sandwich bound widths", ok, "max width error " + sci(worst) + " over 200 models", seconds_since(t0));
}

struct PhaseRun {
    PhaseCurve curve;
    double secs = 0.0;
};

PhaseRun phase_two_block() {
    const auto t0 = Clock::now();
    ExperimentConfig c;
    c.model = two_block(5);
    c.strategies = {Strategy::unit(), Strategy::zero_one(), Strategy::one_minus_alpha(), Strategy::optimal()};
    double lo = 1e9, hi = 0.0;
    for (const auto& s : c.strategies) {
        const double p = predicted_threshold(c.model, s);
        lo = std::min(lo, p);
        hi = std::max(hi, p);
    }
    const auto m_lo = static_cast<std::size_t>(std::max(1.0, std::floor(lo) - kPhaseOffset - 2.0));
    const auto m_hi = static_cast<std::size_t>(std::min(100.0, std::ceil(hi) + kPhaseOffset + 2.0));
    for (std::size_t m = m_lo; m <= m_hi; ++m) c.m_values.push_back(m);
    c.trials_per_m = kPhaseTrials;
    c.master_seed = 6006;
    c.threads = worker_threads();
    PhaseRun r;
    r.curve = run_phase_curve(c);
    r.secs = seconds_since(t0);
    return r;
}

void criterion6(const PhaseRun& run) {
    const auto& curve = run.curve;
    bool ok = run.secs < kPhaseSeconds;
    std::string detail;
    for (std::size_t s = 0; s < curve.labels.size(); ++s) {
        const double pred = curve.predicted_threshold[s];
        const auto cross = empirical_crossing(curve, s);
        const auto* hi = curve.find(s, static_cast<std::size_t>(std::ceil(pred) + kPhaseOffset));
        const auto* lo = curve.find(s, static_cast<std::size_t>(std::floor(pred) - kPhaseOffset));
        const bool s_ok = cross && std::abs(*cross - pred) <= kCrossingTol && hi && hi->rate() >= kHighRate && lo &&
                          lo->rate() <= kLowRate;
        ok = ok && s_ok;
        detail += curve.labels[s] + " pred " + fmt(pred, 2) + " cross " + (cross ? fmt(*cross, 2) : "none") +
                  " rate+10 " + (hi ? fmt(hi->rate(), 3) : "?") + " rate-10 " + (lo ? fmt(lo->rate(), 3) : "?");
        if (s + 1 < curve.labels.size()) detail += "; ";
    }
    report(6, "phase transition d=100", ok, detail, run.secs);
}

PhaseRun phase_four_block() {
    const auto t0 = Clock::now();
    ExperimentConfig c;
    c.model = four_block();
    c.strategies = {Strategy::optimal(), Strategy::merged({0, 1, 2}, StrategyKind::Optimal)};
    const double lo = predicted_threshold(c.model, c.strategies[0]);
    const double hi = predicted_threshold(c.model, c.strategies[1]);
    for (auto m = static_cast<std::size_t>(std::floor(lo) - kPhaseOffset); m <= static_cast<std::size_t>(std::ceil(hi) + kPhaseOffset); ++m)
        c.m_values.push_back(m);
    c.trials_per_m = kPhaseTrials;
    c.master_seed = 7007;
    c.threads = worker_threads();
    PhaseRun r;
    r.curve = run_phase_curve(c);
    r.secs = seconds_since(t0);
    return r;
}

void criterion7(const PhaseRun& two, const PhaseRun& four) {
    const auto& c2 = two.curve;
    const std::size_t unit = 0, opt = 3;
    // transition region: where either strategy is strictly between 0 and 1
    std::size_t checked = 0, violations = 0;
    for (const auto& pu : c2.series(unit)) {
        const auto* po = c2.find(opt, pu.m);
        if (!po) continue;
        const bool transition = (pu.rate() > 0.0 && pu.rate() < 1.0) || (po->rate() > 0.0 && po->rate() < 1.0);
        if (!transition) continue;
        ++checked;
        const double se = std::sqrt(pu.standard_error() * pu.standard_error() + po->standard_error() * po->standard_error());
        if (po->rate() < pu.rate() - kOrderingSigmas * se) ++violations;
    }
    const auto c4 = empirical_crossing(four.curve, 0);
    const auto c2m = empirical_crossing(four.curve, 1);
    const bool ok = checked > 0 && violations == 0 && c4 && c2m && *c4 < *c2m;
    report(7, "strategy ordering", ok,
           std::to_string(violations) + " violations over " + std::to_string(checked) +
               " transition m; k=4 crossing " + (c4 ? fmt(*c4, 2) : "none") + " vs merged " +
               (c2m ? fmt(*c2m, 2) : "none") + " (pred " + fmt(four.curve.predicted_threshold[0], 2) + " vs " +
               fmt(four.curve.predicted_threshold[1], 2) + ")",
           four.secs);
}

void criterion8() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(8008);
    std::normal_distribution<double> N;
    std::uniform_real_distribution<double> U(0.1, 2.0);
    std::size_t optimal = 0, certified = 0;
    for (std::size_t i = 0; i < kKktSolves; ++i) {
        const auto d = static_cast<Eigen::Index>(2 + rng() % 49);
        const auto m = static_cast<Eigen::Index>(1 + rng() % static_cast<std::uint64_t>(d));
        BPProblem p;
        p.A.resize(m, d);
        for (Eigen::Index j = 0; j < d; ++j)
            for (Eigen::Index r = 0; r < m; ++r) p.A(r, j) = N(rng);
        Eigen::VectorXd x0 = Eigen::VectorXd::Zero(d);
        for (Eigen::Index j = 0; j < d; ++j)
            if (rng() % 4 == 0) x0[j] = N(rng);
        p.b = p.A * x0;
        p.w.resize(d);
        for (auto& v : p.w) v = U(rng);
        const auto sol = weighted_bp(p);
        if (sol.status != BPStatus::Optimal) continue;
        ++optimal;
        if (check_kkt(p, sol, kKktTol, kKktTol).ok) ++certified;
    }
    report(8, "solver certificates", optimal == kKktSolves && certified == optimal,
           std::to_string(certified) + "/" + std::to_string(optimal) + " certified, " + std::to_string(optimal) +
               "/" + std::to_string(kKktSolves) + " optimal",
           seconds_since(t0));
}

void criterion9() {
    const auto t0 = Clock::now();
    std::vector<std::pair<std::string, std::function<bool()>>> checks;
    std::mt19937_64 rng(9009);

    checks.emplace_back("J convex", [&] {
        for (int i = 0; i < 50; ++i) {
            const auto m = testkit::random_model(rng);
            const auto w = testkit::random_weights(rng, m.num_blocks());
            for (double a = 0.0; a < 4.0; a += 0.5)
                for (double b = a + 0.1; b < 4.0; b += 0.7)
                    if (eval_J(m, w, 0.5 * (a + b)) > 0.5 * (eval_J(m, w, a) + eval_J(m, w, b)) + 1e-14) return false;
        }
        return true;
    });
    checks.emplace_back("weight objective strictly convex", [&] {
        std::uniform_real_distribution<double> U(0.0, 3.0);
        for (int i = 0; i < 200; ++i) {
            const auto m = testkit::random_model(rng);
            std::vector<double> a, b, mid;
            for (std::size_t k = 0; k < m.num_blocks(); ++k) {
                a.push_back(U(rng));
                b.push_back(U(rng));
                mid.push_back(0.5 * (a.back() + b.back()));
            }
            if (!(eval_weight_objective(m, mid) < 0.5 * (eval_weight_objective(m, a) + eval_weight_objective(m, b))))
                return false;
        }
        return true;
    });
    checks.emplace_back("phi decreasing and convex", [] {
        for (double t = 0.0; t < 8.0; t += 0.01) {
            if (!(phi(t + 0.01) < phi(t))) return false;
            if (phi(t + 0.01) > 0.5 * (phi(t) + phi(t + 0.02)) + 1e-15) return false;
        }
        return true;
    });
    checks.emplace_back("threshold scale invariant", [&] {
        for (int i = 0; i < 30; ++i) {
            const auto m = testkit::random_model(rng);
            const auto w = testkit::random_weights(rng, m.num_blocks());
            const double base = minimize_J(m, w).m_tilde;
            for (double c : {0.1, 3.0, 10.0})
                if (std::abs(minimize_J(m, w.scaled(c)).m_tilde - base) > 1e-10) return false;
        }
        return true;
    });
    checks.emplace_back("solver scale invariant", [&] {
        std::normal_distribution<double> N;
        BPProblem p;
        p.A.resize(10, 30);
        for (auto& v : p.A.reshaped()) v = N(rng);
        Eigen::VectorXd x0 = Eigen::VectorXd::Zero(30);
        x0[2] = 1.0;
        x0[20] = -0.5;
        p.b = p.A * x0;
        p.w = Eigen::VectorXd::Ones(30);
        p.w.head(5).setConstant(0.3);
        const auto a = weighted_bp(p);
        p.w *= 4.0;
        const auto b = weighted_bp(p);
        return (a.x_hat - b.x_hat).norm() <= 1e-6;
    });
    checks.emplace_back("raw roots independent of rho", [] {
        const auto a = optimal_weights(make_model(100, {10, 90}, {0.3, 0.1})).raw.omega;
        const auto b = optimal_weights(make_model(200, {50, 150}, {0.3, 0.1})).raw.omega;
        return a == b;
    });
    checks.emplace_back("seed determinism", [] {
        ExperimentConfig c;
        c.model = two_block(5);
        c.strategies = {Strategy::optimal()};
        c.m_values = {30, 40};
        c.trials_per_m = 10;
        c.master_seed = 1;
        std::ostringstream a, b;
        write_csv(a, run_phase_curve(c));
        c.threads = 3;
        write_csv(b, run_phase_curve(c));
        const auto i1 = generate_instance(c.model, 5), i2 = generate_instance(c.model, 5);
        const auto e1 = mc_expected_dist_sq(c.model, Weights{{0.3, 1.0}}, 1.0, 10000, 2, 1);
        const auto e2 = mc_expected_dist_sq(c.model, Weights{{0.3, 1.0}}, 1.0, 10000, 2, 3);
        return a.str() == b.str() && i1.values == i2.values && e1.estimate == e2.estimate;
    });

    std::size_t passed = 0;
    std::string failed;
    for (const auto& [name, fn] : checks) {
        if (fn())
            ++passed;
        else
            failed += " " + name;
    }
    report(9, "invariant suites", passed == checks.size(),
           std::to_string(passed) + "/" + std::to_string(checks.size()) + " invariants hold" +
               (failed.empty() ? "" : ", failed:" + failed),
           seconds_since(t0));
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    const PhaseRun two = phase_two_block();
    criterion6(two);
    const PhaseRun four = phase_four_block();
    criterion7(two, four);
    criterion8();
    criterion9();
    std::printf("%s: %d criteria failed\n", failures ? "FAILED" : "OK", failures);
    return failures ? 1 : 0;
}
