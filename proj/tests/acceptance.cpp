// Acceptance suite for the benchmark: runs the four experiments at full
// size against the reference values (with the documented tolerance bands),
// the theory property suite, and the determinism contract. Prints one
// PASS/FAIL line per criterion; exit code 0 only if all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include "cfssm/bench.hpp"
#include "cfssm/csv.hpp"
#include "cfssm/verify.hpp"

using namespace cfssm;

namespace {

constexpr std::uint64_t seed = 42;
int failures = 0;
std::vector<std::string> notes;

int workers() {
    return static_cast<int>(std::max(2u, std::thread::hardware_concurrency()));
}

void report(int criterion, bool ok, const std::string& what) {
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, what.c_str());
    if (!ok) ++failures;
}

void check(int criterion, bool ok, const std::string& what) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), "  %-6s %s", ok ? "ok" : "FAIL", what.c_str());
    std::puts(buf);
    if (!ok) notes.push_back(what);
}

bool within_band(double value, double reference, double rel) {
    return std::abs(value - reference) <= rel * reference;
}

const MethodSummary& find(const Summary& s, const std::string& label) {
    for (const auto& m : s.methods)
        if (m.method_label == label) return m;
    throw std::runtime_error("method '" + label + "' missing from summary");
}

double elapsed_s(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), pattern, a, b, c);
    return buf;
}

// ---- criterion 1: exp4_1 orderings and reference bands ----
void criterion_1() {
    const auto start = std::chrono::steady_clock::now();
    notes.clear();
    const Scenario sc = build_scenario("exp4_1");
    const auto methods = default_methods(sc);
    std::vector<RunResult> runs;
    const Summary s = monte_carlo(sc, methods, sc.num_runs, seed, workers(), &runs);

    const double lin = find(s, "fixed_lin").rmse_mean;
    const double nl = find(s, "fixed_nl").rmse_mean;
    const double imm = find(s, "imm").rmse_mean;
    const double cf = find(s, "cf").rmse_mean;
    const double rho = find(s, "cf").switch_rate_mean;

    check(1, lin > nl, fmt("mismatched structure tracks worse: LIN %.3f > NL %.3f", lin, nl));
    check(1, cf <= 1.10 * nl, fmt("CF within 10%% of NL: %.3f vs %.3f (ratio %.3f)", cf, nl,
                                  cf / nl));
    check(1, within_band(lin, 13.463, 0.15), fmt("LIN %.3f within 15%% of 13.463", lin));
    check(1, within_band(nl, 10.273, 0.15), fmt("NL %.3f within 15%% of 10.273", nl));
    check(1, within_band(cf, 10.688, 0.15), fmt("CF %.3f within 15%% of 10.688", cf));
    check(1, within_band(imm, 10.534, 0.15), fmt("IMM %.3f within 15%% of 10.534", imm));
    check(1, rho <= 0.02, fmt("CF switch rate %.4f <= 0.02 (reference 0.011)", rho));

    // informational: the reference run commits to the nonlinear structure
    // after a single early transition
    const std::size_t cf_base = (methods.size() - 1) * static_cast<std::size_t>(sc.num_runs);
    int committed_early = 0;
    for (int r = 0; r < sc.num_runs; ++r) {
        const RunResult& run = runs[cf_base + static_cast<std::size_t>(r)];
        int changes = 0, first_change = -1, prev = sc.initial_structure;
        for (const TraceRow& row : run.trace)
            if (row.active_structure != prev) {
                ++changes;
                if (first_change < 0) first_change = row.t;
                prev = row.active_structure;
            }
        if (changes == 1 && prev == 1 && first_change <= 10) ++committed_early;
    }
    std::printf("  info   single early commitment to the nonlinear structure in %d of %d runs\n",
                committed_early, sc.num_runs);

    const bool ok = notes.empty();
    report(1, ok, fmt("exp4_1 bands and orderings (M=50, T=400, N=2500), %.1f s", elapsed_s(start)));
}

// ---- criterion 2 and 6 share the exp4_2 runs ----
void criteria_2_and_6() {
    auto start = std::chrono::steady_clock::now();
    notes.clear();
    const Scenario sc = build_scenario("exp4_2");
    const auto methods = default_methods(sc);
    std::vector<RunResult> runs;
    const Summary s = monte_carlo(sc, methods, sc.num_runs, seed, workers(), &runs);

    const double quad = find(s, "fixed_quad").rmse_mean;
    const double sat = find(s, "fixed_sat").rmse_mean;
    const double cf = find(s, "cf").rmse_mean;
    const double rho = find(s, "cf").switch_rate_mean;
    const int tau = *sc.change_time;
    const int window = sc.cf.window;

    // CF runs are the last M entries (method-major order)
    const std::size_t cf_base = (methods.size() - 1) * static_cast<std::size_t>(sc.num_runs);
    int switched_runs = 0;
    int committed_runs = 0;
    double mean_delay = 0.0;
    int max_delay = 0;
    long ordered_steps = 0, post_steps = 0;
    for (int r = 0; r < sc.num_runs; ++r) {
        const RunResult& run = runs[cf_base + static_cast<std::size_t>(r)];
        int first_after_tau = -1;
        bool committed = true;
        for (int t = tau; t <= sc.horizon; ++t) {
            const int active = run.trace[static_cast<std::size_t>(t - 1)].active_structure;
            if (active == 1 && first_after_tau < 0) first_after_tau = t;
            if (active == 0 && first_after_tau > 0) committed = false;  // fell back to quad
        }
        if (first_after_tau > 0) {
            ++switched_runs;
            committed_runs += committed;
            mean_delay += first_after_tau - tau;
            max_delay = std::max(max_delay, first_after_tau - tau);
        }
        // once the shift is digested the windowed score ordering reverses:
        // saturating below quadratic
        for (int t = tau + 25; t <= sc.horizon; ++t) {
            double wq = 0.0, ws = 0.0;
            for (int k = 0; k < window; ++k) {
                const TraceRow& row = run.trace[static_cast<std::size_t>(t - 1 - k)];
                wq += row.phi[0];
                ws += row.phi[1];
            }
            ++post_steps;
            if (ws < wq) ++ordered_steps;
        }
    }
    mean_delay /= std::max(switched_runs, 1);
    const double ordered_frac = static_cast<double>(ordered_steps) / post_steps;

    check(2, switched_runs == sc.num_runs,
          fmt("every run switches to the saturating structure (%g of %g)",
              (double)switched_runs, (double)sc.num_runs));
    check(2, committed_runs == switched_runs,
          fmt("no run falls back to the quadratic structure (%g committed)",
              (double)committed_runs));
    check(2, mean_delay <= 25.0,
          fmt("mean switch delay after tau: %.1f steps <= 25 (max %.0f)", mean_delay,
              (double)max_delay));
    check(2, rho <= 0.01, fmt("CF switch rate %.4f <= 0.01 (reference 0.003)", rho));
    check(2, ordered_frac >= 0.95,
          fmt("windowed sat score below quad in %.1f%% of post-shift steps", 100 * ordered_frac));
    check(2, cf <= 1.05 * std::min(quad, sat),
          fmt("CF %.3f <= min(fixed %.3f, %.3f) + 5%%", cf, quad, sat));
    report(2, notes.empty(), fmt("exp4_2 shift response, %.1f s", elapsed_s(start)));

    // criterion 6 reruns the same experiment serially: byte-identical CSV
    start = std::chrono::steady_clock::now();
    notes.clear();
    const Summary serial = monte_carlo(sc, methods, sc.num_runs, seed, 1);
    const Summary wide = monte_carlo(sc, methods, sc.num_runs, seed, 8);
    const std::string a = csv::format_summary(csv::to_rows(serial));
    const std::string b = csv::format_summary(csv::to_rows(wide));
    const std::string c = csv::format_summary(csv::to_rows(s));
    check(6, a == b, "parallelism 1 vs 8 produce byte-identical summary.csv");
    check(6, a == c, "hardware-parallel run matches as well");
    report(6, notes.empty(), fmt("determinism across parallelism degrees, %.1f s",
                                 elapsed_s(start)));
}

// ---- criterion 3: exp4_3 negative control ----
void criterion_3() {
    const auto start = std::chrono::steady_clock::now();
    notes.clear();
    const Scenario sc = build_scenario("exp4_3");
    const auto methods = default_methods(sc);  // fixed_quad, fixed_sat, cf
    std::vector<RunResult> runs;
    const Summary s = monte_carlo(sc, methods, sc.num_runs, seed, workers(), &runs);

    const double rho = find(s, "cf").switch_rate_mean;
    check(3, rho == 0.0, fmt("CF switch rate exactly 0.000 over %g runs", (double)sc.num_runs));

    bool bitwise = true;
    const std::size_t quad_base = 0;
    const std::size_t cf_base = 2 * static_cast<std::size_t>(sc.num_runs);
    for (int r = 0; r < sc.num_runs && bitwise; ++r) {
        const RunResult& q = runs[quad_base + static_cast<std::size_t>(r)];
        const RunResult& c = runs[cf_base + static_cast<std::size_t>(r)];
        for (std::size_t t = 0; t < q.trace.size(); ++t) {
            const TraceRow& a = q.trace[t];
            const TraceRow& b = c.trace[t];
            if (!(a.z_hat == b.z_hat) || a.loglik != b.loglik || a.ess != b.ess ||
                b.active_structure != 0) {
                bitwise = false;
                break;
            }
        }
        if (q.rmse != c.rmse) bitwise = false;
    }
    check(3, bitwise, "CF trace bitwise identical to the fixed quadratic filter in every run");
    report(3, notes.empty(), fmt("exp4_3 negative control, %.1f s", elapsed_s(start)));
}

// ---- criterion 4: exp4_4 two-dimensional case ----
void criterion_4() {
    const auto start = std::chrono::steady_clock::now();
    notes.clear();
    const Scenario sc = build_scenario("exp4_4");
    const auto methods = default_methods(sc);
    std::vector<RunResult> runs;
    const Summary s = monte_carlo(sc, methods, sc.num_runs, seed, workers(), &runs);

    const double lin = find(s, "fixed_lin").rmse_mean;
    const double nl = find(s, "fixed_nl").rmse_mean;
    const double cf = find(s, "cf").rmse_mean;
    const double rho = find(s, "cf").switch_rate_mean;

    check(4, lin > 2.0 * nl, fmt("LIN %.3f > 2x NL %.3f", lin, nl));
    check(4, cf <= 1.10 * nl, fmt("CF %.3f within 10%% of NL %.3f", cf, nl));
    check(4, rho <= 0.01, fmt("CF switch rate %.4f <= 0.01 (reference 0.005)", rho));

    // majority of runs: exactly one structural change, happening right away
    const std::size_t cf_base = (methods.size() - 1) * static_cast<std::size_t>(sc.num_runs);
    int clean_early = 0;
    for (int r = 0; r < sc.num_runs; ++r) {
        const RunResult& run = runs[cf_base + static_cast<std::size_t>(r)];
        int changes = 0;
        int first_change = -1;
        int prev = sc.initial_structure;
        for (const TraceRow& row : run.trace) {
            if (row.active_structure != prev) {
                ++changes;
                if (first_change < 0) first_change = row.t;
                prev = row.active_structure;
            }
        }
        if (changes == 1 && first_change <= 5) ++clean_early;
    }
    check(4, 2 * clean_early > sc.num_runs,
          fmt("single committed switch near t=2 in %g of %g runs", (double)clean_early,
              (double)sc.num_runs));
    report(4, notes.empty(), fmt("exp4_4 two-dimensional latent state, %.1f s", elapsed_s(start)));
}

// ---- criterion 5: theory property suite ----
void criterion_5() {
    const auto start = std::chrono::steady_clock::now();
    bool all = true;
    for (const auto& r : verify::run_all()) {
        std::printf("  %-6s %s — %s\n", r.passed ? "ok" : "FAIL", r.name.c_str(),
                    r.detail.c_str());
        all = all && r.passed;
    }
    report(5, all, fmt("property suite (exact descent, finite switching, non-intrusiveness, "
                       "hull separation, oracle convergence), %.1f s",
                       elapsed_s(start)));
}

}  // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();
    criterion_1();
    criteria_2_and_6();
    criterion_3();
    criterion_4();
    criterion_5();
    std::printf("%s — acceptance finished in %.1f s (seed %llu)\n",
                failures == 0 ? "ALL CRITERIA PASSED" : "CRITERIA FAILED", elapsed_s(start),
                static_cast<unsigned long long>(seed));
    return failures == 0 ? 0 : 1;
}
