#pragma once

#include <string>
#include <vector>

#include "cfssm/bench.hpp"

namespace cfssm {
namespace csv {

/// Shortest decimal form that round-trips a double (17 significant digits).
std::string format_double(double v);

/// summary.csv rows: one per (experiment, method).
struct SummaryRow {
    std::string experiment;
    std::string method;
    int runs = 0;
    double rmse_mean = 0.0, rmse_se = 0.0;
    double phi_bar_mean = 0.0, phi_bar_se = 0.0;
    double switch_rate_mean = 0.0, switch_rate_se = 0.0;
    std::uint64_t seed = 0;
};

std::vector<SummaryRow> to_rows(const Summary& summary);

/// Header: experiment,method,runs,rmse_mean,rmse_se,phi_bar_mean,
/// phi_bar_se,switch_rate_mean,switch_rate_se,seed
std::string format_summary(const std::vector<SummaryRow>& rows);
void write_summary(const std::string& path, const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> read_summary(const std::string& path);

/// Header: t,z_true_1[,z_true_2],z_hat_1[,z_hat_2],s_t,phi_s0,phi_s1,...,
/// loglik,ess (state columns doubled in 2-D).
std::string format_trace(const RunResult& run, int dim, int n_structures);
void write_trace(const std::string& path, const RunResult& run, int dim, int n_structures);

/// Human-readable table mirroring the benchmark summary layout; metrics
/// that are not meaningful for a method (switch rate for fixed filters,
/// score average and switch rate for IMM) render as "--".
std::string render_table(std::vector<SummaryRow> rows);

}  // namespace csv
}  // namespace cfssm
