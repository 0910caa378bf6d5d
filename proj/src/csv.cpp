#include "cfssm/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cfssm/errors.hpp"

namespace cfssm {
namespace csv {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

const std::string summary_header =
    "experiment,method,runs,rmse_mean,rmse_se,phi_bar_mean,phi_bar_se,"
    "switch_rate_mean,switch_rate_se,seed";

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInputError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw InvalidInputError("failed writing '" + path + "'");
}

// Canonical method order inside one experiment block: fixed filters first
// (bank order via their label position in the file), then imm, then cf.
int method_rank(const std::string& method) {
    if (method == "imm") return 1;
    if (method == "cf") return 2;
    return 0;
}

std::string fmt3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<SummaryRow> to_rows(const Summary& summary) {
    std::vector<SummaryRow> rows;
    for (const MethodSummary& m : summary.methods) {
        SummaryRow r;
        r.experiment = summary.scenario;
        r.method = m.method_label;
        r.runs = m.runs;
        r.rmse_mean = m.rmse_mean;
        r.rmse_se = m.rmse_se;
        r.phi_bar_mean = m.phi_bar_mean;
        r.phi_bar_se = m.phi_bar_se;
        r.switch_rate_mean = m.switch_rate_mean;
        r.switch_rate_se = m.switch_rate_se;
        r.seed = summary.seed;
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string format_summary(const std::vector<SummaryRow>& rows) {
    std::string out = summary_header + "\n";
    for (const SummaryRow& r : rows) {
        out += r.experiment + ',' + r.method + ',' + std::to_string(r.runs) + ',' +
               format_double(r.rmse_mean) + ',' + format_double(r.rmse_se) + ',' +
               format_double(r.phi_bar_mean) + ',' + format_double(r.phi_bar_se) + ',' +
               format_double(r.switch_rate_mean) + ',' + format_double(r.switch_rate_se) + ',' +
               std::to_string(r.seed) + "\n";
    }
    return out;
}

void write_summary(const std::string& path, const std::vector<SummaryRow>& rows) {
    write_file(path, format_summary(rows));
}

std::vector<SummaryRow> read_summary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInputError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw InvalidInputError("'" + path + "': empty file");
    if (line != summary_header)
        throw InvalidInputError("'" + path + "': unexpected summary header");
    std::vector<SummaryRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> f = split(line, ',');
        if (f.size() != 10) throw InvalidInputError("'" + path + "': malformed summary row");
        SummaryRow r;
        r.experiment = f[0];
        r.method = f[1];
        r.runs = std::stoi(f[2]);
        r.rmse_mean = std::stod(f[3]);
        r.rmse_se = std::stod(f[4]);
        r.phi_bar_mean = std::stod(f[5]);
        r.phi_bar_se = std::stod(f[6]);
        r.switch_rate_mean = std::stod(f[7]);
        r.switch_rate_se = std::stod(f[8]);
        r.seed = std::stoull(f[9]);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string format_trace(const RunResult& run, int dim, int n_structures) {
    std::string header = "t";
    for (int d = 1; d <= dim; ++d) header += ",z_true_" + std::to_string(d);
    for (int d = 1; d <= dim; ++d) header += ",z_hat_" + std::to_string(d);
    header += ",s_t";
    for (int s = 0; s < n_structures; ++s) header += ",phi_s" + std::to_string(s);
    header += ",loglik,ess";

    std::string out = header + "\n";
    for (const TraceRow& row : run.trace) {
        out += std::to_string(row.t);
        for (int d = 0; d < dim; ++d) out += ',' + format_double(row.z_true[d]);
        for (int d = 0; d < dim; ++d) out += ',' + format_double(row.z_hat[d]);
        out += ',' + std::to_string(row.active_structure);
        for (int s = 0; s < n_structures; ++s)
            out += ',' + format_double(row.phi[static_cast<std::size_t>(s)]);
        out += ',' + format_double(row.loglik) + ',' + format_double(row.ess) + "\n";
    }
    return out;
}

void write_trace(const std::string& path, const RunResult& run, int dim, int n_structures) {
    write_file(path, format_trace(run, dim, n_structures));
}

std::string render_table(std::vector<SummaryRow> rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const SummaryRow& a, const SummaryRow& b) {
        if (a.experiment != b.experiment) return a.experiment < b.experiment;
        return method_rank(a.method) < method_rank(b.method);
    });

    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-10s %-12s %10s %10s %10s\n", "experiment", "method",
                  "RMSE", "phi_bar", "rho_sw");
    os << buf;
    os << std::string(56, '-') << "\n";
    std::string prev_exp;
    for (const SummaryRow& r : rows) {
        if (!prev_exp.empty() && r.experiment != prev_exp) os << std::string(56, '-') << "\n";
        prev_exp = r.experiment;
        const bool fixed = r.method.rfind("fixed_", 0) == 0;
        const bool imm = r.method == "imm";
        const std::string phi = imm ? "--" : fmt3(r.phi_bar_mean);
        const std::string rho = (fixed || imm) ? "--" : fmt3(r.switch_rate_mean);
        std::snprintf(buf, sizeof(buf), "%-10s %-12s %10s %10s %10s\n", r.experiment.c_str(),
                      r.method.c_str(), fmt3(r.rmse_mean).c_str(), phi.c_str(), rho.c_str());
        os << buf;
    }
    return os.str();
}

}  // namespace csv
}  // namespace cfssm
