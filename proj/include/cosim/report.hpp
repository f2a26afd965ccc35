#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace cosim {

/// |candidate - reference| / reference, in percent. The reference must be
/// positive.
double relative_error_pct(double reference_mbps, double candidate_mbps);

struct ErrorRow {
    std::string experiment;
    std::string flow;
    double reference_mbps = 0.0;
    double candidate_mbps = 0.0;
    double error_pct = 0.0;
};

struct RelativeErrorReport {
    std::vector<ErrorRow> rows;
    double average_error_pct = 0.0;  // arithmetic mean of the row errors
};

/// Fills in each row's error and the footer average. Rows come in with
/// experiment, flow and the two means set.
RelativeErrorReport relative_error_report(std::vector<ErrorRow> rows);

/// One comparison row: a measured reference mean against the occupancy-driven
/// run and the occupancy-free baseline.
struct ComparisonRow {
    std::string experiment;
    std::string flow;
    double reference_mbps = 0.0;
    double occupancy_mbps = 0.0;
    double baseline_mbps = 0.0;
};

/// Writes the comparison as CSV: per-row relative errors for both candidate
/// columns plus an `average` footer with the mean of each error column.
void write_comparison_table(std::ostream& out, const std::vector<ComparisonRow>& rows);

/// Reads a summary.csv (`flow,mean_mbps`) back into a map.
std::map<std::string, double> read_summary_means(const std::string& path);

/// Builds the comparison table for a full interference-preset output tree:
/// `root/<flow-dir>/{reference,candidate,baseline}/summary.csv` for the flow
/// directories given, one experiment per directory, bidirectional runs
/// contributing one row per direction.
std::vector<ComparisonRow> collect_comparison_rows(const std::string& root,
                                                   const std::vector<std::string>& flow_dirs);

/// Concatenates `root/<variant>/throughput.csv` into long-format rows
/// `variant,interval,mbps`. Runs with several flows get one series per flow,
/// labeled `variant/flow`.
void write_plotdata(std::ostream& out, const std::string& root,
                    const std::vector<std::string>& variants);

}  // namespace cosim
