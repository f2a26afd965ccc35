#include "cosim/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "cosim/errors.hpp"

namespace cosim {

namespace {

namespace fs = std::filesystem;

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ','))
        fields.push_back(field);
    if (!line.empty() && line.back() == ',')
        fields.push_back("");
    return fields;
}

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw RuntimeError("cannot open " + path);
    return in;
}

}  // namespace

double relative_error_pct(double reference_mbps, double candidate_mbps) {
    if (reference_mbps <= 0.0)
        throw ValidationError("relative error needs a positive reference mean");
    return std::abs(candidate_mbps - reference_mbps) / reference_mbps * 100.0;
}

RelativeErrorReport relative_error_report(std::vector<ErrorRow> rows) {
    RelativeErrorReport report;
    double sum = 0.0;
    for (ErrorRow& row : rows) {
        row.error_pct = relative_error_pct(row.reference_mbps, row.candidate_mbps);
        sum += row.error_pct;
    }
    report.average_error_pct = rows.empty() ? 0.0 : sum / static_cast<double>(rows.size());
    report.rows = std::move(rows);
    return report;
}

void write_comparison_table(std::ostream& out, const std::vector<ComparisonRow>& rows) {
    out << "experiment,flow,reference_mbps,occupancy_mbps,baseline_mbps,"
           "occupancy_error_pct,baseline_error_pct\n";
    double occupancy_sum = 0.0, baseline_sum = 0.0;
    for (const ComparisonRow& row : rows) {
        double occupancy_err = relative_error_pct(row.reference_mbps, row.occupancy_mbps);
        double baseline_err = relative_error_pct(row.reference_mbps, row.baseline_mbps);
        occupancy_sum += occupancy_err;
        baseline_sum += baseline_err;
        out << row.experiment << ',' << row.flow << ',' << fmt2(row.reference_mbps)
            << ',' << fmt2(row.occupancy_mbps) << ',' << fmt2(row.baseline_mbps) << ','
            << fmt2(occupancy_err) << ',' << fmt2(baseline_err) << '\n';
    }
    double n = rows.empty() ? 1.0 : static_cast<double>(rows.size());
    out << "average,,,,," << fmt2(occupancy_sum / n) << ',' << fmt2(baseline_sum / n)
        << '\n';
}

std::map<std::string, double> read_summary_means(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::string line;
    if (!std::getline(in, line) || line != "flow,mean_mbps")
        throw ValidationError(path + ": expected header 'flow,mean_mbps'");
    std::map<std::string, double> means;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        std::vector<std::string> fields = split_csv(line);
        if (fields.size() != 2)
            throw ValidationError(path + ":" + std::to_string(line_no) +
                                  ": expected 'flow,mean_mbps'");
        try {
            means[fields[0]] = std::stod(fields[1]);
        } catch (const std::exception&) {
            throw ValidationError(path + ":" + std::to_string(line_no) +
                                  ": bad mean value '" + fields[1] + "'");
        }
    }
    return means;
}

std::vector<ComparisonRow> collect_comparison_rows(const std::string& root,
                                                   const std::vector<std::string>& flow_dirs) {
    std::vector<ComparisonRow> rows;
    for (size_t i = 0; i < flow_dirs.size(); ++i) {
        fs::path base = fs::path(root) / flow_dirs[i];
        auto reference = read_summary_means((base / "reference" / "summary.csv").string());
        auto candidate = read_summary_means((base / "candidate" / "summary.csv").string());
        auto baseline = read_summary_means((base / "baseline" / "summary.csv").string());
        if (candidate.empty())
            throw ValidationError(flow_dirs[i] + ": candidate summary has no flows");
        // the candidate run holds exactly the reproduced pair's flows; the
        // reference run also carries the interfering traffic, which stays out
        // of the report
        for (const auto& [flow, mbps] : candidate) {
            auto ref = reference.find(flow);
            if (ref == reference.end())
                throw ValidationError(flow_dirs[i] + ": reference summary lacks flow " +
                                      flow);
            auto base_mean = baseline.find(flow);
            if (base_mean == baseline.end())
                throw ValidationError(flow_dirs[i] + ": baseline summary lacks flow " +
                                      flow);
            ComparisonRow row;
            row.experiment = std::to_string(i + 1);
            row.flow = flow;
            row.reference_mbps = ref->second;
            row.occupancy_mbps = mbps;
            row.baseline_mbps = base_mean->second;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

void write_plotdata(std::ostream& out, const std::string& root,
                    const std::vector<std::string>& variants) {
    if (variants.empty())
        throw ValidationError("plotdata needs at least one variant directory");
    out << "variant,interval,mbps\n";
    for (const std::string& variant : variants) {
        std::string path = (fs::path(root) / variant / "throughput.csv").string();
        std::ifstream in = open_or_throw(path);
        std::string line;
        if (!std::getline(in, line) || line != "flow,interval,mbps")
            throw ValidationError(path + ": expected header 'flow,interval,mbps'");

        std::vector<std::vector<std::string>> data;
        std::set<std::string> flows;
        size_t line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty())
                continue;
            std::vector<std::string> fields = split_csv(line);
            if (fields.size() != 3)
                throw ValidationError(path + ":" + std::to_string(line_no) +
                                      ": expected 'flow,interval,mbps'");
            flows.insert(fields[0]);
            data.push_back(std::move(fields));
        }
        for (const auto& fields : data) {
            if (flows.size() == 1)
                out << variant;
            else
                out << variant << '/' << fields[0];
            out << ',' << fields[1] << ',' << fields[2] << '\n';
        }
    }
}

}  // namespace cosim
