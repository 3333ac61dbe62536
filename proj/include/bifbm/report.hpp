#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace bifbm {

/// How a measured value is compared with its reference.
///
///   abs_within  |measured - reference| <= tolerance
///   rel_within  |measured - reference| <= tolerance * |reference|
///   at_least    measured >= reference
///   at_most     measured <= reference
enum class Comparison { abs_within, rel_within, at_least, at_most };

enum class CheckStatus { pass, fail, report_only };

std::string to_string(Comparison c);
std::string to_string(CheckStatus s);
Comparison comparison_from_string(const std::string& name);
CheckStatus status_from_string(const std::string& name);

/// Anchor used by records that check the tooling itself rather than a stated result.
inline constexpr const char* kPlumbingAnchor = "plumbing";

/// One line of a report. NaN values are allowed only in report-only records.
struct CheckRecord {
    int criterion = 0;  ///< acceptance criterion number, 0 when the record belongs to none
    std::string name;
    std::string anchor;
    double measured = 0.0;
    double reference = 0.0;
    double tolerance = 0.0;
    Comparison comparison = Comparison::abs_within;
    CheckStatus status = CheckStatus::report_only;
};

/// Evaluates the comparison; NaN measured or reference values fail.
bool within_tolerance(double measured, double reference, double tolerance, Comparison comparison);

/// Record whose status follows from (measured, reference, tolerance, comparison).
CheckRecord make_check(int criterion, std::string name, std::string anchor, double measured, double reference,
                       double tolerance, Comparison comparison);

/// Record that is printed but never decides the exit status.
CheckRecord make_report_only(int criterion, std::string name, std::string anchor, double measured,
                             double reference, double tolerance = 0.0,
                             Comparison comparison = Comparison::abs_within);

/// Row of the estimator table: estimator name, parameters, value, standard error, sample size.
struct EstimatorRow {
    std::string estimator;
    nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
};

struct ExperimentReport {
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    std::vector<CheckRecord> records;
    std::vector<EstimatorRow> rows;
    std::vector<std::string> artifacts;  ///< file names relative to the output directory

    /// True when no record has status fail.
    bool all_pass() const;
    void add(CheckRecord r) { records.push_back(std::move(r)); }
    void add_row(EstimatorRow r) { rows.push_back(std::move(r)); }
};

/// Report as JSON text: keys in a fixed order, numbers in shortest round-trip form.
std::string emit_json(const ExperimentReport& report);
/// Check records as CSV with header
/// criterion,name,anchor,measured,reference,tolerance,comparison,status.
std::string emit_csv(const std::vector<CheckRecord>& records);
/// Estimator rows as CSV with header estimator,parameters,value,stderr,n.
std::string emit_rows_csv(const std::vector<EstimatorRow>& rows);

std::vector<CheckRecord> records_from_json(const nlohmann::ordered_json& doc);
std::vector<CheckRecord> records_from_csv(const std::string& text);
ExperimentReport report_from_json(const std::string& text);

/// Writes text to a file, throwing std::runtime_error with the path on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

/// Writes <stem>.json, <stem>.csv and <stem>_estimates.csv into dir and lists them as artifacts.
void write_report(ExperimentReport& report, const std::filesystem::path& dir, const std::string& stem = "report");

}  // namespace bifbm
