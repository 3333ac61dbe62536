#include "bifbm/report.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "bifbm/error.hpp"

namespace bifbm {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Shortest representation that parses back to the same double.
std::string format_number(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

double parse_number(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw DomainError("malformed number in report: '" + s + "'");
    }
    return v;
}

// JSON has no NaN; missing values are written as null.
Json number_or_null(double v) {
    return std::isfinite(v) ? Json(v) : Json(nullptr);
}

double number_from_json(const Json& j) {
    return j.is_null() ? kNaN : j.get<double>();
}

std::string quote_csv(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

// Splits RFC 4180 text into rows of fields.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            any = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (c == '\n') {
            row.push_back(std::move(field));
            field.clear();
            rows.push_back(std::move(row));
            row.clear();
            any = false;
        } else if (c != '\r') {
            field += c;
            any = true;
        }
    }
    if (any) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json record_json(const CheckRecord& r) {
    Json j;
    j["criterion"] = r.criterion;
    j["name"] = r.name;
    j["anchor"] = r.anchor;
    j["measured"] = number_or_null(r.measured);
    j["reference"] = number_or_null(r.reference);
    j["tolerance"] = number_or_null(r.tolerance);
    j["comparison"] = to_string(r.comparison);
    j["status"] = to_string(r.status);
    return j;
}

}  // namespace

std::string to_string(Comparison c) {
    switch (c) {
        case Comparison::abs_within:
            return "abs_within";
        case Comparison::rel_within:
            return "rel_within";
        case Comparison::at_least:
            return "at_least";
        case Comparison::at_most:
            return "at_most";
    }
    throw DomainError("unknown comparison");
}

std::string to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::pass:
            return "pass";
        case CheckStatus::fail:
            return "fail";
        case CheckStatus::report_only:
            return "report-only";
    }
    throw DomainError("unknown check status");
}

Comparison comparison_from_string(const std::string& name) {
    for (const Comparison c :
         {Comparison::abs_within, Comparison::rel_within, Comparison::at_least, Comparison::at_most}) {
        if (to_string(c) == name) {
            return c;
        }
    }
    throw DomainError("unknown comparison '" + name + "'");
}

CheckStatus status_from_string(const std::string& name) {
    for (const CheckStatus s : {CheckStatus::pass, CheckStatus::fail, CheckStatus::report_only}) {
        if (to_string(s) == name) {
            return s;
        }
    }
    throw DomainError("unknown check status '" + name + "'");
}

bool within_tolerance(double measured, double reference, double tolerance, Comparison comparison) {
    if (std::isnan(measured) || std::isnan(reference)) {
        return false;
    }
    switch (comparison) {
        case Comparison::abs_within:
            return std::abs(measured - reference) <= tolerance;
        case Comparison::rel_within:
            return std::abs(measured - reference) <= tolerance * std::abs(reference);
        case Comparison::at_least:
            return measured >= reference;
        case Comparison::at_most:
            return measured <= reference;
    }
    return false;
}

CheckRecord make_check(int criterion, std::string name, std::string anchor, double measured, double reference,
                       double tolerance, Comparison comparison) {
    CheckRecord r{criterion, std::move(name), std::move(anchor), measured, reference, tolerance, comparison,
                  CheckStatus::fail};
    r.status = within_tolerance(measured, reference, tolerance, comparison) ? CheckStatus::pass : CheckStatus::fail;
    return r;
}

CheckRecord make_report_only(int criterion, std::string name, std::string anchor, double measured,
                             double reference, double tolerance, Comparison comparison) {
    return CheckRecord{criterion, std::move(name), std::move(anchor), measured, reference, tolerance, comparison,
                       CheckStatus::report_only};
}

bool ExperimentReport::all_pass() const {
    for (const CheckRecord& r : records) {
        if (r.status == CheckStatus::fail) {
            return false;
        }
    }
    return true;
}

std::string emit_json(const ExperimentReport& report) {
    Json doc;
    doc["config"] = report.config;
    Json records = Json::array();
    for (const CheckRecord& r : report.records) {
        records.push_back(record_json(r));
    }
    doc["records"] = std::move(records);
    Json rows = Json::array();
    for (const EstimatorRow& r : report.rows) {
        Json j;
        j["estimator"] = r.estimator;
        j["parameters"] = r.parameters;
        j["value"] = number_or_null(r.value);
        j["stderr"] = number_or_null(r.std_error);
        j["n"] = r.n;
        rows.push_back(std::move(j));
    }
    doc["estimates"] = std::move(rows);
    doc["artifacts"] = report.artifacts;
    doc["all_pass"] = report.all_pass();
    return doc.dump(2) + "\n";
}

std::string emit_csv(const std::vector<CheckRecord>& records) {
    std::ostringstream out;
    out << "criterion,name,anchor,measured,reference,tolerance,comparison,status\n";
    for (const CheckRecord& r : records) {
        out << r.criterion << ',' << quote_csv(r.name) << ',' << quote_csv(r.anchor) << ','
            << format_number(r.measured) << ',' << format_number(r.reference) << ',' << format_number(r.tolerance)
            << ',' << to_string(r.comparison) << ',' << to_string(r.status) << '\n';
    }
    return out.str();
}

std::string emit_rows_csv(const std::vector<EstimatorRow>& rows) {
    std::ostringstream out;
    out << "estimator,parameters,value,stderr,n\n";
    for (const EstimatorRow& r : rows) {
        out << quote_csv(r.estimator) << ',' << quote_csv(r.parameters.dump()) << ',' << format_number(r.value)
            << ',' << format_number(r.std_error) << ',' << r.n << '\n';
    }
    return out.str();
}

std::vector<CheckRecord> records_from_json(const Json& doc) {
    std::vector<CheckRecord> out;
    for (const Json& j : doc.at("records")) {
        CheckRecord r;
        r.criterion = j.at("criterion").get<int>();
        r.name = j.at("name").get<std::string>();
        r.anchor = j.at("anchor").get<std::string>();
        r.measured = number_from_json(j.at("measured"));
        r.reference = number_from_json(j.at("reference"));
        r.tolerance = number_from_json(j.at("tolerance"));
        r.comparison = comparison_from_string(j.at("comparison").get<std::string>());
        r.status = status_from_string(j.at("status").get<std::string>());
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<CheckRecord> records_from_csv(const std::string& text) {
    const auto rows = parse_csv(text);
    if (rows.empty()) {
        throw DomainError("record CSV has no header");
    }
    std::vector<CheckRecord> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& f = rows[i];
        if (f.size() != 8) {
            throw DomainError("record CSV row " + std::to_string(i) + " has " + std::to_string(f.size()) +
                              " fields, expected 8");
        }
        CheckRecord r;
        r.criterion = static_cast<int>(parse_number(f[0]));
        r.name = f[1];
        r.anchor = f[2];
        r.measured = parse_number(f[3]);
        r.reference = parse_number(f[4]);
        r.tolerance = parse_number(f[5]);
        r.comparison = comparison_from_string(f[6]);
        r.status = status_from_string(f[7]);
        out.push_back(std::move(r));
    }
    return out;
}

ExperimentReport report_from_json(const std::string& text) {
    const Json doc = Json::parse(text);
    ExperimentReport report;
    report.config = doc.at("config");
    report.records = records_from_json(doc);
    for (const Json& j : doc.at("estimates")) {
        EstimatorRow r;
        r.estimator = j.at("estimator").get<std::string>();
        r.parameters = j.at("parameters");
        r.value = number_from_json(j.at("value"));
        r.std_error = number_from_json(j.at("stderr"));
        r.n = j.at("n").get<std::size_t>();
        report.rows.push_back(std::move(r));
    }
    report.artifacts = doc.at("artifacts").get<std::vector<std::string>>();
    return report;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    }
    out << text;
    if (!out) {
        throw std::runtime_error("write to '" + path.string() + "' failed");
    }
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path.string() + "' for reading");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_report(ExperimentReport& report, const std::filesystem::path& dir, const std::string& stem) {
    std::filesystem::create_directories(dir);
    const std::string json_name = stem + ".json";
    const std::string csv_name = stem + ".csv";
    const std::string rows_name = stem + "_estimates.csv";
    for (const std::string& name : {json_name, csv_name, rows_name}) {
        bool listed = false;
        for (const std::string& a : report.artifacts) {
            listed = listed || a == name;
        }
        if (!listed) {
            report.artifacts.push_back(name);
        }
    }
    write_text_file(dir / csv_name, emit_csv(report.records));
    write_text_file(dir / rows_name, emit_rows_csv(report.rows));
    write_text_file(dir / json_name, emit_json(report));
}

}  // namespace bifbm
