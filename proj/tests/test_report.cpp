#include <cmath>
#include <filesystem>
#include <limits>
#include <string>

#include <gtest/gtest.h>

#include "bifbm/error.hpp"
#include "bifbm/experiments.hpp"
#include "bifbm/params.hpp"
#include "bifbm/report.hpp"

using namespace bifbm;
namespace fs = std::filesystem;

namespace {

ExperimentReport sample_report() {
    ExperimentReport r;
    r.config["command"] = "test";
    r.config["seed"] = 7;
    r.add(make_check(3, "plain name", kPlumbingAnchor, 0.1, 0.1000000000000001, 1e-12, Comparison::abs_within));
    r.add(make_check(4, "name, with \"quotes\" and comma", "an anchor", 1.0 / 3.0, 0.33, 0.05,
                     Comparison::rel_within));
    r.add(make_report_only(0, "undefined value", "another anchor", std::numeric_limits<double>::quiet_NaN(), 2.5));
    r.add(make_check(5, "lower bound", kPlumbingAnchor, 0.96, 0.95, 0.0, Comparison::at_least));
    EstimatorRow row;
    row.estimator = "qv";
    row.parameters["h"] = 0.5;
    row.value = 1e-300;
    row.std_error = 2.5e-17;
    row.n = 100;
    r.add_row(row);
    return r;
}

void expect_same(const CheckRecord& a, const CheckRecord& b) {
    EXPECT_EQ(a.criterion, b.criterion);
    EXPECT_EQ(a.name, b.name);
    EXPECT_EQ(a.anchor, b.anchor);
    if (std::isnan(a.measured)) {
        EXPECT_TRUE(std::isnan(b.measured));
    } else {
        EXPECT_EQ(a.measured, b.measured);
    }
    EXPECT_EQ(a.reference, b.reference);
    EXPECT_EQ(a.tolerance, b.tolerance);
    EXPECT_EQ(a.comparison, b.comparison);
    EXPECT_EQ(a.status, b.status);
}

}  // namespace

TEST(Tolerance, ComparisonSemantics) {
    EXPECT_TRUE(within_tolerance(1.04, 1.0, 0.05, Comparison::abs_within));
    EXPECT_FALSE(within_tolerance(1.2, 1.0, 0.1, Comparison::abs_within));
    EXPECT_TRUE(within_tolerance(-2.09, -2.0, 0.05, Comparison::rel_within));
    EXPECT_FALSE(within_tolerance(-2.2, -2.0, 0.05, Comparison::rel_within));
    EXPECT_TRUE(within_tolerance(0.95, 0.95, 0.0, Comparison::at_least));
    EXPECT_FALSE(within_tolerance(0.94, 0.95, 0.0, Comparison::at_least));
    EXPECT_TRUE(within_tolerance(4.0, 4.0, 0.0, Comparison::at_most));
    EXPECT_FALSE(within_tolerance(4.1, 4.0, 0.0, Comparison::at_most));
    const double nan = std::numeric_limits<double>::quiet_NaN();
    EXPECT_FALSE(within_tolerance(nan, 1.0, 1e9, Comparison::abs_within));
    EXPECT_FALSE(within_tolerance(1.0, nan, 1e9, Comparison::at_most));
}

TEST(Tolerance, StatusFollowsComparison) {
    EXPECT_EQ(make_check(1, "a", kPlumbingAnchor, 1.0, 1.0, 0.0, Comparison::abs_within).status, CheckStatus::pass);
    EXPECT_EQ(make_check(1, "a", kPlumbingAnchor, 2.0, 1.0, 0.5, Comparison::abs_within).status, CheckStatus::fail);
    EXPECT_EQ(make_report_only(1, "a", kPlumbingAnchor, 2.0, 1.0).status, CheckStatus::report_only);
}

TEST(Enums, StringRoundTrip) {
    for (const Comparison c :
         {Comparison::abs_within, Comparison::rel_within, Comparison::at_least, Comparison::at_most}) {
        EXPECT_EQ(comparison_from_string(to_string(c)), c);
    }
    for (const CheckStatus s : {CheckStatus::pass, CheckStatus::fail, CheckStatus::report_only}) {
        EXPECT_EQ(status_from_string(to_string(s)), s);
    }
    EXPECT_EQ(to_string(CheckStatus::report_only), "report-only");
    EXPECT_THROW(comparison_from_string("close"), DomainError);
}

TEST(Report, EmptyReportIsValid) {
    ExperimentReport empty;
    EXPECT_TRUE(empty.all_pass());
    const std::string json = emit_json(empty);
    const ExperimentReport back = report_from_json(json);
    EXPECT_TRUE(back.records.empty());
    EXPECT_EQ(emit_json(back), json);
    EXPECT_EQ(emit_csv(empty.records), "criterion,name,anchor,measured,reference,tolerance,comparison,status\n");
    EXPECT_TRUE(records_from_csv(emit_csv(empty.records)).empty());
}

TEST(Report, JsonCsvJsonRoundTripIsExact) {
    const ExperimentReport r = sample_report();
    EXPECT_TRUE(r.all_pass());
    const std::string json = emit_json(r);
    const std::vector<CheckRecord> from_json = report_from_json(json).records;
    ASSERT_EQ(from_json.size(), r.records.size());
    const std::string csv = emit_csv(from_json);
    const std::vector<CheckRecord> from_csv = records_from_csv(csv);
    ASSERT_EQ(from_csv.size(), r.records.size());
    for (std::size_t i = 0; i < r.records.size(); ++i) {
        expect_same(r.records[i], from_json[i]);
        expect_same(r.records[i], from_csv[i]);
    }
    ExperimentReport rebuilt = r;
    rebuilt.records = from_csv;
    EXPECT_EQ(emit_json(rebuilt), json);
    EXPECT_EQ(emit_csv(from_csv), csv);
    // NaN is written as null in JSON.
    EXPECT_NE(json.find("null"), std::string::npos);
}

TEST(Report, FailingRecordClearsAllPass) {
    ExperimentReport r = sample_report();
    r.add(make_check(9, "failing", kPlumbingAnchor, 3.0, 1.0, 0.1, Comparison::abs_within));
    EXPECT_FALSE(r.all_pass());
    EXPECT_NE(emit_json(r).find("\"all_pass\": false"), std::string::npos);
}

TEST(Report, EstimatorRowsCsv) {
    const std::string csv = emit_rows_csv(sample_report().rows);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "estimator,parameters,value,stderr,n");
    EXPECT_NE(csv.find("1e-300"), std::string::npos);
    EXPECT_NE(csv.find(",100"), std::string::npos);
}

TEST(Report, WriteReportListsArtifactsAndNamesBadPaths) {
    const fs::path dir = fs::temp_directory_path() / "bifbm_test_report";
    fs::remove_all(dir);
    ExperimentReport r = sample_report();
    write_report(r, dir);
    EXPECT_EQ(r.artifacts.size(), 3u);
    EXPECT_TRUE(fs::exists(dir / "report.json"));
    EXPECT_TRUE(fs::exists(dir / "report.csv"));
    EXPECT_TRUE(fs::exists(dir / "report_estimates.csv"));
    EXPECT_EQ(report_from_json(read_text_file(dir / "report.json")).records.size(), r.records.size());

    // A regular file where a directory is expected.
    const fs::path blocked = dir / "report.json" / "inner.txt";
    try {
        write_text_file(blocked, "x");
        FAIL() << "expected a write failure";
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find(blocked.string()), std::string::npos);
    }
    fs::remove_all(dir);
}

TEST(Report, VerifyRunIsByteIdentical) {
    const BifBmParams p(0.5, 0.8);
    ExperimentReport a;
    ExperimentReport b;
    verify_parameters(p, kSuiteSeed, a);
    verify_parameters(p, kSuiteSeed, b);
    EXPECT_FALSE(a.records.empty());
    EXPECT_EQ(emit_json(a), emit_json(b));
    EXPECT_EQ(emit_csv(a.records), emit_csv(b.records));
    EXPECT_TRUE(a.all_pass());
}
