#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bifbm/chaos.hpp"
#include "bifbm/error.hpp"
#include "bifbm/estimators.hpp"
#include "bifbm/experiments.hpp"
#include "bifbm/local_time.hpp"
#include "bifbm/parallel.hpp"
#include "bifbm/path_io.hpp"
#include "bifbm/regression.hpp"
#include "bifbm/report.hpp"
#include "bifbm/sampler.hpp"
#include "bifbm/spectral.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using namespace bifbm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitConfigInvalid = 2;
constexpr int kExitComputeError = 3;

/// Invalid configuration, reported with the offending field.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& field, const std::string& message)
        : std::runtime_error(field + ": " + message) {}
};

struct Settings {
    double h = 0.5;
    double k = 1.0;
    int d = 1;
    double t_max = 1.0;
    std::size_t grid_n = 256;
    std::size_t paths = 1;
    std::string method = "cholesky";
    std::uint64_t seed = kSuiteSeed;
    std::string out = "bifbm_out";
    std::string format = "csv";
    double min_ratio = 1e-6;
    std::size_t modes = 1024;
    double lambda_max = 100.0;
    double lambda_min = 0.01;
    double tol = kSpectralTol;
    std::size_t points = 64;
    std::string lattice = "default";
    bool h_given = false;
    double bandwidth = 0.0;
    std::size_t bins = 41;
    std::string target = "level";
    double x = 0.0;
    double scale_ratio = 4.0;
    double dim_tol = 0.1;
    double t = 1.0;
    int order_cap = 40;
    std::size_t quad_n = 16;
    int depth = 48;
    double alpha = 0.0;
    std::string out_dir = "report";
    // Per-command defaults that differ from the shared ones above.
    std::size_t localtime_grid_n = std::size_t{1} << 14;
    std::size_t dimension_grid_n = std::size_t{1} << 16;
    std::size_t dimension_paths = 10;
    double chaos_h = 0.5;
    double chaos_k = 0.8;
};

BifBmParams make_params(const Settings& s) {
    try {
        return BifBmParams(s.h, s.k, s.d);
    } catch (const DomainError& e) {
        throw ConfigError("h/k/d", e.what());
    }
}

Json params_echo(const Settings& s) {
    Json j;
    j["h"] = s.h;
    j["k"] = s.k;
    j["d"] = s.d;
    return j;
}

void write_and_summarize(ExperimentReport& report, const fs::path& dir) {
    write_report(report, dir);
    for (const CheckRecord& r : report.records) {
        std::cout << '[' << to_string(r.status) << "] " << r.name << ": measured " << r.measured << ", reference "
                  << r.reference << '\n';
    }
    std::cout << "report written to " << (dir / "report.json").string() << '\n';
}

int exit_status(const ExperimentReport& report) {
    return report.all_pass() ? kExitOk : kExitCheckFailure;
}

// ---------------------------------------------------------------------------------------------

int run_simulate(const Settings& s) {
    if (s.grid_n == 0) {
        throw ConfigError("grid-n", "grid must be nonempty");
    }
    if (s.paths == 0) {
        throw ConfigError("paths", "need at least one path");
    }
    if (!(s.t_max > 0.0)) {
        throw ConfigError("t-max", "must be positive");
    }
    if (s.format != "csv" && s.format != "binary" && s.format != "both") {
        throw ConfigError("format", "must be csv, binary or both");
    }
    Method method;
    try {
        method = method_from_string(s.method);
    } catch (const DomainError& e) {
        throw ConfigError("method", e.what());
    }
    const BifBmParams p = make_params(s);

    std::vector<SamplePath> paths;
    ExperimentReport report;
    report.config["command"] = "simulate";
    report.config["params"] = params_echo(s);
    report.config["t_max"] = s.t_max;
    report.config["grid_n"] = s.grid_n;
    report.config["paths"] = s.paths;
    report.config["method"] = s.method;
    report.config["seed"] = s.seed;
    switch (method) {
        case Method::cholesky:
            paths = sample_cholesky(TimeGrid::uniform(s.t_max, s.grid_n), p, s.paths, s.seed);
            break;
        case Method::lamperti:
            if (s.grid_n < 2) {
                throw ConfigError("grid-n", "the Lamperti sampler needs at least two positive points");
            }
            report.config["min_ratio"] = s.min_ratio;
            paths = sample_lamperti(log_grid(s.grid_n, s.t_max, s.min_ratio), p, s.paths, s.seed,
                                    LampertiMode::circulant);
            break;
        case Method::spectral: {
            report.config["modes"] = s.modes;
            report.config["lambda_max"] = s.lambda_max;
            paths = sample_spectral(TimeGrid::uniform(s.t_max, s.grid_n), p, s.modes, s.lambda_max, s.paths, s.seed);
            const SpectralSampler sampler(p, s.modes, s.lambda_max);
            report.add(make_report_only(0, "spectral variance bias bound at t_max", kPlumbingAnchor,
                                        sampler.variance_bias_bound(s.t_max), 0.0));
            break;
        }
    }
    const fs::path dir(s.out);
    fs::create_directories(dir);
    for (const SamplePath& path : paths) {
        char stem[32];
        std::snprintf(stem, sizeof(stem), "path_%06llu", static_cast<unsigned long long>(path.index));
        if (s.format != "binary") {
            std::ofstream out(dir / (std::string(stem) + ".csv"));
            write_path_csv(out, path);
            report.artifacts.push_back(std::string(stem) + ".csv");
        }
        if (s.format != "csv") {
            std::ofstream out(dir / (std::string(stem) + ".bin"), std::ios::binary);
            write_path_binary(out, path);
            report.artifacts.push_back(std::string(stem) + ".bin");
        }
    }
    // Empirical variance at the last grid point against t_max^2HK.
    std::vector<double> last;
    for (const SamplePath& path : paths) {
        for (int c = 0; c < path.d(); ++c) {
            const double v = path.values(path.values.rows() - 1, c);
            last.push_back(v * v);
        }
    }
    const MeanEstimate e = mean_estimate(last);
    report.add(make_report_only(0, "empirical variance at t_max", "covariance kernel", e.mean,
                                std::pow(paths.front().t(paths.front().size() - 1), 2.0 * p.hk()),
                                3.0 * e.std_error));
    write_and_summarize(report, dir);
    return exit_status(report);
}

int run_spectrum(const Settings& s) {
    if (!(s.lambda_max > s.lambda_min) || !(s.lambda_min > 0.0)) {
        throw ConfigError("lambda-max", "need 0 < lambda-min < lambda-max");
    }
    if (s.points < 2) {
        throw ConfigError("points", "need at least two frequencies");
    }
    if (!(s.tol > 0.0)) {
        throw ConfigError("tol", "must be positive");
    }
    const BifBmParams p = make_params(s);
    const SpectralTable table = make_spectral_table(p, s.lambda_min, s.lambda_max, s.points, s.tol);
    const fs::path dir(s.out);
    fs::create_directories(dir);
    std::ostringstream csv;
    csv.precision(17);
    csv << "lambda,density\n";
    for (std::size_t i = 0; i < table.lambdas.size(); ++i) {
        csv << table.lambdas[i] << ',' << table.values[i] << '\n';
    }
    write_text_file(dir / "spectrum.csv", csv.str());

    ExperimentReport report;
    report.config["command"] = "spectrum";
    report.config["params"] = params_echo(s);
    report.config["lambda_min"] = s.lambda_min;
    report.config["lambda_max"] = s.lambda_max;
    report.config["points"] = s.points;
    report.config["tol"] = s.tol;
    report.artifacts.push_back("spectrum.csv");
    // Slope over the top decade of the table.
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t i = 0; i < table.lambdas.size(); ++i) {
        if (table.lambdas[i] >= s.lambda_max / 10.0) {
            x.push_back(std::log(table.lambdas[i]));
            y.push_back(std::log(table.values[i]));
        }
    }
    if (x.size() >= 2) {
        report.add(make_report_only(0, "log-log slope over the top decade", "spectral density tail",
                                    fit_scaling(x, y).slope, -(1.0 + 2.0 * p.hk()), 0.05));
    }
    write_and_summarize(report, dir);
    return exit_status(report);
}

std::vector<BifBmParams> load_lattice(const std::string& spec) {
    if (spec == "default") {
        return default_lattice();
    }
    std::ifstream in(spec);
    if (!in) {
        throw ConfigError("lattice", "cannot open '" + spec + "'");
    }
    std::vector<BifBmParams> out;
    try {
        const Json doc = Json::parse(in);
        for (const Json& j : doc) {
            out.emplace_back(j.at("h").get<double>(), j.at("k").get<double>());
        }
    } catch (const Json::exception& e) {
        throw ConfigError("lattice", e.what());
    } catch (const DomainError& e) {
        throw ConfigError("lattice", e.what());
    }
    if (out.empty()) {
        throw ConfigError("lattice", "lattice is empty");
    }
    return out;
}

int run_verify(const Settings& s) {
    const std::vector<BifBmParams> lattice =
        s.h_given ? std::vector<BifBmParams>{make_params(s)} : load_lattice(s.lattice);
    ExperimentReport report;
    report.config["command"] = "verify";
    report.config["lattice"] = s.h_given ? "single" : s.lattice;
    Json points = Json::array();
    for (const BifBmParams& p : lattice) {
        points.push_back(Json{{"h", p.h()}, {"k", p.k()}});
    }
    report.config["points"] = std::move(points);
    report.config["seed"] = s.seed;
    for (const BifBmParams& p : lattice) {
        verify_parameters(p, s.seed, report);
    }
    write_and_summarize(report, fs::path(s.out));
    return exit_status(report);
}

int run_localtime(const Settings& s) {
    if (s.grid_n < 2) {
        throw ConfigError("grid-n", "grid must be nonempty and have at least two points");
    }
    if (s.paths == 0) {
        throw ConfigError("paths", "need at least one path");
    }
    if (s.bins == 0) {
        throw ConfigError("bins", "need at least one output level");
    }
    if (s.bandwidth < 0.0) {
        throw ConfigError("bandwidth", "must be positive (0 selects n^-HK)");
    }
    const BifBmParams p = make_params(s);
    const double h = s.bandwidth > 0.0 ? s.bandwidth : default_bandwidth(s.grid_n, p.hk());
    const LampertiSampler sampler(log_grid(s.grid_n), p, LampertiMode::circulant);
    const auto half = static_cast<long>(s.bins / 2);
    const std::size_t n_levels = 2 * static_cast<std::size_t>(half) + 1;
    std::vector<std::vector<double>> values(s.paths, std::vector<double>(n_levels));
    std::vector<double> mass_error(s.paths);
    std::vector<char> outside(s.paths, 0);
    parallel_for(s.paths, [&](std::size_t i) {
        const LocalTimeEstimate est = occupation_local_time(sampler.sample(s.seed, i), Interval{0.0, 1.0}, h);
        for (std::size_t j = 0; j < n_levels; ++j) {
            std::vector<double> x(static_cast<std::size_t>(p.d()), 0.0);
            x[0] = h * static_cast<double>(static_cast<long>(j) - half);
            values[i][j] = est.value_at(x);
        }
        mass_error[i] = std::abs(est.total_mass() - 1.0);
        outside[i] = est.outside_existence_regime ? 1 : 0;
    });
    const fs::path dir(s.out);
    fs::create_directories(dir);
    std::ostringstream csv;
    csv.precision(17);
    csv << "x,mean_local_time,stderr\n";
    ExperimentReport report;
    for (std::size_t j = 0; j < n_levels; ++j) {
        std::vector<double> col;
        for (const auto& v : values) {
            col.push_back(v[j]);
        }
        const MeanEstimate e = mean_estimate(col);
        const double x = h * static_cast<double>(static_cast<long>(j) - half);
        csv << x << ',' << e.mean << ',' << e.std_error << '\n';
        if (static_cast<long>(j) == half) {
            const double oracle = p.d() == 1 ? local_time_mean_oracle(p.hk()) : std::nan("");
            report.add(make_report_only(0, "mean L(0,[0,1])", "occupation density formula", e.mean, oracle,
                                        0.05, Comparison::rel_within));
        }
    }
    write_text_file(dir / "localtime.csv", csv.str());
    report.config["command"] = "localtime";
    report.config["params"] = params_echo(s);
    report.config["bandwidth"] = h;
    report.config["bins"] = n_levels;
    report.config["grid_n"] = s.grid_n;
    report.config["paths"] = s.paths;
    report.config["seed"] = s.seed;
    report.artifacts.push_back("localtime.csv");
    report.add(make_check(0, "occupation mass equals interval length, max error", kPlumbingAnchor,
                          *std::max_element(mass_error.begin(), mass_error.end()), 0.0, 1e-12,
                          Comparison::abs_within));
    report.add(make_report_only(0, "outside the existence regime HKd < 1", "local time existence",
                                outside[0] != 0 ? 1.0 : 0.0, 0.0));
    write_and_summarize(report, dir);
    return exit_status(report);
}

double graph_reference(double hk, int d) {
    const double inv = 1.0 / hk;
    return inv <= d ? inv : 1.0 + (1.0 - hk) * d;
}

int run_dimension(const Settings& s) {
    if (s.target != "level" && s.target != "graph" && s.target != "image") {
        throw ConfigError("target", "must be level, graph or image");
    }
    if (s.grid_n < 2) {
        throw ConfigError("grid-n", "grid must be nonempty and have at least two points");
    }
    if (s.paths == 0) {
        throw ConfigError("paths", "need at least one path");
    }
    if (s.target == "level" && s.d != 1) {
        throw ConfigError("d", "level sets are estimated for d = 1");
    }
    const BifBmParams p = make_params(s);
    const LampertiSampler sampler(log_grid(s.grid_n), p, LampertiMode::circulant);
    std::vector<SamplePath> paths(s.paths);
    parallel_for(s.paths, [&](std::size_t i) { paths[i] = sampler.sample(s.seed, i); });
    const std::vector<double> scales = dyadic_scales(sampler.grid(), s.scale_ratio);
    ScalingFit fit;
    double reference = 0.0;
    if (s.target == "level") {
        fit = level_set_dimension(paths, s.x, 0.0, scales);
        reference = 1.0 - p.hk();
    } else if (s.target == "graph") {
        fit = graph_image_dimension(paths, DimensionTarget::graph, scales);
        reference = graph_reference(p.hk(), p.d());
    } else {
        fit = graph_image_dimension(paths, DimensionTarget::image, scales);
        reference = std::min(static_cast<double>(p.d()), 1.0 / p.hk());
    }
    ExperimentReport report;
    report.config["command"] = "dimension";
    report.config["target"] = s.target;
    report.config["params"] = params_echo(s);
    report.config["grid_n"] = s.grid_n;
    report.config["paths"] = s.paths;
    report.config["x"] = s.x;
    report.config["scale_ratio"] = s.scale_ratio;
    report.config["seed"] = s.seed;
    report.add(make_check(0, s.target + " box-counting dimension", "Hausdorff dimension formulas", fit.slope,
                          reference, s.dim_tol, Comparison::abs_within));
    report.add_row(EstimatorRow{s.target + "_dimension", Json{{"h", p.h()}, {"k", p.k()}, {"d", p.d()}}, fit.slope,
                                std::nan(""), s.paths});
    write_and_summarize(report, fs::path(s.out));
    return exit_status(report);
}

int run_chaos(const Settings& s) {
    if (s.order_cap < 0) {
        throw ConfigError("order-cap", "must be nonnegative");
    }
    if (s.quad_n == 0) {
        throw ConfigError("quad-n", "must be positive");
    }
    if (!(s.t > 0.0)) {
        throw ConfigError("t", "must be positive");
    }
    const BifBmParams p = make_params(s);
    const std::vector<double> h{p.h()};
    const std::vector<double> k{p.k()};
    const SheetParams sp = SheetParams::isotropic(h, k, p.d());
    const std::vector<double> x(static_cast<std::size_t>(p.d()), s.x);
    const TruncatedNorm tn = s.alpha == 0.0
                                 ? local_time_l2_truncated(x, std::span<const double>(&s.t, 1), sp, s.order_cap,
                                                           s.quad_n, s.depth)
                                 : watanabe_norm_truncated(x, std::span<const double>(&s.t, 1), sp, s.alpha,
                                                           s.order_cap, s.quad_n, s.depth);
    const fs::path dir(s.out);
    fs::create_directories(dir);
    std::ostringstream csv;
    csv.precision(17);
    csv << "m,composition,value,partial_sum\n";
    for (const ChaosTerm& term : tn.terms) {
        std::string comp;
        for (std::size_t i = 0; i < term.composition.size(); ++i) {
            comp += (i == 0 ? "" : ";") + std::to_string(term.composition[i]);
        }
        csv << term.m << ',' << comp << ',' << term.value << ',' << term.partial_sum << '\n';
    }
    write_text_file(dir / "chaos_terms.csv", csv.str());

    ExperimentReport report;
    report.config["command"] = "chaos";
    report.config["params"] = params_echo(s);
    report.config["x"] = s.x;
    report.config["t"] = s.t;
    report.config["order_cap"] = s.order_cap;
    report.config["quad_n"] = s.quad_n;
    report.config["depth"] = s.depth;
    report.config["alpha"] = s.alpha;
    report.artifacts.push_back("chaos_terms.csv");
    report.add(make_report_only(0, "tail envelope estimate beyond the order cap", "chaos expansion of local time",
                                tn.tail_estimate, std::nan("")));
    if (tn.divergent) {
        std::cerr << "warning: alpha is at or beyond the summability bound; the weighted series diverges\n";
    }
    report.add(make_report_only(0, "weighted envelope flagged divergent", "Watanabe space regularity",
                                tn.divergent ? 1.0 : 0.0, std::nan("")));
    if (p.d() == 1 && s.x == 0.0 && s.alpha == 0.0) {
        report.add(make_check(0, "truncated chaos norm vs bivariate-density oracle", "chaos expansion isometry",
                              tn.value, local_time_second_moment_oracle(p, s.t), 0.02, Comparison::rel_within));
    } else {
        report.add(make_report_only(0, "truncated chaos norm", "chaos expansion isometry", tn.value, std::nan("")));
    }
    write_and_summarize(report, dir);
    return exit_status(report);
}

int run_report_all_command(const Settings& s) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<CriterionTiming> timings;
    ExperimentReport report = run_report_all(s.seed, &timings);
    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const fs::path dir(s.out_dir);
    report.artifacts.push_back("timing.json");
    write_and_summarize(report, dir);
    write_text_file(dir / "timing.json", emit_timing_json(timings, total));
    return exit_status(report);
}

// Turns {"h": 0.5, "grid-n": 64} into "--h 0.5 --grid-n 64" placed before the user's flags,
// so flags given on the command line win.
std::vector<std::string> config_arguments(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config", "cannot open '" + path + "'");
    }
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::exception& e) {
        throw ConfigError("config", e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("config", "top level must be an object");
    }
    std::vector<std::string> out;
    for (const auto& [key, value] : doc.items()) {
        out.push_back("--" + key);
        if (value.is_string()) {
            out.push_back(value.get<std::string>());
        } else if (value.is_number() || value.is_boolean()) {
            out.push_back(value.dump());
        } else {
            throw ConfigError(key, "config values must be strings, numbers or booleans");
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);

    // The config file path is taken from the raw arguments before parsing.
    std::vector<std::string> merged;
    try {
        std::string config_path;
        std::vector<std::string> rest;
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--config" && i + 1 < args.size()) {
                config_path = args[++i];
            } else if (args[i].rfind("--config=", 0) == 0) {
                config_path = args[i].substr(9);
            } else {
                rest.push_back(args[i]);
            }
        }
        if (!config_path.empty() && !rest.empty()) {
            merged.push_back(rest.front());
            for (std::string& a : config_arguments(config_path)) {
                merged.push_back(std::move(a));
            }
            merged.insert(merged.end(), rest.begin() + 1, rest.end());
        } else {
            merged = rest;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigInvalid;
    }

    Settings s;
    CLI::App app{"Simulation and verification lab for bifractional Brownian motion and sheets"};
    // --h is the exponent H, so help is reachable through --help only.
    app.set_help_flag("--help", "print this help message and exit");
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.add_option("--config", "JSON file whose fields are overridden by flags");

    auto add_hk = [&s](CLI::App* sub) {
        sub->add_option("--h", s.h, "exponent H in (0, 1)");
        sub->add_option("--k", s.k, "exponent K in (0, 1]");
        sub->add_option("--seed", s.seed, "64-bit seed");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "sample paths and write them to disk");
    add_hk(simulate);
    simulate->add_option("--d", s.d, "number of components");
    simulate->add_option("--t-max", s.t_max, "right end of the time grid");
    simulate->add_option("--grid-n", s.grid_n, "number of grid points");
    simulate->add_option("--paths", s.paths, "number of paths");
    simulate->add_option("--method", s.method, "cholesky | lamperti | spectral");
    simulate->add_option("--out", s.out, "output directory");
    simulate->add_option("--format", s.format, "csv | binary | both");
    simulate->add_option("--min-ratio", s.min_ratio, "smallest positive time / t-max on Lamperti grids");
    simulate->add_option("--modes", s.modes, "spectral modes");
    simulate->add_option("--lambda-max", s.lambda_max, "spectral cutoff");

    CLI::App* spectrum = app.add_subcommand("spectrum", "tabulate the spectral density");
    add_hk(spectrum);
    spectrum->add_option("--lambda-max", s.lambda_max, "largest frequency");
    spectrum->add_option("--lambda-min", s.lambda_min, "smallest frequency");
    spectrum->add_option("--points", s.points, "number of log-spaced frequencies");
    spectrum->add_option("--tol", s.tol, "quadrature tolerance");
    spectrum->add_option("--out", s.out, "output directory");

    CLI::App* verify = app.add_subcommand("verify", "analytic identities and nondeterminism checks");
    verify->add_option("--lattice", s.lattice, "'default' or a JSON file [{\"h\":..,\"k\":..}, ...]");
    CLI::Option* verify_h = verify->add_option("--h", s.h, "verify a single pair instead of a lattice");
    CLI::Option* verify_k = verify->add_option("--k", s.k, "exponent K for --h");
    verify->add_option("--seed", s.seed, "64-bit seed");
    verify->add_option("--out", s.out, "output directory");

    CLI::App* localtime = app.add_subcommand("localtime", "mean occupation density on [0, 1]");
    add_hk(localtime);
    localtime->add_option("--d", s.d, "number of components");
    localtime->add_option("--bandwidth", s.bandwidth, "bin width (default n^-HK)");
    localtime->add_option("--bins", s.bins, "number of output levels centred at 0");
    localtime->add_option("--paths", s.paths, "number of paths");
    localtime->add_option("--grid-n", s.localtime_grid_n, "number of grid points");
    localtime->add_option("--out", s.out, "output directory");

    CLI::App* dimension = app.add_subcommand("dimension", "box-counting dimension of level sets, graphs, images");
    add_hk(dimension);
    dimension->add_option("--target", s.target, "level | graph | image");
    dimension->add_option("--d", s.d, "number of components");
    dimension->add_option("--grid-n", s.dimension_grid_n, "number of grid points");
    dimension->add_option("--paths", s.dimension_paths, "number of paths");
    dimension->add_option("--x", s.x, "level for --target level");
    dimension->add_option("--scale-ratio", s.scale_ratio, "smallest box / largest grid spacing");
    dimension->add_option("--tol", s.dim_tol, "accepted deviation from the reference dimension");
    dimension->add_option("--out", s.out, "output directory");

    CLI::App* chaos = app.add_subcommand("chaos", "truncated chaos norm of the local time");
    chaos->add_option("--h", s.chaos_h, "exponent H in (0, 1)");
    chaos->add_option("--k", s.chaos_k, "exponent K in (0, 1]");
    chaos->add_option("--d", s.d, "number of components");
    chaos->add_option("--x", s.x, "level (same in every component)");
    chaos->add_option("--t", s.t, "time horizon");
    chaos->add_option("--order-cap", s.order_cap, "largest chaos order M");
    chaos->add_option("--quad-n", s.quad_n, "Gauss-Legendre nodes per panel");
    chaos->add_option("--depth", s.depth, "panel halvings toward each singular end");
    chaos->add_option("--alpha", s.alpha, "Watanabe weight exponent (0 for the plain L2 norm)");
    chaos->add_option("--out", s.out, "output directory");

    CLI::App* report_all = app.add_subcommand("report-all", "run every acceptance check and report-only study");
    report_all->add_option("--out-dir", s.out_dir, "output directory");
    report_all->add_option("--seed", s.seed, "64-bit seed");

    try {
        std::vector<std::string> reversed(merged.rbegin(), merged.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfigInvalid;
    }
    s.h_given = verify_h->count() > 0 || verify_k->count() > 0;

    try {
        if (simulate->parsed()) {
            return run_simulate(s);
        }
        if (spectrum->parsed()) {
            return run_spectrum(s);
        }
        if (verify->parsed()) {
            return run_verify(s);
        }
        if (localtime->parsed()) {
            s.grid_n = s.localtime_grid_n;
            return run_localtime(s);
        }
        if (dimension->parsed()) {
            s.grid_n = s.dimension_grid_n;
            s.paths = s.dimension_paths;
            return run_dimension(s);
        }
        if (chaos->parsed()) {
            s.h = s.chaos_h;
            s.k = s.chaos_k;
            return run_chaos(s);
        }
        if (report_all->parsed()) {
            return run_report_all_command(s);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigInvalid;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigInvalid;
    } catch (const std::exception& e) {
        std::cerr << "compute error: " << e.what() << '\n';
        return kExitComputeError;
    }
    return kExitOk;
}
