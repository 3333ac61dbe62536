#include "bifbm/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <fftw3.h>

#include "bifbm/error.hpp"
#include "bifbm/kernels.hpp"
#include "bifbm/parallel.hpp"
#include "bifbm/rng.hpp"

namespace bifbm {

std::string to_string(Method m) {
    switch (m) {
        case Method::cholesky:
            return "cholesky";
        case Method::lamperti:
            return "lamperti";
        case Method::spectral:
            return "spectral";
    }
    return "unknown";
}

Method method_from_string(const std::string& name) {
    if (name == "cholesky") {
        return Method::cholesky;
    }
    if (name == "lamperti") {
        return Method::lamperti;
    }
    if (name == "spectral") {
        return Method::spectral;
    }
    throw DomainError("unknown sampling method '" + name + "'");
}

namespace {

void fill_normals(NormalStream& stream, Eigen::VectorXd& xi) {
    stream.fill({xi.data(), static_cast<std::size_t>(xi.size())});
}

std::size_t next_pow2(std::size_t n) {
    std::size_t m = 1;
    while (m < n) {
        m <<= 1;
    }
    return m;
}

}  // namespace

// ---------------------------------------------------------------- Cholesky

CholeskySampler::CholeskySampler(TimeGrid grid, const BifBmParams& p)
    : grid_(std::make_shared<const TimeGrid>(std::move(grid))), params_(p), cov_(cov_matrix(*grid_, p)) {}

SamplePath CholeskySampler::sample(std::uint64_t seed, std::uint64_t index) const {
    const Eigen::Index n = cov_.size();
    SamplePath path;
    path.grid = grid_;
    path.values.resize(n, params_.d());
    path.method = Method::cholesky;
    path.seed = seed;
    path.index = index;
    path.params = params_;
    Eigen::VectorXd xi(n);
    const auto lower = cov_.factor().triangularView<Eigen::Lower>();
    for (int c = 0; c < params_.d(); ++c) {
        NormalStream stream(derive_seed(seed, index, static_cast<std::uint64_t>(c)));
        fill_normals(stream, xi);
        path.values.col(c) = lower * xi;
    }
    return path;
}

// ---------------------------------------------------------------- Lamperti

struct LampertiSampler::FftPlan {
    fftw_plan plan = nullptr;
    std::size_t m = 0;

    explicit FftPlan(std::size_t size) : m(size) {
        auto* in = fftw_alloc_complex(m / 2 + 1);
        auto* out = fftw_alloc_real(m);
        plan = fftw_plan_dft_c2r_1d(static_cast<int>(m), in, out, FFTW_ESTIMATE);
        fftw_free(in);
        fftw_free(out);
    }
    ~FftPlan() { fftw_destroy_plan(plan); }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;
};

namespace {

// Eigenvalues of the symmetric circulant whose first row is c_0..c_{m/2}, c_{m/2-1}..c_1.
std::vector<double> circulant_eigenvalues(const std::vector<double>& half_row, std::size_t m) {
    std::vector<double> row(m);
    for (std::size_t k = 0; k <= m / 2; ++k) {
        row[k] = half_row[k];
    }
    for (std::size_t k = m / 2 + 1; k < m; ++k) {
        row[k] = half_row[m - k];
    }
    auto* out = fftw_alloc_complex(m / 2 + 1);
    fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(m), row.data(), out, FFTW_ESTIMATE);
    fftw_execute(plan);
    std::vector<double> eig(m / 2 + 1);
    for (std::size_t j = 0; j <= m / 2; ++j) {
        eig[j] = out[j][0];
    }
    fftw_destroy_plan(plan);
    fftw_free(out);
    return eig;
}

}  // namespace

LampertiSampler::LampertiSampler(TimeGrid grid, const BifBmParams& p, LampertiMode mode, int max_doublings)
    : grid_(std::make_shared<const TimeGrid>(std::move(grid))),
      params_(p),
      mode_(mode),
      min_eigenvalue_(std::numeric_limits<double>::quiet_NaN()) {
    if (grid_->empty()) {
        throw DomainError("grid must be nonempty");
    }
    offset_ = grid_->first_positive();
    n_pos_ = grid_->size() - offset_;
    if (n_pos_ == 0) {
        return;
    }
    std::vector<double> tau(n_pos_);
    for (std::size_t i = 0; i < n_pos_; ++i) {
        tau[i] = std::log((*grid_)[offset_ + i]);
    }
    if (mode_ == LampertiMode::toeplitz_exact) {
        const auto n = static_cast<Eigen::Index>(n_pos_);
        Eigen::MatrixXd a(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            a(i, i) = 1.0;
            for (Eigen::Index j = 0; j < i; ++j) {
                const double v = lamperti_cov(tau[static_cast<std::size_t>(i)] - tau[static_cast<std::size_t>(j)], p);
                a(i, j) = v;
                a(j, i) = v;
            }
        }
        jittered_cholesky(a, toeplitz_factor_);
        return;
    }
    if (!grid_->is_log_uniform()) {
        throw DomainError("circulant Lamperti sampling requires log-uniformly spaced positive points");
    }
    const double delta = n_pos_ > 1 ? (tau.back() - tau.front()) / static_cast<double>(n_pos_ - 1) : 1.0;
    std::size_t m = next_pow2(std::max<std::size_t>(2, 2 * (n_pos_ - 1)));
    for (int attempt = 0;; ++attempt, m *= 2) {
        std::vector<double> half_row(m / 2 + 1);
        for (std::size_t k = 0; k <= m / 2; ++k) {
            half_row[k] = lamperti_cov(static_cast<double>(k) * delta, p);
        }
        const std::vector<double> eig = circulant_eigenvalues(half_row, m);
        const double lo = *std::min_element(eig.begin(), eig.end());
        const double hi = *std::max_element(eig.begin(), eig.end());
        min_eigenvalue_ = lo;
        if (lo >= -kEmbeddingRoundoff * hi) {
            m_ = m;
            sqrt_eigen_.resize(eig.size());
            for (std::size_t j = 0; j < eig.size(); ++j) {
                sqrt_eigen_[j] = std::sqrt(std::max(eig[j], 0.0) / static_cast<double>(m));
            }
            break;
        }
        if (attempt >= max_doublings) {
            throw EmbeddingError("circulant embedding of size " + std::to_string(m) +
                                     " has minimum eigenvalue " + std::to_string(lo),
                                 lo);
        }
    }
    plan_ = std::make_unique<FftPlan>(m_);
}

LampertiSampler::~LampertiSampler() = default;

Eigen::VectorXd LampertiSampler::sample_stationary(std::uint64_t stream_seed) const {
    NormalStream stream(stream_seed);
    const auto n = static_cast<Eigen::Index>(n_pos_);
    if (mode_ == LampertiMode::toeplitz_exact) {
        Eigen::VectorXd xi(n);
        fill_normals(stream, xi);
        return toeplitz_factor_.triangularView<Eigen::Lower>() * xi;
    }
    // Hermitian half spectrum: real modes at j = 0 and m/2, complex pairs between.
    const std::size_t half = m_ / 2;
    auto* spec = fftw_alloc_complex(half + 1);
    auto* out = fftw_alloc_real(m_);
    spec[0][0] = sqrt_eigen_[0] * stream();
    spec[0][1] = 0.0;
    for (std::size_t j = 1; j < half; ++j) {
        const double a = sqrt_eigen_[j] * std::sqrt(0.5);
        spec[j][0] = a * stream();
        spec[j][1] = a * stream();
    }
    spec[half][0] = sqrt_eigen_[half] * stream();
    spec[half][1] = 0.0;
    fftw_execute_dft_c2r(plan_->plan, spec, out);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        y(i) = out[i];
    }
    fftw_free(spec);
    fftw_free(out);
    return y;
}

SamplePath LampertiSampler::sample(std::uint64_t seed, std::uint64_t index) const {
    SamplePath path;
    path.grid = grid_;
    path.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(grid_->size()), params_.d());
    path.method = Method::lamperti;
    path.seed = seed;
    path.index = index;
    path.params = params_;
    if (n_pos_ == 0) {
        return path;
    }
    for (int c = 0; c < params_.d(); ++c) {
        const Eigen::VectorXd y = sample_stationary(derive_seed(seed, index, static_cast<std::uint64_t>(c)));
        for (std::size_t i = 0; i < n_pos_; ++i) {
            const double t = (*grid_)[offset_ + i];
            path.values(static_cast<Eigen::Index>(offset_ + i), c) =
                std::pow(t, params_.hk()) * y(static_cast<Eigen::Index>(i));
        }
    }
    return path;
}

// ---------------------------------------------------------------- spectral

SpectralSampler::SpectralSampler(const BifBmParams& p, std::vector<double> lambdas, std::vector<double> amplitudes,
                                 double tail_mass)
    : params_(p), lambdas_(std::move(lambdas)), amplitudes_(std::move(amplitudes)), tail_mass_(tail_mass) {}

SpectralSampler::SpectralSampler(const BifBmParams& p, std::size_t n_modes, double lambda_max, double tail_tol)
    : params_(p) {
    if (n_modes < 8) {
        throw DomainError("spectral sampler needs at least 8 modes");
    }
    if (!(lambda_max > 0.0)) {
        throw DomainError("lambda_max must be positive");
    }
    tail_mass_ = spectral_tail_mass(lambda_max, p);
    if (tail_mass_ > tail_tol) {
        throw TailMassError("spectral mass " + std::to_string(tail_mass_) + " beyond lambda_max = " +
                            std::to_string(lambda_max) + " exceeds tolerance " + std::to_string(tail_tol));
    }
    const double dl = lambda_max / static_cast<double>(n_modes);
    const auto n_nodes = static_cast<std::size_t>(
        std::clamp(24.0 * std::log(2.0 * static_cast<double>(n_modes)), 48.0, 400.0));
    const SpectralTable table = make_spectral_table(p, 0.5 * dl, lambda_max, n_nodes);
    lambdas_.resize(n_modes);
    amplitudes_.resize(n_modes);
    for (std::size_t j = 0; j < n_modes; ++j) {
        const double lam = (static_cast<double>(j) + 0.5) * dl;
        lambdas_[j] = lam;
        amplitudes_[j] = std::sqrt(2.0 * table(lam) * dl);
    }
}

SpectralSampler SpectralSampler::from_modes(const BifBmParams& p, std::vector<double> lambdas,
                                            std::vector<double> amplitudes) {
    if (lambdas.size() != amplitudes.size()) {
        throw DomainError("spectral modes and amplitudes differ in length");
    }
    return SpectralSampler(p, std::move(lambdas), std::move(amplitudes), 0.0);
}

SamplePath SpectralSampler::sample(const std::shared_ptr<const TimeGrid>& grid, std::uint64_t seed,
                                   std::uint64_t index) const {
    const std::size_t n = grid->size();
    const std::size_t k = lambdas_.size();
    SamplePath path;
    path.grid = grid;
    path.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), params_.d());
    path.method = Method::spectral;
    path.seed = seed;
    path.index = index;
    path.params = params_;
    std::vector<double> xi(k);
    std::vector<double> eta(k);
    for (int c = 0; c < params_.d(); ++c) {
        NormalStream stream(derive_seed(seed, index, static_cast<std::uint64_t>(c)));
        for (std::size_t j = 0; j < k; ++j) {
            xi[j] = amplitudes_[j] * stream();
            eta[j] = amplitudes_[j] * stream();
        }
        for (std::size_t i = grid->first_positive(); i < n; ++i) {
            const double t = (*grid)[i];
            const double lt = std::log(t);
            double acc = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                const double ph = lambdas_[j] * lt;
                acc += xi[j] * std::cos(ph) + eta[j] * std::sin(ph);
            }
            path.values(static_cast<Eigen::Index>(i), c) = std::pow(t, params_.hk()) * acc;
        }
    }
    return path;
}

double SpectralSampler::model_covariance(double s, double t) const {
    if (s == 0.0 || t == 0.0) {
        return 0.0;
    }
    const double dl = std::log(s) - std::log(t);
    double acc = 0.0;
    for (std::size_t j = 0; j < lambdas_.size(); ++j) {
        acc += amplitudes_[j] * amplitudes_[j] * std::cos(lambdas_[j] * dl);
    }
    return std::pow(s * t, params_.hk()) * acc;
}

double SpectralSampler::variance_bias_bound(double t) const {
    double mass = 0.0;
    for (const double a : amplitudes_) {
        mass += a * a;
    }
    return std::pow(t, 2.0 * params_.hk()) * (tail_mass_ + std::abs(1.0 - tail_mass_ - mass));
}

// ---------------------------------------------------------------- sheet

SheetSampler::SheetSampler(std::vector<TimeGrid> grids, const SheetParams& p, std::size_t size_cap)
    : grids_(std::move(grids)), params_(p) {
    if (static_cast<int>(grids_.size()) != p.n_params()) {
        throw DomainError("sheet sampler: number of grids differs from the number of axes");
    }
    for (const auto& g : grids_) {
        if (g.empty()) {
            throw DomainError("grid must be nonempty");
        }
        if (total_ > size_cap / g.size()) {
            throw SizeCapError("product grid exceeds the cap of " + std::to_string(size_cap) + " points");
        }
        total_ *= g.size();
    }
    factors_.resize(static_cast<std::size_t>(p.d()));
    for (int i = 0; i < p.d(); ++i) {
        for (int j = 0; j < p.n_params(); ++j) {
            factors_[static_cast<std::size_t>(i)].push_back(
                cov_matrix(grids_[static_cast<std::size_t>(j)], p.axis(i, j)).factor());
        }
    }
}

SampleField SheetSampler::sample(std::uint64_t seed, std::uint64_t index) const {
    SampleField field;
    field.grids = grids_;
    field.seed = seed;
    field.index = index;
    field.values.resize(static_cast<Eigen::Index>(total_), params_.d());
    std::vector<double> cur(total_);
    std::vector<double> next(total_);
    for (int i = 0; i < params_.d(); ++i) {
        NormalStream stream(derive_seed(seed, index, static_cast<std::uint64_t>(i)));
        stream.fill(cur);
        std::size_t stride = 1;
        for (std::size_t j = 0; j < grids_.size(); ++j) {
            const Eigen::MatrixXd& l = factors_[static_cast<std::size_t>(i)][j];
            const std::size_t nj = grids_[j].size();
            const std::size_t outer = total_ / (stride * nj);
            // Mode-j product: next[.., a, ..] = sum_b L(a, b) cur[.., b, ..].
            for (std::size_t o = 0; o < outer; ++o) {
                for (std::size_t in = 0; in < stride; ++in) {
                    const std::size_t base = o * stride * nj + in;
                    for (std::size_t a = 0; a < nj; ++a) {
                        double acc = 0.0;
                        for (std::size_t b = 0; b <= a; ++b) {
                            acc += l(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) *
                                   cur[base + b * stride];
                        }
                        next[base + a * stride] = acc;
                    }
                }
            }
            std::swap(cur, next);
            stride *= nj;
        }
        for (std::size_t r = 0; r < total_; ++r) {
            field.values(static_cast<Eigen::Index>(r), i) = cur[r];
        }
    }
    return field;
}

// ---------------------------------------------------------------- batches

std::vector<SamplePath> sample_cholesky(const TimeGrid& grid, const BifBmParams& p, std::size_t n_paths,
                                        std::uint64_t seed) {
    if (n_paths == 0) {
        throw DomainError("n_paths must be at least 1");
    }
    const CholeskySampler sampler(grid, p);
    std::vector<SamplePath> out(n_paths);
    parallel_for(n_paths, [&](std::size_t i) { out[i] = sampler.sample(seed, i); });
    return out;
}

std::vector<SamplePath> sample_lamperti(const TimeGrid& grid, const BifBmParams& p, std::size_t n_paths,
                                        std::uint64_t seed, LampertiMode mode) {
    if (n_paths == 0) {
        throw DomainError("n_paths must be at least 1");
    }
    const LampertiSampler sampler(grid, p, mode);
    std::vector<SamplePath> out(n_paths);
    parallel_for(n_paths, [&](std::size_t i) { out[i] = sampler.sample(seed, i); });
    return out;
}

std::vector<SamplePath> sample_spectral(const TimeGrid& grid, const BifBmParams& p, std::size_t n_modes,
                                        double lambda_max, std::size_t n_paths, std::uint64_t seed,
                                        double tail_tol) {
    if (n_paths == 0) {
        throw DomainError("n_paths must be at least 1");
    }
    if (grid.empty()) {
        throw DomainError("grid must be nonempty");
    }
    const SpectralSampler sampler(p, n_modes, lambda_max, tail_tol);
    const auto shared = std::make_shared<const TimeGrid>(grid);
    std::vector<SamplePath> out(n_paths);
    parallel_for(n_paths, [&](std::size_t i) { out[i] = sampler.sample(shared, seed, i); });
    return out;
}

std::vector<SampleField> sample_sheet(const std::vector<TimeGrid>& grids, const SheetParams& p, std::size_t n_fields,
                                      std::uint64_t seed, std::size_t size_cap) {
    if (n_fields == 0) {
        throw DomainError("n_fields must be at least 1");
    }
    const SheetSampler sampler(grids, p, size_cap);
    std::vector<SampleField> out(n_fields);
    parallel_for(n_fields, [&](std::size_t i) { out[i] = sampler.sample(seed, i); });
    return out;
}

}  // namespace bifbm
