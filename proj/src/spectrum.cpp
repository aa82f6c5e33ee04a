#include "ringwalk/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <numeric>
#include <string>

// lapacke.h defaults to C99 complex; use the layout-compatible C++ type.
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "ringwalk/errors.hpp"

namespace ringwalk {

namespace {

struct SchurForm {
    CVector values;
    CMatrix vectors;  // empty unless requested
};

// Complex Schur form through LAPACK zgees. For a normal input the
// triangular factor is diagonal, so the Schur vectors are an orthonormal
// eigenbasis even inside degenerate subspaces.
SchurForm complex_schur(const CMatrix& u, bool with_vectors, double input_residual) {
    const auto n = static_cast<lapack_int>(u.rows());
    CMatrix a = u;
    SchurForm out;
    out.values.resize(n);
    if (with_vectors) out.vectors.resize(n, n);
    lapack_int sdim = 0;
    const lapack_int info =
        LAPACKE_zgees(LAPACK_COL_MAJOR, with_vectors ? 'V' : 'N', 'N', nullptr, n, a.data(), n, &sdim,
                      out.values.data(), with_vectors ? out.vectors.data() : nullptr, with_vectors ? n : 1);
    if (info != 0)
        throw ContractViolation("Schur decomposition failed (zgees info " + std::to_string(info) + ")", input_residual);
    return out;
}

double check_input(const CMatrix& u) {
    if (u.rows() != u.cols() || u.rows() == 0) throw InvalidConfig("eigen-decomposition needs a non-empty square matrix");
    const double input_residual = unitarity_residual(u);
    if (!(input_residual <= kUnitaryInputTolerance))
        throw ContractViolation("matrix is not unitary: max|U U^dagger - I|", input_residual);
    return input_residual;
}

void check_moduli(const CVector& values) {
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        const double modulus_error = std::abs(std::abs(values[i]) - 1.0);
        if (!(modulus_error <= kEigenResidualTolerance))
            throw ContractViolation("eigenvalue off the unit circle", modulus_error);
    }
}

std::vector<Eigen::Index> phase_order(const std::vector<double>& phases) {
    std::vector<Eigen::Index> order(phases.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return phases[x] < phases[y]; });
    return order;
}

std::vector<double> raw_phases(const CVector& values) {
    std::vector<double> p(values.size());
    for (Eigen::Index i = 0; i < values.size(); ++i) p[i] = wrap_phase(std::arg(values[i]));
    return p;
}

}  // namespace

UnitaryEigen eigen_decompose_unitary(const CMatrix& u) {
    const double input_residual = check_input(u);
    const SchurForm schur = complex_schur(u, true, input_residual);
    check_moduli(schur.values);
    const CMatrix r = u * schur.vectors - schur.vectors * schur.values.asDiagonal();
    const double eig_residual = r.colwise().norm().maxCoeff();
    if (!(eig_residual <= kEigenResidualTolerance))
        throw ContractViolation("eigenpair residual |U v - lambda v|", eig_residual);

    const auto phases = raw_phases(schur.values);
    const auto order = phase_order(phases);
    const Eigen::Index n = u.rows();
    UnitaryEigen out;
    out.phases.resize(n);
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.phases[i] = phases[order[i]];
        out.values[i] = schur.values[order[i]];
        out.vectors.col(i) = schur.vectors.col(order[i]);
    }
    return out;
}

std::vector<double> eigenphases(const CMatrix& u) {
    const double input_residual = check_input(u);
    const SchurForm schur = complex_schur(u, false, input_residual);
    check_moduli(schur.values);
    auto phases = raw_phases(schur.values);
    std::stable_sort(phases.begin(), phases.end());
    return phases;
}

double multiset_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw InvalidConfig("multiset sizes differ: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    const std::size_t n = a.size();
    if (n == 0) return 0.0;

    auto sorted = [](std::span<const double> s) {
        std::vector<double> v(s.size());
        std::transform(s.begin(), s.end(), v.begin(), wrap_phase);
        std::sort(v.begin(), v.end());
        return v;
    };
    const auto x = sorted(a);
    const auto y = sorted(b);

    // On a circle the bottleneck matching is a cyclic shift of sorted order.
    double best = kPi;
    for (std::size_t shift = 0; shift < n; ++shift) {
        double worst = 0.0;
        for (std::size_t i = 0; i < n && worst < best; ++i)
            worst = std::max(worst, angle_distance(x[i], y[(i + shift) % n]));
        best = std::min(best, worst);
    }
    return best;
}

std::vector<double> MomentumGrid::uniform(int n) {
    if (n < 1) throw InvalidConfig("momentum grid needs at least one sample");
    std::vector<double> k(n);
    for (int i = 0; i < n; ++i) k[i] = -kPi + 2.0 * kPi * (i + 1) / n;
    return k;
}

MomentumGrid MomentumGrid::sweep_k_a(std::vector<double> k_a, double k_b_fixed) {
    return MomentumGrid{std::move(k_a), {k_b_fixed}, SweepAxis::k_a};
}

MomentumGrid MomentumGrid::sweep_k_b(std::vector<double> k_b, double k_a_fixed) {
    return MomentumGrid{{k_a_fixed}, std::move(k_b), SweepAxis::k_b};
}

MomentumGrid MomentumGrid::full(std::vector<double> k_a, std::vector<double> k_b) {
    return MomentumGrid{std::move(k_a), std::move(k_b), SweepAxis::full};
}

void MomentumGrid::validate() const {
    auto check = [](const std::vector<double>& v, const char* name) {
        if (v.empty()) throw InvalidConfig(std::string(name) + " samples are empty");
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!std::isfinite(v[i])) throw InvalidConfig(std::string(name) + " samples must be finite");
            if (i > 0 && !(v[i] > v[i - 1])) throw InvalidConfig(std::string(name) + " samples must be strictly increasing");
        }
    };
    check(k_a_samples, "k_a");
    check(k_b_samples, "k_b");
    if (sweep_axis == SweepAxis::k_a && k_b_samples.size() != 1)
        throw InvalidConfig("a k_a sweep holds exactly one fixed k_b");
    if (sweep_axis == SweepAxis::k_b && k_a_samples.size() != 1)
        throw InvalidConfig("a k_b sweep holds exactly one fixed k_a");
}

std::vector<MomentumPoint> MomentumGrid::points() const {
    std::vector<MomentumPoint> out;
    out.reserve(k_a_samples.size() * k_b_samples.size());
    if (sweep_axis == SweepAxis::k_b) {
        for (double kb : k_b_samples) out.push_back({k_a_samples.front(), kb});
    } else {
        for (double ka : k_a_samples)
            for (double kb : k_b_samples) out.push_back({ka, kb});
    }
    return out;
}

std::vector<double> MomentumGrid::axis_values() const {
    std::vector<double> out;
    for (const auto& p : points()) out.push_back(sweep_axis == SweepAxis::k_b ? p.k_b : p.k_a);
    return out;
}

unsigned sweep_threads() {
    if (const char* env = std::getenv("RINGWALK_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

SpectrumResult compute_spectrum(const RingPairConfig& config, const CoinAngles& angles,
                                const JunctionSchedule& schedule, const MagneticConfig& magnetic,
                                const MomentumGrid& grid, bool keep_vectors, unsigned threads) {
    // Validate once up front so config errors surface as InvalidConfig
    // rather than from inside a worker.
    (void)bloch_step_matrix(config, angles, schedule, magnetic, 0.0, 0.0);
    auto result = compute_spectrum_of(
        [&](const MomentumPoint& p) { return bloch_step_matrix(config, angles, schedule, magnetic, p.k_a, p.k_b); },
        grid, keep_vectors, threads);
    result.field_b = magnetic.field_b;
    return result;
}

AbShiftReport ab_shift_check(const RingPairConfig& config, const CoinAngles& angles,
                             const JunctionSchedule& schedule, double field_b, const MomentumGrid& grid,
                             double tolerance) {
    grid.validate();
    const MagneticConfig with_field = MagneticConfig::with_defaults(config, field_b);
    const MagneticConfig zero_field = MagneticConfig::with_defaults(config, 0.0);

    AbShiftReport report;
    report.tolerance = tolerance;
    report.shift_a = with_field.phase_ab(config);
    report.shift_b = with_field.phase_cd(config);
    for (const auto& p : grid.points()) {
        const auto lhs = eigenphases(bloch_step_matrix(config, angles, schedule, with_field, p.k_a, p.k_b));
        const auto rhs = eigenphases(
            bloch_step_matrix(config, angles, schedule, zero_field, p.k_a - report.shift_a, p.k_b - report.shift_b));
        report.distances.push_back(multiset_distance(lhs, rhs));
    }
    report.max_distance = *std::max_element(report.distances.begin(), report.distances.end());
    report.passed = report.max_distance <= tolerance;
    return report;
}

GroupVelocity group_velocity(const SpectrumResult& result, std::size_t band_index, double tie_tolerance) {
    if (result.grid.sweep_axis == SweepAxis::full)
        throw InvalidConfig("group velocity needs a one-axis sweep");
    const std::size_t n = result.bands.size();
    if (n < 3) throw InvalidConfig("group velocity needs at least 3 samples");
    if (band_index >= result.branch_count()) throw InvalidConfig("band index out of range");
    const bool have_vectors = result.eigenvectors.size() == n;

    GroupVelocity gv;
    gv.k = result.grid.axis_values();
    gv.omega.resize(n);

    std::size_t current = band_index;
    double prev_phase = result.bands[0][current];
    gv.omega[0] = prev_phase;
    for (std::size_t i = 1; i < n; ++i) {
        const auto& phases = result.bands[i];
        std::vector<std::size_t> order(phases.size());
        std::iota(order.begin(), order.end(), 0);
        std::vector<double> dist(phases.size());
        for (std::size_t j = 0; j < phases.size(); ++j) dist[j] = angle_distance(phases[j], prev_phase);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return dist[x] < dist[y]; });

        std::size_t pick = order[0];
        const bool tie = order.size() > 1 && dist[order[1]] - dist[order[0]] < tie_tolerance;
        if (tie) {
            bool resolved = false;
            if (have_vectors) {
                const auto prev_vec = result.eigenvectors[i - 1].col(current);
                double best = -1.0, runner_up = -1.0;
                for (std::size_t j : order) {
                    if (dist[j] - dist[order[0]] >= tie_tolerance) break;
                    const double overlap = std::abs(prev_vec.dot(result.eigenvectors[i].col(j)));
                    if (overlap > best) {
                        runner_up = best;
                        best = overlap;
                        pick = j;
                    } else {
                        runner_up = std::max(runner_up, overlap);
                    }
                }
                resolved = best - runner_up > 1e-6;
            }
            if (!resolved) gv.ambiguous_samples.push_back(static_cast<int>(i));
        }
        gv.omega[i] = gv.omega[i - 1] + wrap_phase(phases[pick] - prev_phase);
        prev_phase = phases[pick];
        current = pick;
    }

    gv.velocity.resize(n);
    gv.velocity[0] = (gv.omega[1] - gv.omega[0]) / (gv.k[1] - gv.k[0]);
    gv.velocity[n - 1] = (gv.omega[n - 1] - gv.omega[n - 2]) / (gv.k[n - 1] - gv.k[n - 2]);
    for (std::size_t i = 1; i + 1 < n; ++i)
        gv.velocity[i] = (gv.omega[i + 1] - gv.omega[i - 1]) / (gv.k[i + 1] - gv.k[i - 1]);
    return gv;
}

std::vector<std::array<double, 4>> eigenstate_distribution(const CMatrix& u, int eigen_index) {
    if (u.rows() % 4 != 0) throw InvalidConfig("matrix dimension is not a multiple of 4");
    if (eigen_index < 0 || eigen_index >= u.rows())
        throw InvalidConfig("eigen index " + std::to_string(eigen_index) + " out of range [0, " +
                            std::to_string(u.rows() - 1) + "]");
    const auto eig = eigen_decompose_unitary(u);
    const auto v = eig.vectors.col(eigen_index);
    const double norm2 = v.squaredNorm();
    std::vector<std::array<double, 4>> out(u.rows() / 4);
    for (std::size_t site = 0; site < out.size(); ++site)
        for (int comp = 0; comp < 4; ++comp) out[site][comp] = std::norm(v(state_index(static_cast<int>(site), comp))) / norm2;
    return out;
}

double junction_window_mass(const std::vector<std::array<double, 4>>& distribution,
                            const std::vector<int>& junction_sites, int radius) {
    const int s = static_cast<int>(distribution.size());
    std::vector<bool> in_window(s, false);
    for (int j : junction_sites)
        for (int d = -radius; d <= radius; ++d) in_window[((j + d) % s + s) % s] = true;
    double mass = 0.0;
    for (int n = 0; n < s; ++n)
        if (in_window[n])
            for (double p : distribution[n]) mass += p;
    return mass;
}

}  // namespace ringwalk
