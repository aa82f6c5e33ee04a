#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ringwalk/core.hpp"

namespace ringwalk {

// Eigen-decomposition of a unitary matrix. Eigenphases are arg(lambda) in
// (-pi, pi], sorted ascending (stable); column i of `vectors` belongs to
// phases[i]. Vectors are orthonormal Schur vectors.
struct UnitaryEigen {
    std::vector<double> phases;
    std::vector<cplx> values;
    CMatrix vectors;
};

inline constexpr double kUnitaryInputTolerance = 1e-10;
inline constexpr double kEigenResidualTolerance = 1e-10;

UnitaryEigen eigen_decompose_unitary(const CMatrix& u);

/// Eigenphases only; same ordering and contract as eigen_decompose_unitary.
std::vector<double> eigenphases(const CMatrix& u);

/// Bottleneck distance between two eigenphase multisets on the circle.
/// Throws InvalidConfig on a size mismatch.
double multiset_distance(std::span<const double> a, std::span<const double> b);

enum class SweepAxis { k_a, k_b, full };

struct MomentumPoint {
    double k_a = 0.0;
    double k_b = 0.0;
};

/// Momentum samples. For a sweep along one axis the other axis holds a
/// single fixed value.
struct MomentumGrid {
    std::vector<double> k_a_samples;
    std::vector<double> k_b_samples;
    SweepAxis sweep_axis = SweepAxis::k_a;

    /// n uniform samples in (-pi, pi]: k_i = -pi + 2 pi (i + 1) / n.
    static std::vector<double> uniform(int n);
    static MomentumGrid sweep_k_a(std::vector<double> k_a, double k_b_fixed);
    static MomentumGrid sweep_k_b(std::vector<double> k_b, double k_a_fixed);
    static MomentumGrid full(std::vector<double> k_a, std::vector<double> k_b);

    void validate() const;
    std::vector<MomentumPoint> points() const;
    /// Momentum along the sweep axis at each point (k_a for full grids).
    std::vector<double> axis_values() const;
};

struct SpectrumResult {
    MomentumGrid grid;
    std::vector<MomentumPoint> points;
    std::vector<std::vector<double>> bands;  // bands[sample][branch]
    std::vector<CMatrix> eigenvectors;       // empty unless requested
    double field_b = 0.0;

    std::size_t branch_count() const { return bands.empty() ? 0 : bands.front().size(); }
};

/// Number of worker threads for momentum sweeps: RINGWALK_THREADS when set
/// to a positive integer, else hardware concurrency.
unsigned sweep_threads();

/// Generic sweep: diagonalizes `matrix_at(point)` for every grid sample.
/// Results are assembled in sample order regardless of threading.
template <class MatrixAt>
SpectrumResult compute_spectrum_of(MatrixAt&& matrix_at, const MomentumGrid& grid, bool keep_vectors,
                                   unsigned threads = 0);

SpectrumResult compute_spectrum(const RingPairConfig& config, const CoinAngles& angles,
                                const JunctionSchedule& schedule, const MagneticConfig& magnetic,
                                const MomentumGrid& grid, bool keep_vectors = false,
                                unsigned threads = 0);

struct AbShiftReport {
    double shift_a = 0.0;  // radius_ab^2 * dphi_a * B
    double shift_b = 0.0;  // radius_cd^2 * dphi_b * B
    std::vector<double> distances;  // per grid sample
    double max_distance = 0.0;
    bool passed = false;
    double tolerance = 1e-10;
};

/// Compares the spectrum with field B against the zero-field spectrum at
/// momenta shifted by the magnetic phases. Reports, never throws on mismatch.
AbShiftReport ab_shift_check(const RingPairConfig& config, const CoinAngles& angles,
                             const JunctionSchedule& schedule, double field_b, const MomentumGrid& grid,
                             double tolerance = 1e-10);

struct GroupVelocity {
    std::vector<double> k;
    std::vector<double> omega;     // unwrapped band along the sweep
    std::vector<double> velocity;  // d omega / d k
    std::vector<int> ambiguous_samples;
};

/// Tracks band `band_index` (index into the sorted eigenphases at the first
/// sample) along the sweep axis by nearest-eigenphase continuation, breaking
/// near-ties with eigenvector overlap when vectors are available. Ties that
/// stay unresolved are listed in ambiguous_samples.
GroupVelocity group_velocity(const SpectrumResult& result, std::size_t band_index, double tie_tolerance = 1e-9);

/// |amplitude|^2 of eigenvector `eigen_index` (in sorted eigenphase order),
/// grouped as [site][component].
std::vector<std::array<double, 4>> eigenstate_distribution(const CMatrix& u, int eigen_index);

/// Fraction of probability within `radius` sites (cyclically) of any junction.
double junction_window_mass(const std::vector<std::array<double, 4>>& distribution,
                            const std::vector<int>& junction_sites, int radius = 2);

}  // namespace ringwalk

#include "ringwalk/detail/spectrum_sweep.hpp"
