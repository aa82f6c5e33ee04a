#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>

#include "ringwalk/linalg.hpp"

namespace ringwalk {

using Rational = boost::rational<std::int64_t>;

// Parses "3", "-2", "2/3" into an exact rational. Throws InvalidConfig.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& r);

// lcm extended to positive rationals: lcm(p1, p2) / gcd(q1, q2) for
// reduced fractions p/q. The smallest positive rational that is an integer
// multiple of both arguments.
Rational rational_lcm(const Rational& a, const Rational& b);

/// Geometry of the two concentric rings. Each ring carries
/// S = 2 * half_sites + 1 sites.
struct RingPairConfig {
    int half_sites = 15;
    Rational step_a{2};
    Rational step_b{1};
    double radius_ab = 2.0;  ///< ring carrying A, B
    double radius_cd = 1.0;  ///< ring carrying C, D

    int sites() const { return 2 * half_sites + 1; }
    void validate() const;
};

struct CoinAngles {
    double theta1 = 0.0;  ///< intra-pair mixing
    double theta2 = 0.0;  ///< inter-ring mixing at junctions
};

enum class JunctionMode { formula_or, formula_and, all, custom };

JunctionMode parse_junction_mode(std::string_view text);
std::string_view to_string(JunctionMode mode);

struct JunctionSchedule {
    JunctionMode mode = JunctionMode::formula_or;
    std::vector<bool> flags;
    std::vector<int> custom_sites;  // populated in custom mode only

    int sites() const { return static_cast<int>(flags.size()); }
    std::vector<int> junction_sites() const;
};

/// Junction flags from the Kronecker-delta rule over n in [0, S-1].
JunctionSchedule junction_schedule(const RingPairConfig& config, JunctionMode mode);

/// Explicit junction list. Sites must lie in [0, S-1].
JunctionSchedule custom_schedule(const RingPairConfig& config, std::vector<int> sites);

struct MagneticConfig {
    double field_b = 0.0;
    double dphi_a = 0.0;  ///< angle per hop on the A/B ring
    double dphi_b = 0.0;  ///< angle per hop on the C/D ring

    /// One hop subtends one of S equally spaced sites on both rings.
    static MagneticConfig with_defaults(const RingPairConfig& config, double field_b);

    double phase_ab(const RingPairConfig& config) const;  // radius_ab^2 * dphi_a * B
    double phase_cd(const RingPairConfig& config) const;  // radius_cd^2 * dphi_b * B
};

std::vector<double> theta_profile(const JunctionSchedule& schedule, const CoinAngles& angles);

/// Two-angle coin: rotation by theta_n on the ring-pair index tensored with
/// rotation by theta1 on the direction index, R(t) = [[cos t, sin t], [-sin t, cos t]].
Coin4 build_coin(double theta_n, double theta1);

enum class HopDirection { forward, backward };

cplx magnetic_phase(double radius, double dphi, double field_b, HopDirection direction);

struct StepOperator {
    CMatrix matrix;
    RingPairConfig config;
    CoinAngles angles;
    JunctionSchedule schedule;
    MagneticConfig magnetic;

    int sites() const { return config.sites(); }
};

/// Dense index of (site, component) with components ordered A, B, C, D.
inline int state_index(int site, int component) { return 4 * site + component; }

/// Coin at every site, then A, C hop n -> n+1 and B, D hop n -> n-1 with the
/// magnetic phases of their ring.
StepOperator build_step_operator(const RingPairConfig& config, const CoinAngles& angles,
                                 const JunctionSchedule& schedule, const MagneticConfig& magnetic);

/// Same walk with Bloch momenta attached per hop: forward A exp(-i k_a),
/// backward B exp(+i k_a), forward C exp(-i k_b), backward D exp(+i k_b).
CMatrix bloch_step_matrix(const RingPairConfig& config, const CoinAngles& angles,
                          const JunctionSchedule& schedule, const MagneticConfig& magnetic,
                          double k_a, double k_b);

}  // namespace ringwalk
