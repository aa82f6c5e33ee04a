#include "ringwalk/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ringwalk/errors.hpp"

namespace ringwalk {

double unitarity_residual(const CMatrix& u) {
    const CMatrix d = u * u.adjoint() - CMatrix::Identity(u.rows(), u.cols());
    return d.cwiseAbs().maxCoeff();
}

double angle_distance(double x, double y) {
    return std::abs(wrap_phase(x - y));
}

double wrap_phase(double x) {
    double w = std::remainder(x, 2.0 * kPi);
    if (w <= -kPi) w += 2.0 * kPi;
    return w;
}

Rational parse_rational(std::string_view text) {
    auto parse_int = [&](std::string_view s) -> std::int64_t {
        if (s.empty()) throw InvalidConfig("empty rational component in '" + std::string(text) + "'");
        std::size_t pos = 0;
        const std::string str(s);
        std::int64_t v = 0;
        try {
            v = std::stoll(str, &pos);
        } catch (const std::exception&) {
            throw InvalidConfig("not a rational number: '" + std::string(text) + "'");
        }
        if (pos != str.size()) throw InvalidConfig("not a rational number: '" + std::string(text) + "'");
        return v;
    };
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(parse_int(text));
    const auto den = parse_int(text.substr(slash + 1));
    if (den == 0) throw InvalidConfig("zero denominator in '" + std::string(text) + "'");
    return Rational(parse_int(text.substr(0, slash)), den);
}

std::string to_string(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

Rational rational_lcm(const Rational& a, const Rational& b) {
    if (a <= 0 || b <= 0) throw InvalidConfig("lcm requires positive step lengths");
    return Rational(std::lcm(a.numerator(), b.numerator()),
                    std::gcd(a.denominator(), b.denominator()));
}

void RingPairConfig::validate() const {
    if (half_sites < 0) throw InvalidConfig("n_half must be non-negative");
    if (step_a <= 0) throw InvalidConfig("step_a must be positive");
    if (step_b <= 0) throw InvalidConfig("step_b must be positive");
    if (!(radius_ab > 0) || !std::isfinite(radius_ab)) throw InvalidConfig("radius_ab must be positive and finite");
    if (!(radius_cd > 0) || !std::isfinite(radius_cd)) throw InvalidConfig("radius_cd must be positive and finite");
}

JunctionMode parse_junction_mode(std::string_view text) {
    if (text == "or" || text == "formula_or") return JunctionMode::formula_or;
    if (text == "and" || text == "formula_and") return JunctionMode::formula_and;
    if (text == "all") return JunctionMode::all;
    if (text == "custom") return JunctionMode::custom;
    throw InvalidConfig("unknown junction_mode '" + std::string(text) + "' (expected or, and, all, custom)");
}

std::string_view to_string(JunctionMode mode) {
    switch (mode) {
        case JunctionMode::formula_or: return "or";
        case JunctionMode::formula_and: return "and";
        case JunctionMode::all: return "all";
        case JunctionMode::custom: return "custom";
    }
    return "?";
}

std::vector<int> JunctionSchedule::junction_sites() const {
    std::vector<int> out;
    for (int n = 0; n < sites(); ++n)
        if (flags[n]) out.push_back(n);
    return out;
}

JunctionSchedule junction_schedule(const RingPairConfig& config, JunctionMode mode) {
    config.validate();
    const int s = config.sites();
    JunctionSchedule sched;
    sched.mode = mode;
    sched.flags.assign(s, false);

    if (mode == JunctionMode::custom)
        throw InvalidConfig("custom junction mode needs an explicit site list");
    if (mode == JunctionMode::all) {
        sched.flags.assign(s, true);
        return sched;
    }

    const Rational lcm = rational_lcm(config.step_a, config.step_b);
    for (int n = 0; n < s; ++n) {
        // mod(x, lcm) == 0  <=>  x / lcm is an integer
        const bool on_a = (Rational(n) * config.step_a / lcm).denominator() == 1;
        const bool on_b = (Rational(n) * config.step_b / lcm).denominator() == 1;
        sched.flags[n] = mode == JunctionMode::formula_or ? (on_a || on_b) : (on_a && on_b);
    }
    return sched;
}

JunctionSchedule custom_schedule(const RingPairConfig& config, std::vector<int> sites) {
    config.validate();
    const int s = config.sites();
    JunctionSchedule sched;
    sched.mode = JunctionMode::custom;
    sched.flags.assign(s, false);
    for (int site : sites) {
        if (site < 0 || site >= s)
            throw InvalidConfig("junction site " + std::to_string(site) + " outside [0, " + std::to_string(s - 1) + "]");
        sched.flags[site] = true;
    }
    std::sort(sites.begin(), sites.end());
    sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
    sched.custom_sites = std::move(sites);
    return sched;
}

MagneticConfig MagneticConfig::with_defaults(const RingPairConfig& config, double field_b) {
    const double dphi = 2.0 * kPi / config.sites();
    return MagneticConfig{field_b, dphi, dphi};
}

double MagneticConfig::phase_ab(const RingPairConfig& config) const {
    return config.radius_ab * config.radius_ab * dphi_a * field_b;
}

double MagneticConfig::phase_cd(const RingPairConfig& config) const {
    return config.radius_cd * config.radius_cd * dphi_b * field_b;
}

std::vector<double> theta_profile(const JunctionSchedule& schedule, const CoinAngles& angles) {
    std::vector<double> out(schedule.flags.size(), 0.0);
    for (std::size_t n = 0; n < out.size(); ++n)
        if (schedule.flags[n]) out[n] = angles.theta2;
    return out;
}

Coin4 build_coin(double theta_n, double theta1) {
    const double cn = std::cos(theta_n), sn = std::sin(theta_n);
    const double c1 = std::cos(theta1), s1 = std::sin(theta1);
    Coin4 c;
    // clang-format off
    c <<  cn * c1,  cn * s1,  sn * c1,  sn * s1,
         -cn * s1,  cn * c1, -sn * s1,  sn * c1,
         -sn * c1, -sn * s1,  cn * c1,  cn * s1,
          sn * s1, -sn * c1, -cn * s1,  cn * c1;
    // clang-format on
    return c;
}

cplx magnetic_phase(double radius, double dphi, double field_b, HopDirection direction) {
    const double arg = radius * radius * dphi * field_b;
    return std::polar(1.0, direction == HopDirection::forward ? arg : -arg);
}

namespace {

void check_inputs(const RingPairConfig& config, const JunctionSchedule& schedule,
                  const CoinAngles& angles, const MagneticConfig& magnetic) {
    config.validate();
    if (schedule.sites() != config.sites())
        throw InvalidConfig("junction schedule has " + std::to_string(schedule.sites()) +
                            " sites, ring has " + std::to_string(config.sites()));
    if (!std::isfinite(angles.theta1) || !std::isfinite(angles.theta2))
        throw InvalidConfig("coin angles must be finite");
    if (!std::isfinite(magnetic.field_b) || !std::isfinite(magnetic.dphi_a) || !std::isfinite(magnetic.dphi_b))
        throw InvalidConfig("magnetic parameters must be finite");
}

}  // namespace

CMatrix bloch_step_matrix(const RingPairConfig& config, const CoinAngles& angles,
                          const JunctionSchedule& schedule, const MagneticConfig& magnetic,
                          double k_a, double k_b) {
    check_inputs(config, schedule, angles, magnetic);
    const int s = config.sites();
    const auto thetas = theta_profile(schedule, angles);

    const double phi_a = magnetic.phase_ab(config);
    const double phi_b = magnetic.phase_cd(config);
    // Per-component hop target offset and phase, order A, B, C, D.
    const int offset[4] = {+1, -1, +1, -1};
    const cplx hop_phase[4] = {std::polar(1.0, phi_a - k_a), std::polar(1.0, -(phi_a - k_a)),
                               std::polar(1.0, phi_b - k_b), std::polar(1.0, -(phi_b - k_b))};

    CMatrix u = CMatrix::Zero(4 * s, 4 * s);
    for (int n = 0; n < s; ++n) {
        const Coin4 coin = build_coin(thetas[n], angles.theta1);
        for (int comp = 0; comp < 4; ++comp) {
            const int target = ((n + offset[comp]) % s + s) % s;
            for (int j = 0; j < 4; ++j)
                u(state_index(target, comp), state_index(n, j)) += hop_phase[comp] * coin(comp, j);
        }
    }
    return u;
}

StepOperator build_step_operator(const RingPairConfig& config, const CoinAngles& angles,
                                 const JunctionSchedule& schedule, const MagneticConfig& magnetic) {
    return StepOperator{bloch_step_matrix(config, angles, schedule, magnetic, 0.0, 0.0), config, angles,
                        schedule, magnetic};
}

}  // namespace ringwalk
