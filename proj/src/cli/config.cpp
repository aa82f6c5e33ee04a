#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ringwalk/cli.hpp"
#include "ringwalk/errors.hpp"

namespace ringwalk::cli {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double parse_real(std::string_view text, std::string_view key) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
        throw InvalidConfig(std::string(key) + ": not a finite number: '" + t + "'");
    return v;
}

long parse_integer(std::string_view text, std::string_view key) {
    const std::string t = trim(text);
    long v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
        throw InvalidConfig(std::string(key) + ": not an integer: '" + t + "'");
    return v;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto pos = s.find(sep, start);
        const auto piece = trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (!piece.empty()) out.push_back(piece);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

// "site:comp" or "site:comp:re:im"
Excitation parse_excitation(std::string_view text) {
    const auto parts = split(text, ':');
    if (parts.size() != 2 && parts.size() != 4)
        throw InvalidConfig("init: expected site:comp or site:comp:re:im, got '" + std::string(text) + "'");
    Excitation ex;
    ex.site = static_cast<int>(parse_integer(parts[0], "init"));
    if (parts[1].size() != 1) throw InvalidConfig("init: component must be one of A, B, C, D");
    ex.component = parse_component(parts[1][0]);
    if (parts.size() == 4) ex.weight = {parse_real(parts[2], "init"), parse_real(parts[3], "init")};
    return ex;
}

std::string_view to_string(SweepAxis axis) {
    return axis == SweepAxis::k_b ? "k_b" : "k_a";
}

std::string_view to_string(GridKind g) {
    switch (g) {
        case GridKind::concentric: return "concentric";
        case GridKind::moire: return "moire";
        case GridKind::swapped: return "swapped";
    }
    return "?";
}

}  // namespace

double parse_angle(std::string_view text) {
    std::string t;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    const auto pi_pos = t.find("pi");
    if (pi_pos == std::string::npos) return parse_real(t, "angle");

    std::string coeff = t.substr(0, pi_pos);
    if (!coeff.empty() && coeff.back() == '*') coeff.pop_back();
    double value = kPi;
    if (coeff == "-") value = -kPi;
    else if (!coeff.empty() && coeff != "+") value = parse_real(coeff, "angle") * kPi;

    const std::string rest = t.substr(pi_pos + 2);
    if (rest.empty()) return value;
    if (rest.front() != '/') throw InvalidConfig("angle: cannot parse '" + std::string(text) + "'");
    const double den = parse_real(rest.substr(1), "angle");
    if (den == 0.0) throw InvalidConfig("angle: zero denominator in '" + std::string(text) + "'");
    return value / den;
}

void ExperimentConfig::set(std::string_view key_in, std::string_view value_in) {
    const std::string key = trim(key_in);
    const std::string value = trim(value_in);
    if (key == "n_half") ring.half_sites = static_cast<int>(parse_integer(value, key));
    else if (key == "step_a") ring.step_a = parse_rational(value);
    else if (key == "step_b") ring.step_b = parse_rational(value);
    else if (key == "radius_ab") ring.radius_ab = parse_real(value, key);
    else if (key == "radius_cd") ring.radius_cd = parse_real(value, key);
    else if (key == "theta1") angles.theta1 = parse_angle(value);
    else if (key == "theta2") angles.theta2 = parse_angle(value);
    else if (key == "junction_mode") junction_mode = parse_junction_mode(value);
    else if (key == "junction_sites") {
        junction_sites.clear();
        for (const auto& s : split(value, ',')) junction_sites.push_back(static_cast<int>(parse_integer(s, key)));
    } else if (key == "field_b") field_b = parse_real(value, key);
    else if (key == "dphi_a") dphi_a = parse_angle(value);
    else if (key == "dphi_b") dphi_b = parse_angle(value);
    else if (key == "k_axis") {
        if (value == "k_a") k_axis = SweepAxis::k_a;
        else if (value == "k_b") k_axis = SweepAxis::k_b;
        else throw InvalidConfig("k_axis must be k_a or k_b");
    } else if (key == "k_fixed") k_fixed = parse_angle(value);
    else if (key == "k_samples") k_samples = static_cast<int>(parse_integer(value, key));
    else if (key == "steps") steps = parse_integer(value, key);
    else if (key == "init") {
        init.clear();
        for (const auto& s : split(value, ',')) init.push_back(parse_excitation(s));
    } else if (key == "n_outer") n_outer = static_cast<int>(parse_integer(value, key));
    else if (key == "n_inner") n_inner = static_cast<int>(parse_integer(value, key));
    else if (key == "junction_count") junction_count = static_cast<int>(parse_integer(value, key));
    else if (key == "swap_i") swap_i = static_cast<int>(parse_integer(value, key));
    else if (key == "swap_j") swap_j = static_cast<int>(parse_integer(value, key));
    else if (key == "grid") {
        if (value == "concentric") grid = GridKind::concentric;
        else if (value == "moire") grid = GridKind::moire;
        else if (value == "swapped") grid = GridKind::swapped;
        else throw InvalidConfig("grid must be concentric, moire or swapped");
    } else {
        throw InvalidConfig("unknown config key '" + key + "'");
    }
}

void ExperimentConfig::validate() const {
    ring.validate();
    if (!std::isfinite(angles.theta1) || !std::isfinite(angles.theta2)) throw InvalidConfig("theta1/theta2 must be finite");
    if (junction_mode == JunctionMode::custom && junction_sites.empty())
        throw InvalidConfig("junction_mode = custom needs junction_sites");
    if (k_samples < 1) throw InvalidConfig("k_samples must be at least 1");
    if (steps < 0) throw InvalidConfig("steps must be non-negative");
    if (init.empty()) throw InvalidConfig("init must list at least one excitation");
    if (n_inner < 2 || n_outer < n_inner) throw InvalidConfig("Moire rings need n_outer >= n_inner >= 2");
    if (junction_count < 1) throw InvalidConfig("junction_count must be at least 1");
    (void)schedule();
}

JunctionSchedule ExperimentConfig::schedule() const {
    if (junction_mode == JunctionMode::custom) return custom_schedule(ring, junction_sites);
    return junction_schedule(ring, junction_mode);
}

MagneticConfig ExperimentConfig::magnetic() const {
    MagneticConfig m = MagneticConfig::with_defaults(ring, field_b);
    if (dphi_a) m.dphi_a = *dphi_a;
    if (dphi_b) m.dphi_b = *dphi_b;
    return m;
}

MomentumGrid ExperimentConfig::momentum_grid() const {
    auto samples = MomentumGrid::uniform(k_samples);
    return k_axis == SweepAxis::k_b ? MomentumGrid::sweep_k_b(std::move(samples), k_fixed)
                                    : MomentumGrid::sweep_k_a(std::move(samples), k_fixed);
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
    std::string sites;
    for (int s : junction_sites) sites += (sites.empty() ? "" : ",") + std::to_string(s);
    std::string init_text;
    for (const auto& ex : init) {
        if (!init_text.empty()) init_text += ",";
        init_text += std::to_string(ex.site) + ":" + component_name(ex.component) + ":" + format_double(ex.weight.real()) +
                     ":" + format_double(ex.weight.imag());
    }
    const auto mag = magnetic();
    return {
        {"n_half", std::to_string(ring.half_sites)},
        {"step_a", ringwalk::to_string(ring.step_a)},
        {"step_b", ringwalk::to_string(ring.step_b)},
        {"radius_ab", format_double(ring.radius_ab)},
        {"radius_cd", format_double(ring.radius_cd)},
        {"theta1", format_double(angles.theta1)},
        {"theta2", format_double(angles.theta2)},
        {"junction_mode", std::string(ringwalk::to_string(junction_mode))},
        {"junction_sites", sites},
        {"field_b", format_double(field_b)},
        {"dphi_a", format_double(mag.dphi_a)},
        {"dphi_b", format_double(mag.dphi_b)},
        {"k_axis", std::string(to_string(k_axis))},
        {"k_fixed", format_double(k_fixed)},
        {"k_samples", std::to_string(k_samples)},
        {"steps", std::to_string(steps)},
        {"init", init_text},
        {"n_outer", std::to_string(n_outer)},
        {"n_inner", std::to_string(n_inner)},
        {"junction_count", std::to_string(junction_count)},
        {"swap_i", std::to_string(swap_i)},
        {"swap_j", std::to_string(swap_j)},
        {"grid", std::string(to_string(grid))},
    };
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidConfig("line " + std::to_string(lineno) + ": expected 'key = value'");
        try {
            base.set(std::string_view(line).substr(0, eq), std::string_view(line).substr(eq + 1));
        } catch (const InvalidConfig& e) {
            throw InvalidConfig("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw InvalidConfig("cannot open config file '" + path.string() + "'");
    return parse_config(in, std::move(base));
}

}  // namespace ringwalk::cli
