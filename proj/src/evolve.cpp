#include "ringwalk/evolve.hpp"

#include <cmath>
#include <string>

#include "ringwalk/errors.hpp"

namespace ringwalk {

int parse_component(char c) {
    switch (c) {
        case 'A': case 'a': return 0;
        case 'B': case 'b': return 1;
        case 'C': case 'c': return 2;
        case 'D': case 'd': return 3;
        default: throw InvalidConfig(std::string("unknown component '") + c + "' (expected A, B, C or D)");
    }
}

char component_name(int component) {
    return "ABCD"[component & 3];
}

WalkState initial_state(int sites, std::span<const Excitation> excitations) {
    if (sites < 1) throw InvalidConfig("walk needs at least one site");
    WalkState state;
    state.amplitudes = CVector::Zero(4 * sites);
    for (const auto& ex : excitations) {
        if (ex.site < 0 || ex.site >= sites)
            throw InvalidConfig("initial site " + std::to_string(ex.site) + " outside [0, " + std::to_string(sites - 1) + "]");
        if (ex.component < 0 || ex.component > 3) throw InvalidConfig("initial component outside A..D");
        state.amplitudes(state_index(ex.site, ex.component)) += ex.weight;
    }
    const double norm = state.amplitudes.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) throw InvalidConfig("initial state weights are all zero");
    state.amplitudes /= norm;
    return state;
}

WalkState initial_state(int sites) {
    const Excitation origin{};
    return initial_state(sites, std::span<const Excitation>(&origin, 1));
}

namespace {

void check_dims(const WalkState& state, const CMatrix& step) {
    if (step.rows() != step.cols() || step.rows() != state.amplitudes.size())
        throw InvalidConfig("state dimension " + std::to_string(state.amplitudes.size()) +
                            " does not match step operator " + std::to_string(step.rows()) + "x" +
                            std::to_string(step.cols()));
}

}  // namespace

WalkState evolve(const WalkState& state, const CMatrix& step, long steps) {
    check_dims(state, step);
    if (steps < 0) throw InvalidConfig("step count must be non-negative");
    WalkState out = state;
    CVector scratch(out.amplitudes.size());
    for (long t = 0; t < steps; ++t) {
        scratch.noalias() = step * out.amplitudes;
        out.amplitudes.swap(scratch);
    }
    out.time += steps;
    return out;
}

WalkState evolve(const WalkState& state, const StepOperator& step, long steps) {
    return evolve(state, step.matrix, steps);
}

std::vector<WalkState> evolve_history(const WalkState& state, const CMatrix& step, long steps, std::size_t cap) {
    check_dims(state, step);
    if (steps < 0) throw InvalidConfig("step count must be non-negative");
    if (static_cast<std::size_t>(steps) + 1 > cap)
        throw InvalidConfig("history of " + std::to_string(steps + 1) + " states exceeds cap " + std::to_string(cap));
    std::vector<WalkState> history;
    history.reserve(static_cast<std::size_t>(steps) + 1);
    history.push_back(state);
    for (long t = 0; t < steps; ++t) history.push_back(evolve(history.back(), step, 1));
    return history;
}

Distribution probability_distribution(const WalkState& state) {
    Distribution d;
    d.probability.resize(state.sites());
    for (int n = 0; n < state.sites(); ++n)
        for (int c = 0; c < 4; ++c) {
            const double p = std::norm(state.amplitudes(state_index(n, c)));
            d.probability[n][c] = p;
            d.marginals[c] += p;
        }
    return d;
}

std::vector<SectorOccupation> sector_transfer(std::span<const WalkState> history) {
    if (history.empty()) throw InvalidConfig("sector transfer needs at least one state");
    std::vector<SectorOccupation> out;
    out.reserve(history.size());
    for (const auto& s : history) {
        const auto d = probability_distribution(s);
        out.push_back({s.time, d.marginals[0] + d.marginals[1], d.marginals[2] + d.marginals[3]});
    }
    return out;
}

}  // namespace ringwalk
