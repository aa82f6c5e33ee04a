#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "ringwalk/core.hpp"

namespace ringwalk {

/// Amplitudes over sites, dense index 4 * site + component (A, B, C, D).
struct WalkState {
    CVector amplitudes;
    long time = 0;

    int sites() const { return static_cast<int>(amplitudes.size() / 4); }
};

struct Excitation {
    int site = 0;
    int component = 0;  // 0..3 = A..D
    cplx weight{1.0, 0.0};
};

int parse_component(char c);
char component_name(int component);

/// Normalized superposition of the given excitations; repeated (site,
/// component) pairs add. Default is amplitude 1 on (site 0, A).
WalkState initial_state(int sites, std::span<const Excitation> excitations);
WalkState initial_state(int sites);

WalkState evolve(const WalkState& state, const CMatrix& step, long steps);
WalkState evolve(const WalkState& state, const StepOperator& step, long steps);

/// States at times 0..steps. Throws InvalidConfig if steps + 1 > cap.
std::vector<WalkState> evolve_history(const WalkState& state, const CMatrix& step, long steps,
                                      std::size_t cap = 100000);

struct Distribution {
    std::vector<std::array<double, 4>> probability;  // [site][component]
    std::array<double, 4> marginals{};               // summed over sites

    double total() const { return marginals[0] + marginals[1] + marginals[2] + marginals[3]; }
};

Distribution probability_distribution(const WalkState& state);

struct SectorOccupation {
    long time = 0;
    double ring_ab = 0.0;  // P(A) + P(B)
    double ring_cd = 0.0;  // P(C) + P(D)
};

std::vector<SectorOccupation> sector_transfer(std::span<const WalkState> history);

}  // namespace ringwalk
