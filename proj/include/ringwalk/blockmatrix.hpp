#pragma once

#include <algorithm>
#include <array>
#include <initializer_list>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ringwalk/core.hpp"

namespace ringwalk {

/// coeff * exp(i (p_a K_a + p_b K_b))
struct PhasedEntry {
    cplx coeff{0.0, 0.0};
    int p_a = 0;
    int p_b = 0;

    cplx at(double k_a, double k_b) const;
    bool is_zero() const { return coeff == cplx(0.0, 0.0); }
    friend bool operator==(const PhasedEntry&, const PhasedEntry&) = default;
};

enum class BoxTag { M13, M24, M1, M2, M3p, M3G, M4p, M4G, Zero, Custom };

std::string_view to_string(BoxTag tag);
BoxTag parse_box_tag(std::string_view text);

/// A 4x4 momentum-tagged block. Rows and columns follow the A, B, C, D order.
struct Box {
    std::array<std::array<PhasedEntry, 4>, 4> entries{};
    BoxTag tag = BoxTag::Zero;
    std::string label = "0";
    double theta_n = 0.0;
    double theta1 = 0.0;

    Coin4 evaluate(double k_a, double k_b) const;
    Box adjoint() const;
    bool is_zero() const;
    bool row_is_zero(int row) const;
    friend bool operator==(const Box& x, const Box& y) { return x.entries == y.entries; }
};

/// The eight named boxes. M13 / M24 carry coin rows (A, C) and (B, D) with
/// forward exp(-iK) and backward exp(+iK) factors; M1 / M2 are the theta1
/// rotation rows for the A/B ring; M3p / M4p rotate C, D by theta_n; the
/// G variants add identity on A, B. Custom throws InvalidConfig.
Box make_box(BoxTag tag, double theta_n, double theta1);

/// Identity on the listed components with no momentum factor.
Box transit_box(std::initializer_list<int> components);

/// Keeps only the listed rows of `box`.
Box row_piece(const Box& box, std::initializer_list<int> rows, std::string label);

inline constexpr double kUnitaryCheckTolerance = 1e-10;

enum class GridLayout { concentric, moire, custom };

std::string_view to_string(GridLayout layout);

struct BoxGrid {
    int rows = 0;
    int cols = 0;
    GridLayout layout = GridLayout::custom;
    bool cyclic = true;
    std::vector<Box> cells;  // row-major
    /// column_home[c]: the column the boxes now at c were built in. Hops
    /// moved by swap_block_columns scale their exponents by |c - home|.
    std::vector<int> column_home;

    BoxGrid() = default;
    BoxGrid(int r, int c, GridLayout layout);

    Box& at(int r, int c) { return cells[static_cast<std::size_t>(r) * cols + c]; }
    const Box& at(int r, int c) const { return cells[static_cast<std::size_t>(r) * cols + c]; }

    /// Adds `box` into cell (r, c). Overlapping nonzero entries are an error.
    void add(int r, int c, const Box& box);

    friend bool operator==(const BoxGrid&, const BoxGrid&) = default;
};

/// Dense 4R x 4C evaluation at (k_a, k_b).
CMatrix evaluate(const BoxGrid& grid, double k_a, double k_b);

/// Block transpose-conjugate: cell (c, r) of the result is cell (r, c)^dagger.
BoxGrid adjoint(const BoxGrid& grid);

/// Block circulant over L >= 2 sites: forward M13 on the subdiagonal,
/// backward M24 on the superdiagonal, each built with the source site's angle.
BoxGrid assemble_concentric(int sites, const std::vector<double>& theta_profile, double theta1);

/// Interchanges block columns i and j and rescales the moved hops so a hop
/// now spanning |i - j| columns carries exp(+-i |i - j| K). Swapping the same
/// pair twice restores the grid exactly.
BoxGrid swap_block_columns(const BoxGrid& grid, int i, int j);

// ---------------------------------------------------------------------------
// Moire overlay: two rings of n_outer and n_inner nodes on a shared
// circumference lcm(n_outer, n_inner). The union of node positions, in
// order, forms the event list; one block row/column per event.

struct MoireEvent {
    int position = 0;
    bool outer = false;  // carries A, B
    bool inner = false;  // carries C, D
    bool junction = false;
};

struct MoireLattice {
    int n_outer = 0;
    int n_inner = 0;
    int circumference = 0;
    int spacing_outer = 0;
    int spacing_inner = 0;
    std::vector<MoireEvent> events;

    int coincident_count() const;
    std::vector<int> junction_events() const;
    /// Dense slots (4 * event + component) that carry a walker on their own
    /// ring. The remaining slots are spectators that map onto themselves.
    std::vector<bool> active_slots() const;
};

MoireLattice moire_lattice(int n_outer, int n_inner, int junction_count = 1);

/// Each node applies its coin and sends A / C forward to the next node of
/// its own ring and B / D backward to the previous one, one exp(-+iK) per hop.
/// Coincident nodes use the 4x4 coin (theta_n = theta2 at junctions, 0
/// elsewhere); outer-only nodes emit M1 / M2; inner-only nodes emit M3p / M4p
/// with the theta1 rotation; spectator components sit on the diagonal.
BoxGrid assemble_moire(const MoireLattice& lattice, const CoinAngles& angles);
BoxGrid assemble_moire(int n_outer, int n_inner, const CoinAngles& angles, int junction_count = 1);

struct LineDeviation {
    enum class Kind { row, column } kind = Kind::row;
    int index = 0;
    double deviation = 0.0;
    bool symbolic = true;  // false when sampled numerically
};

struct BlockAuditReport {
    std::vector<LineDeviation> lines;
    double max_row_deviation = 0.0;
    double max_column_deviation = 0.0;

    double max_deviation() const { return std::max(max_row_deviation, max_column_deviation); }
    /// Up to `count` lines with the largest deviation, largest first.
    std::vector<LineDeviation> worst(std::size_t count) const;
};

/// For every block row r: sum_c M_rc M_rc^dagger vs I; for every block
/// column c: sum_r M_rc^dagger M_rc vs I. Exact when all phases cancel,
/// otherwise sampled at 8 fixed pseudo-random momenta.
BlockAuditReport audit_block_unitarity(const BoxGrid& grid);

/// Structured-text dump: grid header, column homes, and every nonzero entry
/// as "row col re im p_a p_b".
void dump(const BoxGrid& grid, std::ostream& out);
std::string dump(const BoxGrid& grid);

}  // namespace ringwalk
