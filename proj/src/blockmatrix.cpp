#include "ringwalk/blockmatrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "ringwalk/errors.hpp"

namespace ringwalk {

cplx PhasedEntry::at(double k_a, double k_b) const {
    if (p_a == 0 && p_b == 0) return coeff;
    return coeff * std::polar(1.0, p_a * k_a + p_b * k_b);
}

std::string_view to_string(BoxTag tag) {
    switch (tag) {
        case BoxTag::M13: return "M13";
        case BoxTag::M24: return "M24";
        case BoxTag::M1: return "M1";
        case BoxTag::M2: return "M2";
        case BoxTag::M3p: return "M3p";
        case BoxTag::M3G: return "M3G";
        case BoxTag::M4p: return "M4p";
        case BoxTag::M4G: return "M4G";
        case BoxTag::Zero: return "Zero";
        case BoxTag::Custom: return "Custom";
    }
    return "?";
}

BoxTag parse_box_tag(std::string_view text) {
    for (BoxTag t : {BoxTag::M13, BoxTag::M24, BoxTag::M1, BoxTag::M2, BoxTag::M3p, BoxTag::M3G, BoxTag::M4p,
                     BoxTag::M4G, BoxTag::Zero, BoxTag::Custom})
        if (to_string(t) == text) return t;
    throw InvalidConfig("unknown box tag '" + std::string(text) + "'");
}

Coin4 Box::evaluate(double k_a, double k_b) const {
    Coin4 m;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m(i, j) = entries[i][j].at(k_a, k_b);
    return m;
}

Box Box::adjoint() const {
    Box out = *this;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const auto& e = entries[j][i];
            out.entries[i][j] = PhasedEntry{std::conj(e.coeff), -e.p_a, -e.p_b};
        }
    out.label = label + "^dagger";
    if (tag != BoxTag::Zero) out.tag = BoxTag::Custom;
    return out;
}

bool Box::row_is_zero(int row) const {
    return std::all_of(entries[row].begin(), entries[row].end(), [](const PhasedEntry& e) { return e.is_zero(); });
}

bool Box::is_zero() const {
    for (int i = 0; i < 4; ++i)
        if (!row_is_zero(i)) return false;
    return true;
}

namespace {

constexpr int kA = 0, kB = 1, kC = 2, kD = 3;

void set_row(Box& box, int row, const Coin4& coin, int coin_row, int p_a, int p_b) {
    for (int j = 0; j < 4; ++j) box.entries[row][j] = PhasedEntry{coin(coin_row, j), p_a, p_b};
}

}  // namespace

Box make_box(BoxTag tag, double theta_n, double theta1) {
    Box box;
    box.tag = tag;
    box.label = std::string(to_string(tag));
    box.theta_n = theta_n;
    box.theta1 = theta1;

    const double cn = std::cos(theta_n), sn = std::sin(theta_n);
    const double c1 = std::cos(theta1), s1 = std::sin(theta1);
    auto& e = box.entries;
    switch (tag) {
        case BoxTag::M13: {
            const Coin4 coin = build_coin(theta_n, theta1);
            set_row(box, kA, coin, kA, -1, 0);
            set_row(box, kC, coin, kC, 0, -1);
            break;
        }
        case BoxTag::M24: {
            const Coin4 coin = build_coin(theta_n, theta1);
            set_row(box, kB, coin, kB, +1, 0);
            set_row(box, kD, coin, kD, 0, +1);
            break;
        }
        case BoxTag::M1:
            e[kA][kA] = {c1, -1, 0};
            e[kA][kB] = {s1, -1, 0};
            break;
        case BoxTag::M2:
            e[kB][kA] = {-s1, +1, 0};
            e[kB][kB] = {c1, +1, 0};
            break;
        case BoxTag::M3G:
            e[kA][kA] = {1.0, 0, 0};
            e[kB][kB] = {1.0, 0, 0};
            [[fallthrough]];
        case BoxTag::M3p:
            e[kC][kC] = {cn, 0, -1};
            e[kC][kD] = {sn, 0, -1};
            break;
        case BoxTag::M4G:
            e[kA][kA] = {1.0, 0, 0};
            e[kB][kB] = {1.0, 0, 0};
            [[fallthrough]];
        case BoxTag::M4p:
            e[kD][kC] = {-sn, 0, +1};
            e[kD][kD] = {cn, 0, +1};
            break;
        case BoxTag::Zero:
            box.label = "0";
            break;
        case BoxTag::Custom:
            throw InvalidConfig("make_box: Custom is not a named box");
    }
    return box;
}

Box transit_box(std::initializer_list<int> components) {
    Box box;
    box.tag = BoxTag::Custom;
    box.label = "I(";
    for (int c : components) {
        box.entries[c][c] = {1.0, 0, 0};
        box.label += "ABCD"[c];
    }
    box.label += ")";
    return box;
}

Box row_piece(const Box& box, std::initializer_list<int> rows, std::string label) {
    Box out;
    out.tag = BoxTag::Custom;
    out.label = std::move(label);
    out.theta_n = box.theta_n;
    out.theta1 = box.theta1;
    for (int r : rows) out.entries[r] = box.entries[r];
    return out;
}

std::string_view to_string(GridLayout layout) {
    switch (layout) {
        case GridLayout::concentric: return "concentric";
        case GridLayout::moire: return "moire";
        case GridLayout::custom: return "custom";
    }
    return "?";
}

BoxGrid::BoxGrid(int r, int c, GridLayout layout_)
    : rows(r), cols(c), layout(layout_), cells(static_cast<std::size_t>(r) * c), column_home(c) {
    std::iota(column_home.begin(), column_home.end(), 0);
}

void BoxGrid::add(int r, int c, const Box& box) {
    if (r < 0 || r >= rows || c < 0 || c >= cols) throw std::out_of_range("BoxGrid::add: cell outside grid");
    if (box.is_zero()) return;
    Box& cell = at(r, c);
    if (cell.is_zero()) {
        cell = box;
        return;
    }
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            if (box.entries[i][j].is_zero()) continue;
            if (!cell.entries[i][j].is_zero())
                throw std::logic_error("BoxGrid::add: overlapping entry in cell (" + std::to_string(r) + ", " +
                                       std::to_string(c) + ")");
            cell.entries[i][j] = box.entries[i][j];
        }
    cell.tag = BoxTag::Custom;
    cell.label += "+" + box.label;
}

CMatrix evaluate(const BoxGrid& grid, double k_a, double k_b) {
    CMatrix m = CMatrix::Zero(4 * grid.rows, 4 * grid.cols);
    for (int r = 0; r < grid.rows; ++r)
        for (int c = 0; c < grid.cols; ++c) {
            const Box& box = grid.at(r, c);
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    if (!box.entries[i][j].is_zero()) m(4 * r + i, 4 * c + j) = box.entries[i][j].at(k_a, k_b);
        }
    return m;
}

BoxGrid adjoint(const BoxGrid& grid) {
    BoxGrid out(grid.cols, grid.rows, grid.layout);
    out.cyclic = grid.cyclic;
    for (int r = 0; r < grid.rows; ++r)
        for (int c = 0; c < grid.cols; ++c) out.at(c, r) = grid.at(r, c).is_zero() ? Box{} : grid.at(r, c).adjoint();
    return out;
}

BoxGrid assemble_concentric(int sites, const std::vector<double>& theta_profile, double theta1) {
    if (sites < 2) throw InvalidConfig("concentric grid needs at least 2 sites");
    if (static_cast<int>(theta_profile.size()) != sites)
        throw InvalidConfig("theta profile has " + std::to_string(theta_profile.size()) + " entries, expected " +
                            std::to_string(sites));
    BoxGrid grid(sites, sites, GridLayout::concentric);
    for (int j = 0; j < sites; ++j) {
        const int prev = (j - 1 + sites) % sites;
        const int next = (j + 1) % sites;
        grid.add(j, prev, make_box(BoxTag::M13, theta_profile[prev], theta1));
        grid.add(j, next, make_box(BoxTag::M24, theta_profile[next], theta1));
    }
    return grid;
}

namespace {

struct Probe {
    double k_a, k_b;
};

// Deterministic momenta used wherever a grid is checked numerically.
std::vector<Probe> probe_momenta(std::size_t count) {
    std::mt19937_64 rng(0x5eedULL);
    std::uniform_real_distribution<double> k(-kPi, kPi);
    std::vector<Probe> out(count);
    for (auto& p : out) p = {k(rng), k(rng)};
    return out;
}

int hop_scale(int position, int home) {
    return position == home ? 1 : std::abs(position - home);
}

}  // namespace

BoxGrid swap_block_columns(const BoxGrid& grid, int i, int j) {
    if (i < 0 || j < 0 || i >= grid.cols || j >= grid.cols)
        throw InvalidConfig("column index out of range [0, " + std::to_string(grid.cols - 1) + "]");
    if (grid.rows == grid.cols) {
        for (const auto& p : probe_momenta(3)) {
            const double res = unitarity_residual(evaluate(grid, p.k_a, p.k_b));
            if (!(res <= kUnitaryCheckTolerance)) throw ContractViolation("swap_block_columns: grid is not unitary", res);
        }
    } else {
        throw InvalidConfig("swap_block_columns: grid is not square");
    }
    if (i == j) return grid;

    BoxGrid out = grid;
    auto move_column = [&](int from, int to) {
        const int home = grid.column_home[from];
        const int old_scale = hop_scale(from, home);
        const int new_scale = hop_scale(to, home);
        for (int r = 0; r < grid.rows; ++r) {
            Box box = grid.at(r, from);
            for (auto& row : box.entries)
                for (auto& e : row) {
                    e.p_a = e.p_a / old_scale * new_scale;
                    e.p_b = e.p_b / old_scale * new_scale;
                }
            out.at(r, to) = box;
        }
        out.column_home[to] = home;
    };
    move_column(i, j);
    move_column(j, i);
    return out;
}

// ---------------------------------------------------------------------------

int MoireLattice::coincident_count() const {
    return static_cast<int>(std::count_if(events.begin(), events.end(), [](const MoireEvent& e) { return e.outer && e.inner; }));
}

std::vector<int> MoireLattice::junction_events() const {
    std::vector<int> out;
    for (int e = 0; e < static_cast<int>(events.size()); ++e)
        if (events[e].junction) out.push_back(e);
    return out;
}

std::vector<bool> MoireLattice::active_slots() const {
    std::vector<bool> out(4 * events.size(), false);
    for (std::size_t e = 0; e < events.size(); ++e) {
        out[4 * e + kA] = out[4 * e + kB] = events[e].outer;
        out[4 * e + kC] = out[4 * e + kD] = events[e].inner;
    }
    return out;
}

MoireLattice moire_lattice(int n_outer, int n_inner, int junction_count) {
    if (n_inner < 2) throw InvalidConfig("n_inner must be at least 2");
    if (n_outer < n_inner) throw InvalidConfig("n_outer must be at least n_inner");
    if (junction_count < 1) throw InvalidConfig("junction_count must be at least 1");

    MoireLattice lat;
    lat.n_outer = n_outer;
    lat.n_inner = n_inner;
    lat.circumference = std::lcm(n_outer, n_inner);
    lat.spacing_outer = lat.circumference / n_outer;
    lat.spacing_inner = lat.circumference / n_inner;

    std::map<int, MoireEvent> by_position;
    for (int i = 0; i < n_outer; ++i) {
        auto& ev = by_position[i * lat.spacing_outer];
        ev.position = i * lat.spacing_outer;
        ev.outer = true;
    }
    for (int j = 0; j < n_inner; ++j) {
        auto& ev = by_position[j * lat.spacing_inner];
        ev.position = j * lat.spacing_inner;
        ev.inner = true;
    }
    for (auto& [pos, ev] : by_position) lat.events.push_back(ev);

    std::vector<int> coincident;
    for (int e = 0; e < static_cast<int>(lat.events.size()); ++e)
        if (lat.events[e].outer && lat.events[e].inner) coincident.push_back(e);
    const int available = static_cast<int>(coincident.size());
    if (junction_count > available)
        throw InvalidConfig("junction_count " + std::to_string(junction_count) + " exceeds the " +
                            std::to_string(available) + " coincident node positions");
    // Evenly spaced among coincident nodes, the first at position 0.
    for (int m = 0; m < junction_count; ++m)
        lat.events[coincident[static_cast<std::size_t>(m) * available / junction_count]].junction = true;
    return lat;
}

BoxGrid assemble_moire(const MoireLattice& lattice, const CoinAngles& angles) {
    const int n = static_cast<int>(lattice.events.size());
    if (n < 2) throw InvalidConfig("Moire lattice needs at least 2 events");
    if (!std::isfinite(angles.theta1) || !std::isfinite(angles.theta2)) throw InvalidConfig("coin angles must be finite");

    auto neighbour = [&](int e, int step, bool outer_ring) {
        for (int k = 1; k <= n; ++k) {
            const int cand = ((e + step * k) % n + n) % n;
            if (outer_ring ? lattice.events[cand].outer : lattice.events[cand].inner) return cand;
        }
        throw std::logic_error("Moire lattice ring with a single node");
    };

    BoxGrid grid(n, n, GridLayout::moire);
    const double t1 = angles.theta1;
    for (int e = 0; e < n; ++e) {
        const MoireEvent& ev = lattice.events[e];
        if (ev.outer && ev.inner) {
            const double tn = ev.junction ? angles.theta2 : 0.0;
            const int next_o = neighbour(e, +1, true), next_i = neighbour(e, +1, false);
            const int prev_o = neighbour(e, -1, true), prev_i = neighbour(e, -1, false);
            const Box fwd = make_box(BoxTag::M13, tn, t1);
            const Box bwd = make_box(BoxTag::M24, tn, t1);
            if (next_o == next_i) {
                grid.add(next_o, e, fwd);
            } else {
                grid.add(next_o, e, row_piece(fwd, {kA}, "M13[A]"));
                grid.add(next_i, e, row_piece(fwd, {kC}, "M13[C]"));
            }
            if (prev_o == prev_i) {
                grid.add(prev_o, e, bwd);
            } else {
                grid.add(prev_o, e, row_piece(bwd, {kB}, "M24[B]"));
                grid.add(prev_i, e, row_piece(bwd, {kD}, "M24[D]"));
            }
        } else if (ev.outer) {
            grid.add(neighbour(e, +1, true), e, make_box(BoxTag::M1, 0.0, t1));
            grid.add(neighbour(e, -1, true), e, make_box(BoxTag::M2, 0.0, t1));
            grid.add(e, e, transit_box({kC, kD}));
        } else {
            grid.add(neighbour(e, +1, false), e, make_box(BoxTag::M3p, t1, t1));
            grid.add(neighbour(e, -1, false), e, make_box(BoxTag::M4p, t1, t1));
            grid.add(e, e, transit_box({kA, kB}));
        }
    }
    return grid;
}

BoxGrid assemble_moire(int n_outer, int n_inner, const CoinAngles& angles, int junction_count) {
    return assemble_moire(moire_lattice(n_outer, n_inner, junction_count), angles);
}

// ---------------------------------------------------------------------------

namespace {

// Laurent polynomial in exp(iK_a), exp(iK_b) for one matrix entry.
using Poly = std::map<std::pair<int, int>, cplx>;
using PolyMatrix = std::array<std::array<Poly, 4>, 4>;

// adjoint_left: accumulate M^dagger M, else M M^dagger.
void accumulate(PolyMatrix& acc, const Box& m, bool adjoint_left) {
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) {
                const PhasedEntry& x = adjoint_left ? m.entries[k][i] : m.entries[i][k];
                const PhasedEntry& y = adjoint_left ? m.entries[k][j] : m.entries[j][k];
                if (x.is_zero() || y.is_zero()) continue;
                // adjoint_left: conj(x) y ; else x conj(y)
                const cplx value = adjoint_left ? std::conj(x.coeff) * y.coeff : x.coeff * std::conj(y.coeff);
                const std::pair<int, int> key = adjoint_left ? std::pair{y.p_a - x.p_a, y.p_b - x.p_b}
                                                             : std::pair{x.p_a - y.p_a, x.p_b - y.p_b};
                acc[i][j][key] += value;
            }
}

LineDeviation deviation_from_identity(const PolyMatrix& acc, LineDeviation::Kind kind, int index,
                                      const std::vector<Probe>& probes) {
    LineDeviation line{kind, index, 0.0, true};
    for (const auto& row : acc)
        for (const auto& poly : row)
            for (const auto& [key, value] : poly)
                if (key != std::pair{0, 0}) line.symbolic = false;

    auto value_at = [](const Poly& poly, double ka, double kb) {
        cplx sum = 0.0;
        for (const auto& [key, value] : poly) sum += value * std::polar(1.0, key.first * ka + key.second * kb);
        return sum;
    };
    const std::vector<Probe> at_zero{{0.0, 0.0}};
    for (const auto& p : line.symbolic ? at_zero : probes)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                const cplx target = i == j ? 1.0 : 0.0;
                line.deviation = std::max(line.deviation, std::abs(value_at(acc[i][j], p.k_a, p.k_b) - target));
            }
    return line;
}

}  // namespace

std::vector<LineDeviation> BlockAuditReport::worst(std::size_t count) const {
    std::vector<LineDeviation> sorted = lines;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const LineDeviation& x, const LineDeviation& y) { return x.deviation > y.deviation; });
    sorted.resize(std::min(count, sorted.size()));
    return sorted;
}

BlockAuditReport audit_block_unitarity(const BoxGrid& grid) {
    const auto probes = probe_momenta(8);
    BlockAuditReport report;
    for (int r = 0; r < grid.rows; ++r) {
        PolyMatrix acc{};
        for (int c = 0; c < grid.cols; ++c) accumulate(acc, grid.at(r, c), false);
        report.lines.push_back(deviation_from_identity(acc, LineDeviation::Kind::row, r, probes));
        report.max_row_deviation = std::max(report.max_row_deviation, report.lines.back().deviation);
    }
    for (int c = 0; c < grid.cols; ++c) {
        PolyMatrix acc{};
        for (int r = 0; r < grid.rows; ++r) accumulate(acc, grid.at(r, c), true);
        report.lines.push_back(deviation_from_identity(acc, LineDeviation::Kind::column, c, probes));
        report.max_column_deviation = std::max(report.max_column_deviation, report.lines.back().deviation);
    }
    return report;
}

// ---------------------------------------------------------------------------

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

void dump(const BoxGrid& grid, std::ostream& out) {
    out << "boxgrid rows=" << grid.rows << " cols=" << grid.cols << " layout=" << to_string(grid.layout)
        << " cyclic=" << (grid.cyclic ? 1 : 0) << '\n';
    out << "column_home";
    for (int h : grid.column_home) out << ' ' << h;
    out << '\n';
    for (int r = 0; r < grid.rows; ++r)
        for (int c = 0; c < grid.cols; ++c) {
            const Box& box = grid.at(r, c);
            if (box.is_zero()) continue;
            out << "cell " << r << ' ' << c << " tag=" << to_string(box.tag) << " label=" << box.label
                << " theta_n=" << fmt17(box.theta_n) << " theta1=" << fmt17(box.theta1) << '\n';
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    const auto& e = box.entries[i][j];
                    if (e.is_zero()) continue;
                    out << "  " << i << ' ' << j << ' ' << fmt17(e.coeff.real()) << ' ' << fmt17(e.coeff.imag())
                        << ' ' << e.p_a << ' ' << e.p_b << '\n';
                }
        }
}

std::string dump(const BoxGrid& grid) {
    std::ostringstream os;
    dump(grid, os);
    return os.str();
}

}  // namespace ringwalk
