#include <doctest.h>

#include <random>
#include <string>

#include "oracles.hpp"
#include "ringwalk/errors.hpp"
#include "ringwalk/spectrum.hpp"

using namespace ringwalk;

namespace {

RingPairConfig ring(int half, const char* a = "2", const char* b = "1") {
    RingPairConfig c;
    c.half_sites = half;
    c.step_a = parse_rational(a);
    c.step_b = parse_rational(b);
    return c;
}

std::vector<double> concat(std::vector<double> a, const std::vector<double>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace

TEST_CASE("eigen-decomposition of small unitaries") {
    const auto id = eigen_decompose_unitary(CMatrix::Identity(4, 4));
    for (double p : id.phases) CHECK(p == 0.0);

    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = cplx(0, 1);
    d(1, 1) = cplx(0, -1);
    const auto e = eigen_decompose_unitary(d);
    CHECK(e.phases[0] == doctest::Approx(-kPi / 2));
    CHECK(e.phases[1] == doctest::Approx(kPi / 2));

    CMatrix bad = CMatrix::Identity(3, 3);
    bad(0, 0) = 1.01;
    try {
        eigen_decompose_unitary(bad);
        FAIL("expected a contract violation");
    } catch (const ContractViolation& ex) {
        CHECK(ex.residual() == doctest::Approx(std::abs(1.01 * 1.01 - 1.0)));
    }
    CHECK_THROWS_AS(eigenphases(bad), ContractViolation);
    CHECK_THROWS_AS(eigen_decompose_unitary(CMatrix::Zero(2, 3)), InvalidConfig);
}

TEST_CASE("random unitaries round-trip through their eigenpairs") {
    std::mt19937_64 rng(17);
    for (int n : {1, 2, 8, 33}) {
        const CMatrix u = oracle::random_unitary(n, rng);
        const auto e = eigen_decompose_unitary(u);
        REQUIRE(e.phases.size() == static_cast<std::size_t>(n));
        CHECK(std::is_sorted(e.phases.begin(), e.phases.end()));
        CVector lambda(n);
        for (int i = 0; i < n; ++i) {
            CHECK(std::abs(std::abs(e.values[i]) - 1.0) <= 1e-10);
            CHECK(e.phases[i] > -kPi);
            CHECK(e.phases[i] <= kPi);
            lambda[i] = e.values[i];
        }
        const CMatrix rebuilt = e.vectors * lambda.asDiagonal() * e.vectors.adjoint();
        CHECK(oracle::max_abs(rebuilt - u) <= 1e-9);
        CHECK(oracle::max_abs(u * e.vectors - e.vectors * lambda.asDiagonal()) <= 1e-10);
        CHECK(eigenphases(u) == e.phases);
        CHECK(oracle::circle_distance(e.phases, oracle::phases(u)) <= 1e-12);
    }
}

TEST_CASE("degenerate unitaries keep an orthonormal eigenbasis") {
    // A phased cyclic shift has exactly repeated eigenvalues across sectors.
    const auto cfg = ring(3);
    const auto sched = junction_schedule(cfg, JunctionMode::all);
    const CMatrix u = bloch_step_matrix(cfg, {0, 0}, sched, MagneticConfig::with_defaults(cfg, 0), 0.0, 0.0);
    const auto e = eigen_decompose_unitary(u);
    CHECK(oracle::max_abs(e.vectors.adjoint() * e.vectors - CMatrix::Identity(u.rows(), u.cols())) <= 1e-12);
}

TEST_CASE("multiset distance on the circle") {
    const std::vector<double> a{0.1, 0.2, 3.0}, b{0.2, 0.1, 3.0};
    CHECK(multiset_distance(a, b) == 0.0);
    const std::vector<double> c{kPi - 1e-3, 0.0}, d{-kPi + 1e-3, 0.0};
    CHECK(multiset_distance(c, d) == doctest::Approx(2e-3));
    const std::vector<double> e{1.0, 1.0, 2.0}, f{1.0, 2.0, 2.0};
    CHECK(multiset_distance(e, f) == doctest::Approx(1.0));
    const std::vector<double> one{1.0};
    CHECK_THROWS_AS(multiset_distance(a, one), InvalidConfig);

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> ang(-kPi, kPi);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> x(7), y(7);
        for (auto& v : x) v = ang(rng);
        for (auto& v : y) v = ang(rng);
        CHECK(multiset_distance(x, y) == doctest::Approx(oracle::circle_distance(x, y)).epsilon(1e-14));
    }
}

TEST_CASE("momentum grids") {
    const auto u = MomentumGrid::uniform(4);
    REQUIRE(u.size() == 4);
    CHECK(u[0] == doctest::Approx(-kPi / 2));
    CHECK(u[3] == doctest::Approx(kPi));
    CHECK_THROWS_AS(MomentumGrid::uniform(0), InvalidConfig);

    const auto g = MomentumGrid::sweep_k_b(u, 0.25);
    const auto pts = g.points();
    REQUIRE(pts.size() == 4);
    CHECK(pts[2].k_a == 0.25);
    CHECK(pts[2].k_b == u[2]);
    CHECK(g.axis_values() == u);

    const auto full = MomentumGrid::full({0.0, 1.0}, {-1.0, 0.0, 1.0});
    CHECK(full.points().size() == 6);

    CHECK_THROWS_AS(MomentumGrid::sweep_k_a({0.5, 0.2}, 0.0).validate(), InvalidConfig);
    CHECK_THROWS_AS(MomentumGrid::sweep_k_a({}, 0.0).validate(), InvalidConfig);
}

TEST_CASE("free walk: eigenphases of a phased cyclic shift") {
    for (int half : {0, 2, 7}) {
        const auto cfg = ring(half);
        const auto sched = junction_schedule(cfg, JunctionMode::all);
        const auto mag = MagneticConfig::with_defaults(cfg, 0);
        for (double ka : {-2.9, 0.0, 0.37, 1.5})
            for (double kb : {-1.1, 0.8}) {
                const auto ph = eigenphases(bloch_step_matrix(cfg, {0, 0}, sched, mag, ka, kb));
                CHECK(ph.size() == static_cast<std::size_t>(4 * cfg.sites()));
                CHECK(multiset_distance(ph, oracle::free_phases(ka, kb, cfg.sites())) <= 1e-12);
            }
    }
}

TEST_CASE("decoupled rings follow the analytic dispersion") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> ang(-kPi, kPi), field(-3, 3);
    for (int trial = 0; trial < 6; ++trial) {
        const auto cfg = ring(1 + 2 * trial, "3", "2");
        const CoinAngles angles{ang(rng), 0.0};
        const auto sched = junction_schedule(cfg, JunctionMode::all);
        const auto mag = MagneticConfig::with_defaults(cfg, field(rng));
        const double kb = ang(rng);
        const auto result = compute_spectrum(cfg, angles, sched, mag, MomentumGrid::sweep_k_a(MomentumGrid::uniform(32), kb));
        for (std::size_t i = 0; i < result.points.size(); ++i) {
            const auto& p = result.points[i];
            const auto expected = concat(oracle::decoupled_sector(angles.theta1, p.k_a, mag.phase_ab(cfg), cfg.sites()),
                                         oracle::decoupled_sector(angles.theta1, p.k_b, mag.phase_cd(cfg), cfg.sites()));
            CHECK(multiset_distance(result.bands[i], expected) <= 1e-10);
        }
    }
}

TEST_CASE("zero-field spectrum is symmetric under K -> -K, w -> -w") {
    const auto cfg = ring(6, "3", "2");
    const auto sched = junction_schedule(cfg, JunctionMode::formula_or);
    const auto mag = MagneticConfig::with_defaults(cfg, 0);
    const CoinAngles angles{kPi / 3, kPi / 3};
    for (double ka : {0.3, -1.7, 2.9})
        for (double kb : {0.0, 1.2}) {
            auto plus = eigenphases(bloch_step_matrix(cfg, angles, sched, mag, ka, kb));
            auto minus = eigenphases(bloch_step_matrix(cfg, angles, sched, mag, -ka, -kb));
            for (double& w : minus) w = -w;
            CHECK(multiset_distance(plus, minus) <= 1e-10);
        }
}

TEST_CASE("spectrum sweeps are deterministic across thread counts") {
    const auto cfg = ring(5, "3", "2");
    const auto sched = junction_schedule(cfg, JunctionMode::formula_or);
    const auto mag = MagneticConfig::with_defaults(cfg, 1.3);
    const auto grid = MomentumGrid::sweep_k_a(MomentumGrid::uniform(24), 0.4);
    const auto serial = compute_spectrum(cfg, {0.6, 1.1}, sched, mag, grid, false, 1);
    const auto parallel = compute_spectrum(cfg, {0.6, 1.1}, sched, mag, grid, false, 4);
    CHECK(serial.bands == parallel.bands);
    CHECK(serial.branch_count() == static_cast<std::size_t>(4 * cfg.sites()));
    for (const auto& b : serial.bands) CHECK(b.size() == serial.branch_count());
}

TEST_CASE("or and and schedules differ in spectrum only when their flags differ") {
    const CoinAngles angles{kPi / 4, kPi / 4};
    const auto grid = MomentumGrid::sweep_k_a({-1.0, 0.2, 1.4}, 0.3);
    for (const char* b : {"2", "7"}) {
        const auto cfg = ring(5, "9", b);
        const auto mag = MagneticConfig::with_defaults(cfg, 0);
        const auto s_or = junction_schedule(cfg, JunctionMode::formula_or);
        const auto s_and = junction_schedule(cfg, JunctionMode::formula_and);
        const auto r_or = compute_spectrum(cfg, angles, s_or, mag, grid);
        const auto r_and = compute_spectrum(cfg, angles, s_and, mag, grid);
        if (s_or.flags == s_and.flags) {
            CHECK(r_or.bands == r_and.bands);
        } else {
            double most = 0.0;
            for (std::size_t i = 0; i < grid.k_a_samples.size(); ++i)
                most = std::max(most, multiset_distance(r_or.bands[i], r_and.bands[i]));
            CHECK(most > 1e-6);
        }
    }
}

TEST_CASE("decomposition failures name the momentum sample") {
    const auto grid = MomentumGrid::sweep_k_a(MomentumGrid::uniform(5), 0.0);
    auto matrix_at = [&](const MomentumPoint& p) {
        CMatrix m = CMatrix::Identity(2, 2);
        if (p.k_a == grid.k_a_samples[3]) m(0, 0) = 2.0;
        return m;
    };
    try {
        compute_spectrum_of(matrix_at, grid, false, 1);
        FAIL("expected a contract violation");
    } catch (const ContractViolation& e) {
        CHECK(std::string(e.what()).find("momentum sample 3") != std::string::npos);
        CHECK(e.residual() == doctest::Approx(3.0));
    }
}

TEST_CASE("magnetic field acts as a rigid momentum shift") {
    const auto cfg = ring(15);
    const auto sched = junction_schedule(cfg, JunctionMode::formula_or);
    const CoinAngles angles{kPi / 3, kPi / 3};
    const auto grid = MomentumGrid::full(MomentumGrid::uniform(8), MomentumGrid::uniform(8));

    const auto zero = ab_shift_check(cfg, angles, sched, 0.0, grid);
    CHECK(zero.shift_a == 0.0);
    CHECK(zero.max_distance == 0.0);
    CHECK(zero.passed);

    const auto two = ab_shift_check(cfg, angles, sched, 2.0, grid);
    CHECK(two.distances.size() == 64);
    CHECK(two.shift_a == doctest::Approx(4.0 * 2 * kPi / 31 * 2));
    CHECK(two.shift_b == doctest::Approx(2 * kPi / 31 * 2));
    CHECK(two.max_distance <= 1e-10);
    CHECK(two.passed);

    // B = S makes both phases whole turns: the field disappears entirely.
    const auto cfg5 = ring(2, "3", "2");
    const auto s5 = junction_schedule(cfg5, JunctionMode::formula_or);
    for (double ka : {-0.4, 1.9}) {
        const auto with = eigenphases(bloch_step_matrix(cfg5, angles, s5, MagneticConfig::with_defaults(cfg5, 5.0), ka, 0.7));
        const auto without = eigenphases(bloch_step_matrix(cfg5, angles, s5, MagneticConfig::with_defaults(cfg5, 0.0), ka, 0.7));
        CHECK(multiset_distance(with, without) <= 1e-10);
    }
}

TEST_CASE("group velocity") {
    const auto cfg = ring(0);
    const auto sched = junction_schedule(cfg, JunctionMode::all);
    const auto mag = MagneticConfig::with_defaults(cfg, 0);
    std::vector<double> k;
    for (int i = 0; i <= 1000; ++i) k.push_back(0.5 + 1e-3 * i);

    SUBCASE("free walker moves at unit speed") {
        const auto r = compute_spectrum(cfg, {0, 0}, sched, mag, MomentumGrid::sweep_k_a(k, 3.0));
        // sorted phases at K = 0.5: -3, -0.5 (A), 0.5 (B), 3
        const auto gv = group_velocity(r, 1);
        CHECK(gv.ambiguous_samples.empty());
        for (double v : gv.velocity) CHECK(v == doctest::Approx(-1.0).epsilon(1e-9));
    }
    SUBCASE("decoupled band matches the analytic derivative") {
        const double t1 = kPi / 3;
        const auto r = compute_spectrum(cfg, {t1, 0}, sched, mag, MomentumGrid::sweep_k_a(k, 0.0));
        const std::size_t top = r.branch_count() - 1;  // the A/B band above the flat C/D pair at +-t1
        const auto gv = group_velocity(r, top);
        CHECK(gv.ambiguous_samples.empty());
        double worst = 0.0;
        for (std::size_t i = 1; i + 1 < k.size(); ++i) {
            const double w = gv.omega[i];
            const double expected = std::cos(t1) * std::sin(k[i]) / std::sin(w);
            worst = std::max(worst, std::abs(gv.velocity[i] - expected));
        }
        CHECK(worst <= 1e-6);
    }
    SUBCASE("velocity vanishes at K = 0") {
        std::vector<double> around;
        for (int i = -10; i <= 10; ++i) around.push_back(1e-3 * i);
        // k_b = 2 lifts the C/D pair to +-1.78, clear of the A/B band at +-pi/3
        const auto r = compute_spectrum(cfg, {kPi / 3, 0}, sched, mag, MomentumGrid::sweep_k_a(around, 2.0));
        const auto gv = group_velocity(r, 2);
        CHECK(gv.ambiguous_samples.empty());
        CHECK(gv.omega[10] == doctest::Approx(kPi / 3));
        CHECK(std::abs(gv.velocity[10]) <= 1e-8);
    }
    SUBCASE("crossings are flagged") {
        std::vector<double> across;
        for (int i = -5; i <= 5; ++i) across.push_back(0.1 * i);
        const auto r = compute_spectrum(cfg, {0, 0}, sched, mag, MomentumGrid::sweep_k_a(across, 3.0));
        const auto gv = group_velocity(r, 1);
        CHECK_FALSE(gv.ambiguous_samples.empty());
        CHECK(gv.ambiguous_samples.front() == 5);
    }
    SUBCASE("bad requests") {
        const auto r = compute_spectrum(cfg, {0, 0}, sched, mag, MomentumGrid::sweep_k_a({0.0, 0.1}, 0.0));
        CHECK_THROWS_AS(group_velocity(r, 0), InvalidConfig);
    }
}

TEST_CASE("eigenstate distributions") {
    SUBCASE("Fourier modes of the free walk are uniform within their component") {
        const auto cfg = ring(4);
        const auto sched = junction_schedule(cfg, JunctionMode::all);
        const CMatrix u = bloch_step_matrix(cfg, {0, 0}, sched, MagneticConfig::with_defaults(cfg, 0), 0.3, -0.8);
        const int s = cfg.sites();
        for (int idx = 0; idx < u.rows(); ++idx) {
            const auto dist = eigenstate_distribution(u, idx);
            std::array<double, 4> comp{};
            for (const auto& site : dist)
                for (int c = 0; c < 4; ++c) comp[c] += site[c];
            const int owner = static_cast<int>(std::max_element(comp.begin(), comp.end()) - comp.begin());
            CHECK(comp[owner] == doctest::Approx(1.0).epsilon(1e-10));
            for (const auto& site : dist) CHECK(site[owner] == doctest::Approx(1.0 / s).epsilon(1e-10));
        }
        CHECK_THROWS_AS(eigenstate_distribution(u, static_cast<int>(u.rows())), InvalidConfig);
    }
    SUBCASE("every eigenvector is normalized") {
        const auto cfg = ring(5, "3", "2");
        const auto sched = junction_schedule(cfg, JunctionMode::formula_or);
        const CMatrix u = bloch_step_matrix(cfg, {0.5, 1.2}, sched, MagneticConfig::with_defaults(cfg, 0.7), 0.2, 0.9);
        for (int idx = 0; idx < u.rows(); ++idx) {
            double total = 0.0;
            for (const auto& site : eigenstate_distribution(u, idx)) total += site[0] + site[1] + site[2] + site[3];
            CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("junction window mass") {
    std::vector<std::array<double, 4>> dist(9, {0, 0, 0, 0});
    dist[8][1] = 1.0;
    CHECK(junction_window_mass(dist, {0}) == 1.0);
    CHECK(junction_window_mass(dist, {4}) == 0.0);
    CHECK(junction_window_mass(dist, {6}, 1) == 0.0);
    CHECK(junction_window_mass(dist, {6}, 2) == 1.0);
}

TEST_CASE("a lone strong junction binds eigenstates") {
    // a = 9, b = 7 with the AND reading leaves a single junction at site 0
    // on a 31-site ring. A uniform state would put 5/31 of its mass inside
    // the window.
    const auto cfg = ring(15, "9", "7");
    const auto sched = junction_schedule(cfg, JunctionMode::formula_and);
    REQUIRE(sched.junction_sites() == std::vector<int>{0});
    const CMatrix u = bloch_step_matrix(cfg, {kPi / 3, kPi / 2}, sched, MagneticConfig::with_defaults(cfg, 0), 0.3, -0.7);
    const auto eig = eigen_decompose_unitary(u);
    double best = 0.0;
    for (int idx = 0; idx < u.rows(); ++idx) {
        std::vector<std::array<double, 4>> dist(cfg.sites());
        for (int n = 0; n < cfg.sites(); ++n)
            for (int c = 0; c < 4; ++c) dist[n][c] = std::norm(eig.vectors(state_index(n, c), idx));
        best = std::max(best, junction_window_mass(dist, sched.junction_sites()));
    }
    CHECK(best > 0.5);
}
