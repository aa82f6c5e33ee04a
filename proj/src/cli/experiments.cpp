#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include "ringwalk/errors.hpp"

#ifndef RINGWALK_VERSION
#define RINGWALK_VERSION "dev"
#endif

namespace ringwalk::cli::detail {

namespace {

fs::path with_suffix(const fs::path& stem, std::string_view suffix) {
    return fs::path(stem.string() + std::string(suffix));
}

void finish(Artifacts& art, const fs::path& stem, Metadata meta, const Metadata& pinned) {
    for (const auto& kv : pinned) meta.emplace_back("pinned." + kv.first, kv.second);
    for (const auto& kv : art.extra) meta.push_back(kv);
    const auto path = with_suffix(stem, ".meta");
    write_metadata(path, meta);
    art.files.push_back(path);
}

void note_schedule_disagreement(const ExperimentConfig& cfg, std::ostream& log) {
    if (cfg.junction_mode != JunctionMode::formula_or && cfg.junction_mode != JunctionMode::formula_and) return;
    const auto or_sites = junction_schedule(cfg.ring, JunctionMode::formula_or).junction_sites();
    const auto and_sites = junction_schedule(cfg.ring, JunctionMode::formula_and).junction_sites();
    if (or_sites == and_sites) return;
    log << "note: junction_mode=" << to_string(cfg.junction_mode) << "; the 'or' and 'and' readings of the junction "
        << "rule differ here (" << or_sites.size() << " vs " << and_sites.size() << " junction sites)\n";
}

std::string join(const std::vector<int>& v) {
    std::string s;
    for (int x : v) s += (s.empty() ? "" : ",") + std::to_string(x);
    return s;
}

Artifacts write_spectrum_bundle(const SpectrumResult& result, const fs::path& stem, const std::string& title) {
    Artifacts art;
    const auto csv = with_suffix(stem, ".csv");
    const auto gp = with_suffix(stem, ".gp");
    write_spectrum_csv(csv, result);
    write_plot_script(gp, csv, PlotKind::spectrum, title);
    art.files = {csv, gp};
    return art;
}

}  // namespace

Metadata base_metadata(std::string_view command, const ExperimentConfig& cfg) {
    Metadata meta{{"artifact", "ringwalk"}, {"version", RINGWALK_VERSION}, {"command", std::string(command)}};
    for (auto& kv : cfg.echo()) meta.push_back(std::move(kv));
    return meta;
}

Artifacts run_spectrum(const ExperimentConfig& cfg, const fs::path& stem, const std::string& title, std::ostream& log,
                       Metadata pinned) {
    cfg.validate();
    note_schedule_disagreement(cfg, log);
    const auto schedule = cfg.schedule();
    const auto result = compute_spectrum(cfg.ring, cfg.angles, schedule, cfg.magnetic(), cfg.momentum_grid());
    Artifacts art = write_spectrum_bundle(result, stem, title);
    art.extra.emplace_back("junction_sites_resolved", join(schedule.junction_sites()));
    art.extra.emplace_back("branches", std::to_string(result.branch_count()));
    finish(art, stem, base_metadata("spectrum", cfg), pinned);
    log << "spectrum: " << result.bands.size() << " samples x " << result.branch_count() << " branches -> "
        << art.files.front().string() << '\n';
    return art;
}

Artifacts run_evolve(const ExperimentConfig& cfg, const fs::path& stem, const std::string& title, std::ostream& log,
                     Metadata pinned) {
    cfg.validate();
    note_schedule_disagreement(cfg, log);
    const auto step = build_step_operator(cfg.ring, cfg.angles, cfg.schedule(), cfg.magnetic());
    const auto start = initial_state(cfg.ring.sites(), cfg.init);
    const auto history = evolve_history(start, step.matrix, cfg.steps);
    const auto& last = history.back();
    const double drift = std::abs(last.amplitudes.norm() - 1.0);
    if (!(drift <= kNormDrift)) throw ContractViolation("evolve: norm drift", drift);

    Artifacts art;
    const auto csv = with_suffix(stem, ".csv");
    const auto gp = with_suffix(stem, ".gp");
    write_distribution_csv(csv, probability_distribution(last).probability);
    write_plot_script(gp, csv, PlotKind::distribution, title);

    const auto sectors_csv = with_suffix(stem, "_sectors.csv");
    const auto sectors_gp = with_suffix(stem, "_sectors.gp");
    {
        std::ofstream out(sectors_csv, std::ios::binary | std::ios::trunc);
        if (!out) throw InvalidConfig("cannot write '" + sectors_csv.string() + "'");
        out << "step,ring_ab,ring_cd\n";
        for (const auto& occ : sector_transfer(history))
            out << occ.time << ',' << format_double(occ.ring_ab) << ',' << format_double(occ.ring_cd) << '\n';
    }
    write_plot_script(sectors_gp, sectors_csv, PlotKind::sectors, title + " (ring occupation)");
    art.files = {csv, gp, sectors_csv, sectors_gp};
    art.extra.emplace_back("norm_drift", format_double(drift));
    finish(art, stem, base_metadata("evolve", cfg), pinned);
    log << "evolve: " << cfg.steps << " steps, norm drift " << drift << " -> " << csv.string() << '\n';
    return art;
}

BoxGrid build_grid(const ExperimentConfig& cfg) {
    switch (cfg.grid) {
        case GridKind::moire: return assemble_moire(cfg.n_outer, cfg.n_inner, cfg.angles, cfg.junction_count);
        case GridKind::concentric:
        case GridKind::swapped: {
            const auto grid =
                assemble_concentric(cfg.ring.sites(), theta_profile(cfg.schedule(), cfg.angles), cfg.angles.theta1);
            return cfg.grid == GridKind::swapped ? swap_block_columns(grid, cfg.swap_i, cfg.swap_j) : grid;
        }
    }
    throw InvalidConfig("unknown grid kind");
}

namespace {

SpectrumResult grid_spectrum(const BoxGrid& grid, const MomentumGrid& momenta, double strict_tolerance) {
    return compute_spectrum_of(
        [&](const MomentumPoint& p) {
            CMatrix u = evaluate(grid, p.k_a, p.k_b);
            const double res = unitarity_residual(u);
            if (!(res <= strict_tolerance)) throw ContractViolation("evaluated grid is not unitary", res);
            return u;
        },
        momenta, false);
}

}  // namespace

Artifacts run_moire(const ExperimentConfig& cfg, const fs::path& stem, const std::string& title, std::ostream& log,
                    Metadata pinned) {
    cfg.validate();
    const auto lattice = moire_lattice(cfg.n_outer, cfg.n_inner, cfg.junction_count);
    const auto grid = assemble_moire(lattice, cfg.angles);
    const auto audit = audit_block_unitarity(grid);
    if (!(audit.max_deviation() <= kStrictUnitarity))
        throw ContractViolation("Moire grid fails the block-unitarity audit", audit.max_deviation());

    const auto result = grid_spectrum(grid, cfg.momentum_grid(), kStrictUnitarity);
    Artifacts art = write_spectrum_bundle(result, stem, title);
    const auto grid_path = with_suffix(stem, ".grid");
    {
        std::ofstream out(grid_path, std::ios::binary | std::ios::trunc);
        dump(grid, out);
    }
    art.files.push_back(grid_path);
    art.extra.emplace_back("circumference", std::to_string(lattice.circumference));
    art.extra.emplace_back("spacing_outer", std::to_string(lattice.spacing_outer));
    art.extra.emplace_back("spacing_inner", std::to_string(lattice.spacing_inner));
    art.extra.emplace_back("events", std::to_string(lattice.events.size()));
    art.extra.emplace_back("junction_events", join(lattice.junction_events()));
    art.extra.emplace_back("audit_max_deviation", format_double(audit.max_deviation()));
    finish(art, stem, base_metadata("moire", cfg), pinned);
    log << "moire: " << lattice.events.size() << " events, audit max deviation " << audit.max_deviation() << " -> "
        << art.files.front().string() << '\n';
    return art;
}

Artifacts run_swap(const ExperimentConfig& cfg, const fs::path& stem, const std::string& title, std::ostream& log,
                   Metadata pinned) {
    cfg.validate();
    const auto original =
        assemble_concentric(cfg.ring.sites(), theta_profile(cfg.schedule(), cfg.angles), cfg.angles.theta1);
    const auto swapped = swap_block_columns(original, cfg.swap_i, cfg.swap_j);
    const auto momenta = cfg.momentum_grid();
    const auto result = grid_spectrum(swapped, momenta, kStrictUnitarity);
    const auto reference = grid_spectrum(original, momenta, kStrictUnitarity);
    double change = 0.0;
    for (std::size_t i = 0; i < result.bands.size(); ++i)
        change = std::max(change, multiset_distance(result.bands[i], reference.bands[i]));

    Artifacts art = write_spectrum_bundle(result, stem, title);
    art.extra.emplace_back("max_spectral_change", format_double(change));
    finish(art, stem, base_metadata("swap", cfg), pinned);
    log << "swap: columns " << cfg.swap_i << " <-> " << cfg.swap_j << ", max eigenphase change vs unswapped " << change
        << " -> " << art.files.front().string() << '\n';
    return art;
}

Artifacts run_audit(const ExperimentConfig& cfg, const fs::path& stem, std::ostream& log) {
    cfg.validate();
    const auto grid = build_grid(cfg);
    const auto report = audit_block_unitarity(grid);

    Artifacts art;
    const auto grid_path = with_suffix(stem, ".grid");
    const auto report_path = with_suffix(stem, ".audit");
    {
        std::ofstream out(grid_path, std::ios::binary | std::ios::trunc);
        dump(grid, out);
        std::ofstream rep(report_path, std::ios::binary | std::ios::trunc);
        rep << "kind,index,deviation,symbolic\n";
        for (const auto& line : report.lines)
            rep << (line.kind == LineDeviation::Kind::row ? "row" : "column") << ',' << line.index << ','
                << format_double(line.deviation) << ',' << (line.symbolic ? 1 : 0) << '\n';
    }
    art.files = {grid_path, report_path};
    art.extra.emplace_back("max_row_deviation", format_double(report.max_row_deviation));
    art.extra.emplace_back("max_column_deviation", format_double(report.max_column_deviation));
    finish(art, stem, base_metadata("audit", cfg), {});

    log << "audit: " << grid.rows << "x" << grid.cols << " blocks, max row deviation " << report.max_row_deviation
        << ", max column deviation " << report.max_column_deviation << '\n';
    for (const auto& line : report.worst(3))
        log << "  worst " << (line.kind == LineDeviation::Kind::row ? "row " : "column ") << line.index << ": "
            << line.deviation << (line.symbolic ? " (exact)" : " (sampled)") << '\n';
    if (!(report.max_deviation() <= kStrictUnitarity))
        throw ContractViolation("block-unitarity audit failed", report.max_deviation());
    return art;
}

Artifacts run_ab_shift(const ExperimentConfig& cfg, const fs::path& stem, std::ostream& log) {
    cfg.validate();
    const auto momenta = cfg.momentum_grid();
    const auto report = ab_shift_check(cfg.ring, cfg.angles, cfg.schedule(), cfg.field_b, momenta);

    Artifacts art;
    const auto csv = with_suffix(stem, ".csv");
    const auto gp = with_suffix(stem, ".gp");
    {
        std::ofstream out(csv, std::ios::binary | std::ios::trunc);
        if (!out) throw InvalidConfig("cannot write '" + csv.string() + "'");
        out << "k_a,k_b,distance\n";
        const auto points = momenta.points();
        for (std::size_t i = 0; i < points.size(); ++i)
            out << format_double(points[i].k_a) << ',' << format_double(points[i].k_b) << ','
                << format_double(report.distances[i]) << '\n';
    }
    write_plot_script(gp, csv, PlotKind::ab_shift, "Aharonov-Bohm relabeling residual");
    art.files = {csv, gp};
    art.extra.emplace_back("shift_a", format_double(report.shift_a));
    art.extra.emplace_back("shift_b", format_double(report.shift_b));
    art.extra.emplace_back("max_distance", format_double(report.max_distance));
    finish(art, stem, base_metadata("ab-shift", cfg), {});

    log << "ab-shift: B = " << cfg.field_b << ", momentum shift (" << report.shift_a << ", " << report.shift_b
        << "), max multiset distance " << report.max_distance << (report.passed ? " -- rigid shift confirmed" : " -- FAILED")
        << '\n';
    if (!report.passed) throw ContractViolation("spectrum is not a rigid momentum relabeling", report.max_distance);
    return art;
}

Artifacts run_eigenstate(const CMatrix& u, int index, const ExperimentConfig& cfg, std::string_view command,
                         const fs::path& stem, const std::string& title, std::optional<char> component,
                         Metadata pinned) {
    const auto dist = eigenstate_distribution(u, index);
    Artifacts art;
    const auto csv = with_suffix(stem, ".csv");
    const auto gp = with_suffix(stem, ".gp");
    write_distribution_csv(csv, dist);
    write_plot_script(gp, csv, PlotKind::distribution, title, component);
    art.files = {csv, gp};
    art.extra.emplace_back("eigen_index", std::to_string(index));
    finish(art, stem, base_metadata(command, cfg), pinned);
    return art;
}

}  // namespace ringwalk::cli::detail
