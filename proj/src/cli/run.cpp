#include <ostream>

#include <CLI11.hpp>

#include "experiments.hpp"
#include "ringwalk/errors.hpp"

namespace ringwalk::cli {

namespace {

struct CommonOptions {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out;
};

void add_common(CLI::App* sub, CommonOptions& opts, const std::string& default_out) {
    opts.out = default_out;
    sub->add_option("-c,--config", opts.config_path, "flat key = value config file");
    sub->add_option("-s,--set", opts.overrides, "override one key, key=value (repeatable)");
    sub->add_option("-o,--out", opts.out, "output stem (writes <stem>.csv, <stem>.meta, <stem>.gp)")->capture_default_str();
}

ExperimentConfig resolve(const CommonOptions& opts) {
    ExperimentConfig cfg;
    if (!opts.config_path.empty()) cfg = load_config(opts.config_path, cfg);
    for (const auto& kv : opts.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw InvalidConfig("--set expects key=value, got '" + kv + "'");
        cfg.set(std::string_view(kv).substr(0, eq), std::string_view(kv).substr(eq + 1));
    }
    return cfg;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"ringwalk: quantum walks on coupled concentric rings and Moire ring overlays"};
    app.require_subcommand(1);

    CommonOptions spectrum_opts, evolve_opts, moire_opts, swap_opts, audit_opts, ab_opts;
    auto* spectrum = app.add_subcommand("spectrum", "eigenphase bands of the Bloch step matrix");
    add_common(spectrum, spectrum_opts, "spectrum");
    auto* evolve = app.add_subcommand("evolve", "real-space evolution and probability distribution");
    add_common(evolve, evolve_opts, "evolve");
    auto* moire = app.add_subcommand("moire", "Moire ring grid: audit and eigenphase bands");
    add_common(moire, moire_opts, "moire");
    auto* swap = app.add_subcommand("swap", "block-column interchange experiment on the concentric grid");
    add_common(swap, swap_opts, "swap");
    auto* audit = app.add_subcommand("audit", "block-unitarity audit of a box grid (grid = concentric|moire|swapped)");
    add_common(audit, audit_opts, "audit");
    auto* ab = app.add_subcommand("ab-shift", "check the field-induced rigid momentum shift of the spectrum");
    add_common(ab, ab_opts, "ab-shift");
    double field = 0.0;
    auto* field_opt = ab->add_option("--field", field, "magnetic field B (overrides field_b)");

    std::string figure_id;
    std::string figure_dir = "figures";
    auto* figure = app.add_subcommand("reproduce-figure", "regenerate a figure bundle: CSV, metadata, gnuplot script");
    figure->add_option("id", figure_id, "figure id")->required();
    figure->add_option("-d,--out-dir", figure_dir, "output directory")->capture_default_str();
    figure->footer("ids: " + [] {
        std::string s;
        for (const auto& id : figure_ids()) s += (s.empty() ? "" : " ") + id;
        return s;
    }());

    std::vector<std::string> argv(args.rbegin(), args.rend());  // CLI11 consumes from the back
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kConfigError;
    }

    auto needs_config = [&](CLI::App* sub, const CommonOptions& opts, bool extra = false) {
        if (opts.config_path.empty() && opts.overrides.empty() && !extra) {
            err << "error: no configuration given (use --config FILE and/or --set key=value)\n\n" << sub->help();
            return false;
        }
        return true;
    };

    try {
        if (spectrum->parsed()) {
            if (!needs_config(spectrum, spectrum_opts)) return kConfigError;
            detail::run_spectrum(resolve(spectrum_opts), spectrum_opts.out, "spectrum", out);
        } else if (evolve->parsed()) {
            if (!needs_config(evolve, evolve_opts)) return kConfigError;
            detail::run_evolve(resolve(evolve_opts), evolve_opts.out, "evolution", out);
        } else if (moire->parsed()) {
            if (!needs_config(moire, moire_opts)) return kConfigError;
            detail::run_moire(resolve(moire_opts), moire_opts.out, "Moire spectrum", out);
        } else if (swap->parsed()) {
            if (!needs_config(swap, swap_opts)) return kConfigError;
            detail::run_swap(resolve(swap_opts), swap_opts.out, "column-swapped spectrum", out);
        } else if (audit->parsed()) {
            if (!needs_config(audit, audit_opts)) return kConfigError;
            detail::run_audit(resolve(audit_opts), audit_opts.out, out);
        } else if (ab->parsed()) {
            if (!needs_config(ab, ab_opts, field_opt->count() > 0)) return kConfigError;
            auto cfg = resolve(ab_opts);
            if (field_opt->count() > 0) cfg.field_b = field;
            detail::run_ab_shift(cfg, ab_opts.out, out);
        } else if (figure->parsed()) {
            if (!is_figure_id(figure_id)) {
                err << "error: unknown figure id '" << figure_id << "'\n\n" << figure->help();
                return kConfigError;
            }
            for (const auto& path : reproduce_figure(figure_id, figure_dir)) out << path.string() << '\n';
        }
    } catch (const InvalidConfig& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const ContractViolation& e) {
        err << "numerical contract violated: " << e.what() << '\n';
        return kNumericalError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }
    return kOk;
}

}  // namespace ringwalk::cli
