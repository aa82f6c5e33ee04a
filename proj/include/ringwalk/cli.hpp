#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ringwalk/blockmatrix.hpp"
#include "ringwalk/core.hpp"
#include "ringwalk/evolve.hpp"
#include "ringwalk/spectrum.hpp"

namespace ringwalk::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kNumericalError = 2 };

enum class GridKind { concentric, moire, swapped };

/// Flat key-value experiment description. Every key has a default; the
/// config file and --set overrides may only name known keys.
struct ExperimentConfig {
    RingPairConfig ring;
    CoinAngles angles{kPi / 3, kPi / 3};
    JunctionMode junction_mode = JunctionMode::formula_or;
    std::vector<int> junction_sites;  // custom mode
    double field_b = 0.0;
    std::optional<double> dphi_a;  // default 2 pi / S
    std::optional<double> dphi_b;

    SweepAxis k_axis = SweepAxis::k_a;
    double k_fixed = 0.0;
    int k_samples = 200;

    long steps = 100;
    std::vector<Excitation> init{Excitation{}};

    int n_outer = 28;
    int n_inner = 21;
    int junction_count = 1;

    int swap_i = 0;
    int swap_j = 2;
    GridKind grid = GridKind::concentric;

    /// Sets one key from its text form. Throws InvalidConfig on unknown keys
    /// or malformed values.
    void set(std::string_view key, std::string_view value);
    void validate() const;

    JunctionSchedule schedule() const;
    MagneticConfig magnetic() const;
    MomentumGrid momentum_grid() const;

    /// Every key with its canonical text value, in a fixed order.
    std::vector<std::pair<std::string, std::string>> echo() const;
};

/// Parses "key = value" lines; '#' starts a comment.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

/// Angles: plain decimals or multiples of pi such as "pi/3", "-2*pi/3", "2pi".
double parse_angle(std::string_view text);

// --- output ----------------------------------------------------------------

/// %.17g, '.' separator regardless of locale.
std::string format_double(double x);

void write_spectrum_csv(const std::filesystem::path& path, const SpectrumResult& result);

struct SpectrumRow {
    double k = 0.0;
    int branch = 0;
    double omega = 0.0;
};
std::vector<SpectrumRow> read_spectrum_csv(const std::filesystem::path& path);

void write_distribution_csv(const std::filesystem::path& path, const std::vector<std::array<double, 4>>& probability);

struct DistributionRow {
    int site = 0;
    char comp = 'A';
    double prob = 0.0;
};
std::vector<DistributionRow> read_distribution_csv(const std::filesystem::path& path);

using Metadata = std::vector<std::pair<std::string, std::string>>;
void write_metadata(const std::filesystem::path& path, const Metadata& entries);

enum class PlotKind { spectrum, distribution, sectors, ab_shift };

/// Gnuplot script that renders `csv` to a PNG next to it.
void write_plot_script(const std::filesystem::path& script, const std::filesystem::path& csv, PlotKind kind,
                       const std::string& title, std::optional<char> component = std::nullopt);

// --- figures ---------------------------------------------------------------

std::vector<std::string> figure_ids();
bool is_figure_id(std::string_view id);

/// Writes every file of the figure bundle into `dir` and returns their paths.
std::vector<std::filesystem::path> reproduce_figure(std::string_view id, const std::filesystem::path& dir);

// --- entry point -----------------------------------------------------------

/// Full command line without the program name. Never throws.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace ringwalk::cli
