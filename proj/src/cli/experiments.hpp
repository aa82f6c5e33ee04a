#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ringwalk/cli.hpp"

// Shared orchestration behind the subcommands and the figure table. Each
// runner writes its artifacts under `stem` (stem.csv, stem.meta, stem.gp, ...)
// and returns the written paths. Numerical breaches throw ContractViolation.
namespace ringwalk::cli::detail {

namespace fs = std::filesystem;

inline constexpr double kStrictUnitarity = 1e-12;
inline constexpr double kNormDrift = 1e-10;

struct Artifacts {
    std::vector<fs::path> files;
    Metadata extra;  // pinned choices, appended to the metadata file
};

Metadata base_metadata(std::string_view command, const ExperimentConfig& cfg);

Artifacts run_spectrum(const ExperimentConfig& cfg, const fs::path& stem, const std::string& title, std::ostream& log,
                       Metadata pinned = {});
Artifacts run_evolve(const ExperimentConfig& cfg, const fs::path& stem, const std::string& title, std::ostream& log,
                     Metadata pinned = {});
Artifacts run_moire(const ExperimentConfig& cfg, const fs::path& stem, const std::string& title, std::ostream& log,
                    Metadata pinned = {});
Artifacts run_swap(const ExperimentConfig& cfg, const fs::path& stem, const std::string& title, std::ostream& log,
                   Metadata pinned = {});
Artifacts run_audit(const ExperimentConfig& cfg, const fs::path& stem, std::ostream& log);
Artifacts run_ab_shift(const ExperimentConfig& cfg, const fs::path& stem, std::ostream& log);

/// Distribution of eigenvector `index` of `u` (sorted eigenphase order).
Artifacts run_eigenstate(const CMatrix& u, int index, const ExperimentConfig& cfg, std::string_view command,
                         const fs::path& stem, const std::string& title, std::optional<char> component,
                         Metadata pinned);

BoxGrid build_grid(const ExperimentConfig& cfg);

}  // namespace ringwalk::cli::detail
