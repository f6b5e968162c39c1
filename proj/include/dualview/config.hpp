#pragma once

// Run configuration and its JSON form (schema_version 1).

#include <optional>
#include <string>

#include "dualview/aekf.hpp"
#include "dualview/cross_covariance.hpp"
#include "dualview/fusion.hpp"
#include "dualview/scenario.hpp"

namespace dualview {

enum class Baseline { Fusion, Switching };
enum class SwitchPreference { BaseFirst, HandFirst };
/// Tangent layout of covariances in config files: 12-dim minimal or 15-dim padded.
enum class Convention { Minimal, Padded };

inline constexpr int kSchemaVersion = 1;

struct RunConfig {
    std::string name = "run";
    ScenarioConfig scenario;
    NoiseConfig filter_noise_hand;
    NoiseConfig filter_noise_base;
    Matrix12 p0 = 1e-2 * Matrix12::Identity();
    FilterOptions filter_options;
    FusionOptions fusion;
    CouplingNoise coupling = CouplingNoise::SharedSquareRoot;
    Baseline baseline = Baseline::Fusion;
    SwitchPreference switch_preference = SwitchPreference::BaseFirst;
    std::string output_dir = "out";

    /// Throws ConfigError.
    void validate() const;
};

/// Parses a config document. `convention_override` replaces the document's own
/// "convention" field. Throws ConfigError on any schema or value problem.
RunConfig parse_run_config(const std::string& json_text, std::optional<Convention> convention_override = {});
RunConfig load_run_config(const std::string& path, std::optional<Convention> convention_override = {});

Convention parse_convention(const std::string& s);

}  // namespace dualview
