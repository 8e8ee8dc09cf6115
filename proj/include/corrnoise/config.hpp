// config.hpp — experiment configuration: strict JSON ingestion and bundled presets
#pragma once

#include "corrnoise/dynamics.hpp"
#include "corrnoise/protocols.hpp"

#include <optional>
#include <string>
#include <vector>

namespace corrnoise {

struct InitialStateSpec {
    StateKind kind = StateKind::ground;
    std::uint32_t basis_value = 0; // for StateKind::basis
};

struct AnalysisConfig {
    bool intensity = true;
    bool partial_intensity = true;
    bool antidiagonals = true;
    bool detection = true;
    double theta_relaxation = 0.05;
    double theta_length = 0.02;
    double theta_dephasing = 0.1;
    int sustain_samples = 10;
};

struct SweepConfig {
    std::vector<int> n_values;
};

struct ExperimentConfig {
    std::string name;
    std::string description;
    RegisterConfig reg;
    bool uniform_frequency = false; // register given by a single frequency
    std::vector<NoiseChannel> channels;
    InitialStateSpec initial;
    double t_max = 0.0;
    double dt_out = 0.0;
    double dt_rate = 0.1;
    EvolveOptions integrator;
    GeneratorOptions options;
    ProtocolSpec protocol{ProtocolKind::none, {}, 0, 0, MqcMode::overlap_exact};
    AnalysisConfig analysis;
    SweepConfig sweep;
    std::string output_dir = "out";
    bool svg = true;

    void validate() const;
    // Same experiment on a uniform register of n qubits, correlation kinds
    // re-instantiated at the new size (custom matrices cannot be resized).
    ExperimentConfig resized(int n) const;
};

// Parse JSON text; `origin` names the source in error messages.
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<config>");
// A file path, or the name of a bundled preset.
ExperimentConfig load_config(const std::string& path_or_preset);

std::vector<std::string> preset_names();
std::optional<std::string> preset_text(const std::string& name);

// Canonical JSON form of a config (used for the manifest digest).
std::string canonical_json(const ExperimentConfig& cfg);
std::string config_digest(const ExperimentConfig& cfg);

} // namespace corrnoise
