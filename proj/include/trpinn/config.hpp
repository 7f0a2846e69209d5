#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "trpinn/boundary_data.hpp"
#include "trpinn/geometry.hpp"
#include "trpinn/losses.hpp"
#include "trpinn/metrics.hpp"
#include "trpinn/optimize.hpp"

namespace trpinn {

struct ProblemConfig {
    BoundaryKind kind = BoundaryKind::sin_v;  // sin_v or sharp_v
    int V = 10;
    int fourier_samples = 4096;
    int fourier_modes = 1024;
};

struct ModelConfig {
    std::size_t units = 32;
    std::size_t hidden_layers = 3;
    std::uint64_t seed = 1;
};

struct SamplingConfig {
    std::size_t interior_n = 2000;
    std::uint64_t interior_seed = 1;
    BoundaryMethod boundary_method = BoundaryMethod::linspace;
    std::size_t boundary_n = 201;
    std::uint64_t boundary_seed = 1;
};

struct NtkConfig {
    std::size_t top_k = 100;
    bool with_skip_pairs = false;
    bool identity_kernel = false;  // replace K_bb by I (checks the M spectrum path)
};

struct OutputConfig {
    std::string dir = "runs/default";
    bool svg = true;
};

struct ExperimentConfig {
    ProblemConfig problem;
    LossWeights weights{1.0, 50.0, 50.0};
    ModelConfig model;
    SamplingConfig sampling;
    long adam_iterations = 5000;
    AdamConfig adam;
    LbfgsOptions lbfgs;
    long metrics_cadence = 100;
    EvalGrids eval;
    NtkConfig ntk;
    OutputConfig output;

    /// Throws ConfigError naming the offending key.
    void validate() const;
    BoundaryFunction boundary_function() const;
    std::vector<std::size_t> layer_sizes() const;
    /// Sets the model, interior and boundary seeds to one value.
    void override_seed(std::uint64_t seed);
};

/// Parses "key = value" lines; '#' starts a comment. Keys not present keep
/// their defaults, unknown or repeated keys are errors. The result is
/// validated.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Every key, one per line, doubles in round-trip form. parse_config of the
/// result reproduces the config exactly.
std::string to_text(const ExperimentConfig& cfg);
void save_config(const std::filesystem::path& path, const ExperimentConfig& cfg);

}  // namespace trpinn
