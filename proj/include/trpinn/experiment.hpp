#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "trpinn/config.hpp"
#include "trpinn/metrics.hpp"
#include "trpinn/optimize.hpp"

namespace trpinn {

struct TrainSummary {
    ErrorReport best;            // at the best relative H1 evaluation
    long best_iteration = 0;     // global iteration of `best`
    ErrorReport final_report;    // at the parameters L-BFGS returns
    double final_loss = 0.0;
    Termination termination = Termination::max_iterations;
    long lbfgs_iterations = 0;
    double adam_ms = 0.0;        // wall clock, informational only
    double lbfgs_ms = 0.0;
};

/// Adam then L-BFGS on fixed samples, metrics every `metrics.cadence`
/// iterations (global numbering: Adam 1..A, L-BFGS A+1..). Writes into
/// out_dir: config.txt, fourier.csv, metrics.csv, trace.csv,
/// boundary_prediction.csv, checkpoint.bin (best H1), summary.txt and
/// status.txt, plus SVG charts when enabled. A non-finite loss writes a
/// failed status and rethrows the NumericalError.
TrainSummary run_train(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

struct SpectrumRun {
    BoundaryMethod method;
    Eigen::VectorXd lambda_p;
    Eigen::VectorXd lambda_h;
    double min_diff = 0.0;
};

/// For each boundary sampling method: J_b at initialization, top-k spectra
/// of K_bb / N_b and K_bb M, written to spectra_<method>.csv, and the
/// linearized boundary-only residual decay to dynamics_<method>.csv.
std::vector<SpectrumRun> run_ntk(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

struct SeminormRow {
    std::size_t m = 0;
    double value = 0.0;
    double richardson = 0.0;
    double rel_error = 0.0;  // of the Richardson estimate
};

/// The sqrt-profile reference integral for m in {256, 512, 1024, 2048},
/// written to seminorm_check.csv together with a constant-function row.
std::vector<SeminormRow> run_seminorm_check(const std::filesystem::path& out_dir);

struct OracleRow {
    std::string label;
    int V = 0;
    double max_error = 0.0;  // against the closed form, sin cases only
    double reconstruction_error = 0.0;
};

/// Fourier oracle against r^V sin(V t) for V in {3, 7, 20} on a 100 x 100
/// polar grid, plus the configured problem's reconstruction error.
std::vector<OracleRow> run_oracle_check(const ExperimentConfig& cfg,
                                        const std::filesystem::path& out_dir);

struct MollifyRow {
    double eps = 0.0;
    double max_deviation = 0.0;
    double rhs_l2 = 0.0;
    double min_eig = 0.0;
    double max_eig = 0.0;
    double lipschitz_bound = 0.0;
};

/// Checkerboard (scale 0.1, diag(1,1) / diag(2,2)) mollified at
/// eps in {0.1, 0.05, 0.025}, written to mollify.csv.
std::vector<MollifyRow> run_mollify_demo(const std::filesystem::path& out_dir);

}  // namespace trpinn
