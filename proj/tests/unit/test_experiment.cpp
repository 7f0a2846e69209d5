#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "trpinn/error.hpp"
#include "trpinn/experiment.hpp"
#include "trpinn/ntk.hpp"

using namespace trpinn;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
    return parse_config(
        "problem.V = 2\n"
        "problem.fourier_samples = 256\n"
        "problem.fourier_modes = 64\n"
        "model.units = 8\n"
        "model.hidden_layers = 2\n"
        "sampling.interior_n = 200\n"
        "sampling.boundary_n = 32\n"
        "adam.iterations = 200\n"
        "lbfgs.max_iterations = 30\n"
        "metrics.cadence = 50\n"
        "eval.radial = 20\n"
        "eval.angular = 40\n"
        "eval.boundary = 256\n"
        "ntk.top_k = 16\n");
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("trpinn_exp_" + name);
    fs::remove_all(d);
    return d;
}

}  // namespace

TEST_CASE("a small training run writes every artifact and repeats byte for byte") {
    const ExperimentConfig cfg = small_config();
    const fs::path a = scratch("train_a");
    const fs::path b = scratch("train_b");
    const TrainSummary s = run_train(cfg, a);
    run_train(cfg, b);

    for (const char* f : {"config.txt", "fourier.csv", "metrics.csv", "trace.csv",
                          "boundary_prediction.csv", "checkpoint.bin", "summary.txt", "status.txt",
                          "boundary_prediction.svg", "errors.svg"}) {
        CHECK_MESSAGE(fs::exists(a / f), f);
    }
    CHECK(slurp(a / "status.txt").rfind("ok", 0) == 0);

    const auto m = lines(a / "metrics.csv");
    REQUIRE(m.size() > 3);
    CHECK(m[0] == "# schema: trpinn.metrics/1");
    CHECK(m[1] == "phase,iteration,loss,rel_h1_in,rel_l2_in,rel_hhalf_bd,rel_l2_bd");
    CHECK(m[2].rfind("init,0,", 0) == 0);
    // Rows at 50, 100, 150, 200 for Adam, then L-BFGS at 250 (if reached) and a final row.
    CHECK(m[3].rfind("adam,50,", 0) == 0);
    CHECK(m[6].rfind("adam,200,", 0) == 0);
    CHECK(m.back().rfind("lbfgs,", 0) == 0);

    const auto t = lines(a / "trace.csv");
    CHECK(t[0] == "# schema: trpinn.trace/1");
    CHECK(t[1] == "phase,iteration,loss,grad_norm,wall_ms");
    CHECK(t[2].rfind("adam,1,", 0) == 0);
    CHECK(t.size() == 2 + 200 + static_cast<std::size_t>(s.lbfgs_iterations));

    CHECK(slurp(a / "metrics.csv") == slurp(b / "metrics.csv"));
    CHECK(slurp(a / "checkpoint.bin") == slurp(b / "checkpoint.bin"));
    CHECK(slurp(a / "boundary_prediction.csv") == slurp(b / "boundary_prediction.csv"));

    // The checkpoint holds the best model.
    const Checkpoint c = read_checkpoint(a / "checkpoint.bin");
    CHECK(static_cast<long>(c.iteration) == s.best_iteration);
    CHECK(s.best.rel_h1_inside <= s.final_report.rel_h1_inside);
    CHECK(s.best.rel_h1_inside < 1.0);

    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("vanilla and trace-regularized runs share samples and initialization") {
    ExperimentConfig tr = small_config();
    tr.adam_iterations = 0;
    tr.lbfgs.max_iterations = 0;
    ExperimentConfig van = tr;
    van.weights = {1.0, 100.0, 0.0};
    const fs::path a = scratch("share_tr");
    const fs::path b = scratch("share_van");
    run_train(tr, a);
    run_train(van, b);
    const auto ma = lines(a / "metrics.csv");
    const auto mb = lines(b / "metrics.csv");
    REQUIRE(ma.size() == 3);
    REQUIRE(mb.size() == 3);
    // Same network at iteration 0: identical errors, different loss.
    const auto tail = [](const std::string& row) {
        std::size_t pos = 0;
        for (int k = 0; k < 3; ++k) pos = row.find(',', pos) + 1;
        return row.substr(pos);
    };
    CHECK(tail(ma[2]) == tail(mb[2]));
    CHECK(ma[2] != mb[2]);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("diverging training records a failed status") {
    ExperimentConfig cfg = small_config();
    cfg.adam.lr = 1e300;
    cfg.adam_iterations = 20;
    const fs::path d = scratch("diverge");
    CHECK_THROWS_AS(run_train(cfg, d), NumericalError);
    CHECK(slurp(d / "status.txt").rfind("failed phase=", 0) == 0);
    fs::remove_all(d);
}

TEST_CASE("identity-kernel spectra follow the closed form of M") {
    ExperimentConfig cfg = small_config();
    cfg.ntk.identity_kernel = true;
    cfg.ntk.top_k = 32;
    const fs::path d = scratch("ntk_id");
    const auto runs = run_ntk(cfg, d);
    REQUIRE(runs.size() == 3);
    Eigen::VectorXd want = build_m(32).eigenvalues_closed_form();
    std::sort(want.data(), want.data() + want.size(), std::greater<>());
    for (const auto& r : runs) {
        CHECK((r.lambda_h - want).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((r.lambda_p.array() - 1.0 / 32).abs().maxCoeff() < 1e-15);
        CHECK(r.min_diff >= 0.0);
    }
    for (const char* m : {"linspace", "randomized", "uniform"}) {
        const auto s = lines(d / (std::string("spectra_") + m + ".csv"));
        CHECK(s[0] == "# schema: trpinn.spectra/1");
        CHECK(s[1] == "index,lambda_p,lambda_h,diff");
        CHECK(s.size() == 2 + 32);
        const auto dy = lines(d / (std::string("dynamics_") + m + ".csv"));
        CHECK(dy.size() == 2 + 51);
    }
    fs::remove_all(d);
}

TEST_CASE("network-kernel spectra are deterministic and dominated") {
    const ExperimentConfig cfg = small_config();
    const fs::path a = scratch("ntk_a");
    const fs::path b = scratch("ntk_b");
    const auto ra = run_ntk(cfg, a);
    run_ntk(cfg, b);
    for (const auto& r : ra) CHECK(r.min_diff >= -1e-10 * r.lambda_h(0));
    for (const char* m : {"linspace", "randomized", "uniform"}) {
        const std::string f = std::string("spectra_") + m + ".csv";
        CHECK(slurp(a / f) == slurp(b / f));
    }
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("semi-norm check rows") {
    const fs::path d = scratch("semi");
    const auto rows = run_seminorm_check(d);
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].rel_error < 0.01);
        if (i > 0) CHECK(rows[i].rel_error < rows[i - 1].rel_error);
    }
    const auto l = lines(d / "seminorm_check.csv");
    CHECK(l.size() == 2 + 5);
    CHECK(l.back().rfind("constant,256,0,0,", 0) == 0);
    fs::remove_all(d);
}

TEST_CASE("oracle check and mollify demo") {
    const fs::path d = scratch("oracle");
    const auto rows = run_oracle_check(small_config(), d);
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 0; i < 3; ++i) CHECK(rows[i].max_error < 1e-10);
    CHECK(rows[3].label == "sin_config");

    const auto moll = run_mollify_demo(d);
    REQUIRE(moll.size() == 3);
    for (std::size_t i = 0; i < moll.size(); ++i) {
        CHECK(moll[i].min_eig >= 1.0 - 1e-12);
        CHECK(moll[i].max_eig <= 2.0 + 1e-12);
        if (i > 0) {
            CHECK(moll[i].max_deviation < moll[i - 1].max_deviation);
            CHECK(moll[i].rhs_l2 < moll[i - 1].rhs_l2);
        }
    }
    CHECK(fs::exists(d / "mollify.csv"));
    fs::remove_all(d);
}
