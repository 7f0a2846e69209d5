#include "trpinn/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "trpinn/boundary_data.hpp"
#include "trpinn/coeffs.hpp"
#include "trpinn/error.hpp"
#include "trpinn/geometry.hpp"
#include "trpinn/io.hpp"
#include "trpinn/losses.hpp"
#include "trpinn/model.hpp"
#include "trpinn/ntk.hpp"
#include "trpinn/quadrature.hpp"

namespace trpinn {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

double norm_inf(std::span<const double> v) {
    double s = 0.0;
    for (const double x : v) s = std::max(s, std::abs(x));
    return s;
}

void write_status(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text << '\n';
}

// Metrics rows plus best-H1 bookkeeping shared by both phases.
class Recorder {
  public:
    Recorder(const fs::path& dir, const ErrorEvaluator& eval, Mlp& net)
        : metrics_(dir / "metrics.csv", "trpinn.metrics", 1,
                   {"phase", "iteration", "loss", "rel_h1_in", "rel_l2_in", "rel_hhalf_bd",
                    "rel_l2_bd"}),
          eval_(eval),
          net_(net) {}

    void record(std::string_view phase, long iteration, double loss,
                std::span<const double> params) {
        net_.unflatten(params);
        const ErrorReport r = eval_.evaluate(net_);
        metrics_.cell(phase)
            .cell(static_cast<long long>(iteration))
            .cell(loss)
            .cell(r.rel_h1_inside)
            .cell(r.rel_l2_inside)
            .cell(r.rel_h_half_boundary)
            .cell(r.rel_l2_boundary)
            .end_row();
        metrics_.flush();
        curve_x.push_back(static_cast<double>(iteration));
        curve_h1.push_back(r.rel_h1_inside);
        curve_l2bd.push_back(r.rel_l2_boundary);
        if (!has_best || r.rel_h1_inside < best.rel_h1_inside) {
            has_best = true;
            best = r;
            best_iteration = iteration;
            best_params.assign(params.begin(), params.end());
        }
        last = r;
    }

    void flush() { metrics_.flush(); }

    bool has_best = false;
    ErrorReport best;
    ErrorReport last;
    long best_iteration = 0;
    std::vector<double> best_params;
    std::vector<double> curve_x, curve_h1, curve_l2bd;

  private:
    CsvWriter metrics_;
    const ErrorEvaluator& eval_;
    Mlp& net_;
};

}  // namespace

TrainSummary run_train(const ExperimentConfig& cfg, const fs::path& out_dir) {
    cfg.validate();
    fs::create_directories(out_dir);
    save_config(out_dir / "config.txt", cfg);
    write_status(out_dir / "status.txt", "running");

    const BoundaryFunction g = cfg.boundary_function();
    const FourierSeries oracle =
        fit_fourier(g, cfg.problem.fourier_samples, cfg.problem.fourier_modes);
    write_series_csv(out_dir / "fourier.csv", oracle);

    const InteriorSet interior = sample_interior(cfg.sampling.interior_n, cfg.sampling.interior_seed);
    const BoundarySet boundary = sample_boundary(cfg.sampling.boundary_method,
                                                 cfg.sampling.boundary_n, cfg.sampling.boundary_seed);
    const auto sizes = cfg.layer_sizes();
    Mlp net = init_mlp(sizes, cfg.model.seed);
    FusedLoss loss(net, interior, boundary, g, {}, cfg.weights);
    const ErrorEvaluator evaluator(oracle, cfg.eval);

    Recorder rec(out_dir, evaluator, net);
    CsvWriter trace(out_dir / "trace.csv", "trpinn.trace", 1,
                    {"phase", "iteration", "loss", "grad_norm", "wall_ms"});

    std::vector<double> params = net.flatten();
    std::vector<double> grad(params.size());
    TrainSummary summary;
    const long adam_n = cfg.adam_iterations;
    const long cadence = cfg.metrics_cadence;

    try {
        rec.record("init", 0, loss.value(params), params);

        const auto t_adam = Clock::now();
        AdamState adam(params.size(), cfg.adam);
        for (long k = 1; k <= adam_n; ++k) {
            const double f = loss.value_and_grad(params, grad);
            if (!std::isfinite(f)) throw NumericalError("adam", k, "non-finite loss");
            adam_step(params, grad, adam);
            trace.cell("adam").cell(static_cast<long long>(k)).cell(f).cell(norm_inf(grad))
                .cell(ms_since(t_adam)).end_row();
            if (k % cadence == 0 || k == adam_n) {
                const double now = loss.value(params);
                if (!std::isfinite(now)) throw NumericalError("adam", k, "non-finite loss");
                rec.record("adam", k, now, params);
            }
        }
        summary.adam_ms = ms_since(t_adam);

        const auto t_lbfgs = Clock::now();
        long last_recorded = -1;
        const Objective objective = [&loss](std::span<const double> x, std::span<double> gr) {
            return loss.value_and_grad(x, gr);
        };
        const LbfgsObserver observer = [&](const LbfgsIterate& it, std::span<const double> x) {
            const long global = adam_n + it.iteration;
            trace.cell("lbfgs").cell(static_cast<long long>(global)).cell(it.loss)
                .cell(it.grad_norm).cell(ms_since(t_lbfgs)).end_row();
            if (it.iteration % cadence == 0) {
                rec.record("lbfgs", global, it.loss, x);
                last_recorded = global;
            }
        };
        LbfgsResult res = lbfgs_minimize(objective, params, cfg.lbfgs, observer);
        summary.lbfgs_ms = ms_since(t_lbfgs);
        summary.termination = res.termination;
        summary.lbfgs_iterations = static_cast<long>(res.trace.size());
        if (res.termination == Termination::non_finite) {
            throw NumericalError("lbfgs", adam_n, "non-finite loss at the L-BFGS start");
        }
        params = std::move(res.params);
        summary.final_loss = res.loss;
        const long end = adam_n + summary.lbfgs_iterations;
        if (cfg.lbfgs.max_iterations > 0 && last_recorded != end) {
            rec.record("lbfgs", end, res.loss, params);
        }
        summary.final_report = rec.last;
        rec.flush();
        trace.flush();
    } catch (const NumericalError& e) {
        rec.flush();
        trace.flush();
        write_status(out_dir / "status.txt", "failed phase=" + e.phase() +
                                                 " iteration=" + std::to_string(e.iteration()));
        throw;
    }

    summary.best = rec.best;
    summary.best_iteration = rec.best_iteration;
    net.unflatten(rec.best_params);
    write_checkpoint(out_dir / "checkpoint.bin", net, static_cast<std::uint64_t>(rec.best_iteration));

    {
        constexpr int kGrid = 2048;
        CsvWriter bp(out_dir / "boundary_prediction.csv", "trpinn.boundary_prediction", 1,
                     {"theta", "u_nn", "g"});
        SvgSeries pred{"u_NN", "#1f77b4", {}, {}, false};
        SvgSeries exact{"g", "#333333", {}, {}, true};
        for (int i = 0; i < kGrid; ++i) {
            const double t = kTwoPi * i / kGrid;
            const double u = forward(net, {std::cos(t), std::sin(t)});
            const double gv = eval_g(g, t);
            bp.cell(t).cell(u).cell(gv).end_row();
            pred.x.push_back(t);
            pred.y.push_back(u);
            exact.x.push_back(t);
            exact.y.push_back(gv);
        }
        if (cfg.output.svg) {
            write_svg_chart(out_dir / "boundary_prediction.svg", "boundary values", {exact, pred});
        }
    }
    if (cfg.output.svg) {
        write_svg_chart(out_dir / "errors.svg", "relative errors",
                        {{"H1 interior", "#d62728", rec.curve_x, rec.curve_h1, false},
                         {"L2 boundary", "#1f77b4", rec.curve_x, rec.curve_l2bd, false}},
                        true);
    }

    {
        std::ofstream s(out_dir / "summary.txt");
        s << "best_iteration = " << summary.best_iteration << '\n'
          << "best_rel_h1_in = " << format_double(summary.best.rel_h1_inside) << '\n'
          << "best_rel_l2_in = " << format_double(summary.best.rel_l2_inside) << '\n'
          << "best_rel_hhalf_bd = " << format_double(summary.best.rel_h_half_boundary) << '\n'
          << "best_rel_l2_bd = " << format_double(summary.best.rel_l2_boundary) << '\n'
          << "final_loss = " << format_double(summary.final_loss) << '\n'
          << "final_rel_h1_in = " << format_double(summary.final_report.rel_h1_inside) << '\n'
          << "final_rel_l2_bd = " << format_double(summary.final_report.rel_l2_boundary) << '\n'
          << "lbfgs_iterations = " << summary.lbfgs_iterations << '\n'
          << "lbfgs_termination = " << to_string(summary.termination) << '\n'
          << "fourier_reconstruction_error = " << format_double(oracle.reconstruction_error) << '\n'
          << "adam_ms = " << format_double(summary.adam_ms) << '\n'
          << "lbfgs_ms = " << format_double(summary.lbfgs_ms) << '\n';
    }
    write_status(out_dir / "status.txt", "ok");
    return summary;
}

std::vector<SpectrumRun> run_ntk(const ExperimentConfig& cfg, const fs::path& out_dir) {
    cfg.validate();
    fs::create_directories(out_dir);
    save_config(out_dir / "config.txt", cfg);
    const BoundaryFunction g = cfg.boundary_function();
    const Mlp net = init_mlp(cfg.layer_sizes(), cfg.model.seed);
    const std::size_t n_b = cfg.sampling.boundary_n;

    std::vector<SpectrumRun> runs;
    std::vector<SvgSeries> chart;
    for (const BoundaryMethod method :
         {BoundaryMethod::linspace, BoundaryMethod::randomized, BoundaryMethod::uniform}) {
        const BoundarySet bd = sample_boundary(method, n_b, cfg.sampling.boundary_seed);
        const auto n = static_cast<Eigen::Index>(n_b);
        const Eigen::MatrixXd kbb = cfg.ntk.identity_kernel
                                        ? Eigen::MatrixXd::Identity(n, n).eval()
                                        : kernel_blocks(net, bd).kbb;
        const SpectrumComparison sc = spectrum_compare(kbb, cfg.ntk.top_k, cfg.ntk.with_skip_pairs);

        SpectrumRun run{method, sc.lambda_p, sc.lambda_h, std::numeric_limits<double>::infinity()};
        const std::string name(to_string(method));
        {
            CsvWriter csv(out_dir / ("spectra_" + name + ".csv"), "trpinn.spectra", 1,
                          {"index", "lambda_p", "lambda_h", "diff"});
            for (Eigen::Index i = 0; i < sc.lambda_p.size(); ++i) {
                const double diff = sc.lambda_h(i) - sc.lambda_p(i);
                run.min_diff = std::min(run.min_diff, diff);
                csv.cell(static_cast<long long>(i)).cell(sc.lambda_p(i)).cell(sc.lambda_h(i))
                    .cell(diff).end_row();
            }
        }

        // Boundary-only linearized decay from the initial residual u(0) - g.
        Eigen::VectorXd r0(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto k = static_cast<std::size_t>(i);
            r0(i) = forward(net, bd.points[k]) - eval_g(g, bd.angles[k]);
        }
        std::vector<double> times;
        for (int i = 0; i <= 50; ++i) times.push_back(0.2 * i);
        const DynamicsResult dyn = simulate_dynamics(kbb, n_b, r0, times, cfg.ntk.with_skip_pairs);
        {
            CsvWriter csv(out_dir / ("dynamics_" + name + ".csv"), "trpinn.dynamics", 1,
                          {"t", "pinn_norm", "trpinn_norm"});
            for (std::size_t i = 0; i < times.size(); ++i) {
                csv.cell(times[i]).cell(dyn.pinn.norms[i]).cell(dyn.trpinn.norms[i]).end_row();
            }
        }

        SvgSeries sp{"p " + name, "#1f77b4", {}, {}, true};
        SvgSeries sh{"h " + name, "#d62728", {}, {}, false};
        for (Eigen::Index i = 0; i < sc.lambda_p.size(); ++i) {
            if (sc.lambda_p(i) > 0.0 && sc.lambda_h(i) > 0.0) {
                sp.x.push_back(static_cast<double>(i));
                sp.y.push_back(sc.lambda_p(i));
                sh.x.push_back(static_cast<double>(i));
                sh.y.push_back(sc.lambda_h(i));
            }
        }
        if (cfg.output.svg && !sp.x.empty()) {
            write_svg_chart(out_dir / ("spectra_" + name + ".svg"), "sorted eigenvalues " + name,
                            {sp, sh}, true);
        }
        runs.push_back(std::move(run));
    }
    return runs;
}

std::vector<SeminormRow> run_seminorm_check(const fs::path& out_dir) {
    fs::create_directories(out_dir);
    const double exact = sqrt_profile_seminorm_exact();
    const ScalarFn g0 = [](double t) { return std::sqrt(std::abs(t)); };
    CsvWriter csv(out_dir / "seminorm_check.csv", "trpinn.seminorm_check", 1,
                  {"case", "m", "value", "richardson", "rel_error"});
    std::vector<SeminormRow> rows;
    for (const std::size_t m : {256u, 512u, 1024u, 2048u}) {
        SeminormQuadSpec spec;
        spec.m = m;
        spec.lower = -0.5 * kTwoPi;
        spec.upper = 0.5 * kTwoPi;
        spec.periodic = false;
        const SeminormEstimate est = seminorm_full(g0, spec);
        SeminormRow row{m, est.value, est.richardson, std::abs(est.richardson - exact) / exact};
        csv.cell("sqrt_profile").cell(m).cell(row.value).cell(row.richardson).cell(row.rel_error)
            .end_row();
        rows.push_back(row);
    }
    SeminormQuadSpec spec;
    spec.m = 256;
    const SeminormEstimate c = seminorm_full([](double) { return 1.0; }, spec);
    csv.cell("constant").cell(spec.m).cell(c.value).cell(c.richardson).cell(0.0).end_row();
    return rows;
}

std::vector<OracleRow> run_oracle_check(const ExperimentConfig& cfg, const fs::path& out_dir) {
    cfg.validate();
    fs::create_directories(out_dir);
    CsvWriter csv(out_dir / "oracle_check.csv", "trpinn.oracle_check", 1,
                  {"case", "V", "max_error", "reconstruction_error"});
    std::vector<OracleRow> rows;
    for (const int v : {3, 7, 20}) {
        const FourierSeries s = fit_fourier(BoundaryFunction::sin(v), cfg.problem.fourier_samples,
                                            cfg.problem.fourier_modes);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const double r = (i + 0.5) / 100.0;
            for (int j = 0; j < 100; ++j) {
                const double t = kTwoPi * j / 100.0;
                const double u = oracle_eval(s, {r * std::cos(t), r * std::sin(t)}).u;
                worst = std::max(worst, std::abs(u - std::pow(r, v) * std::sin(v * t)));
            }
        }
        rows.push_back({"sin", v, worst, s.reconstruction_error});
    }
    const FourierSeries own =
        fit_fourier(cfg.boundary_function(), cfg.problem.fourier_samples, cfg.problem.fourier_modes);
    rows.push_back({cfg.problem.kind == BoundaryKind::sharp_v ? "sharp_config" : "sin_config",
                    cfg.problem.V, std::numeric_limits<double>::quiet_NaN(),
                    own.reconstruction_error});
    for (const OracleRow& r : rows) {
        csv.cell(r.label).cell(r.V).cell(r.max_error).cell(r.reconstruction_error).end_row();
    }
    return rows;
}

std::vector<MollifyRow> run_mollify_demo(const fs::path& out_dir) {
    fs::create_directories(out_dir);
    const CoefficientField a = checkerboard(0.1, {1.0, 0.0, 1.0}, {2.0, 0.0, 2.0});
    const std::vector<Point> probe = points_away_from_grid(1000, 0.1, 0.02, 7);
    const InteriorSet spread = sample_interior(2000, 7);
    const auto grad_u = [](Point p) { return Point{2.0 * p.x1, -2.0 * p.x2}; };

    CsvWriter csv(out_dir / "mollify.csv", "trpinn.mollify", 1,
                  {"eps", "max_deviation", "rhs_l2", "min_eig", "max_eig", "lipschitz_bound"});
    std::vector<MollifyRow> rows;
    for (const double eps : {0.1, 0.05, 0.025}) {
        const MollifiedField ae = mollify(a, eps);
        MollifyRow row;
        row.eps = eps;
        row.max_deviation = max_deviation(ae, probe);
        row.rhs_l2 = commutator_rhs_l2(ae, grad_u, 400);
        row.min_eig = std::numeric_limits<double>::infinity();
        row.max_eig = -row.min_eig;
        for (const Point& p : spread.points) {
            const Eig2 e = eigenvalues(ae(p));
            row.min_eig = std::min(row.min_eig, e.min);
            row.max_eig = std::max(row.max_eig, e.max);
        }
        row.lipschitz_bound = ae.lipschitz_bound(1.0);
        csv.cell(row.eps).cell(row.max_deviation).cell(row.rhs_l2).cell(row.min_eig)
            .cell(row.max_eig).cell(row.lipschitz_bound).end_row();
        rows.push_back(row);
    }
    return rows;
}

}  // namespace trpinn
