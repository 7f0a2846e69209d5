#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "trpinn/config.hpp"
#include "trpinn/error.hpp"
#include "trpinn/experiment.hpp"
#include "trpinn/io.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Common {
    std::string config;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> top_k;
};

trpinn::ExperimentConfig resolve(const Common& c) {
    trpinn::ExperimentConfig cfg =
        c.config.empty() ? trpinn::ExperimentConfig{} : trpinn::load_config(c.config);
    if (c.seed) cfg.override_seed(*c.seed);
    if (c.top_k) cfg.ntk.top_k = *c.top_k;
    if (!c.out_dir.empty()) cfg.output.dir = c.out_dir;
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Trace-regularized PINN experiments on the unit disk"};
    app.require_subcommand(1);
    Common opts;

    const auto add_common = [&opts](CLI::App* sub, bool seeds) {
        sub->add_option("--config", opts.config, "experiment config file (key = value)")
            ->check(CLI::ExistingFile);
        sub->add_option("--out-dir", opts.out_dir, "output directory (overrides output.dir)");
        if (seeds) {
            sub->add_option("--seed-override", opts.seed,
                            "use this seed for model init, interior and boundary sampling");
        }
    };

    CLI::App* train = app.add_subcommand("train", "Adam then L-BFGS training run");
    add_common(train, true);
    CLI::App* ntk = app.add_subcommand("ntk", "boundary NTK spectra at initialization");
    add_common(ntk, true);
    ntk->add_option("--top-k", opts.top_k, "number of leading eigenvalues to keep");
    CLI::App* semi = app.add_subcommand("seminorm-check", "quadrature of the sqrt-profile integral");
    semi->add_option("--out-dir", opts.out_dir, "output directory");
    CLI::App* oracle = app.add_subcommand("oracle-check", "Fourier oracle against closed forms");
    add_common(oracle, false);
    CLI::App* moll = app.add_subcommand("mollify-demo", "checkerboard mollification study");
    moll->add_option("--out-dir", opts.out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (train->parsed()) {
            const auto cfg = resolve(opts);
            const auto s = trpinn::run_train(cfg, cfg.output.dir);
            std::cout << "best rel H1 " << trpinn::format_double(s.best.rel_h1_inside)
                      << " at iteration " << s.best_iteration << ", rel L2(boundary) "
                      << trpinn::format_double(s.best.rel_l2_boundary) << '\n'
                      << "wrote " << cfg.output.dir << '\n';
        } else if (ntk->parsed()) {
            const auto cfg = resolve(opts);
            for (const auto& r : trpinn::run_ntk(cfg, cfg.output.dir)) {
                std::cout << trpinn::to_string(r.method) << ": lambda_p[0] "
                          << trpinn::format_double(r.lambda_p(0)) << ", lambda_h[0] "
                          << trpinn::format_double(r.lambda_h(0)) << ", min diff "
                          << trpinn::format_double(r.min_diff) << '\n';
            }
        } else if (semi->parsed()) {
            const std::string dir = opts.out_dir.empty() ? "runs/seminorm" : opts.out_dir;
            for (const auto& r : trpinn::run_seminorm_check(dir)) {
                std::cout << "m " << r.m << ": richardson " << trpinn::format_double(r.richardson)
                          << ", rel error " << trpinn::format_double(r.rel_error) << '\n';
            }
        } else if (oracle->parsed()) {
            auto cfg = resolve(opts);
            const std::string dir = opts.out_dir.empty() ? "runs/oracle" : opts.out_dir;
            for (const auto& r : trpinn::run_oracle_check(cfg, dir)) {
                std::cout << r.label << " V=" << r.V << ": max error "
                          << trpinn::format_double(r.max_error) << ", reconstruction "
                          << trpinn::format_double(r.reconstruction_error) << '\n';
            }
        } else if (moll->parsed()) {
            const std::string dir = opts.out_dir.empty() ? "runs/mollify" : opts.out_dir;
            for (const auto& r : trpinn::run_mollify_demo(dir)) {
                std::cout << "eps " << r.eps << ": max deviation "
                          << trpinn::format_double(r.max_deviation) << ", rhs "
                          << trpinn::format_double(r.rhs_l2) << ", eig ["
                          << r.min_eig << ", " << r.max_eig << "]\n";
            }
        }
    } catch (const trpinn::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const trpinn::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
