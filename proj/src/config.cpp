#include "trpinn/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "trpinn/error.hpp"
#include "trpinn/io.hpp"
#include "trpinn/model.hpp"

namespace trpinn {

namespace {

[[noreturn]] void fail(std::string_view key, const std::string& what) {
    throw ConfigError(std::string(key) + ": " + what);
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(std::string_view key, std::string_view v) {
    double out = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) fail(key, "expected a number");
    return out;
}

long long to_int(std::string_view key, std::string_view v) {
    long long out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) fail(key, "expected an integer");
    return out;
}

std::uint64_t to_u64(std::string_view key, std::string_view v) {
    std::uint64_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) {
        fail(key, "expected a non-negative integer");
    }
    return out;
}

std::size_t to_count(std::string_view key, std::string_view v) {
    const long long n = to_int(key, v);
    if (n <= 0) fail(key, "must be positive");
    return static_cast<std::size_t>(n);
}

bool to_bool(std::string_view key, std::string_view v) {
    if (v == "true") return true;
    if (v == "false") return false;
    fail(key, "expected true or false");
}

std::string_view kind_name(BoundaryKind k) { return k == BoundaryKind::sharp_v ? "sharp" : "sin"; }

using Setter = std::function<void(ExperimentConfig&, std::string_view key, std::string_view v)>;

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = {
        {"problem.kind",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) {
             if (v == "sin") {
                 c.problem.kind = BoundaryKind::sin_v;
             } else if (v == "sharp") {
                 c.problem.kind = BoundaryKind::sharp_v;
             } else {
                 fail(k, "expected sin or sharp");
             }
         }},
        {"problem.V",
         [](ExperimentConfig& c, auto k, auto v) { c.problem.V = static_cast<int>(to_int(k, v)); }},
        {"problem.fourier_samples",
         [](ExperimentConfig& c, auto k, auto v) {
             c.problem.fourier_samples = static_cast<int>(to_int(k, v));
         }},
        {"problem.fourier_modes",
         [](ExperimentConfig& c, auto k, auto v) {
             c.problem.fourier_modes = static_cast<int>(to_int(k, v));
         }},
        {"weights.alpha", [](ExperimentConfig& c, auto k, auto v) { c.weights.alpha = to_double(k, v); }},
        {"weights.beta", [](ExperimentConfig& c, auto k, auto v) { c.weights.beta = to_double(k, v); }},
        {"weights.gamma", [](ExperimentConfig& c, auto k, auto v) { c.weights.gamma = to_double(k, v); }},
        {"model.units", [](ExperimentConfig& c, auto k, auto v) { c.model.units = to_count(k, v); }},
        {"model.hidden_layers",
         [](ExperimentConfig& c, auto k, auto v) { c.model.hidden_layers = to_count(k, v); }},
        {"model.seed", [](ExperimentConfig& c, auto k, auto v) { c.model.seed = to_u64(k, v); }},
        {"sampling.interior_n",
         [](ExperimentConfig& c, auto k, auto v) { c.sampling.interior_n = to_count(k, v); }},
        {"sampling.interior_seed",
         [](ExperimentConfig& c, auto k, auto v) { c.sampling.interior_seed = to_u64(k, v); }},
        {"sampling.boundary_method",
         [](ExperimentConfig& c, auto k, auto v) {
             try {
                 c.sampling.boundary_method = parse_boundary_method(v);
             } catch (const ConfigError& e) {
                 fail(k, e.what());
             }
         }},
        {"sampling.boundary_n",
         [](ExperimentConfig& c, auto k, auto v) { c.sampling.boundary_n = to_count(k, v); }},
        {"sampling.boundary_seed",
         [](ExperimentConfig& c, auto k, auto v) { c.sampling.boundary_seed = to_u64(k, v); }},
        {"adam.iterations",
         [](ExperimentConfig& c, auto k, auto v) { c.adam_iterations = to_int(k, v); }},
        {"adam.lr", [](ExperimentConfig& c, auto k, auto v) { c.adam.lr = to_double(k, v); }},
        {"adam.beta1", [](ExperimentConfig& c, auto k, auto v) { c.adam.beta1 = to_double(k, v); }},
        {"adam.beta2", [](ExperimentConfig& c, auto k, auto v) { c.adam.beta2 = to_double(k, v); }},
        {"adam.eps", [](ExperimentConfig& c, auto k, auto v) { c.adam.eps = to_double(k, v); }},
        {"lbfgs.max_iterations",
         [](ExperimentConfig& c, auto k, auto v) { c.lbfgs.max_iterations = to_int(k, v); }},
        {"lbfgs.history",
         [](ExperimentConfig& c, auto k, auto v) { c.lbfgs.history = to_count(k, v); }},
        {"lbfgs.c1", [](ExperimentConfig& c, auto k, auto v) { c.lbfgs.c1 = to_double(k, v); }},
        {"lbfgs.c2", [](ExperimentConfig& c, auto k, auto v) { c.lbfgs.c2 = to_double(k, v); }},
        {"lbfgs.max_linesearch",
         [](ExperimentConfig& c, auto k, auto v) {
             c.lbfgs.max_linesearch = static_cast<int>(to_int(k, v));
         }},
        {"lbfgs.grad_tol",
         [](ExperimentConfig& c, auto k, auto v) { c.lbfgs.grad_tol = to_double(k, v); }},
        {"lbfgs.rel_decrease_tol",
         [](ExperimentConfig& c, auto k, auto v) { c.lbfgs.rel_decrease_tol = to_double(k, v); }},
        {"lbfgs.window",
         [](ExperimentConfig& c, auto k, auto v) { c.lbfgs.window = to_count(k, v); }},
        {"metrics.cadence",
         [](ExperimentConfig& c, auto k, auto v) { c.metrics_cadence = to_int(k, v); }},
        {"eval.radial", [](ExperimentConfig& c, auto k, auto v) { c.eval.radial = to_count(k, v); }},
        {"eval.angular", [](ExperimentConfig& c, auto k, auto v) { c.eval.angular = to_count(k, v); }},
        {"eval.boundary",
         [](ExperimentConfig& c, auto k, auto v) { c.eval.boundary = to_count(k, v); }},
        {"ntk.top_k", [](ExperimentConfig& c, auto k, auto v) { c.ntk.top_k = to_count(k, v); }},
        {"ntk.with_skip_pairs",
         [](ExperimentConfig& c, auto k, auto v) { c.ntk.with_skip_pairs = to_bool(k, v); }},
        {"ntk.identity_kernel",
         [](ExperimentConfig& c, auto k, auto v) { c.ntk.identity_kernel = to_bool(k, v); }},
        {"output.dir",
         [](ExperimentConfig& c, auto k, auto v) {
             if (v.empty()) fail(k, "must not be empty");
             c.output.dir = std::string(v);
         }},
        {"output.svg", [](ExperimentConfig& c, auto k, auto v) { c.output.svg = to_bool(k, v); }},
    };
    return table;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (problem.kind != BoundaryKind::sin_v && problem.kind != BoundaryKind::sharp_v) {
        fail("problem.kind", "expected sin or sharp");
    }
    if (problem.V < 1) fail("problem.V", "must be positive");
    if (problem.fourier_modes < 1) fail("problem.fourier_modes", "must be positive");
    if (problem.fourier_samples < 2 * problem.fourier_modes + 1) {
        fail("problem.fourier_samples", "must be at least 2 * fourier_modes + 1");
    }
    const auto weight = [](std::string_view key, double v) {
        if (!std::isfinite(v) || v < 0.0) fail(key, "must be finite and >= 0");
    };
    weight("weights.alpha", weights.alpha);
    weight("weights.beta", weights.beta);
    weight("weights.gamma", weights.gamma);
    if (model.units == 0) fail("model.units", "must be positive");
    if (model.hidden_layers == 0) fail("model.hidden_layers", "must be positive");
    if (sampling.interior_n == 0) fail("sampling.interior_n", "must be positive");
    if (sampling.boundary_n < 3) fail("sampling.boundary_n", "must be at least 3");
    if (adam_iterations < 0) fail("adam.iterations", "must be >= 0");
    if (!(adam.lr > 0.0)) fail("adam.lr", "must be positive");
    if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0)) fail("adam.beta1", "must be in [0, 1)");
    if (!(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) fail("adam.beta2", "must be in [0, 1)");
    if (!(adam.eps > 0.0)) fail("adam.eps", "must be positive");
    try {
        lbfgs.validate();
    } catch (const ConfigError& e) {
        fail("lbfgs", e.what());
    }
    if (metrics_cadence <= 0) fail("metrics.cadence", "must be positive");
    if (eval.boundary < 3) fail("eval.boundary", "must be at least 3");
    if (ntk.top_k > sampling.boundary_n) fail("ntk.top_k", "must not exceed sampling.boundary_n");
    if (output.dir.empty()) fail("output.dir", "must not be empty");
}

BoundaryFunction ExperimentConfig::boundary_function() const {
    return problem.kind == BoundaryKind::sharp_v ? BoundaryFunction::sharp(problem.V)
                                                 : BoundaryFunction::sin(problem.V);
}

std::vector<std::size_t> ExperimentConfig::layer_sizes() const {
    std::vector<std::size_t> sizes{2};
    for (std::size_t i = 0; i < model.hidden_layers; ++i) sizes.push_back(model.units);
    sizes.push_back(1);
    return sizes;
}

void ExperimentConfig::override_seed(std::uint64_t seed) {
    model.seed = seed;
    sampling.interior_seed = seed;
    sampling.boundary_seed = seed;
}

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig cfg;
    std::set<std::string, std::less<>> seen;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) fail(key, "unknown key");
        if (!seen.insert(std::string(key)).second) fail(key, "given twice");
        it->second(cfg, key, value);
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string to_text(const ExperimentConfig& c) {
    std::ostringstream o;
    const auto d = [](double v) { return format_double(v); };
    const auto b = [](bool v) { return v ? "true" : "false"; };
    o << "problem.kind = " << kind_name(c.problem.kind) << '\n'
      << "problem.V = " << c.problem.V << '\n'
      << "problem.fourier_samples = " << c.problem.fourier_samples << '\n'
      << "problem.fourier_modes = " << c.problem.fourier_modes << '\n'
      << "weights.alpha = " << d(c.weights.alpha) << '\n'
      << "weights.beta = " << d(c.weights.beta) << '\n'
      << "weights.gamma = " << d(c.weights.gamma) << '\n'
      << "model.units = " << c.model.units << '\n'
      << "model.hidden_layers = " << c.model.hidden_layers << '\n'
      << "model.seed = " << c.model.seed << '\n'
      << "sampling.interior_n = " << c.sampling.interior_n << '\n'
      << "sampling.interior_seed = " << c.sampling.interior_seed << '\n'
      << "sampling.boundary_method = " << to_string(c.sampling.boundary_method) << '\n'
      << "sampling.boundary_n = " << c.sampling.boundary_n << '\n'
      << "sampling.boundary_seed = " << c.sampling.boundary_seed << '\n'
      << "adam.iterations = " << c.adam_iterations << '\n'
      << "adam.lr = " << d(c.adam.lr) << '\n'
      << "adam.beta1 = " << d(c.adam.beta1) << '\n'
      << "adam.beta2 = " << d(c.adam.beta2) << '\n'
      << "adam.eps = " << d(c.adam.eps) << '\n'
      << "lbfgs.max_iterations = " << c.lbfgs.max_iterations << '\n'
      << "lbfgs.history = " << c.lbfgs.history << '\n'
      << "lbfgs.c1 = " << d(c.lbfgs.c1) << '\n'
      << "lbfgs.c2 = " << d(c.lbfgs.c2) << '\n'
      << "lbfgs.max_linesearch = " << c.lbfgs.max_linesearch << '\n'
      << "lbfgs.grad_tol = " << d(c.lbfgs.grad_tol) << '\n'
      << "lbfgs.rel_decrease_tol = " << d(c.lbfgs.rel_decrease_tol) << '\n'
      << "lbfgs.window = " << c.lbfgs.window << '\n'
      << "metrics.cadence = " << c.metrics_cadence << '\n'
      << "eval.radial = " << c.eval.radial << '\n'
      << "eval.angular = " << c.eval.angular << '\n'
      << "eval.boundary = " << c.eval.boundary << '\n'
      << "ntk.top_k = " << c.ntk.top_k << '\n'
      << "ntk.with_skip_pairs = " << b(c.ntk.with_skip_pairs) << '\n'
      << "ntk.identity_kernel = " << b(c.ntk.identity_kernel) << '\n'
      << "output.dir = " << c.output.dir << '\n'
      << "output.svg = " << b(c.output.svg) << '\n';
    return o.str();
}

void save_config(const std::filesystem::path& path, const ExperimentConfig& cfg) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << to_text(cfg);
}

}  // namespace trpinn
