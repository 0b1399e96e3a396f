// jdpinn — command-line front end: estimate -> train / fd / mc -> price,
// validate, delay-sweep, compare. Every run writes a JSON manifest that
// `jdpinn rerun` can replay.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "jdpinn/error.hpp"
#include "jdpinn/estimation.hpp"
#include "jdpinn/fd_solver.hpp"
#include "jdpinn/kernels.hpp"
#include "jdpinn/market_data.hpp"
#include "jdpinn/model.hpp"
#include "jdpinn/neural.hpp"
#include "jdpinn/param_file.hpp"
#include "jdpinn/pinn.hpp"
#include "jdpinn/pricing.hpp"
#include "jdpinn/simulate.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace jdpinn;

namespace {

constexpr const char* kVersion = JDPINN_VERSION;

// ---------------------------------------------------------------------------
// Small helpers

struct GridSize {
    int n_s = 0;
    int n_t = 0;
};

/// "NxM": N price intervals by M time intervals.
GridSize parse_grid(const std::string& text) {
    const auto x = text.find_first_of("xX");
    if (x == std::string::npos) throw UsageError("grid must look like NxM, got '" + text + "'");
    try {
        std::size_t used_a = 0, used_b = 0;
        const int a = std::stoi(text.substr(0, x), &used_a);
        const int b = std::stoi(text.substr(x + 1), &used_b);
        if (used_a != x || used_b != text.size() - x - 1 || a < 1 || b < 1) throw std::invalid_argument(text);
        return {a, b};
    } catch (const std::logic_error&) {
        throw UsageError("grid must look like NxM with positive integers, got '" + text + "'");
    }
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::logic_error&) {
            throw UsageError("not a number list: '" + text + "'");
        }
    }
    if (out.empty()) throw UsageError("empty list");
    return out;
}

std::string fmt_fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

double days_per_year(DayCount dc) { return dc == DayCount::trading252 ? 252.0 : 365.0; }

/// Collects the files a command writes, for the manifest.
struct Artifacts {
    std::vector<std::string> paths;
    void add(const fs::path& p) { paths.push_back(p.string()); }
};

// ---------------------------------------------------------------------------
// Options shared by the commands

struct Options {
    int threads = 1;
    std::string manifest = "jdpinn-manifest.json";

    // estimate
    std::string prices, trend, est_out = "params.txt", stats_out;
    double threshold = 0.07;
    std::string day_count = "365";
    std::optional<double> strike, s_max;
    double maturity = 1.0, rate = 0.04, phi0 = 0.01, tau = 0.0;
    std::string policy = "mean-path";

    // shared by the solving commands
    std::string params;
    std::string model_kind = "jmd";
    std::uint64_t seed = 42;

    // train
    std::string grid = "10x10", activation = "sigmoid", optimizer = "sgd";
    double lr = 0.001, split = 0.8, tol = 1e-8;
    int iters = 10000, display_every = 500;
    std::size_t batch = 0;
    bool literal_loss = false;
    std::string out_weights = "weights.txt", metrics = "metrics.csv";

    // price
    std::string weights;
    bool use_fd = false, use_mc = false;
    double spot = 0.0;
    std::optional<double> tenor;
    std::string surface_out, fd_grid = "400x400";
    std::size_t paths = 100000;
    int mc_steps = 250;
    bool antithetic = false, rannacher = false;

    // validate
    std::string pinn_grid = "10x10";
    bool skip_pinn = false;
    double mae_limit = 0.02, fd_tol = 0.005, z_limit = 3.0;

    // delay-sweep
    std::string taus = "5,10,15,20", tau_unit = "days", mode = "effective-maturity", solver = "fd", sweep_out;

    // compare
    int rows = 10;
    std::string compare_out = "compare.csv";

    // simulate
    std::string sim_kind = "jd", scheme = "exact", sim_out = "path.csv";
    int sim_steps = 252;
    double horizon = 1.0, s0 = 0.0;
    std::uint64_t path_index = 0;

    // rerun
    std::string rerun_manifest;
};

std::string env_name(const std::string& flag) {
    std::string out = "JDPINN_";
    for (char c : flag) out += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

/// add_option with a JDPINN_<FLAG> environment override.
template <typename T>
CLI::Option* opt(CLI::App* app, const std::string& flag, T& target, const std::string& help) {
    return app->add_option("--" + flag, target, help)->envname(env_name(flag));
}

CLI::Option* flag_opt(CLI::App* app, const std::string& flag, bool& target, const std::string& help) {
    return app->add_flag("--" + flag, target, help)->envname(env_name(flag));
}

ParamFile load_params(const Options& o) {
    if (o.params.empty()) throw UsageError("--params is required");
    return load_param_file(o.params);
}

PdeModelKind model_kind(const Options& o) { return parse_model_kind(o.model_kind); }

// ---------------------------------------------------------------------------
// estimate

int cmd_estimate(const Options& o, Artifacts& art) {
    const DayCount dc = parse_day_count(o.day_count);
    const auto prices = load_price_csv(o.prices);
    const auto returns = log_returns(prices, dc);
    const auto jd = estimate_jump_diffusion(returns, JumpThresholdConfig{o.threshold});

    ParamFile pf;
    pf.day_count = dc;
    pf.policy = parse_policy(o.policy);
    pf.model.jd = jd;
    pf.model.phi0 = o.phi0;
    pf.model.tau = o.tau;
    pf.model.rate = o.rate;
    pf.model.maturity = o.maturity;
    pf.model.s_max = o.s_max.value_or(prices.max_close());
    pf.model.strike = o.strike.value_or(0.0);

    std::set<std::string> omit, unavailable;
    if (!o.strike) unavailable.insert("strike");

    std::optional<DescriptiveStats> trend_stats;
    bool partial = false;
    if (!o.trend.empty() && fs::exists(o.trend)) {
        const auto trend = load_trend_csv(o.trend);
        const auto tr = log_returns(trend, dc);
        pf.model.sp = estimate_sentiment(tr);
        if (tr.returns.size() >= 4) trend_stats = describe(tr);
    } else {
        partial = true;
        omit.insert("mu_p");
        omit.insert("sigma_p");
    }

    save_param_file(o.est_out, pf, omit, unavailable);
    art.add(o.est_out);

    // Descriptive statistics, one column per series.
    const auto ps = describe(returns);
    std::ostringstream table;
    table << "statistic,prices" << (trend_stats ? ",trend" : "") << '\n';
    auto row = [&](const char* name, double a, std::optional<double> b) {
        table << name << ',' << format_double(a);
        if (trend_stats) table << ',' << format_double(*b);
        table << '\n';
    };
    const auto ts = trend_stats.value_or(DescriptiveStats{});
    table << "count," << ps.count << (trend_stats ? "," + std::to_string(ts.count) : "") << '\n';
    row("mean", ps.mean, ts.mean);
    row("min", ps.min, ts.min);
    row("q1", ps.q1, ts.q1);
    row("median", ps.median, ts.median);
    row("q3", ps.q3, ts.q3);
    row("max", ps.max, ts.max);
    row("std_dev", ps.std_dev, ts.std_dev);
    row("skewness", ps.skewness, ts.skewness);
    row("kurtosis", ps.kurtosis, ts.kurtosis);
    std::cout << table.str();
    if (!o.stats_out.empty()) {
        std::ofstream os(o.stats_out);
        if (!os) throw DataError("cannot write '" + o.stats_out + "'");
        os << table.str();
        art.add(o.stats_out);
    }
    std::cout << "jumps: " << jd.jump_count << " over " << format_double(jd.period_years) << " years (lambda "
              << format_double(jd.lambda) << ")\n";
    if (partial) {
        std::cerr << "partial estimate: trend file "
                  << (o.trend.empty() ? std::string("not given") : "'" + o.trend + "' not found")
                  << "; sentiment keys left out of " << o.est_out << '\n';
        return static_cast<int>(ErrorKind::data);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// train

TrainConfig train_config(const Options& o) {
    TrainConfig c;
    c.optimizer = parse_optimizer(o.optimizer);
    c.learning_rate = o.lr;
    c.iterations = o.iters;
    c.batch_size = o.batch;
    c.seed = o.seed;
    c.convergence_tol = o.tol;
    c.display_every = o.display_every;
    c.include_1_over_T = !o.literal_loss;
    c.threads = o.threads;
    c.validate();
    return c;
}

TrialFunction initial_trial(const Options& o, const MarketModel& model) {
    TrialFunction tf;
    tf.arch.activation = parse_activation(o.activation);
    tf.strike_ratio = model.strike_ratio();
    tf.params = init_params(tf.arch, o.seed);
    return tf;
}

void print_metrics(const TrainReport& rep) {
    const int last = rep.steps;
    for (const auto& c : rep.checkpoints)
        if (c.step == last)
            std::cout << to_string(c.split) << ": mse " << format_double(c.mse) << " rmse " << format_double(c.rmse)
                      << " mae " << format_double(c.mae) << '\n';
}

int cmd_train(const Options& o, Artifacts& art) {
    const auto pf = load_params(o);
    const auto pde = build_pde(pf.model, pf.policy, model_kind(o));
    const auto g = parse_grid(o.grid);
    const auto grid = make_grid(g.n_s, g.n_t, o.split, o.seed);
    const auto cfg = train_config(o);
    TrialFunction tf = initial_trial(o, pf.model);

    try {
        const auto rep = train(tf, pde, grid, cfg);
        save_weights(o.out_weights, tf.arch, rep.params);
        art.add(o.out_weights);
        write_metrics_csv(rep, o.metrics);
        art.add(o.metrics);
        std::cout << "steps: " << rep.steps << " (" << rep.stop_reason << ")\n";
        print_metrics(rep);
    } catch (const TrainingDiverged& e) {
        save_weights(o.out_weights, tf.arch, e.report().params);
        art.add(o.out_weights);
        write_metrics_csv(e.report(), o.metrics);
        art.add(o.metrics);
        throw;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// price

int cmd_price(const Options& o, Artifacts& art) {
    const auto pf = load_params(o);
    const auto& model = pf.model;
    const int sources = (o.weights.empty() ? 0 : 1) + (o.use_fd ? 1 : 0) + (o.use_mc ? 1 : 0);
    if (sources != 1) throw UsageError("choose exactly one of --weights, --fd, --mc");
    if (!(o.spot >= 0.0 && o.spot <= model.s_max))
        throw UsageError("spot " + format_double(o.spot) + " outside [0, " + format_double(model.s_max) + "]");
    const double tenor = o.tenor.value_or(model.maturity);
    if (!(tenor >= 0.0 && tenor <= model.maturity)) throw UsageError("tenor must lie in [0, maturity]");
    const auto pde = build_pde(model, pf.policy, model_kind(o));

    if (o.use_mc) {
        FeynmanKacConfig mc;
        mc.n_paths = o.paths;
        mc.n_steps = o.mc_steps;
        mc.seed = o.seed;
        mc.antithetic = o.antithetic;
        mc.threads = o.threads;
        const auto est = feynman_kac_price(pde, o.spot / model.s_max, model.maturity - tenor, mc);
        std::cout << "value,std_error,n_paths\n"
                  << fmt_fixed(est.value * model.s_max, 6) << ',' << fmt_fixed(est.std_error * model.s_max, 6) << ','
                  << est.n_paths << '\n';
        if (!o.surface_out.empty()) {
            const auto g = parse_grid(o.pinn_grid);
            write_surface_csv(surface_from_mc(pde, model, g.n_s, g.n_t, mc), o.surface_out);
            art.add(o.surface_out);
        }
        return 0;
    }

    PriceSurface surface;
    if (o.use_fd) {
        const auto g = parse_grid(o.fd_grid);
        surface = surface_from_solution(solve_crank_nicolson(pde, {g.n_s, g.n_t}, {o.rannacher}), model);
    } else {
        auto [arch, params] = load_weights(o.weights);
        const TrialFunction tf{arch, params, model.strike_ratio()};
        const auto g = parse_grid(o.pinn_grid);
        surface = surface_from_solution(tf, model, g.n_s, g.n_t);
    }
    const auto q = interpolate_spot(surface, o.spot, tenor);
    std::cout << "source,spot_dollars,strike_dollars,tenor_years,value_dollars\n"
              << to_string(q.source) << ',' << format_double(q.spot_dollars) << ',' << format_double(q.strike_dollars)
              << ',' << format_double(q.tenor_years) << ',' << fmt_fixed(q.value_dollars, 2) << '\n';
    if (!o.surface_out.empty()) {
        write_surface_csv(surface, o.surface_out);
        art.add(o.surface_out);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// validate

int cmd_validate(const Options& o, Artifacts&) {
    const auto pf = load_params(o);
    const auto& model = pf.model;
    const auto g = parse_grid(o.fd_grid);
    bool ok = true;
    auto verdict = [&](bool pass) {
        ok = ok && pass;
        return pass ? "PASS" : "FAIL";
    };

    // 1. Black-Scholes reduction against its closed form on the unbounded domain.
    const auto bs = build_pde(model, pf.policy, PdeModelKind::black_scholes);
    const auto bs_fd = solve_crank_nicolson(bs, {g.n_s, g.n_t}, {o.rannacher});
    double worst = 0.0;
    for (int j = 1; j <= g.n_t; ++j)
        for (int i = 0; i <= g.n_s; ++i) {
            const double s = static_cast<double>(i) / g.n_s;
            if (s < 0.2 - 1e-12 || s > 0.8 + 1e-12) continue;
            const double t_cal = model.maturity * (1.0 - static_cast<double>(j) / g.n_t);
            worst = std::max(worst, std::abs(bs_fd(j, i) - closed_form_unbounded(bs, t_cal, s)));
        }
    std::cout << "bs-reduction fd vs closed form: max error " << fmt_fixed(100.0 * worst, 4) << "% of S_max (limit "
              << fmt_fixed(100.0 * o.fd_tol, 2) << "%) " << verdict(worst <= o.fd_tol) << '\n';

    // 2. Jump model: FD against Feynman-Kac at nine probes.
    const auto pde = build_pde(model, pf.policy, PdeModelKind::jump_diffusion);
    const auto fd = solve_crank_nicolson(pde, {g.n_s, g.n_t}, {o.rannacher});
    FeynmanKacConfig mc;
    mc.n_paths = o.paths;
    mc.n_steps = o.mc_steps;
    mc.seed = o.seed;
    mc.threads = o.threads;
    std::cout << "probe,t,s_dollars,fd_dollars,mc_dollars,se_dollars,z,verdict\n";
    int probe = 0;
    for (double t : {1.0 / 3.0, 2.0 / 3.0, 1.0})
        for (double s : {0.25, 0.5, 0.75}) {
            const double v_fd = fd.value_at(t, s);
            const auto est = feynman_kac_price(pde, s, model.maturity * (1.0 - t), mc);
            const double z = est.std_error > 0.0 ? (v_fd - est.value) / est.std_error : (v_fd == est.value ? 0.0 : INFINITY);
            std::cout << ++probe << ',' << fmt_fixed(t, 4) << ',' << fmt_fixed(s * model.s_max, 2) << ','
                      << fmt_fixed(v_fd * model.s_max, 4) << ',' << fmt_fixed(est.value * model.s_max, 4) << ','
                      << fmt_fixed(est.std_error * model.s_max, 4) << ',' << fmt_fixed(z, 2) << ','
                      << verdict(std::abs(z) <= o.z_limit) << '\n';
        }

    // 3. Trained network against the FD surface.
    if (!o.skip_pinn) {
        TrialFunction tf;
        if (!o.weights.empty()) {
            auto [arch, params] = load_weights(o.weights);
            tf = {arch, params, model.strike_ratio()};
        } else {
            const auto pg = parse_grid(o.pinn_grid);
            tf = initial_trial(o, model);
            tf.params = train(tf, pde, make_grid(pg.n_s, pg.n_t, o.split, o.seed), train_config(o)).params;
        }
        const auto pg = parse_grid(o.pinn_grid);
        const auto grid = make_grid(pg.n_s, pg.n_t, o.split, o.seed);
        double mae = 0.0;
        for (const auto& p : grid.points) mae += std::abs(trial_eval(tf, p.t, p.s) - fd.value_at(p.t, p.s));
        mae /= static_cast<double>(grid.points.size());
        std::cout << "pinn vs fd: grid MAE " << fmt_fixed(100.0 * mae, 4) << "% of S_max (limit "
                  << fmt_fixed(100.0 * o.mae_limit, 2) << "%) " << verdict(mae <= o.mae_limit) << '\n';
    }

    if (!ok) throw ValidationError("validation failed: at least one check exceeded its threshold");
    return 0;
}

// ---------------------------------------------------------------------------
// delay-sweep

int cmd_delay_sweep(const Options& o, Artifacts& art) {
    const auto pf = load_params(o);
    auto taus = parse_list(o.taus);
    if (o.tau_unit == "days") {
        for (double& t : taus) t /= days_per_year(pf.day_count);
    } else if (o.tau_unit != "years") {
        throw UsageError("--tau-unit must be days or years");
    }
    DelaySweepConfig cfg;
    cfg.mode = parse_delay_mode(o.mode);
    cfg.solver = parse_delay_solver(o.solver);
    const auto g = parse_grid(o.fd_grid);
    cfg.grid = {g.n_s, g.n_t};
    cfg.mc.n_paths = o.paths;
    cfg.mc.n_steps = o.mc_steps;
    cfg.mc.seed = o.seed;
    cfg.spot_dollars = o.spot;
    cfg.threads = o.threads;
    const auto rows = delay_sweep(pf.model, pf.policy, taus, cfg);

    std::ostringstream os;
    os << "tau_years,value_dollars" << (cfg.solver == DelaySolver::mc ? ",std_error_dollars" : "") << '\n';
    for (const auto& r : rows) {
        os << format_double(r.tau) << ',' << fmt_fixed(r.value_dollars, 4);
        if (cfg.solver == DelaySolver::mc) os << ',' << fmt_fixed(r.std_error_dollars, 4);
        os << '\n';
    }
    std::cout << os.str();
    if (!o.sweep_out.empty()) {
        std::ofstream f(o.sweep_out);
        if (!f) throw DataError("cannot write '" + o.sweep_out + "'");
        f << os.str();
        art.add(o.sweep_out);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// compare

int cmd_compare(const Options& o, Artifacts& art) {
    const auto pf = load_params(o);
    CompareConfig cfg;
    const auto g = parse_grid(o.fd_grid);
    cfg.grid = {g.n_s, g.n_t};
    cfg.n_rows = o.rows;
    const auto table = compare_models(pf.model, pf.policy, cfg);
    write_comparison_csv(table, o.compare_out);
    art.add(o.compare_out);
    std::cout << "s_dollars  bs_t1  bs_t2  bs_t3  jmd_t1  jmd_t2  jmd_t3\n";
    for (const auto& r : table.rows) {
        std::cout << fmt_fixed(r.s_dollars, 2);
        for (double v : r.bs) std::cout << "  " << fmt_fixed(v, 2);
        for (double v : r.jmd) std::cout << "  " << fmt_fixed(v, 2);
        std::cout << '\n';
    }
    return 0;
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(const Options& o, Artifacts& art) {
    const auto pf = load_params(o);
    PathConfig cfg;
    cfg.n_steps = o.sim_steps;
    cfg.horizon = o.horizon;
    cfg.seed = o.seed;
    cfg.scheme = parse_scheme(o.scheme);
    SamplePath path;
    if (o.sim_kind == "sentiment") {
        path = simulate_sentiment(pf.model.sp, pf.model.phi0, cfg, o.path_index);
    } else if (o.sim_kind == "jd") {
        const double s0 = o.s0 > 0.0 ? o.s0 : pf.model.strike;
        path = simulate_jump_diffusion(pf.model, s0, cfg, o.path_index);
    } else {
        throw UsageError("--kind must be jd or sentiment");
    }
    write_path_csv(path, o.sim_out);
    art.add(o.sim_out);
    std::cout << "steps: " << cfg.n_steps << ", jumps: " << path.jump_times.size() << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// Manifest

std::string utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_manifest(const Options& o, const std::string& command, const std::vector<std::string>& argv,
                    const std::string& resolved, const Artifacts& art, double seconds, int exit_code) {
    if (o.manifest.empty() || o.manifest == "-") return;
    json m;
    m["tool"] = "jdpinn";
    m["version"] = kVersion;
    m["command"] = command;
    m["argv"] = argv;
    m["config"] = resolved;
    m["seed"] = o.seed;
    m["threads"] = o.threads;
    m["artifacts"] = art.paths;
    m["exit_code"] = exit_code;
    m["started_at"] = utc_now();
    m["wall_clock_seconds"] = seconds;
    std::ofstream os(o.manifest);
    if (!os) throw DataError("cannot write manifest '" + o.manifest + "'");
    os << m.dump(2) << '\n';
}

int run(const std::vector<std::string>& args);

int cmd_rerun(const Options& o) {
    std::ifstream in(o.rerun_manifest);
    if (!in) throw DataError("cannot open manifest '" + o.rerun_manifest + "'");
    json m;
    try {
        in >> m;
    } catch (const json::exception& e) {
        throw DataError("manifest '" + o.rerun_manifest + "' is not valid JSON: " + e.what());
    }
    if (!m.contains("argv") || !m["argv"].is_array()) throw DataError("manifest has no argv array");
    const auto argv = m["argv"].get<std::vector<std::string>>();
    if (argv.empty() || argv.front() == "rerun") throw DataError("manifest does not describe a replayable command");
    return run(argv);
}

// ---------------------------------------------------------------------------

void build_app(CLI::App& app, Options& o) {
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("jdpinn ") + kVersion);
    opt(&app, "threads", o.threads, "Worker threads for Monte Carlo, training and sweeps")->capture_default_str();
    opt(&app, "manifest", o.manifest, "Run manifest path ('-' to skip)")->capture_default_str();

    auto* est = app.add_subcommand("estimate", "Estimate model parameters from price and trend CSVs");
    opt(est, "prices", o.prices, "Daily closes, date,close")->required()->check(CLI::ExistingFile);
    opt(est, "trend", o.trend, "Trend index, date,value");
    opt(est, "threshold", o.threshold, "Jump threshold on |log-return|")->capture_default_str();
    opt(est, "day-count", o.day_count, "365 (crypto) or 252 (equities)")->capture_default_str();
    opt(est, "out", o.est_out, "Parameter file to write")->capture_default_str();
    opt(est, "stats", o.stats_out, "Also write the descriptive statistics CSV here");
    opt(est, "strike", o.strike, "Contract strike E (written as na when absent)");
    opt(est, "s-max", o.s_max, "Upper price bound S_max (default: largest close)");
    opt(est, "maturity", o.maturity, "Maturity T in years")->capture_default_str();
    opt(est, "rate", o.rate, "Risk-free rate per year")->capture_default_str();
    opt(est, "phi0", o.phi0, "Initial sentiment level phi(0)")->capture_default_str();
    opt(est, "tau", o.tau, "Delay tau in years")->capture_default_str();
    opt(est, "policy", o.policy, "frozen or mean-path")->capture_default_str();

    auto add_model = [&](CLI::App* c) {
        opt(c, "params", o.params, "Parameter file")->required()->check(CLI::ExistingFile);
        opt(c, "model", o.model_kind, "jmd (jump model) or bs (beta = 0, eta = r)")->capture_default_str();
        opt(c, "seed", o.seed, "Master seed")->capture_default_str();
    };
    auto add_training = [&](CLI::App* c) {
        opt(c, "activation", o.activation, "sigmoid, tanh or relu")->capture_default_str();
        opt(c, "optimizer", o.optimizer, "sgd or adam")->capture_default_str();
        opt(c, "lr", o.lr, "Learning rate")->capture_default_str();
        opt(c, "iters", o.iters, "Maximum iterations")->capture_default_str();
        opt(c, "batch", o.batch, "Mini-batch size (0 = full batch)")->capture_default_str();
        opt(c, "split", o.split, "Train fraction of the collocation grid")->capture_default_str();
        opt(c, "tol", o.tol, "Stop when the parameter step norm falls to this (0 disables)")->capture_default_str();
        opt(c, "display-every", o.display_every, "Checkpoint interval")->capture_default_str();
        flag_opt(c, "literal-loss", o.literal_loss, "Drop the 1/T factor from the time-derivative term");
    };

    auto* tr = app.add_subcommand("train", "Train the trial-solution network");
    add_model(tr);
    add_training(tr);
    opt(tr, "grid", o.grid, "Collocation grid NxM (price x time)")->capture_default_str();
    opt(tr, "out-weights", o.out_weights, "Weight file to write")->capture_default_str();
    opt(tr, "metrics", o.metrics, "Metrics CSV to write")->capture_default_str();

    auto* pr = app.add_subcommand("price", "Quote an option from a network, the FD solver or Monte Carlo");
    add_model(pr);
    opt(pr, "weights", o.weights, "Trained weight file")->check(CLI::ExistingFile);
    flag_opt(pr, "fd", o.use_fd, "Use the finite-difference solver");
    flag_opt(pr, "mc", o.use_mc, "Use Feynman-Kac Monte Carlo");
    opt(pr, "spot", o.spot, "Spot price in currency")->required();
    opt(pr, "tenor", o.tenor, "Years to expiry (default: maturity)");
    opt(pr, "surface-out", o.surface_out, "Write the full surface CSV here");
    opt(pr, "fd-grid", o.fd_grid, "FD grid NxM")->capture_default_str();
    opt(pr, "surface-grid", o.pinn_grid, "Surface grid NxM for network and MC surfaces")->capture_default_str();
    opt(pr, "paths", o.paths, "Monte Carlo paths")->capture_default_str();
    opt(pr, "steps", o.mc_steps, "Monte Carlo time steps")->capture_default_str();
    flag_opt(pr, "antithetic", o.antithetic, "Antithetic variates");
    flag_opt(pr, "rannacher", o.rannacher, "Implicit-Euler start-up steps in the FD solver");

    auto* va = app.add_subcommand("validate", "Cross-check FD, Monte Carlo and the trained network");
    add_model(va);
    add_training(va);
    opt(va, "fd-grid", o.fd_grid, "FD grid NxM")->capture_default_str();
    opt(va, "grid", o.pinn_grid, "Collocation grid NxM")->capture_default_str();
    opt(va, "paths", o.paths, "Monte Carlo paths per probe")->capture_default_str();
    opt(va, "steps", o.mc_steps, "Monte Carlo time steps")->capture_default_str();
    opt(va, "weights", o.weights, "Use this weight file instead of training")->check(CLI::ExistingFile);
    flag_opt(va, "skip-pinn", o.skip_pinn, "Skip the network check");
    flag_opt(va, "rannacher", o.rannacher, "Implicit-Euler start-up steps in the FD solver");
    opt(va, "mae-limit", o.mae_limit, "Network MAE limit, fraction of S_max")->capture_default_str();

    auto* ds = app.add_subcommand("delay-sweep", "Option value as a function of the delay tau");
    add_model(ds);
    opt(ds, "taus", o.taus, "Comma-separated delays")->capture_default_str();
    opt(ds, "tau-unit", o.tau_unit, "days (trading or calendar per day_count) or years")->capture_default_str();
    opt(ds, "mode", o.mode, "effective-maturity or sentiment-shift")->capture_default_str();
    opt(ds, "solver", o.solver, "fd or mc")->capture_default_str();
    opt(ds, "spot", o.spot, "Spot price in currency")->required();
    opt(ds, "fd-grid", o.fd_grid, "FD grid NxM")->capture_default_str();
    opt(ds, "paths", o.paths, "Monte Carlo paths")->capture_default_str();
    opt(ds, "steps", o.mc_steps, "Monte Carlo time steps")->capture_default_str();
    opt(ds, "out", o.sweep_out, "Also write the table here");

    auto* cm = app.add_subcommand("compare", "Black-Scholes vs jump model side by side");
    add_model(cm);
    opt(cm, "fd-grid", o.fd_grid, "FD grid NxM")->capture_default_str();
    opt(cm, "rows", o.rows, "Price rows, s = i / (rows - 1)")->capture_default_str();
    opt(cm, "out", o.compare_out, "Comparison CSV")->capture_default_str();

    auto* sm = app.add_subcommand("simulate", "Simulate a price/sentiment path");
    add_model(sm);
    opt(sm, "kind", o.sim_kind, "jd (price and sentiment) or sentiment")->capture_default_str();
    opt(sm, "scheme", o.scheme, "exact or euler")->capture_default_str();
    opt(sm, "steps", o.sim_steps, "Time steps")->capture_default_str();
    opt(sm, "horizon", o.horizon, "Horizon in years")->capture_default_str();
    opt(sm, "s0", o.s0, "Initial price (default: strike)");
    opt(sm, "path-index", o.path_index, "Random stream index")->capture_default_str();
    opt(sm, "out", o.sim_out, "Path CSV")->capture_default_str();

    auto* rr = app.add_subcommand("rerun", "Replay the command recorded in a manifest");
    rr->add_option("manifest", o.rerun_manifest, "Manifest JSON")->required()->check(CLI::ExistingFile);
}

int run(const std::vector<std::string>& args) {
    CLI::App app{"Jump-diffusion option pricing with sentiment: estimation, PINN, FD and Monte Carlo solvers",
                 "jdpinn"};
    Options o;
    build_app(app, o);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(ErrorKind::usage);
    }

    std::string command;
    for (auto* sub : app.get_subcommands()) command = sub->get_name();
    if (command == "rerun") return cmd_rerun(o);

    if (o.threads < 1) throw UsageError("--threads must be at least 1");
    kernels::set_threads(o.threads);

    const auto start = std::chrono::steady_clock::now();
    Artifacts art;
    int code = 0;
    std::optional<std::exception_ptr> failure;
    try {
        if (command == "estimate") code = cmd_estimate(o, art);
        else if (command == "train") code = cmd_train(o, art);
        else if (command == "price") code = cmd_price(o, art);
        else if (command == "validate") code = cmd_validate(o, art);
        else if (command == "delay-sweep") code = cmd_delay_sweep(o, art);
        else if (command == "compare") code = cmd_compare(o, art);
        else if (command == "simulate") code = cmd_simulate(o, art);
    } catch (const Error& e) {
        code = e.exit_code();
        failure = std::current_exception();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(o, command, args, app.config_to_str(true, false), art, seconds, code);
    if (failure) std::rethrow_exception(*failure);
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return run(args);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(ErrorKind::numerical);
    }
}
