#include "jdpinn/pinn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "jdpinn/kernels.hpp"
#include "jdpinn/rng.hpp"

namespace jdpinn {

namespace {

constexpr std::uint64_t kSplitStream = 0x5b1d;
constexpr std::uint64_t kBatchStream = 0xba7c;

inline double payoff_part(double s, double kappa) { return s > kappa ? s - kappa : 0.0; }

/// Fisher-Yates on the first `take` positions of idx.
void partial_shuffle(std::vector<std::size_t>& idx, std::size_t take, PhiloxStream& rng) {
    const std::size_t n = idx.size();
    for (std::size_t i = 0; i < take && i + 1 < n; ++i) {
        const auto span = static_cast<double>(n - i);
        auto j = i + static_cast<std::size_t>(rng.uniform() * span);
        if (j >= n) j = n - 1;
        std::swap(idx[i], idx[j]);
    }
}

}  // namespace

TrialDerivatives trial_from_network(double kappa, double t, double s, const EvalResult& net) {
    const double b = t * s * (1.0 - s);
    const double pay = payoff_part(s, kappa);
    const double slope = s > kappa ? 1.0 : 0.0;
    TrialDerivatives d;
    d.value = (1.0 - t) * pay + t * s * (1.0 - kappa) + b * net.n;
    d.dt = -pay + s * (1.0 - kappa) + s * (1.0 - s) * net.n + b * net.dn_dt;
    d.ds = (1.0 - t) * slope + t * (1.0 - kappa) + t * (1.0 - 2.0 * s) * net.n + b * net.dn_ds;
    d.dss = b * net.d2n_ds2 + 2.0 * t * (1.0 - 2.0 * s) * net.dn_ds - 2.0 * t * net.n;
    return d;
}

double trial_eval(const TrialFunction& tf, double t, double s) {
    const double b = t * s * (1.0 - s);
    const double a = (1.0 - t) * payoff_part(s, tf.strike_ratio) + t * s * (1.0 - tf.strike_ratio);
    if (b == 0.0) return a;
    return a + b * eval(tf.arch, tf.params, t, s).n;
}

TrialDerivatives trial_derivatives(const TrialFunction& tf, double t, double s) {
    return trial_from_network(tf.strike_ratio, t, s, eval(tf.arch, tf.params, t, s));
}

ResidualTerms residual_terms(const PdeProblem& pde, double kappa, double scale, double t, double s,
                             const EvalResult& net) {
    const double tc = pde.maturity * (1.0 - t);
    const double sig2 = pde.sigma_star_sq(tc);
    const double eta = pde.eta(tc);
    const double r = pde.rate;
    const auto z = trial_from_network(kappa, t, s, net);
    const double b = t * s * (1.0 - s);
    const double diff = 0.5 * sig2 * s * s;

    ResidualTerms out;
    out.r = scale * z.dt - diff * z.dss - eta * s * z.ds + r * z.value + pde.beta(tc, s);
    out.d_network.n = scale * s * (1.0 - s) + sig2 * s * s * t - eta * s * t * (1.0 - 2.0 * s) + r * b;
    out.d_network.dn_dt = scale * b;
    out.d_network.dn_ds = -sig2 * s * s * t * (1.0 - 2.0 * s) - eta * s * b;
    out.d_network.d2n_ds2 = -diff * b;
    return out;
}

double residual(const TrialFunction& tf, const PdeProblem& pde, double t, double s, bool include_1_over_T) {
    const auto net = eval(tf.arch, tf.params, t, s);
    return residual_terms(pde, tf.strike_ratio, time_scale(pde, include_1_over_T), t, s, net).r;
}

CollocationGrid make_grid(int n_s, int n_t, double split_fraction, std::uint64_t seed) {
    if (n_s < 1 || n_t < 1) throw UsageError("grid sizes must be at least 1");
    if (!(split_fraction >= 0.0 && split_fraction <= 1.0)) throw UsageError("split fraction must lie in [0, 1]");
    CollocationGrid g;
    g.n_s = n_s;
    g.n_t = n_t;
    g.points.reserve(static_cast<std::size_t>(n_s) * n_t);
    for (int j = 1; j <= n_t; ++j)
        for (int i = 1; i <= n_s; ++i)
            g.points.push_back({static_cast<double>(j) / n_t, static_cast<double>(i) / n_s});

    const std::size_t n = g.points.size();
    const auto n_train = static_cast<std::size_t>(std::llround(split_fraction * static_cast<double>(n)));
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    PhiloxStream rng(derive_seed(seed, kSplitStream), 0);
    partial_shuffle(idx, n_train, rng);
    g.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    g.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    std::sort(g.train.begin(), g.train.end());
    std::sort(g.test.begin(), g.test.end());
    return g;
}

std::string to_string(Split s) {
    switch (s) {
    case Split::train: return "train";
    case Split::test: return "test";
    case Split::full: return "full";
    }
    return "?";
}

std::vector<CollocationPoint> select(const CollocationGrid& grid, Split split) {
    if (split == Split::full) return grid.points;
    const auto& idx = split == Split::train ? grid.train : grid.test;
    std::vector<CollocationPoint> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(grid.points[i]);
    return out;
}

namespace {

LossValue to_loss_value(const kernels::LossSums& s) {
    LossValue v;
    v.count = s.count;
    v.loss = 0.5 * s.sum_sq;
    if (s.count > 0) {
        v.mse = s.sum_sq / static_cast<double>(s.count);
        v.rmse = std::sqrt(v.mse);
        v.mae = s.sum_abs / static_cast<double>(s.count);
    }
    return v;
}

}  // namespace

LossValue loss(const TrialFunction& tf, const PdeProblem& pde, std::span<const CollocationPoint> points,
               bool include_1_over_T) {
    const kernels::ResidualContext ctx{&tf.arch, &pde, tf.strike_ratio, time_scale(pde, include_1_over_T)};
    return to_loss_value(kernels::loss_sums(ctx, tf.params.values, points));
}

Optimizer parse_optimizer(const std::string& text) {
    if (text == "sgd") return Optimizer::sgd;
    if (text == "adam") return Optimizer::adam;
    throw UsageError("unknown optimizer '" + text + "' (expected sgd or adam)");
}

std::string to_string(Optimizer o) { return o == Optimizer::sgd ? "sgd" : "adam"; }

void TrainConfig::validate() const {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw UsageError("learning rate must be >= 0");
    if (iterations < 1) throw UsageError("iterations must be at least 1");
    if (display_every < 1) throw UsageError("display interval must be at least 1");
    if (!(convergence_tol >= 0.0)) throw UsageError("convergence tolerance must be >= 0");
    if (threads < 1) throw UsageError("threads must be at least 1");
}

std::vector<Checkpoint> TrainReport::series(Split split) const {
    std::vector<Checkpoint> out;
    for (const auto& c : checkpoints)
        if (c.split == split) out.push_back(c);
    return out;
}

TrainReport train(const TrialFunction& tf, const PdeProblem& pde, const CollocationGrid& grid,
                  const TrainConfig& cfg) {
    cfg.validate();
    tf.arch.validate();
    if (tf.params.values.size() != tf.arch.param_count())
        throw UsageError("parameter vector does not match architecture");

    const auto train_pts = select(grid, Split::train);
    const auto test_pts = select(grid, Split::test);
    const auto full_pts = select(grid, Split::full);
    if (train_pts.empty()) throw UsageError("training split is empty");

    kernels::set_threads(cfg.threads);
    const kernels::ResidualContext ctx{&tf.arch, &pde, tf.strike_ratio, time_scale(pde, cfg.include_1_over_T)};

    std::vector<double> theta = tf.params.values;
    const std::size_t n_params = theta.size();
    std::vector<double> grad(n_params), m1, m2;
    if (cfg.optimizer == Optimizer::adam) {
        m1.assign(n_params, 0.0);
        m2.assign(n_params, 0.0);
    }
    constexpr double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;

    TrainReport report;
    std::vector<double> last_good = theta;
    int last_recorded = -1;

    auto record = [&](int step) {
        const std::pair<Split, const std::vector<CollocationPoint>*> splits[] = {
            {Split::train, &train_pts}, {Split::test, &test_pts}, {Split::full, &full_pts}};
        for (const auto& [split, pts] : splits) {
            if (pts->empty()) continue;
            const auto v = to_loss_value(kernels::loss_sums(ctx, theta, *pts));
            if (!std::isfinite(v.mse)) {
                report.params.values = last_good;
                report.steps = step;
                report.stop_reason = "non-finite loss";
                throw TrainingDiverged("training diverged: non-finite loss at step " + std::to_string(step) +
                                           " (last finite checkpoint: step " + std::to_string(last_recorded) + ")",
                                       report);
            }
            report.checkpoints.push_back({step, split, v.mse, v.rmse, v.mae});
        }
        last_good = theta;
        last_recorded = step;
    };

    record(0);

    std::vector<std::size_t> batch_idx;
    std::vector<CollocationPoint> batch;
    const bool minibatch = cfg.batch_size > 0 && cfg.batch_size < train_pts.size();
    if (minibatch) batch.resize(cfg.batch_size);

    int step = 0;
    report.stop_reason = "iteration limit";
    for (step = 1; step <= cfg.iterations; ++step) {
        std::span<const CollocationPoint> pts(train_pts);
        if (minibatch) {
            batch_idx.resize(train_pts.size());
            std::iota(batch_idx.begin(), batch_idx.end(), std::size_t{0});
            PhiloxStream rng(derive_seed(cfg.seed, kBatchStream), static_cast<std::uint64_t>(step));
            partial_shuffle(batch_idx, cfg.batch_size, rng);
            for (std::size_t b = 0; b < cfg.batch_size; ++b) batch[b] = train_pts[batch_idx[b]];
            pts = batch;
        }

        const auto sums = kernels::loss_gradient_blocked(ctx, theta, pts, grad);
        bool finite = std::isfinite(sums.sum_sq);
        for (double g : grad) finite = finite && std::isfinite(g);
        if (!finite) {
            report.params.values = last_good;
            report.steps = step;
            report.stop_reason = "non-finite loss";
            throw TrainingDiverged("training diverged: non-finite loss at step " + std::to_string(step) +
                                       " (last finite checkpoint: step " + std::to_string(last_recorded) + ")",
                                   report);
        }

        double step_sq = 0.0;
        if (cfg.optimizer == Optimizer::sgd) {
            for (std::size_t k = 0; k < n_params; ++k) {
                const double delta = -cfg.learning_rate * grad[k];
                theta[k] += delta;
                step_sq += delta * delta;
            }
        } else {
            const double c1 = 1.0 - std::pow(beta1, step);
            const double c2 = 1.0 - std::pow(beta2, step);
            for (std::size_t k = 0; k < n_params; ++k) {
                m1[k] = beta1 * m1[k] + (1.0 - beta1) * grad[k];
                m2[k] = beta2 * m2[k] + (1.0 - beta2) * grad[k] * grad[k];
                const double delta = -cfg.learning_rate * (m1[k] / c1) / (std::sqrt(m2[k] / c2) + adam_eps);
                theta[k] += delta;
                step_sq += delta * delta;
            }
        }

        if (step % cfg.display_every == 0) record(step);
        if (cfg.convergence_tol > 0.0 && std::sqrt(step_sq) <= cfg.convergence_tol) {
            report.converged = true;
            report.stop_reason = "parameter step below tolerance";
            break;
        }
    }
    report.steps = std::min(step, cfg.iterations);
    if (last_recorded != report.steps) record(report.steps);
    report.params.values = std::move(theta);
    return report;
}

void write_metrics_csv(const TrainReport& report, const std::filesystem::path& out) {
    std::ofstream os(out);
    if (!os) throw DataError("cannot write '" + out.string() + "'");
    os << "step,mse,rmse,mae,split\n";
    for (const auto& c : report.checkpoints)
        os << c.step << ',' << format_double(c.mse) << ',' << format_double(c.rmse) << ',' << format_double(c.mae)
           << ',' << to_string(c.split) << '\n';
}

}  // namespace jdpinn
