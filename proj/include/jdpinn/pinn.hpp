#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "jdpinn/error.hpp"
#include "jdpinn/model.hpp"
#include "jdpinn/neural.hpp"

namespace jdpinn {

/// zeta(t, s) = A(t, s) + B(t, s) N(t, s; theta) with
///   A = (1 - t) max(s - kappa, 0) + t s (1 - kappa),   B = t s (1 - s).
/// A carries the initial and boundary data; B vanishes on all three edges,
/// so the network only shapes the interior.
struct TrialFunction {
    NetworkArchitecture arch;
    NetworkParams params;
    double strike_ratio = 0.5;  // kappa = E / S_max
};

/// zeta and its partial derivatives at one point.
struct TrialDerivatives {
    double value = 0.0;
    double dt = 0.0;
    double ds = 0.0;
    double dss = 0.0;
};

double trial_eval(const TrialFunction& tf, double t, double s);

/// Analytic derivatives. At s = kappa the payoff slope uses the s > kappa
/// branch strictly, i.e. the left value 0 is taken at the kink itself.
TrialDerivatives trial_derivatives(const TrialFunction& tf, double t, double s);

/// Assembles zeta's derivatives from the network's at (t, s).
TrialDerivatives trial_from_network(double strike_ratio, double t, double s, const EvalResult& net);

/// Factor in front of dzeta/dt: 1/T when the flag is set, 1 otherwise.
inline double time_scale(const PdeProblem& pde, bool include_1_over_T) {
    return include_1_over_T ? 1.0 / pde.maturity : 1.0;
}

/// R = c dzeta/dt - 0.5 sigma*^2 s^2 dzeta/dss - eta s dzeta/ds + r zeta + beta,
/// with c = time_scale(...) and coefficients taken at calendar time T (1 - t).
double residual(const TrialFunction& tf, const PdeProblem& pde, double t, double s, bool include_1_over_T = true);

/// Residual together with dR/d(N, N_t, N_s, N_ss) at the same point.
struct ResidualTerms {
    double r = 0.0;
    Upstream d_network;
};

ResidualTerms residual_terms(const PdeProblem& pde, double strike_ratio, double scale, double t, double s,
                             const EvalResult& net);

struct CollocationPoint {
    double t = 0.0;
    double s = 0.0;
};

/// Uniform lattice t_j = j / n_t, s_i = i / n_s (i = 1..n_s, j = 1..n_t),
/// randomly partitioned into train and test indices.
struct CollocationGrid {
    int n_s = 0;
    int n_t = 0;
    std::vector<CollocationPoint> points;  // row-major in t: index = (j - 1) n_s + (i - 1)
    std::vector<std::size_t> train;        // sorted
    std::vector<std::size_t> test;         // sorted
};

CollocationGrid make_grid(int n_s, int n_t, double split_fraction = 0.8, std::uint64_t seed = 42);

enum class Split { train, test, full };
std::string to_string(Split s);
std::vector<CollocationPoint> select(const CollocationGrid& grid, Split split);

struct LossValue {
    double loss = 0.0;  // 0.5 sum R^2
    double mse = 0.0;
    double rmse = 0.0;
    double mae = 0.0;
    std::size_t count = 0;
};

LossValue loss(const TrialFunction& tf, const PdeProblem& pde, std::span<const CollocationPoint> points,
               bool include_1_over_T = true);

enum class Optimizer { sgd, adam };
Optimizer parse_optimizer(const std::string& text);
std::string to_string(Optimizer o);

struct TrainConfig {
    Optimizer optimizer = Optimizer::sgd;
    double learning_rate = 0.001;
    int iterations = 10000;
    std::size_t batch_size = 0;  // 0 = full batch over the train split
    std::uint64_t seed = 42;
    double convergence_tol = 1e-8;  // on ||theta_{n+1} - theta_n||; 0 disables the test
    int display_every = 500;
    bool include_1_over_T = true;
    int threads = 1;

    void validate() const;
};

struct Checkpoint {
    int step = 0;
    Split split = Split::train;
    double mse = 0.0;
    double rmse = 0.0;
    double mae = 0.0;
};

struct TrainReport {
    std::vector<Checkpoint> checkpoints;  // ordered by step, then train/test/full
    NetworkParams params;
    int steps = 0;
    bool converged = false;
    std::string stop_reason;

    /// Checkpoints of one split, in step order.
    std::vector<Checkpoint> series(Split split) const;
};

/// Thrown when the loss stops being finite. Carries the report up to the
/// last finite checkpoint, whose parameters are kept.
class TrainingDiverged : public NumericalError {
public:
    TrainingDiverged(const std::string& what, TrainReport report)
        : NumericalError(what), report_(std::move(report)) {}
    const TrainReport& report() const { return report_; }

private:
    TrainReport report_;
};

/// Gradient-based training starting from tf.params. Metrics are recorded at
/// step 0, every display_every steps and at the final step, each for the
/// train, test and full splits, always describing the parameters after that
/// many updates. The gradient reduction uses fixed chunks summed in order, so
/// the result does not depend on the thread count.
TrainReport train(const TrialFunction& tf, const PdeProblem& pde, const CollocationGrid& grid,
                  const TrainConfig& cfg);

/// Writes `step,mse,rmse,mae,split` rows.
void write_metrics_csv(const TrainReport& report, const std::filesystem::path& out);

}  // namespace jdpinn
