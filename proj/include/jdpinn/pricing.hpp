#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "jdpinn/fd_solver.hpp"
#include "jdpinn/model.hpp"
#include "jdpinn/pinn.hpp"
#include "jdpinn/simulate.hpp"

namespace jdpinn {

enum class SurfaceSource { pinn, fd, mc };
SurfaceSource parse_source(const std::string& text);
std::string to_string(SurfaceSource s);

/// Option values on a (t, s) lattice in transformed coordinates. Row j is
/// transformed time t_nodes[j] (calendar time T (1 - t)), column i is s_nodes[i].
struct PriceSurface {
    SurfaceSource source = SurfaceSource::fd;
    double s_max = 1.0;
    double maturity = 1.0;
    double strike = 0.0;
    std::vector<double> t_nodes;
    std::vector<double> s_nodes;
    std::vector<double> values_normalized;  // row-major by time
    std::vector<double> values_dollars;     // s_max * values_normalized

    double normalized(std::size_t j, std::size_t i) const { return values_normalized[j * s_nodes.size() + i]; }
    double dollars(std::size_t j, std::size_t i) const { return values_dollars[j * s_nodes.size() + i]; }
};

/// Nodes of an FD solution, converted to dollars.
PriceSurface surface_from_solution(const FdSolution& sol, const MarketModel& model);

/// Trial solution evaluated on t_j = j / n_t, s_i = i / n_s (both ends included).
PriceSurface surface_from_solution(const TrialFunction& tf, const MarketModel& model, int n_s, int n_t);

/// Feynman-Kac estimates at every node of the (n_s + 1) x (n_t + 1) lattice.
PriceSurface surface_from_mc(const PdeProblem& pde, const MarketModel& model, int n_s, int n_t,
                             const FeynmanKacConfig& cfg);

void write_surface_csv(const PriceSurface& surface, const std::filesystem::path& out);

struct OptionQuote {
    double spot_dollars = 0.0;
    double strike_dollars = 0.0;
    double tenor_years = 0.0;
    double value_dollars = 0.0;
    SurfaceSource source = SurfaceSource::fd;
};

/// Linear interpolation in S between the two bracketing nodes of the time
/// row at tenor_years to expiry (transformed t = tenor / T). When the tenor
/// falls between rows the two row interpolants are blended linearly in t.
OptionQuote interpolate_spot(const PriceSurface& surface, double spot_dollars, double tenor_years);

enum class DelaySolver { fd, mc };
DelaySolver parse_delay_solver(const std::string& text);

struct DelaySweepConfig {
    DelayMode mode = DelayMode::effective_maturity;
    DelaySolver solver = DelaySolver::fd;
    FdGrid grid{400, 400};
    FeynmanKacConfig mc;
    double spot_dollars = 0.0;  // quote point, at the pricing date
    int threads = 1;
};

struct DelayRow {
    double tau = 0.0;
    double value_dollars = 0.0;
    double std_error_dollars = 0.0;  // MC only
};

/// Re-prices the contract for each tau (parallel across tau values; output in input order).
std::vector<DelayRow> delay_sweep(const MarketModel& model, SentimentPathPolicy policy, const std::vector<double>& taus,
                                  const DelaySweepConfig& cfg);

struct ComparisonRow {
    double s_dollars = 0.0;
    std::vector<double> bs;   // one value per time column
    std::vector<double> jmd;  // one value per time column
};

struct ComparisonTable {
    std::vector<double> t_columns;
    std::vector<ComparisonRow> rows;
};

struct CompareConfig {
    FdGrid grid{400, 400};
    int n_rows = 10;                               // s = i / (n_rows - 1)
    std::vector<double> t_columns{3.0 / 9.0, 6.0 / 9.0, 1.0};
};

/// Solves the Black-Scholes reduction and the jump-diffusion problem with
/// identical settings and reads both at matching nodes.
ComparisonTable compare_models(const MarketModel& model, SentimentPathPolicy policy, const CompareConfig& cfg);

/// `s_dollars,bs_t1,bs_t2,bs_t3,jmd_t1,jmd_t2,jmd_t3` (one column per time).
void write_comparison_csv(const ComparisonTable& table, const std::filesystem::path& out);

}  // namespace jdpinn
