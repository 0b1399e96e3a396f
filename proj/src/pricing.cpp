#include "jdpinn/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>

#include "jdpinn/error.hpp"
#include "jdpinn/neural.hpp"

namespace jdpinn {

namespace {

PriceSurface empty_surface(SurfaceSource src, const MarketModel& model, int n_s, int n_t) {
    PriceSurface s;
    s.source = src;
    s.s_max = model.s_max;
    s.maturity = model.maturity;
    s.strike = model.strike;
    s.t_nodes.resize(static_cast<std::size_t>(n_t) + 1);
    s.s_nodes.resize(static_cast<std::size_t>(n_s) + 1);
    for (int j = 0; j <= n_t; ++j) s.t_nodes[j] = static_cast<double>(j) / n_t;
    for (int i = 0; i <= n_s; ++i) s.s_nodes[i] = static_cast<double>(i) / n_s;
    s.values_normalized.assign(s.t_nodes.size() * s.s_nodes.size(), 0.0);
    return s;
}

void fill_dollars(PriceSurface& s) {
    s.values_dollars.resize(s.values_normalized.size());
    for (std::size_t k = 0; k < s.values_normalized.size(); ++k) s.values_dollars[k] = s.s_max * s.values_normalized[k];
}

double row_value(const PriceSurface& surface, std::size_t j, double s) {
    const auto& xs = surface.s_nodes;
    auto it = std::upper_bound(xs.begin(), xs.end(), s);
    std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    if (hi == 0) hi = 1;
    if (hi >= xs.size()) hi = xs.size() - 1;
    const std::size_t lo = hi - 1;
    const double w = (s - xs[lo]) / (xs[hi] - xs[lo]);
    if (w == 0.0) return surface.dollars(j, lo);
    if (w == 1.0) return surface.dollars(j, hi);
    return (1.0 - w) * surface.dollars(j, lo) + w * surface.dollars(j, hi);
}

}  // namespace

SurfaceSource parse_source(const std::string& text) {
    if (text == "pinn") return SurfaceSource::pinn;
    if (text == "fd") return SurfaceSource::fd;
    if (text == "mc") return SurfaceSource::mc;
    throw UsageError("unknown solver '" + text + "' (expected pinn, fd or mc)");
}

std::string to_string(SurfaceSource s) {
    switch (s) {
    case SurfaceSource::pinn: return "pinn";
    case SurfaceSource::fd: return "fd";
    case SurfaceSource::mc: return "mc";
    }
    return "?";
}

PriceSurface surface_from_solution(const FdSolution& sol, const MarketModel& model) {
    auto s = empty_surface(SurfaceSource::fd, model, sol.grid.n_s, sol.grid.n_t);
    s.values_normalized = sol.values;
    fill_dollars(s);
    return s;
}

PriceSurface surface_from_solution(const TrialFunction& tf, const MarketModel& model, int n_s, int n_t) {
    if (n_s < 1 || n_t < 1) throw UsageError("surface grid sizes must be at least 1");
    auto s = empty_surface(SurfaceSource::pinn, model, n_s, n_t);
    Workspace ws(tf.arch);
    for (std::size_t j = 0; j < s.t_nodes.size(); ++j)
        for (std::size_t i = 0; i < s.s_nodes.size(); ++i) {
            const double t = s.t_nodes[j], x = s.s_nodes[i];
            const auto net = forward(tf.arch, tf.params.values, t, x, ws);
            s.values_normalized[j * s.s_nodes.size() + i] = trial_from_network(tf.strike_ratio, t, x, net).value;
        }
    fill_dollars(s);
    return s;
}

PriceSurface surface_from_mc(const PdeProblem& pde, const MarketModel& model, int n_s, int n_t,
                             const FeynmanKacConfig& cfg) {
    if (n_s < 1 || n_t < 1) throw UsageError("surface grid sizes must be at least 1");
    auto s = empty_surface(SurfaceSource::mc, model, n_s, n_t);
    for (std::size_t j = 0; j < s.t_nodes.size(); ++j)
        for (std::size_t i = 0; i < s.s_nodes.size(); ++i) {
            const double t_cal = pde.maturity * (1.0 - s.t_nodes[j]);
            s.values_normalized[j * s.s_nodes.size() + i] =
                feynman_kac_price(pde, s.s_nodes[i], std::clamp(t_cal, 0.0, pde.maturity), cfg).value;
        }
    fill_dollars(s);
    return s;
}

void write_surface_csv(const PriceSurface& surface, const std::filesystem::path& out) {
    std::ofstream os(out);
    if (!os) throw DataError("cannot write '" + out.string() + "'");
    os << "t,s,value_normalized,value_dollars\n";
    for (std::size_t j = 0; j < surface.t_nodes.size(); ++j)
        for (std::size_t i = 0; i < surface.s_nodes.size(); ++i)
            os << format_double(surface.t_nodes[j]) << ',' << format_double(surface.s_nodes[i]) << ','
               << format_double(surface.normalized(j, i)) << ',' << format_double(surface.dollars(j, i)) << '\n';
}

OptionQuote interpolate_spot(const PriceSurface& surface, double spot_dollars, double tenor_years) {
    if (!(spot_dollars >= 0.0 && spot_dollars <= surface.s_max))
        throw UsageError("spot " + format_double(spot_dollars) + " outside [0, " + format_double(surface.s_max) + "]");
    if (!(tenor_years >= 0.0 && tenor_years <= surface.maturity * (1.0 + 1e-12)))
        throw UsageError("tenor must lie in [0, maturity]");
    const double s = spot_dollars / surface.s_max;
    const double t = std::min(1.0, tenor_years / surface.maturity);

    const auto& ts = surface.t_nodes;
    OptionQuote q{spot_dollars, surface.strike, tenor_years, 0.0, surface.source};
    // Snap to a row when the requested time sits on a node up to rounding.
    for (std::size_t j = 0; j < ts.size(); ++j)
        if (std::abs(ts[j] - t) <= 1e-12) {
            q.value_dollars = row_value(surface, j, s);
            return q;
        }
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    std::size_t hi = std::clamp<std::size_t>(static_cast<std::size_t>(it - ts.begin()), 1, ts.size() - 1);
    const std::size_t lo = hi - 1;
    const double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
    q.value_dollars = (1.0 - w) * row_value(surface, lo, s) + w * row_value(surface, hi, s);
    return q;
}

DelaySolver parse_delay_solver(const std::string& text) {
    if (text == "fd") return DelaySolver::fd;
    if (text == "mc") return DelaySolver::mc;
    throw UsageError("unknown sweep solver '" + text + "' (expected fd or mc)");
}

std::vector<DelayRow> delay_sweep(const MarketModel& model, SentimentPathPolicy policy, const std::vector<double>& taus,
                                  const DelaySweepConfig& cfg) {
    for (double tau : taus) {
        if (!(tau >= 0.0)) throw UsageError("delays must be non-negative");
        if (tau >= model.maturity) throw UsageError("delay " + format_double(tau) + " is not below the maturity");
    }
    if (!(cfg.spot_dollars >= 0.0 && cfg.spot_dollars <= model.s_max)) throw UsageError("spot outside [0, s_max]");

    std::vector<DelayRow> rows(taus.size());
    std::vector<std::exception_ptr> errors(taus.size());
    const auto n = static_cast<std::ptrdiff_t>(taus.size());

#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, cfg.threads))
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        try {
            const MarketModel delayed = with_delay(model, taus[k], cfg.mode);
            const PdeProblem pde = build_pde(delayed, policy);
            const double s = cfg.spot_dollars / delayed.s_max;
            DelayRow row{taus[k], 0.0, 0.0};
            if (cfg.solver == DelaySolver::fd) {
                const auto sol = solve_crank_nicolson(pde, cfg.grid);
                row.value_dollars = delayed.s_max * sol.value_at(1.0, s);
            } else {
                auto mc = cfg.mc;
                mc.threads = 1;
                const auto est = feynman_kac_price(pde, s, 0.0, mc);
                row.value_dollars = delayed.s_max * est.value;
                row.std_error_dollars = delayed.s_max * est.std_error;
            }
            rows[k] = row;
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return rows;
}

ComparisonTable compare_models(const MarketModel& model, SentimentPathPolicy policy, const CompareConfig& cfg) {
    if (cfg.n_rows < 2) throw UsageError("comparison needs at least two rows");
    const auto bs = solve_crank_nicolson(build_pde(model, policy, PdeModelKind::black_scholes), cfg.grid);
    const auto jmd = solve_crank_nicolson(build_pde(model, policy, PdeModelKind::jump_diffusion), cfg.grid);
    ComparisonTable table;
    table.t_columns = cfg.t_columns;
    for (int i = 0; i < cfg.n_rows; ++i) {
        const double s = static_cast<double>(i) / (cfg.n_rows - 1);
        ComparisonRow row;
        row.s_dollars = s * model.s_max;
        for (double t : cfg.t_columns) {
            row.bs.push_back(model.s_max * bs.value_at(t, s));
            row.jmd.push_back(model.s_max * jmd.value_at(t, s));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

void write_comparison_csv(const ComparisonTable& table, const std::filesystem::path& out) {
    std::ofstream os(out);
    if (!os) throw DataError("cannot write '" + out.string() + "'");
    os << "s_dollars";
    for (std::size_t c = 0; c < table.t_columns.size(); ++c) os << ",bs_t" << c + 1;
    for (std::size_t c = 0; c < table.t_columns.size(); ++c) os << ",jmd_t" << c + 1;
    os << '\n';
    for (const auto& row : table.rows) {
        os << format_double(row.s_dollars);
        for (double v : row.bs) os << ',' << format_double(v);
        for (double v : row.jmd) os << ',' << format_double(v);
        os << '\n';
    }
}

}  // namespace jdpinn
