#pragma once

#include <filesystem>
#include <vector>

#include "jdpinn/model.hpp"

namespace jdpinn {

struct FdGrid {
    int n_s = 400;  // price intervals, dS = 1 / n_s
    int n_t = 400;  // time intervals in transformed time, dt = 1 / n_t

    /// Throws UsageError unless n_s >= 3 and n_t >= 1.
    void validate() const;
};

struct FdOptions {
    /// Replace the first two Crank-Nicolson steps by four implicit-Euler
    /// half steps to damp the oscillation the payoff kink excites.
    bool rannacher = false;
};

/// values(j, i) holds V at transformed time t_j = j / n_t and s_i = i / n_s.
struct FdSolution {
    FdGrid grid;
    std::vector<double> values;  // (n_t + 1) x (n_s + 1), row-major by time

    double operator()(int j, int i) const { return values[static_cast<std::size_t>(j) * (grid.n_s + 1) + i]; }
    double& operator()(int j, int i) { return values[static_cast<std::size_t>(j) * (grid.n_s + 1) + i]; }

    /// Bilinear interpolation at (t, s) in [0, 1]^2.
    double value_at(double t, double s) const;
};

/// Solves (1/T) V_t = 0.5 sigma*^2 s^2 V_ss + eta s V_s - r V - beta on
/// [0, 1]^2 with V(0, s) = max(s - kappa, 0), V(t, 0) = 0, V(t, 1) = 1 - kappa.
/// Coefficients are taken at the half step; each step is a tridiagonal solve.
/// Throws NumericalError naming the step when a value stops being finite.
FdSolution solve_crank_nicolson(const PdeProblem& pde, const FdGrid& grid, const FdOptions& opts = {});

/// Solves a tridiagonal system in place (Thomas algorithm). lower[0] and
/// upper[n-1] are ignored. rhs receives the solution.
void solve_tridiagonal(const std::vector<double>& lower, const std::vector<double>& diag,
                       const std::vector<double>& upper, std::vector<double>& rhs, std::vector<double>& scratch);

/// Writes `t,s,value_normalized,value_dollars`, one row per node.
void write_surface_csv(const FdSolution& sol, double s_max, const std::filesystem::path& out);

}  // namespace jdpinn
