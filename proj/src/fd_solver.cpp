#include "jdpinn/fd_solver.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "jdpinn/error.hpp"
#include "jdpinn/neural.hpp"

namespace jdpinn {

void FdGrid::validate() const {
    if (n_s < 3) throw UsageError("FD grid needs n_s >= 3");
    if (n_t < 1) throw UsageError("FD grid needs n_t >= 1");
}

double FdSolution::value_at(double t, double s) const {
    if (!(t >= 0.0 && t <= 1.0 && s >= 0.0 && s <= 1.0)) throw UsageError("FD lookup outside [0, 1]^2");
    const double x = s * grid.n_s;
    const double y = t * grid.n_t;
    const int i = std::min(static_cast<int>(x), grid.n_s - 1);
    const int j = std::min(static_cast<int>(y), grid.n_t - 1);
    const double fx = x - i, fy = y - j;
    const double lo = (1.0 - fx) * (*this)(j, i) + fx * (*this)(j, i + 1);
    if (fy == 0.0) return lo;
    const double hi = (1.0 - fx) * (*this)(j + 1, i) + fx * (*this)(j + 1, i + 1);
    return (1.0 - fy) * lo + fy * hi;
}

void solve_tridiagonal(const std::vector<double>& lower, const std::vector<double>& diag,
                       const std::vector<double>& upper, std::vector<double>& rhs, std::vector<double>& scratch) {
    const std::size_t n = diag.size();
    scratch.resize(n);
    double denom = diag[0];
    scratch[0] = upper[0] / denom;
    rhs[0] /= denom;
    for (std::size_t i = 1; i < n; ++i) {
        denom = diag[i] - lower[i] * scratch[i - 1];
        scratch[i] = upper[i] / denom;
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / denom;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= scratch[i] * rhs[i + 1];
}

namespace {

/// One theta-scheme step of length h (in transformed time) from `cur` to
/// `next`, coefficients frozen at transformed time t_mid.
class Stepper {
public:
    Stepper(const PdeProblem& pde, int n_s) : pde_(pde), n_(n_s) {
        const std::size_t m = static_cast<std::size_t>(n_s - 1);
        lower_.resize(m);
        diag_.resize(m);
        upper_.resize(m);
        rhs_.resize(m);
        l_.resize(m);
        d_.resize(m);
        u_.resize(m);
        src_.resize(m);
    }

    void step(const double* cur, double* next, double h, double t_mid, double theta) {
        const double tc = pde_.maturity * (1.0 - t_mid);
        const double sig2 = pde_.sigma_star_sq(tc);
        const double eta = pde_.eta(tc);
        const double r = pde_.rate;
        const double ds = 1.0 / n_;
        const double scale = h * pde_.maturity;  // (1/T) V_t = L V  =>  dV = T h L V
        const double top = pde_.upper_boundary();

        for (int i = 1; i < n_; ++i) {
            const std::size_t k = static_cast<std::size_t>(i - 1);
            const double s = i * ds;
            const double a = 0.5 * sig2 * s * s / (ds * ds);
            const double b = 0.5 * eta * s / ds;
            l_[k] = a - b;
            d_[k] = -2.0 * a - r;
            u_[k] = a + b;
            src_[k] = pde_.beta(tc, s);
        }

        const double ex = (1.0 - theta) * scale;
        const double im = theta * scale;
        for (int i = 1; i < n_; ++i) {
            const std::size_t k = static_cast<std::size_t>(i - 1);
            rhs_[k] = cur[i] + ex * (l_[k] * cur[i - 1] + d_[k] * cur[i] + u_[k] * cur[i + 1]) - scale * src_[k];
            lower_[k] = -im * l_[k];
            diag_[k] = 1.0 - im * d_[k];
            upper_[k] = -im * u_[k];
        }
        // Dirichlet data: V(t, 0) = 0 and V(t, 1) = 1 - kappa at the new level.
        rhs_.back() += im * u_.back() * top;

        solve_tridiagonal(lower_, diag_, upper_, rhs_, scratch_);
        next[0] = 0.0;
        for (int i = 1; i < n_; ++i) next[i] = rhs_[static_cast<std::size_t>(i - 1)];
        next[n_] = top;
    }

private:
    const PdeProblem& pde_;
    int n_;
    std::vector<double> lower_, diag_, upper_, rhs_, scratch_;
    std::vector<double> l_, d_, u_, src_;
};

}  // namespace

FdSolution solve_crank_nicolson(const PdeProblem& pde, const FdGrid& grid, const FdOptions& opts) {
    grid.validate();
    if (!(pde.maturity > 0.0)) throw UsageError("maturity must be positive");
    FdSolution sol;
    sol.grid = grid;
    const int ns = grid.n_s, nt = grid.n_t;
    sol.values.assign(static_cast<std::size_t>(nt + 1) * (ns + 1), 0.0);

    for (int i = 0; i <= ns; ++i) sol(0, i) = pde.payoff(static_cast<double>(i) / ns);
    sol(0, ns) = pde.upper_boundary();

    Stepper stepper(pde, ns);
    std::vector<double> tmp(static_cast<std::size_t>(ns + 1));
    const double h = 1.0 / nt;
    for (int j = 0; j < nt; ++j) {
        const double* cur = &sol(j, 0);
        double* next = &sol(j + 1, 0);
        const double t0 = j * h;
        if (opts.rannacher && j < 2) {
            stepper.step(cur, tmp.data(), 0.5 * h, t0 + 0.25 * h, 1.0);
            stepper.step(tmp.data(), next, 0.5 * h, t0 + 0.75 * h, 1.0);
        } else {
            stepper.step(cur, next, h, t0 + 0.5 * h, 0.5);
        }
        for (int i = 0; i <= ns; ++i)
            if (!std::isfinite(next[i]))
                throw NumericalError("finite-difference solution became non-finite at time step " +
                                     std::to_string(j + 1));
    }
    return sol;
}

void write_surface_csv(const FdSolution& sol, double s_max, const std::filesystem::path& out) {
    std::ofstream os(out);
    if (!os) throw DataError("cannot write '" + out.string() + "'");
    os << "t,s,value_normalized,value_dollars\n";
    for (int j = 0; j <= sol.grid.n_t; ++j) {
        const double t = static_cast<double>(j) / sol.grid.n_t;
        for (int i = 0; i <= sol.grid.n_s; ++i) {
            const double s = static_cast<double>(i) / sol.grid.n_s;
            const double v = sol(j, i);
            os << format_double(t) << ',' << format_double(s) << ',' << format_double(v) << ','
               << format_double(v * s_max) << '\n';
        }
    }
}

}  // namespace jdpinn
