#pragma once
#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fracgreen/quadrature.hpp"
#include "fracgreen/specfun.hpp"

namespace fracgreen {

using Point = std::vector<double>;

// Density of the spectral measure on a uniform grid of the circle, angles
// theta_j = 2 pi j / n; trapezoidal weights 2 pi / n.
class SpectralMeasure {
public:
    explicit SpectralMeasure(std::vector<double> density);
    // Uniform density scaled so that w_mu == 1 for the given alpha.
    static SpectralMeasure normalized_uniform(double alpha, int n = 256);

    int size() const { return static_cast<int>(density_.size()); }
    double angle(int j) const;
    double weight() const;
    const std::vector<double>& density() const { return density_; }
    // w_mu(theta) = int |cos(theta - s)|^alpha mu(ds), on the grid angles
    std::vector<double> w_on_grid(double alpha) const;

private:
    std::vector<double> density_;
};

struct Coefficient {
    std::string name;  // built-in name or source file, for provenance
    std::function<double(double)> f;
    static Coefficient constant(double v);
};

enum class KernelFamily { constant_diffusion, isotropic_stable, anisotropic_stable_2d, variable_diffusion_1d };
const char* to_string(KernelFamily f);

struct Fd1dOptions {
    double h = 0.005;        // grid spacing
    double dt = 1e-3;        // time step for direct evaluation
    double tail_log = 27.7;  // boundary placed where the Gaussian tail is e^{-tail_log} (~1e-12)
    int rannacher_steps = 4;
    // base times below parametrix_cells * h^2 / a_min use the frozen-coefficient
    // Gaussian instead of the grid solution
    double parametrix_cells = 400.0;
};

class Fd1dSolver;

class KernelSpec {
public:
    static KernelSpec constant_diffusion(const Eigen::MatrixXd& A);
    static KernelSpec gaussian(int d);
    static KernelSpec isotropic_stable(int d, double alpha);
    static KernelSpec anisotropic_stable_2d(double alpha, const SpectralMeasure& mu);
    static KernelSpec variable_diffusion_1d(Coefficient a, Coefficient b, Coefficient c, double horizon,
                                            const Fd1dOptions& opt = {});

    KernelFamily family() const { return family_; }
    int dim() const { return d_; }
    double alpha() const { return alpha_; }
    const Eigen::MatrixXd& matrix() const { return A_; }
    const Eigen::MatrixXd& matrix_inverse() const { return Ainv_; }
    double log_det() const { return log_det_; }
    double ellipticity() const { return mu_; }  // smallest mu >= 1 with mu^-1 <= eig(A) <= mu
    const SpectralMeasure& spectral_measure() const { return *measure_; }
    const std::vector<double>& w_grid() const { return w_grid_; }
    const Fd1dSolver& fd1d() const { return *fd1d_; }
    double horizon() const;
    // symmetric in (x, y) by construction
    bool symmetric() const;
    int max_derivative() const;

private:
    KernelFamily family_ = KernelFamily::constant_diffusion;
    int d_ = 1;
    double alpha_ = 2.0;
    Eigen::MatrixXd A_, Ainv_;
    double log_det_ = 0.0, mu_ = 1.0;
    std::shared_ptr<const SpectralMeasure> measure_;
    std::vector<double> w_grid_;
    std::shared_ptr<const Fd1dSolver> fd1d_;
};

// --- Gaussian ---------------------------------------------------------------
double gaussian_kernel(const KernelSpec& spec, double t, const Point& x, const Point& y);
// d^k/dx_1^k of the kernel, k in {0,1,2}, in log form
LogValue gaussian_kernel_log(const KernelSpec& spec, double t, const Point& x, const Point& y, int k = 0);

// --- isotropic stable -------------------------------------------------------
// g_d(rho): the kernel at t = 1 as a function of distance; d may exceed the
// spatial dimension (derivatives use g_{d+2}, g_{d+4}).
double stable_radial_profile(int d, double alpha, double rho);
double log_stable_radial_profile(int d, double alpha, double rho, double log_rho);
LogValue stable_kernel_isotropic_log(const KernelSpec& spec, double t, const Point& x, const Point& y, int k);
double stable_kernel_isotropic(const KernelSpec& spec, double t, double r);
// d^k/dx_1^k G(t, x, y), k in {0,1,2}
double stable_kernel_isotropic_deriv(const KernelSpec& spec, double t, const Point& x, const Point& y, int k);

// --- anisotropic stable, d = 2 ----------------------------------------------
double stable_kernel_anisotropic(const KernelSpec& spec, double t, const Point& x);
// h(s) = int_0^inf k exp(-k^alpha) cos(k s) dk
double aniso_inner(double alpha, double s);

// --- 1-D variable coefficients ----------------------------------------------
// Crank-Nicolson (with Rannacher start) for u_t = a u'' + b u' + c u on
// [-L, L] with zero boundary values; the initial datum is a discrete unit
// mass at y.
class Fd1dSolver {
public:
    Fd1dSolver(Coefficient a, Coefficient b, Coefficient c, double horizon, const Fd1dOptions& opt);

    double horizon() const { return T_; }
    double half_width() const { return L_; }
    double spacing() const { return h_; }
    int nodes() const { return n_; }
    double a_max() const { return a_max_; }
    double a_min() const { return a_min_; }
    const Coefficient& a() const { return a_; }
    const Coefficient& b() const { return b_; }
    const Coefficient& c() const { return c_; }
    const Fd1dOptions& options() const { return opt_; }
    double node(int i) const { return -L_ + h_ * i; }

    // Solution at time t (<= horizon) on the whole grid.
    std::vector<double> solve(double t, double y) const;
    // Solutions at increasing times; the step sequence hits every time.
    std::vector<std::vector<double>> solve_at(const std::vector<double>& times, double y) const;
    // Visits the solution at each of the increasing times. Steps are at most
    // max(dt, step_fraction * current time).
    void march(const std::vector<double>& times, double y,
               const std::function<void(std::size_t, const std::vector<double>&)>& visit,
               double step_fraction = 0.0) const;
    // Value (k = 0) or x-derivative (k = 1, 2) at x from a grid solution.
    double sample(const std::vector<double>& u, double x, int k = 0) const;
    double mass(const std::vector<double>& u) const;

private:
    struct Scratch {
        std::vector<double> rhs, cp;
    };
    void step(std::vector<double>& u, double dt, bool implicit_euler, Scratch& w) const;
    void step_cached(std::vector<double>& u, Scratch& w) const;

    Coefficient a_, b_, c_;
    double T_, L_, h_;
    int n_;  // interior + boundary nodes
    double a_max_ = 0.0, a_min_ = 0.0;
    Fd1dOptions opt_;
    std::vector<double> lo_, di_, up_;  // operator A (interior rows)
    // factorization of I - dt/2 A for the default step
    std::vector<double> fac_c_, fac_m_;
};

double fd1d_kernel(const KernelSpec& spec, double t, double x, double y);

// Value or k-th x_1 derivative of any constant-coefficient family, or fd1d.
double kernel_value(const KernelSpec& spec, double t, const Point& x, const Point& y, int k = 0);
LogValue kernel_log_value(const KernelSpec& spec, double t, const Point& x, const Point& y, int k = 0);

}  // namespace fracgreen
