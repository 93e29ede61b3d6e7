#pragma once

#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "cpoly/coord.hpp"
#include "cpoly/walk.hpp"

namespace cpoly::green {

struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GreenValue {
  double value = 0.0;
  double error = 0.0;
  int grid = 0;  // nodes per axis of the final quadrature grid
};

// G(x) = sum_{k >= 1} P{S_k = x}, transient walks only (d in {3, 4}).
//
// Fourier form: G(x) + 1{x=0} = (2pi)^-d  int_box  cos(x.theta) / (1 - phi).
// The integrand has an integrable |theta|^-2 singularity at 0 which ruins
// plain midpoint convergence, so the local model
//     m(theta) = 2 cos(x.theta) exp(-beta <theta,Gamma theta>) / <theta,Gamma theta>
// is subtracted on the grid and its integral over all of R^d is added back
// in closed form (erf / incomplete-gamma). beta is chosen so m is
// negligible outside the box; the remainder is bounded and
// midpoint-converges like N^-3. Grids are refined until two successive
// sizes agree within tol/2.
GreenValue green(const WalkModel& model, const Coord& x, double tol);
std::vector<GreenValue> green_many(const WalkModel& model, const std::vector<Coord>& xs,
                                   double tol);

// G over the box |x|_inf <= radius. Axis-symmetric models use a separable
// cosine transform that computes the whole box in one grid sweep.
class GreensTable {
 public:
  GreensTable(const WalkModel& model, int radius, double tol);
  double gamma() const { return at_origin_.value; }
  double gamma_error() const { return at_origin_.error; }
  const GreenValue& at(const Coord& x) const;
  int radius() const { return radius_; }
  int dim() const { return d_; }

 private:
  int d_;
  int radius_;
  GreenValue at_origin_;
  std::unordered_map<Coord, GreenValue, CoordHash> values_;
};

// gamma = sum_{k=1}^{k_max} P{S_k = 0} by k-step convolution on a periodic
// box (evaluated through the characteristic function's geometric sum, which
// is the same convolution with wrap-around error below 1e-15), plus a
// two-term power tail a k^-3/2 + b k^-5/2 fitted to the last window.
// d = 3 only; this is the independent cross-check for the quadrature route.
struct SeriesGamma {
  double value = 0.0;
  double partial_sum = 0.0;
  double tail = 0.0;
  double fit_a = 0.0, fit_b = 0.0;
  int k_max = 0;
  int grid = 0;
};
SeriesGamma gamma_series(const WalkModel& model, int k_max = 2000);

// Large-|x| decay a_d <x, Gamma^-1 x>^{-(d-2)/2} of G, with
// a_d = Gamma(d/2 - 1) / (2 pi^{d/2} sqrt(det Gamma)).
double asymptotic_prefactor(const WalkModel& model);
double asymptotic_green(const WalkModel& model, const Coord& x);

// Mean of the squared-local-time integral of Brownian motion,
// 2 int_0^1 (1-u) (2 pi u)^{-1/2} du = 8 / (3 sqrt(2 pi)).
// The quadrature re-derivation below must match before this is trusted.
inline const double kMeanSquaredLocalTime = 8.0 / (3.0 * std::sqrt(2.0 * 3.14159265358979323846));
double mean_squared_local_time_by_quadrature();

// Every limit-law constant of the energy / self-intersection laws that the
// model determines, with error estimates where numerics are involved.
struct LimitConstants {
  int d = 0;
  double sigma2 = 0.0;
  double det_cov = 0.0;
  double clt_scale = 0.0;  // sd of the energy CLT limit
  double clt_var = 0.0;
  double gamma = 0.0, gamma_err = 0.0;            // d >= 3
  double var_q_scale = 0.0, var_q_scale_err = 0.0;  // Var(Q_n) slope: n log n (d=3) / n (d=4)
  double mean_q_scale = 0.0;  // E Q_n slope: n^{3/2} (d=1), n log n (d=2), n (d>=3)
  double sum_g_cubed = 0.0;   // d >= 4 only
  double lil_constant = 0.0;
  double lil_constant_alt = 0.0;  // d = 2 carries two typeset readings
  nlohmann::json to_json() const;
};
LimitConstants limit_constants(const WalkModel& model, double tol);

// Moderate-deviation rate value at lambda > 0 for the model's dimension.
double md_rate(const LimitConstants& c, double lambda);
double md_rate(const WalkModel& model, double lambda, double tol = 1e-5);

// deterministic pairwise summation helper (shared by the quadratures)
double pairwise_sum(const double* v, size_t n);

}  // namespace cpoly::green
