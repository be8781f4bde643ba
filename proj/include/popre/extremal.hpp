#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "popre/channel.hpp"
#include "popre/rng.hpp"

namespace popre {

// A signed vector in Delta = {c : sum c_i = 0, sum |c_i| <= 2}; doubles as
// the coefficients of the polynomial Q_c(v) = sum c_i v^i.
struct DeltaVector {
  std::vector<double> c;

  int n() const { return static_cast<int>(c.size()) - 1; }
  void validate(double tol = 1e-9) const;
  double l1() const;
  double sum() const;
};

DeltaVector random_delta_vector(int n, Rng& rng);

// Regions of the complex plane used by the circle arguments.
// EllipseB(a, r) is the Joukowski-type set {(1-8a) + 4a(z + 1/z) : |z| = r}.
struct RegionSpec {
  enum class Kind { UnitCircle, Arc, Segment, CircleDisk, EllipseB };
  Kind kind = Kind::UnitCircle;
  double p1 = 0.0, p2 = 0.0;

  static RegionSpec unit_circle() { return {Kind::UnitCircle, 0.0, 0.0}; }
  static RegionSpec arc(double theta_lo, double theta_hi);
  static RegionSpec segment(double x_lo, double x_hi);
  static RegionSpec circle_disk(double center, double radius);
  static RegionSpec ellipse_b(double a, double r);

  std::complex<double> point_at(double t) const;
  double param_lo() const;
  double param_hi() const;
  double max_speed() const;   // sup |gamma'(t)|
  double max_modulus() const; // sup |gamma(t)|
};

struct SupResult {
  double value = 0.0;        // measured supremum (a lower bound on the true one)
  double error_bound = 0.0;  // true sup <= value + error_bound
  double param = 0.0;
  std::complex<double> point;
};

std::complex<double> eval_poly(std::span<const double> coeffs, std::complex<double> v);

// Supremum of |Q| over the region: uniform grid of max(4096, 64*degree)
// points plus golden-section refinement, with a derivative-based error bound.
SupResult sup_on_region(std::span<const double> coeffs, const RegionSpec& region);

// Coefficients of z -> sum_j (cA)_j z^j, the circle transform of c under the
// channel (F_c for bit-flip, E_c for erasure).
std::vector<double> noise_transform_coeffs(std::span<const double> c, const ChannelMatrix& a);
SupResult noise_circle_sup(std::span<const double> c, const NoiseModel& model, int n);

// Both closed forms of the squared modulus of the Mobius prefactor of the
// bit-flip circle transform, nu / ((1+nu)/2 - (1-nu)/2 e^{i theta}).
double mobius_factor_squared_cos(double nu, double theta);
double mobius_factor_squared_sin(double nu, double theta);

struct NoisePolyEval {
  std::complex<double> direct;    // product-form evaluation
  std::complex<double> factored;  // factor^n * Q_c(w) via the Mobius image
  double modulus = 0.0;
  std::complex<double> w;  // Mobius image of e^{i theta} (bit-flip) / u (erasure)
};

// Evaluates the noise transform at z = e^{i theta} by two independent routes
// (bit-flip); for erasure both routes are Q_c((1-nu) + nu z).
NoisePolyEval eval_noise_poly(std::span<const double> c, const NoiseModel& model, int n, double theta);

struct EtaReport {
  NoiseModel model;
  int n = 0;
  double eps = 0.0;
  double eta = 0.0;
  DeltaVector certificate;
  double circle_sup = 0.0;
  double circle_sup_error = 0.0;
};

// Exact eta(eps, nu) for the given model and dimension, via LP.
EtaReport eta_exact(const NoiseModel& model, int n, double eps);

// Real polynomial of degree M with T repeated roots at 1 maximizing |a_0|
// subject to sum |a_j| <= 2 (LP over the cofactor of (1-z)^T). The roots are
// structural; `certified` is how many of them the double-precision
// coefficients certify via |p^{(k)}(1)| <= 1e-7 k! L(p). High (M, T) pairs
// cannot certify every root: rounding alone perturbs the k-th Taylor
// coefficient at 1 by ~1e-16 C(M,k) L(p).
struct RepeatedRootPoly {
  std::vector<double> coeffs;
  int m = 0;
  int t = 0;
  double a0_level = 0.0;
  int certified = 0;
};

RepeatedRootPoly construct_repeated_root_poly(int m, int t);

// Taylor coefficient p^{(k)}(1)/k! by repeated synthetic division (stable).
double taylor_coeff_at_one(std::span<const double> coeffs, int k);

// Largest T for which Erdelyi's lemma guarantees |a_0| >= L * sum_{j>=1}|a_j|.
double erdelyi_t_bound(int m, double level);

struct BoundCheck {
  std::string name;
  double measured = 0.0;
  double measured_error = 0.0;
  double bound = 0.0;
  double slack = 0.0;  // bound - measured (upper checks) or measured - bound (lower checks)
  bool pass = false;
};

struct RootBoundsRecord {
  BoundCheck segment;  // (M+1)(e/9)^k bound on [1-k/(9M), 1], coefficients scaled to max 1
  BoundCheck arc;      // 9(M+1)(e/9)^k bound on the arc of length 2k/(9M), max 9
  double segment_scale = 1.0;
  double arc_scale = 1.0;
  int k = 0;
};

RootBoundsRecord verify_root_bounds(const RepeatedRootPoly& poly, int k);

struct ThreeCircleRecord {
  double sup_disk = 0.0, sup_b1 = 0.0, sup_b2 = 0.0, sup_b4 = 0.0;
  double err_disk = 0.0, err_b1 = 0.0, err_b2 = 0.0, err_b4 = 0.0;
  BoundCheck hadamard;    // sup_disk <= sqrt(sup_b1 * sup_b4)
  BoundCheck corollary;   // sup_disk <= sqrt(sup_b1) * 2 sqrt(exp(9 a n)), needs L(Q) <= 2
  double a = 0.0;
};

ThreeCircleRecord three_circle_check(std::span<const double> coeffs, double a);

// Three-lines lower bound: sup over the boundary of D_nu(1-nu) of |Q_c| is
// at least 2 eps^{(1-nu)/nu} for nu < 1/2 (and 2 eps for nu >= 1/2), for
// c in Delta with |c_0| >= 2 eps.
BoundCheck three_lines_lower_bound(std::span<const double> c, double eps, double nu);

struct TheoryBounds {
  NoiseKind model = NoiseKind::BitFlip;
  double nu = 0.0;
  int n = 0;
  double eps = 0.0;
  // Unit-constant exponents from the headline bounds.
  double exponent_bitflip_lo = 0.0;  // n^{1/3} ln^{2/3}(1/eps) / nu^{2/3}
  double exponent_bitflip_hi = 0.0;  // n^{1/3} ln^{2/3}(1/eps) (1-nu)^{1/3}
  double exponent_erasure = 0.0;     // ln(1/eps) / nu
  // Hypothesis windows.
  bool bitflip_window_ok = false;  // 2 ln(2/eps)/n <= nu <= 1 - 2 ln(2/eps)/n
  bool bitflip_upper_ok = false;   // (2 ln(2/eps)/n)^{1/4} <= nu <= 1 - 2 ln(2/eps)/n
  bool erasure_lower_ok = false;   // sqrt(16 ln(1/eps)/n) <= nu <= 1/160
  bool erasure_upper_ok = false;   // nu <= 1/10 and ln(1/eps)/nu^2 <= n
  bool hypothesis_ok = false;      // the window relevant to `model`
  // Construction parameters.
  int m_bitflip = 0;
  double t_bitflip = 0.0;
  double theta_star_bitflip = 0.0;        // 2T/(9M)
  double theta_star_bitflip_lower = 0.0;  // (1/10) nu^{2/3} ln^{1/3}(1/eps) / (n(1-nu^2))^{1/3}
  int m_erasure = 0;
  double t_erasure = 0.0;
  double theta_erasure = 0.0;  // (2/63) nu
};

TheoryBounds theory_bounds(const NoiseModel& model, int n, double eps);

}  // namespace popre
