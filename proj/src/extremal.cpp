#include "popre/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "popre/config.hpp"
#include "popre/lp.hpp"

namespace popre {

namespace {
constexpr double kPi = std::numbers::pi;
}

void DeltaVector::validate(double tol) const {
  if (c.empty()) throw std::invalid_argument("empty delta vector");
  if (std::abs(sum()) > tol) throw std::invalid_argument("delta vector entries must sum to 0");
  if (l1() > 2.0 + tol) throw std::invalid_argument("delta vector l1 norm exceeds 2");
}

double DeltaVector::l1() const {
  double s = 0.0;
  for (double v : c) s += std::abs(v);
  return s;
}

double DeltaVector::sum() const {
  double s = 0.0;
  for (double v : c) s += v;
  return s;
}

DeltaVector random_delta_vector(int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("delta vector needs n >= 1");
  std::vector<double> c(static_cast<std::size_t>(n) + 1);
  for (double& v : c) v = rng.normal();
  double mean = 0.0;
  for (double v : c) mean += v;
  mean /= static_cast<double>(c.size());
  for (double& v : c) v -= mean;
  // Exact zero sum: dump the numerical residue on the last coordinate.
  double resid = 0.0;
  for (std::size_t i = 0; i + 1 < c.size(); ++i) resid += c[i];
  c.back() = -resid;
  double l1 = 0.0;
  for (double v : c) l1 += std::abs(v);
  const double target = 0.2 + 1.8 * rng.next_double();  // l1 in (0.2, 2]
  if (l1 > 0.0)
    for (double& v : c) v *= target / l1;
  return DeltaVector{std::move(c)};
}

RegionSpec RegionSpec::arc(double theta_lo, double theta_hi) {
  if (!(theta_lo <= theta_hi) || theta_lo < -kPi - 1e-12 || theta_hi > kPi + 1e-12)
    throw std::invalid_argument("arc range must be an ordered subrange of (-pi, pi]");
  return {Kind::Arc, theta_lo, theta_hi};
}

RegionSpec RegionSpec::segment(double x_lo, double x_hi) {
  if (!(x_lo <= x_hi)) throw std::invalid_argument("segment endpoints out of order");
  return {Kind::Segment, x_lo, x_hi};
}

RegionSpec RegionSpec::circle_disk(double center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("circle radius must be positive");
  return {Kind::CircleDisk, center, radius};
}

RegionSpec RegionSpec::ellipse_b(double a, double r) {
  if (!(a > 0.0) || !(r > 0.0)) throw std::invalid_argument("ellipse parameters must be positive");
  return {Kind::EllipseB, a, r};
}

std::complex<double> RegionSpec::point_at(double t) const {
  switch (kind) {
    case Kind::UnitCircle:
      return std::polar(1.0, t);
    case Kind::Arc:
      return std::polar(1.0, t);
    case Kind::Segment:
      return {p1 + t * (p2 - p1), 0.0};
    case Kind::CircleDisk:
      return p1 + p2 * std::polar(1.0, t);
    case Kind::EllipseB: {
      const std::complex<double> z = p2 * std::polar(1.0, t);
      return (1.0 - 8.0 * p1) + 4.0 * p1 * (z + 1.0 / z);
    }
  }
  return {};
}

double RegionSpec::param_lo() const {
  switch (kind) {
    case Kind::Arc: return p1;
    case Kind::Segment: return 0.0;
    default: return -kPi;
  }
}

double RegionSpec::param_hi() const {
  switch (kind) {
    case Kind::Arc: return p2;
    case Kind::Segment: return 1.0;
    default: return kPi;
  }
}

double RegionSpec::max_speed() const {
  switch (kind) {
    case Kind::UnitCircle:
    case Kind::Arc: return 1.0;
    case Kind::Segment: return p2 - p1;
    case Kind::CircleDisk: return p2;
    case Kind::EllipseB: return 4.0 * p1 * (p2 + 1.0 / p2);
  }
  return 0.0;
}

double RegionSpec::max_modulus() const {
  switch (kind) {
    case Kind::UnitCircle:
    case Kind::Arc: return 1.0;
    case Kind::Segment: return std::max(std::abs(p1), std::abs(p2));
    case Kind::CircleDisk: return std::abs(p1) + p2;
    case Kind::EllipseB: return std::abs(1.0 - 8.0 * p1) + 4.0 * p1 * (p2 + 1.0 / p2);
  }
  return 0.0;
}

std::complex<double> eval_poly(std::span<const double> coeffs, std::complex<double> v) {
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * v + coeffs[i];
  return acc;
}

namespace {

int effective_degree(std::span<const double> coeffs) {
  int d = static_cast<int>(coeffs.size()) - 1;
  while (d > 0 && coeffs[static_cast<std::size_t>(d)] == 0.0) --d;
  return d;
}

}  // namespace

SupResult sup_on_region(std::span<const double> coeffs, const RegionSpec& region) {
  if (coeffs.empty()) throw std::invalid_argument("empty coefficient vector");
  const int degree = effective_degree(coeffs);
  const double lo = region.param_lo(), hi = region.param_hi();
  const int grid = std::max(4096, 64 * degree);
  const double step = (hi - lo) / grid;

  SupResult best;
  best.value = -1.0;
  for (int k = 0; k <= grid; ++k) {
    const double t = lo + step * k;
    const double m = std::abs(eval_poly(coeffs, region.point_at(t)));
    if (m > best.value) {
      best.value = m;
      best.param = t;
    }
  }

  // Golden-section refinement of |Q(gamma(t))| around the grid maximizer.
  if (step > 0.0) {
    const double gr = 0.6180339887498949;
    double a = std::max(lo, best.param - step), b = std::min(hi, best.param + step);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = std::abs(eval_poly(coeffs, region.point_at(x1)));
    double f2 = std::abs(eval_poly(coeffs, region.point_at(x2)));
    for (int it = 0; it < 80; ++it) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (b - a);
        f2 = std::abs(eval_poly(coeffs, region.point_at(x2)));
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - gr * (b - a);
        f1 = std::abs(eval_poly(coeffs, region.point_at(x1)));
      }
    }
    const double xm = (a + b) / 2.0;
    const double fm = std::abs(eval_poly(coeffs, region.point_at(xm)));
    if (fm > best.value) {
      best.value = fm;
      best.param = xm;
    }
  }
  best.point = region.point_at(best.param);

  // Error certificate: |Q'| <= sum_i i |c_i| R^{i-1} on |v| <= R, times the
  // parameter speed and half the grid spacing.
  const double r_max = region.max_modulus();
  double dq = 0.0, rpow = 1.0;
  for (int i = 1; i <= degree; ++i) {
    dq += i * std::abs(coeffs[static_cast<std::size_t>(i)]) * rpow;
    rpow *= r_max;
  }
  best.error_bound = dq * region.max_speed() * step / 2.0;
  return best;
}

std::vector<double> noise_transform_coeffs(std::span<const double> c, const ChannelMatrix& a) {
  const int d = a.dim();
  if (static_cast<int>(c.size()) != d) throw std::invalid_argument("certificate dimension mismatch");
  std::vector<double> out(static_cast<std::size_t>(d), 0.0);
  for (int i = 0; i < d; ++i) {
    const double ci = c[static_cast<std::size_t>(i)];
    if (ci == 0.0) continue;
    const auto row = a.row(i);
    for (int j = 0; j < d; ++j) out[static_cast<std::size_t>(j)] += ci * row[static_cast<std::size_t>(j)];
  }
  return out;
}

SupResult noise_circle_sup(std::span<const double> c, const NoiseModel& model, int n) {
  const ChannelMatrix a = build_channel_matrix(model, n);
  const std::vector<double> coeffs = noise_transform_coeffs(c, a);
  return sup_on_region(coeffs, RegionSpec::unit_circle());
}

double mobius_factor_squared_cos(double nu, double theta) {
  const double ct = std::cos(theta);
  return 2.0 * nu * nu / ((1.0 - ct) + (1.0 + ct) * nu * nu);
}

double mobius_factor_squared_sin(double nu, double theta) {
  const double s = std::sin(theta / 2.0);
  return 1.0 / (1.0 + (1.0 - nu * nu) * s * s / (nu * nu));
}

NoisePolyEval eval_noise_poly(std::span<const double> c, const NoiseModel& model, int n, double theta) {
  if (static_cast<int>(c.size()) != n + 1) throw std::invalid_argument("certificate dimension mismatch");
  if (!(theta > -kPi - 1e-12 && theta <= kPi + 1e-12))
    throw std::invalid_argument("theta must lie in (-pi, pi]");
  NoisePolyEval out;
  const std::complex<double> z = std::polar(1.0, theta);
  const double nu = model.nu;
  if (model.kind == NoiseKind::Erasure) {
    const std::complex<double> u = (1.0 - nu) + nu * z;
    out.direct = eval_poly(c, u);
    out.factored = out.direct;
    out.w = u;
    out.modulus = std::abs(out.direct);
    return out;
  }
  const std::complex<double> alpha = (1.0 - nu) / 2.0 + (1.0 + nu) / 2.0 * z;
  const std::complex<double> beta = (1.0 + nu) / 2.0 + (1.0 - nu) / 2.0 * z;
  // Direct product form: sum c_i alpha^i beta^{n-i}.
  {
    std::vector<std::complex<double>> apow(static_cast<std::size_t>(n) + 1), bpow(static_cast<std::size_t>(n) + 1);
    apow[0] = bpow[0] = 1.0;
    for (int i = 1; i <= n; ++i) {
      apow[static_cast<std::size_t>(i)] = apow[static_cast<std::size_t>(i - 1)] * alpha;
      bpow[static_cast<std::size_t>(i)] = bpow[static_cast<std::size_t>(i - 1)] * beta;
    }
    std::complex<double> acc{0.0, 0.0};
    for (int i = 0; i <= n; ++i)
      acc += c[static_cast<std::size_t>(i)] * apow[static_cast<std::size_t>(i)] * bpow[static_cast<std::size_t>(n - i)];
    out.direct = acc;
  }
  // Factored form: (nu / ((1+nu)/2 - (1-nu)/2 w))^n Q_c(w), w the Mobius image.
  const std::complex<double> w = alpha / beta;
  const std::complex<double> factor = nu / ((1.0 + nu) / 2.0 - (1.0 - nu) / 2.0 * w);
  out.factored = std::pow(factor, n) * eval_poly(c, w);
  out.w = w;
  out.modulus = std::abs(out.direct);
  return out;
}

namespace {

double certificate_norm(std::span<const double> c, const ChannelMatrix& a) {
  double norm = 0.0;
  for (double v : noise_transform_coeffs(c, a)) norm += std::abs(v);
  return norm;
}

}  // namespace

EtaReport eta_exact(const NoiseModel& model, int n, double eps) {
  if (n < 1 || n > max_dimension()) throw std::invalid_argument("eta_exact: n out of range");
  if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("eta_exact: eps must lie in (0, 1/2)");
  const ChannelMatrix a = build_channel_matrix(model, n);

  // Optima far below the solver's absolute feasibility tolerance need the
  // |cA| rows rescaled; iterate the scale from the certificate's own norm.
  double row_scale = 1.0;
  std::vector<double> cert;
  double eta = 0.0;
  for (int round = 0; round < 3; ++round) {
    const lp::LpProblem problem = lp::build_eta_lp_scaled(a, eps, row_scale);
    const lp::LpSolution sol = lp::solve_lp(problem);
    if (sol.status != lp::LpStatus::Optimal)
      throw std::runtime_error("eta LP did not solve to optimality");
    cert = lp::eta_certificate(sol, n);
    eta = certificate_norm(cert, a);
    if (eta * row_scale >= 1e-3 || eta <= 0.0) break;
    row_scale = std::min(0.01 / eta, 1e9);
  }

  EtaReport report{model, n, eps, eta, DeltaVector{std::move(cert)}, 0.0, 0.0};
  const SupResult sup = noise_circle_sup(report.certificate.c, model, n);
  report.circle_sup = sup.value;
  report.circle_sup_error = sup.error_bound;

  // Circle-norm sandwich sup <= ||cA||_1 <= sqrt(n+1) sup, with the
  // grid-error certificate folded in.
  const double rel = 1e-6;
  const double up = std::sqrt(static_cast<double>(n) + 1.0) * (sup.value + sup.error_bound);
  if (sup.value > report.eta * (1.0 + rel) + 1e-12 || report.eta > up * (1.0 + rel) + 1e-12)
    throw std::runtime_error("eta_exact: circle-norm sandwich violated (numerical trouble)");
  return report;
}

namespace {

// Coefficients of (1-z)^T.
std::vector<double> one_minus_z_pow(int t) {
  std::vector<double> b(static_cast<std::size_t>(t) + 1, 0.0);
  b[0] = 1.0;
  for (int k = 0; k < t; ++k)
    for (int j = k + 1; j >= 1; --j) b[static_cast<std::size_t>(j)] -= b[static_cast<std::size_t>(j - 1)];
  // The loop above multiplies by (1 - z) in place each round.
  return b;
}

}  // namespace

RepeatedRootPoly construct_repeated_root_poly(int m, int t) {
  if (m < 0 || t < 0 || t > m) throw std::invalid_argument("need 0 <= T <= M");
  const int gk = m - t;  // degree of the cofactor g
  const std::vector<double> bin = one_minus_z_pow(t);

  // Variables: g+ (gk+1), g- (gk+1), s_j >= |a_j| (m+1).
  const int gv = gk + 1;
  lp::LpProblem p = lp::LpProblem::with_variables(2 * gv + (m + 1));
  p.objective[0] = -1.0;                    // maximize g(0) = a_0
  p.objective[static_cast<std::size_t>(gv)] = 1.0;

  std::vector<double> row(static_cast<std::size_t>(p.num_vars()), 0.0);
  for (int j = 0; j <= m; ++j) {
    // a_j = sum_k bin_{j-k} g_k; |a_j| <= s_j as two inequalities.
    row.assign(row.size(), 0.0);
    for (int k = std::max(0, j - t); k <= std::min(j, gk); ++k) {
      const double b = bin[static_cast<std::size_t>(j - k)];
      row[static_cast<std::size_t>(k)] += b;
      row[static_cast<std::size_t>(gv + k)] -= b;
    }
    row[static_cast<std::size_t>(2 * gv + j)] = -1.0;
    p.add_row(row, lp::Relation::LessEqual, 0.0);
    row[static_cast<std::size_t>(2 * gv + j)] = 1.0;
    p.add_row(row, lp::Relation::GreaterEqual, 0.0);
  }
  row.assign(row.size(), 0.0);
  for (int j = 0; j <= m; ++j) row[static_cast<std::size_t>(2 * gv + j)] = 1.0;
  p.add_row(row, lp::Relation::LessEqual, 2.0);

  const lp::LpSolution sol = lp::solve_lp(p);
  if (sol.status != lp::LpStatus::Optimal)
    throw std::runtime_error("repeated-root LP did not solve to optimality");

  std::vector<double> g(static_cast<std::size_t>(gv));
  for (int k = 0; k < gv; ++k)
    g[static_cast<std::size_t>(k)] = sol.x[static_cast<std::size_t>(k)] - sol.x[static_cast<std::size_t>(gv + k)];
  // Convolution with (1-z)^T makes the roots at 1 structural. The cofactor's
  // coefficients can be large with heavy cancellation, so accumulate in quad
  // precision before rounding the result to double.
  std::vector<__float128> acc(static_cast<std::size_t>(m) + 1, 0);
  for (int k = 0; k <= gk; ++k)
    for (int j = 0; j <= t; ++j)
      acc[static_cast<std::size_t>(k + j)] +=
          static_cast<__float128>(g[static_cast<std::size_t>(k)]) * static_cast<__float128>(bin[static_cast<std::size_t>(j)]);
  std::vector<double> a(static_cast<std::size_t>(m) + 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = static_cast<double>(acc[i]);
  if (a[0] < 0.0)
    for (double& v : a) v = -v;

  RepeatedRootPoly poly{std::move(a), m, t, std::abs(g[0])};
  double l1 = 0.0;
  for (double v : poly.coeffs) l1 += std::abs(v);
  poly.certified = 0;
  for (int k = 0; k < t; ++k) {
    if (std::abs(taylor_coeff_at_one(poly.coeffs, k)) > 1e-7 * l1) break;
    poly.certified = k + 1;
  }
  return poly;
}

double taylor_coeff_at_one(std::span<const double> coeffs, int k) {
  std::vector<double> b(coeffs.begin(), coeffs.end());
  double rem = 0.0;
  for (int pass = 0; pass <= k; ++pass) {
    // Synthetic division by (z - 1): the quotient lands in b[0..d-1] and the
    // remainder equals the value at 1.
    double carry = 0.0;
    for (std::size_t j = b.size(); j-- > 0;) {
      const double tmp = b[j] + carry;
      b[j] = carry;
      carry = tmp;
    }
    rem = carry;
    if (!b.empty()) b.pop_back();
  }
  return rem;
}

double erdelyi_t_bound(int m, double level) {
  if (!(level > 0.0 && level < 1.0 / 17.0)) throw std::invalid_argument("Erdelyi lemma needs L in (0, 1/17)");
  return std::min((2.0 / 7.0) * std::sqrt(m * std::log(1.0 / level)), static_cast<double>(m));
}

RootBoundsRecord verify_root_bounds(const RepeatedRootPoly& poly, int k) {
  if (k < 0 || k > poly.certified)
    throw std::invalid_argument("k exceeds the certified root multiplicity");
  const int m = poly.m;
  double max_abs = 0.0;
  for (double v : poly.coeffs) max_abs = std::max(max_abs, std::abs(v));
  if (max_abs == 0.0) throw std::invalid_argument("zero polynomial");

  RootBoundsRecord rec;
  rec.k = k;
  const double factor = std::pow(std::numbers::e / 9.0, k);

  {
    // Segment bound hypothesis |a_j| <= 1: scale so max |a_j| = 1.
    rec.segment_scale = 1.0 / max_abs;
    std::vector<double> scaled(poly.coeffs);
    for (double& v : scaled) v *= rec.segment_scale;
    const double x_lo = 1.0 - static_cast<double>(k) / (9.0 * std::max(1, m));
    const SupResult s = sup_on_region(scaled, RegionSpec::segment(x_lo, 1.0));
    rec.segment = BoundCheck{"segment-bek", s.value, s.error_bound, (m + 1) * factor, 0.0, false};
  }
  {
    // Arc bound hypothesis |a_j| <= 9: scale so max |a_j| = 9.
    rec.arc_scale = 9.0 / max_abs;
    std::vector<double> scaled(poly.coeffs);
    for (double& v : scaled) v *= rec.arc_scale;
    const double half = static_cast<double>(k) / (9.0 * std::max(1, m));
    const SupResult s = sup_on_region(scaled, RegionSpec::arc(-half, half));
    rec.arc = BoundCheck{"arc-be", s.value, s.error_bound, 9.0 * (m + 1) * factor, 0.0, false};
  }
  rec.segment.bound = (m + 1) * factor;
  rec.segment.slack = rec.segment.bound - rec.segment.measured - rec.segment.measured_error;
  rec.segment.pass = rec.segment.slack >= 0.0;
  rec.arc.slack = rec.arc.bound - rec.arc.measured - rec.arc.measured_error;
  rec.arc.pass = rec.arc.slack >= 0.0;
  return rec;
}

ThreeCircleRecord three_circle_check(std::span<const double> coeffs, double a) {
  if (!(a > 0.0)) throw std::invalid_argument("three-circle check needs a > 0");
  ThreeCircleRecord rec;
  rec.a = a;
  const SupResult sd = sup_on_region(coeffs, RegionSpec::circle_disk(1.0 - 4.0 * a, 4.0 * a));
  const SupResult s1 = sup_on_region(coeffs, RegionSpec::ellipse_b(a, 1.0));
  const SupResult s2 = sup_on_region(coeffs, RegionSpec::ellipse_b(a, 2.0));
  const SupResult s4 = sup_on_region(coeffs, RegionSpec::ellipse_b(a, 4.0));
  rec.sup_disk = sd.value;
  rec.err_disk = sd.error_bound;
  rec.sup_b1 = s1.value;
  rec.err_b1 = s1.error_bound;
  rec.sup_b2 = s2.value;
  rec.err_b2 = s2.error_bound;
  rec.sup_b4 = s4.value;
  rec.err_b4 = s4.error_bound;

  rec.hadamard.name = "three-circle";
  rec.hadamard.measured = sd.value;
  rec.hadamard.measured_error = sd.error_bound;
  rec.hadamard.bound = std::sqrt((s1.value + s1.error_bound) * (s4.value + s4.error_bound));
  rec.hadamard.slack = rec.hadamard.bound - sd.value;
  rec.hadamard.pass = rec.hadamard.slack >= 0.0;

  // The corollary's hypothesis is L(Q) <= 2; coefficients straight from an
  // LP can overshoot by its feasibility tolerance, so check the rescaled
  // polynomial (both sides transform consistently).
  double l1 = 0.0;
  for (double v : coeffs) l1 += std::abs(v);
  const double scale = l1 > 2.0 ? 2.0 / l1 : 1.0;
  rec.corollary.name = "three-circle-corollary";
  rec.corollary.measured = scale * sd.value;
  rec.corollary.measured_error = scale * sd.error_bound;
  const int degree = static_cast<int>(coeffs.size()) - 1;
  // Compare in log space; exp(9an) overflows for large a*n.
  const double log_bound =
      0.5 * std::log(scale * (s1.value + s1.error_bound)) + std::log(2.0) + 4.5 * a * degree;
  rec.corollary.bound = log_bound < 700.0 ? std::exp(log_bound) : std::numeric_limits<double>::infinity();
  rec.corollary.pass =
      rec.corollary.measured <= 0.0 || std::log(rec.corollary.measured) <= log_bound;
  rec.corollary.slack = rec.corollary.bound - rec.corollary.measured;
  return rec;
}

BoundCheck three_lines_lower_bound(std::span<const double> c, double eps, double nu) {
  if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("eps must lie in (0, 1/2)");
  if (!(nu > 0.0 && nu <= 1.0)) throw std::invalid_argument("nu must lie in (0, 1]");
  if (std::abs(c[0]) < 2.0 * eps - 1e-12)
    throw std::invalid_argument("three-lines bound needs |c_0| >= 2 eps");
  const SupResult s = sup_on_region(c, RegionSpec::circle_disk(1.0 - nu, nu));
  BoundCheck check;
  check.name = "three-lines";
  check.measured = s.value;
  check.measured_error = s.error_bound;
  check.bound = nu < 0.5 ? 2.0 * std::pow(eps, (1.0 - nu) / nu) : 2.0 * eps;
  check.slack = s.value + s.error_bound - check.bound;
  check.pass = check.slack >= 0.0;
  return check;
}

TheoryBounds theory_bounds(const NoiseModel& model, int n, double eps) {
  if (n < 1) throw std::invalid_argument("theory_bounds: n must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("theory_bounds: eps must lie in (0,1)");
  TheoryBounds tb;
  tb.model = model.kind;
  tb.nu = model.nu;
  tb.n = n;
  tb.eps = eps;
  const double nu = model.nu;
  const double le = std::log(1.0 / eps);
  const double l2e = std::log(2.0 / eps);

  tb.exponent_bitflip_lo = std::cbrt(static_cast<double>(n)) * std::pow(le, 2.0 / 3.0) / std::pow(nu, 2.0 / 3.0);
  tb.exponent_bitflip_hi = std::cbrt(static_cast<double>(n)) * std::pow(le, 2.0 / 3.0) * std::cbrt(1.0 - nu);
  tb.exponent_erasure = le / nu;

  const double win = 2.0 * l2e / n;
  tb.bitflip_window_ok = win <= nu && nu <= 1.0 - win;
  tb.bitflip_upper_ok = std::pow(win, 0.25) <= nu && nu <= 1.0 - win;
  tb.erasure_lower_ok = std::sqrt(16.0 * le / n) <= nu && nu <= 1.0 / 160.0;
  tb.erasure_upper_ok = nu <= 0.1 && le / (nu * nu) <= n;
  tb.hypothesis_ok = model.kind == NoiseKind::BitFlip ? tb.bitflip_window_ok
                                                      : (tb.erasure_lower_ok || tb.erasure_upper_ok);

  // Floors carry a relative epsilon so exactly-integral values of the
  // formulas do not round down (e.g. ln(1/eps)/nu^2 = 100 in doubles is
  // 99.9999...).
  const auto guarded_floor = [](double v) { return std::floor(v * (1.0 + 1e-12) + 1e-12); };
  const double om = 1.0 - nu * nu;
  if (om > 0.0) {
    tb.m_bitflip = static_cast<int>(guarded_floor(std::pow(n, 2.0 / 3.0) * std::cbrt(le) *
                                                  std::pow(om, 2.0 / 3.0) / std::pow(nu, 4.0 / 3.0)));
    if (tb.m_bitflip >= 1 && 2.0 * eps < 1.0) {
      tb.t_bitflip = (2.0 / 7.0) * std::sqrt(tb.m_bitflip * std::log(1.0 / (2.0 * eps)));
      tb.theta_star_bitflip = 2.0 * tb.t_bitflip / (9.0 * tb.m_bitflip);
    }
    tb.theta_star_bitflip_lower =
        0.1 * std::pow(nu, 2.0 / 3.0) * std::cbrt(le) / std::cbrt(n * om);
  }
  tb.m_erasure = static_cast<int>(guarded_floor(le / (nu * nu)));
  tb.t_erasure = (2.0 / 7.0) * le / nu;
  tb.theta_erasure = (2.0 / 63.0) * nu;
  return tb;
}

}  // namespace popre
