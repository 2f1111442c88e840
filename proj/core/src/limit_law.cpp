// Copyright 2026 The kpzlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kpz/limit_law.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kpz/errors.hpp"
#include "kpz/special_functions.hpp"

namespace kpz {

namespace {

// Ai vanishes in double precision long before the top of its supported range.
double ai(double x) { return x > kAiryMaxArgument ? 0.0 : airy_ai(x); }

// Log-envelope of Ai(u + shift) exp(rate u): the Airy decay is
// exp(-(2/3)(u + shift)^{3/2}) for positive arguments and O(1) otherwise.
double log_envelope(double u, double shift, double rate, double airy_factors = 1.0) {
  const double arg = std::max(u + shift, 0.0);
  return -airy_factors * 2.0 / 3.0 * arg * std::sqrt(arg) + rate * u;
}

// Upper limit beyond which Ai(u + shift)^factors exp(rate u) is 60 e-folds
// below its largest value on [lo, upper].
double tail_upper(double lo, double shift, double rate, double airy_factors = 1.0) {
  double u = lo;
  double peak = log_envelope(u, shift, rate, airy_factors);
  for (;;) {
    u += 0.5;
    const double e = log_envelope(u, shift, rate, airy_factors);
    peak = std::max(peak, e);
    const bool decreasing = airy_factors * std::sqrt(std::max(u + shift, 0.0)) > rate;
    if (decreasing && e < peak - 60.0) break;
    if (u + shift > kAiryMaxArgument - 1.0) break;
  }
  return u;
}

void check_block(const MultiPointSpec& spec, std::size_t i) {
  if (i < 1 || i > spec.m()) throw DomainError("block index outside [1, m]");
}

//---------------------------------------------------------------------------//
// Shared discretization
//---------------------------------------------------------------------------//

struct Grid {
  std::vector<QuadratureRule> rules;  // per interval
  QuadratureRule lambda;              // on [0, extent]
  std::vector<Eigen::MatrixXd> airy;  // airy[i](p, l) = Ai(x_p + tau_i^2 + lambda_l)
};

Grid make_grid(const MultiPointSpec& spec, const QuadratureConfig& quad) {
  quad.validate();
  Grid g;
  const std::size_t m = spec.m();
  double a_min = INFINITY;
  for (std::size_t k = 0; k < m; ++k) {
    const double s = spec.s(k);
    // Psi_k grows like exp(tau_k y) against the Airy decay of Phi_k, so for
    // tau_k > 0 the interval is stretched to the envelope's tail certificate.
    const double t = spec.tau(k);
    const double upper = t > 0.0 ? std::max(s + quad.truncation, tail_upper(s, t * t, t)) : s + quad.truncation;
    g.rules.push_back(gauss_legendre(quad.nodes, s, upper));
    a_min = std::min(a_min, s + spec.tau(k) * spec.tau(k));
  }
  // Two Airy factors against exp(lambda (tau_m - tau_1)).
  const double spread = spec.tau(m - 1) - spec.tau(0);
  const double extent = std::max(4.0, tail_upper(0.0, a_min, spread, 2.0));
  g.lambda = composite_by_width(quad.lambda_nodes, quad.lambda_panel, 0.0, extent);
  const auto L = static_cast<Eigen::Index>(g.lambda.size());
  const auto n = static_cast<Eigen::Index>(quad.nodes);
  for (std::size_t i = 0; i < m; ++i) {
    Eigen::MatrixXd A(n, L);
    const double t2 = spec.tau(i) * spec.tau(i);
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index l = 0; l < L; ++l)
        A(p, l) = ai(g.rules[i].nodes[static_cast<std::size_t>(p)] + t2 +
                     g.lambda.nodes[static_cast<std::size_t>(l)]);
    g.airy.push_back(std::move(A));
  }
  return g;
}

Eigen::MatrixXd build_kernel(const MultiPointSpec& spec, const Grid& g) {
  const std::size_t m = spec.m();
  const auto n = g.airy[0].rows();
  const auto L = g.airy[0].cols();
  Eigen::MatrixXd D(static_cast<Eigen::Index>(m) * n, static_cast<Eigen::Index>(m) * n);
  Eigen::VectorXd lw(L);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double ti = spec.tau(i);
      const double tj = spec.tau(j);
      for (Eigen::Index l = 0; l < L; ++l) {
        const double lam = g.lambda.nodes[static_cast<std::size_t>(l)];
        lw(l) = g.lambda.weights[static_cast<std::size_t>(l)] * std::exp(-lam * (tj - ti));
      }
      Eigen::MatrixXd block = g.airy[i] * lw.asDiagonal() * g.airy[j].transpose();
      if (ti > tj) {
        for (Eigen::Index p = 0; p < n; ++p)
          for (Eigen::Index q = 0; q < n; ++q)
            block(p, q) -= khat_gaussian(ti, tj, g.rules[i].nodes[static_cast<std::size_t>(p)],
                                         g.rules[j].nodes[static_cast<std::size_t>(q)]);
      }
      for (Eigen::Index p = 0; p < n; ++p) {
        const double sp = std::sqrt(g.rules[i].weights[static_cast<std::size_t>(p)]);
        for (Eigen::Index q = 0; q < n; ++q) {
          const double sq = std::sqrt(g.rules[j].weights[static_cast<std::size_t>(q)]);
          D(static_cast<Eigen::Index>(i) * n + p, static_cast<Eigen::Index>(j) * n + q) =
              sp * block(p, q) * sq;
        }
      }
    }
  }
  return D;
}

// Integral of Ai(u + tau^2) exp(rate u) over [a, inf) for every a in points.
std::vector<double> airy_exp_tails(double tau, double rate, const std::vector<double>& points) {
  const double lo = *std::min_element(points.begin(), points.end());
  const double hi = *std::max_element(points.begin(), points.end());
  const double t2 = tau * tau;
  const double upper = std::max(hi + 1.0, tail_upper(lo, t2, rate));
  return cumulative_upper_integrals(
      [&](double u) { return ai(u + t2) * std::exp(rate * u); }, points, upper);
}

Def11Terms tabulate_terms(const MultiPointSpec& spec, const Grid& g) {
  const std::size_t m = spec.m();
  const double t1 = spec.tau(0);
  const double s1 = spec.s(0);
  Def11Terms out;
  for (const auto& r : g.rules) {
    out.nodes.push_back(r.nodes);
    out.weights.push_back(r.weights);
  }

  // R = s1 + exp(-2/3 t1^3) int_{s1}^inf (u - s1) Ai(u + t1^2) exp(-t1 u) du
  {
    const double t2 = t1 * t1;
    const double upper = std::max(s1 + 1.0, tail_upper(s1, t2, -t1));
    const std::vector<double> at{s1};
    const auto r = cumulative_upper_integrals(
        [&](double u) { return (u - s1) * ai(u + t2) * std::exp(-t1 * u); }, at, upper);
    out.R = s1 + std::exp(-2.0 / 3.0 * t1 * t1 * t1) * r[0];
  }

  // C_1(s1 + lambda_l) feeds the first term of every Phi_i.
  std::vector<double> shifted(g.lambda.nodes);
  for (double& v : shifted) v += s1;
  const std::vector<double> c1_lambda = airy_exp_tails(t1, -t1, shifted);

  out.psi.resize(m);
  out.phi.resize(m);
  const auto L = static_cast<Eigen::Index>(g.lambda.size());
  for (std::size_t k = 0; k < m; ++k) {
    const double tk = spec.tau(k);
    const auto& x = g.rules[k].nodes;
    const std::size_t n = x.size();

    // Psi_k(y) = exp(tk y) (exp(2/3 tk^3) - C_k(y)), C_k(y) = int_y^inf Ai(u + tk^2) exp(-tk u) du
    const auto ck = airy_exp_tails(tk, -tk, x);
    out.psi[k].resize(n);
    for (std::size_t q = 0; q < n; ++q)
      out.psi[k][q] = std::exp(tk * x[q]) * (std::exp(2.0 / 3.0 * tk * tk * tk) - ck[q]);

    // Phi_k = T1 + T2 + T3.
    Eigen::VectorXd v(L);
    for (Eigen::Index l = 0; l < L; ++l) {
      const auto li = static_cast<std::size_t>(l);
      v(l) = g.lambda.weights[li] * std::exp(g.lambda.nodes[li] * tk) * c1_lambda[li];
    }
    const Eigen::VectorXd t1_term = std::exp(-2.0 / 3.0 * t1 * t1 * t1) * (g.airy[k] * v);
    const auto dk = airy_exp_tails(tk, tk, x);
    out.phi[k].resize(n);
    for (std::size_t p = 0; p < n; ++p) {
      double value = t1_term(static_cast<Eigen::Index>(p));
      if (k >= 1) {
        const double var = tk - t1;
        value += std::exp(-2.0 / 3.0 * tk * tk * tk - tk * x[p]) /
                 std::sqrt(4.0 * std::numbers::pi * var) * gaussian_tail_integral(s1 - x[p], var);
      }
      value -= std::exp(-tk * x[p]) * dk[p];
      out.phi[k][p] = value;
    }
  }
  return out;
}

struct Evaluation {
  double det = 0.0;
  double g = 0.0;
  double lambda_extent = 0.0;
};

}  // namespace

//---------------------------------------------------------------------------//
// Spec and config
//---------------------------------------------------------------------------//

MultiPointSpec::MultiPointSpec(std::vector<double> taus, std::vector<double> esses)
    : taus_(std::move(taus)), esses_(std::move(esses)) {
  if (taus_.size() != esses_.size()) throw ParameterError("MultiPointSpec: taus and s differ in length");
  if (taus_.empty() || taus_.size() > kMaxPoints) throw ParameterError("MultiPointSpec: m must lie in [1, 8]");
  for (std::size_t k = 0; k < taus_.size(); ++k) {
    if (!std::isfinite(taus_[k]) || !std::isfinite(esses_[k]))
      throw ParameterError("MultiPointSpec: non-finite entry");
    if (k > 0 && !(taus_[k] > taus_[k - 1]))
      throw ParameterError("MultiPointSpec: taus must be strictly increasing");
  }
}

MultiPointSpec MultiPointSpec::with_s(std::size_t k, double value) const {
  std::vector<double> e = esses_;
  e.at(k) = value;
  return MultiPointSpec(taus_, std::move(e));
}

void QuadratureConfig::validate() const {
  if (nodes < 16) throw ParameterError("quadrature: nodes must be at least 16");
  if (!(truncation >= 8.0)) throw ParameterError("quadrature: truncation must be at least 8");
  if (!(fd_step >= 1e-5 && fd_step <= 1e-2)) throw ParameterError("quadrature: fd_step outside [1e-5, 1e-2]");
  if (lambda_nodes < 4) throw ParameterError("quadrature: lambda_nodes must be at least 4");
  if (!(lambda_panel > 0.0)) throw ParameterError("quadrature: lambda_panel must be positive");
}

QuadratureConfig QuadratureConfig::refined() const {
  QuadratureConfig q = *this;
  q.nodes *= 2;
  q.truncation += 4.0;
  return q;
}

//---------------------------------------------------------------------------//
// Kernel
//---------------------------------------------------------------------------//

double khat_gaussian(double tau_i, double tau_j, double x, double y) {
  const double d = tau_i - tau_j;
  if (!(d > 0.0)) throw ParameterError("khat_gaussian: requires tau_i > tau_j");
  const double e = -(x - y) * (x - y) / (4.0 * d) +
                   2.0 / 3.0 * (tau_j * tau_j * tau_j - tau_i * tau_i * tau_i) + tau_j * y -
                   tau_i * x;
  return std::exp(e) / std::sqrt(4.0 * std::numbers::pi * d);
}

namespace {

double khat_positive_part(double ti, double tj, double x, double y) {
  const double xi = x + ti * ti;
  const double yj = y + tj * tj;
  const double delta = tj - ti;
  auto f = [&](double lam) { return ai(xi + lam) * ai(yj + lam) * std::exp(-lam * delta); };
  const double upper = tail_upper(0.0, std::min(xi, yj), -delta, 2.0);
  SemiInfiniteOptions opts;
  opts.abs_tol = 1e-15;
  // The certificate is superexponential; express the cut as an equivalent scale.
  const double scale = std::max(upper, 1.0) / std::log(1.0 / opts.tail_bound);
  return integrate_semiinfinite(f, 0.0, scale, opts);
}

}  // namespace

double khat(const MultiPointSpec& spec, std::size_t i, std::size_t j, double x, double y) {
  check_block(spec, i);
  check_block(spec, j);
  const double ti = spec.tau(i - 1);
  const double tj = spec.tau(j - 1);
  double value = khat_positive_part(ti, tj, x, y);
  if (ti > tj) value -= khat_gaussian(ti, tj, x, y);
  return value;
}

namespace {

// Integral over [lo, 0] by Gauss-Legendre panels, with a width-halving check.
double negative_half_line(const std::function<double(double)>& f, double lo) {
  const double coarse = composite_by_width(16, 0.5, lo, 0.0).integrate(f);
  const double fine = composite_by_width(16, 0.25, lo, 0.0).integrate(f);
  if (std::abs(fine - coarse) > 1e-12 * std::max(1.0, std::abs(fine)))
    throw AccuracyError("negative half-line quadrature did not converge", coarse, fine);
  return fine;
}

// Truncation for the exp(lambda d) weighted Airy product on (-inf, 0]; the
// Airy factors are bounded by 1/(pi sqrt|arg|) < 1 there.
double negative_cut(double d, double lowest_shift, double& tail_bound) {
  double cut = std::log(1e14 / (std::numbers::pi * d)) / d;
  const double floor_cut = lowest_shift - kAiryMinArgument;
  cut = std::min(cut, floor_cut);
  tail_bound = std::exp(-cut * d) / (std::numbers::pi * d);
  return cut;
}

}  // namespace

DualCheck khat_dual_check(const MultiPointSpec& spec, std::size_t i, std::size_t j, double x,
                          double y) {
  check_block(spec, i);
  check_block(spec, j);
  const double ti = spec.tau(i - 1);
  const double tj = spec.tau(j - 1);
  if (!(ti > tj)) throw ParameterError("khat_dual_check: requires tau_i > tau_j");
  const double xi = x + ti * ti;
  const double yj = y + tj * tj;
  DualCheck out;
  const double cut = negative_cut(ti - tj, std::min(xi, yj), out.tail_bound);
  out.lhs = -negative_half_line(
      [&](double lam) { return ai(xi + lam) * ai(yj + lam) * std::exp(-lam * (tj - ti)); }, -cut);
  out.rhs = khat_positive_part(ti, tj, x, y) - khat_gaussian(ti, tj, x, y);
  out.gap = std::abs(out.lhs - out.rhs);
  return out;
}

DualCheck airy_identity_f(double b1, double b2, double c1, double c2) {
  if (!(b2 < b1)) throw ParameterError("identity (F) requires b2 < b1");
  const double u = b1 * b1 + c1;
  const double v = b2 * b2 + c2;
  const double d = b1 - b2;
  auto f = [&](double lam) { return std::exp(-lam * (b2 - b1)) * ai(u + lam) * ai(v + lam); };
  DualCheck out;
  const double cut = negative_cut(d, std::min(u, v), out.tail_bound);
  const double upper = tail_upper(0.0, std::min(u, v), d, 2.0);
  SemiInfiniteOptions opts;
  const double scale = std::max(upper, 1.0) / std::log(1.0 / opts.tail_bound);
  out.lhs = negative_half_line(f, -cut) + integrate_semiinfinite(f, 0.0, scale, opts);
  out.rhs = std::exp(-(c2 - c1) * (c2 - c1) / (4.0 * d) + 2.0 / 3.0 * (b2 * b2 * b2 - b1 * b1 * b1) +
                     b2 * c2 - b1 * c1) /
            std::sqrt(4.0 * std::numbers::pi * d);
  out.gap = std::abs(out.lhs - out.rhs);
  return out;
}

//---------------------------------------------------------------------------//
// Definition terms
//---------------------------------------------------------------------------//

Def11Terms def11_terms(const MultiPointSpec& spec, const QuadratureConfig& quad) {
  return tabulate_terms(spec, make_grid(spec, quad));
}

namespace {

// Integral over [lo, inf) of an integrand with Airy decay in the variable.
double airy_tail(const std::function<double(double)>& f, double lo, double shift, double rate) {
  const double upper = tail_upper(lo, shift, rate);
  SemiInfiniteOptions opts;
  opts.abs_tol = 1e-16;
  const double scale = std::max(upper - lo, 1.0) / std::log(1.0 / opts.tail_bound);
  return integrate_semiinfinite(f, lo, scale, opts);
}

}  // namespace

double def11_R(const MultiPointSpec& spec) {
  const double t1 = spec.tau(0);
  const double s1 = spec.s(0);
  const double t2 = t1 * t1;
  auto inner = [&](double x) {
    return airy_tail([&](double y) { return ai(x + y + t2) * std::exp(-t1 * (x + y)); }, 0.0,
                     x + t2, -t1);
  };
  const double outer = airy_tail(inner, s1, t2, -t1);
  return s1 + std::exp(-2.0 / 3.0 * t1 * t1 * t1) * outer;
}

double def11_psi(const MultiPointSpec& spec, std::size_t j, double y) {
  check_block(spec, j);
  const double tj = spec.tau(j - 1);
  const double t2 = tj * tj;
  const double integral =
      airy_tail([&](double x) { return ai(x + y + t2) * std::exp(-tj * x); }, 0.0, y + t2, -tj);
  return std::exp(2.0 / 3.0 * tj * tj * tj + tj * y) - integral;
}

double def11_phi(const MultiPointSpec& spec, std::size_t i, double x) {
  check_block(spec, i);
  const double t1 = spec.tau(0);
  const double s1 = spec.s(0);
  const double ti = spec.tau(i - 1);
  // First term as the literal double integral over lambda >= 0 and y >= s1.
  auto over_y = [&](double lam) {
    return airy_tail(
        [&](double yy) {
          return std::exp(-lam * (t1 - ti)) * std::exp(-t1 * yy) * ai(x + ti * ti + lam) *
                 ai(yy + t1 * t1 + lam);
        },
        s1, t1 * t1 + lam, -t1);
  };
  const double first =
      std::exp(-2.0 / 3.0 * t1 * t1 * t1) *
      airy_tail(over_y, 0.0, std::min(x + ti * ti, s1 + t1 * t1), std::max(ti - t1, 0.0));
  double second = 0.0;
  if (i >= 2) {
    const double var = ti - t1;
    second = std::exp(-2.0 / 3.0 * ti * ti * ti - ti * x) / std::sqrt(4.0 * std::numbers::pi * var) *
             gaussian_tail_integral(s1 - x, var);
  }
  const double third = airy_tail([&](double y) { return ai(y + x + ti * ti) * std::exp(ti * y); },
                                 0.0, x + ti * ti, ti);
  return first + second - third;
}

//---------------------------------------------------------------------------//
// Nystrom system
//---------------------------------------------------------------------------//

struct NystromSystem::Impl {
  Eigen::MatrixXd D;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  double lambda_extent = 0.0;

  void factor() {
    lu.compute(Eigen::MatrixXd::Identity(D.rows(), D.cols()) - D);
  }
};

class NystromBuilder {
 public:
  static NystromSystem from_grid(const MultiPointSpec& spec, const Grid& g) {
    auto impl = std::make_unique<NystromSystem::Impl>();
    impl->D = build_kernel(spec, g);
    impl->lambda_extent = g.lambda.hi;
    impl->factor();
    return NystromSystem(std::move(impl));
  }
};

NystromSystem::NystromSystem(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}

NystromSystem::NystromSystem(const MultiPointSpec& spec, const QuadratureConfig& quad)
    : NystromSystem(NystromBuilder::from_grid(spec, make_grid(spec, quad))) {}

NystromSystem::~NystromSystem() = default;
NystromSystem::NystromSystem(NystromSystem&&) noexcept = default;
NystromSystem& NystromSystem::operator=(NystromSystem&&) noexcept = default;

std::size_t NystromSystem::size() const noexcept { return static_cast<std::size_t>(impl_->D.rows()); }

double NystromSystem::entry(std::size_t row, std::size_t col) const {
  return impl_->D(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
}

double NystromSystem::determinant() const { return impl_->lu.determinant(); }

std::vector<double> NystromSystem::solve(const std::vector<double>& rhs) const {
  const Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  const Eigen::VectorXd x = impl_->lu.solve(b);
  return {x.data(), x.data() + x.size()};
}

std::vector<double> NystromSystem::apply(const std::vector<double>& v) const {
  const Eigen::Map<const Eigen::VectorXd> b(v.data(), static_cast<Eigen::Index>(v.size()));
  const Eigen::VectorXd x = impl_->D * b;
  return {x.data(), x.data() + x.size()};
}

double NystromSystem::lambda_extent() const noexcept { return impl_->lambda_extent; }

bool NystromSystem::all_finite() const { return impl_->D.allFinite(); }

void NystromSystem::negate_kernel() {
  impl_->D = -impl_->D;
  impl_->factor();
}

double fredholm_det(const MultiPointSpec& spec, const QuadratureConfig& quad) {
  const NystromSystem sys(spec, quad);
  const GuardReport guard = invertibility_guard(sys);
  if (!guard.ok) throw InvertibilityError(guard.diagnostics);
  return guard.det;
}

GuardReport invertibility_guard(const NystromSystem& system) {
  GuardReport r;
  r.det = system.determinant();
  std::ostringstream os;
  os.precision(17);
  if (!system.all_finite()) {
    r.ok = false;
    os << "kernel matrix has non-finite entries";
  } else if (!(r.det > 0.0)) {
    r.ok = false;
    os << "det(I - D) = " << r.det << " is not positive";
  } else if (r.det > 1.0 + 1e-8) {
    r.ok = false;
    os << "det(I - D) = " << r.det << " exceeds 1";
  }
  r.diagnostics = os.str();
  return r;
}

GuardReport invertibility_guard(const MultiPointSpec& spec, const QuadratureConfig& quad) {
  return invertibility_guard(NystromSystem(spec, quad));
}

namespace {

Evaluation evaluate(const MultiPointSpec& spec, const QuadratureConfig& quad) {
  const Grid g = make_grid(spec, quad);
  const NystromSystem sys = NystromBuilder::from_grid(spec, g);
  const GuardReport guard = invertibility_guard(sys);
  if (!guard.ok) throw InvertibilityError(guard.diagnostics);
  const Def11Terms terms = tabulate_terms(spec, g);

  std::vector<double> psi_t;
  std::vector<double> phi_t;
  double identity_part = 0.0;
  for (std::size_t k = 0; k < spec.m(); ++k) {
    for (std::size_t p = 0; p < terms.nodes[k].size(); ++p) {
      const double w = terms.weights[k][p];
      identity_part += w * terms.psi[k][p] * terms.phi[k][p];
      psi_t.push_back(std::sqrt(w) * terms.psi[k][p]);
      phi_t.push_back(std::sqrt(w) * terms.phi[k][p]);
    }
  }
  const std::vector<double> z = sys.solve(sys.apply(phi_t));
  double resolvent_part = 0.0;
  for (std::size_t r = 0; r < z.size(); ++r) resolvent_part += psi_t[r] * z[r];

  Evaluation e;
  e.det = guard.det;
  e.g = terms.R - identity_part - resolvent_part;
  e.lambda_extent = g.lambda.hi;
  return e;
}

}  // namespace

double g_m(const MultiPointSpec& spec, const QuadratureConfig& quad) { return evaluate(spec, quad).g; }

double limit_potential(const MultiPointSpec& spec, const QuadratureConfig& quad) {
  const Evaluation e = evaluate(spec, quad);
  return e.g * e.det;
}

LimitLawResult limit_cdf(const MultiPointSpec& spec, const QuadratureConfig& quad) {
  quad.validate();
  const Evaluation base = evaluate(spec, quad);
  LimitLawResult out;
  out.det = base.det;
  out.g = base.g;
  out.nodes = quad.nodes;
  out.truncation = quad.truncation;
  out.lambda_extent = base.lambda_extent;
  const double h = quad.fd_step;
  double coarse_total = 0.0;
  for (std::size_t k = 0; k < spec.m(); ++k) {
    auto at = [&](double ds) { return limit_potential(spec.with_s(k, spec.s(k) + ds), quad); };
    const double d_h = (at(h) - at(-h)) / (2.0 * h);
    const double d_h2 = (at(h / 2) - at(-h / 2)) / h;
    out.partials.push_back((4.0 * d_h2 - d_h) / 3.0);
    out.richardson.push_back(std::abs(d_h - d_h2));
    out.cdf += out.partials.back();
    coarse_total += d_h;
  }
  if (out.cdf < -1e-3 || out.cdf > 1.0 + 1e-3)
    throw AccuracyError("limit_cdf: F left [-1e-3, 1 + 1e-3]", coarse_total, out.cdf);
  return out;
}

}  // namespace kpz
