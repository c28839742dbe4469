#include "mgritsl/stepping.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <optional>
#include <limits>
#include <functional>
#include <sstream>
#include <utility>

#include "mgritsl/errors.hpp"

namespace mgritsl {

namespace detail {

struct StepperImpl {
  StepperImpl(CirculantOperator op, ApplyMode mode, double step_cfl, std::string label)
      : op(std::move(op)), mode(mode), step_cfl(step_cfl), label(std::move(label)) {}
  virtual ~StepperImpl() = default;

  virtual void step(std::span<const double> in, std::span<double> out) const {
    op.apply(in, out);
  }
  virtual Complex symbol(double omega) const = 0;
  virtual Complex log_symbol(double omega) const { return std::log(symbol(omega)); }

  CirculantOperator op;
  ApplyMode mode;
  double step_cfl;
  std::string label;
  bool above_cfl_limit = false;
};

}  // namespace detail

namespace {

using detail::StepperImpl;

std::string format_cfl(double c) {
  std::ostringstream os;
  os.precision(6);
  os << c;
  return os.str();
}

int canonical_offset(long long offset, int nx) {
  long long c = offset % nx;
  if (c < 0) c += nx;
  if (c > nx / 2) c -= nx;
  return static_cast<int>(c);
}

void check_length(std::span<const double> in, std::span<double> out, int nx) {
  if (in.size() != static_cast<std::size_t>(nx) || out.size() != static_cast<std::size_t>(nx)) {
    throw DimensionError("stepper on " + std::to_string(nx) + " points got vectors of length " +
                         std::to_string(in.size()) + " and " + std::to_string(out.size()));
  }
}

// Polynomial R(z) = sum_j beta_j z^j of an explicit method, evaluated at
// z = -c L by Horner's rule on stencils.
CirculantOperator erk_polynomial(const ButcherTableau& tab, const CirculantOperator& L, double c) {
  const auto beta = taylor_coefficients(tab, tab.stages);
  const auto z = scale(L, -c);
  auto acc = scale(CirculantOperator::identity(L.nx()), beta.back());
  for (int j = tab.stages - 1; j >= 1; --j) {
    acc = add(compose(acc, z), scale(CirculantOperator::identity(L.nx()), beta[j - 1]));
  }
  return add(CirculantOperator::identity(L.nx()), compose(acc, z));
}

struct MolImpl final : StepperImpl {
  MolImpl(CirculantOperator op, ApplyMode mode, double cfl, std::string label, ButcherTableau tab,
          CirculantOperator L)
      : StepperImpl(std::move(op), mode, cfl, std::move(label)),
        tab(std::move(tab)),
        L(std::move(L)) {
    if (this->tab.kind == TableauKind::sdirk) {
      const double a = this->tab.diagonal();
      stage_inverse.emplace(
          add(CirculantOperator::identity(this->L.nx()), scale(this->L, a * step_cfl)));
    }
  }

  Complex symbol(double omega) const override {
    return stability_function(tab, -step_cfl * L.symbol(omega));
  }

  Complex log_symbol(double omega) const override {
    return log1p_complex(stability_function_increment(tab, -step_cfl * L.symbol_increment(omega)));
  }

  void step(std::span<const double> in, std::span<double> out) const override {
    if (mode == ApplyMode::assembled) {
      op.apply(in, out);
      return;
    }
    // Stage sweep for u' = -(c / dt) L u in units of dt: K_i = -c L Y_i with
    // Y_i = u + sum_j a_ij K_j.
    const int s = tab.stages;
    const auto n = in.size();
    std::vector<Vector> K(static_cast<std::size_t>(s), Vector(n));
    Vector Y(n), rhs(n);
    for (int i = 0; i < s; ++i) {
      std::copy(in.begin(), in.end(), rhs.begin());
      for (int j = 0; j < i; ++j) {
        const double a = tab.coeff(i, j);
        if (a == 0.0) continue;
        for (std::size_t k = 0; k < n; ++k) rhs[k] += a * K[j][k];
      }
      if (stage_inverse) {
        stage_inverse->solve(rhs, Y);
      } else {
        Y.swap(rhs);
      }
      L.apply(Y, K[i]);
      for (auto& v : K[i]) v *= -step_cfl;
    }
    std::copy(in.begin(), in.end(), out.begin());
    for (int i = 0; i < s; ++i) {
      for (std::size_t k = 0; k < n; ++k) out[k] += tab.b[i] * K[i][k];
    }
  }

  ButcherTableau tab;
  CirculantOperator L;
  std::optional<CirculantInverse> stage_inverse;
};

// Stencil offsets before periodic wrapping; needed for the symbol off the
// mesh frequencies.
struct RawStencil {
  std::vector<StencilEntry> entries;

  Complex symbol(double omega) const {
    Complex s = 0.0;
    for (const auto& e : entries) s += e.weight * std::polar(1.0, e.offset * omega);
    return s;
  }

  Complex log_symbol(double omega) const {
    Complex s = 0.0;
    double total = 0.0;
    for (const auto& e : entries) {
      s += e.weight * expi_minus_one(e.offset * omega);
      total += e.weight;
    }
    return log1p_complex(s + (total - 1.0));
  }

  CirculantOperator wrapped(int nx) const {
    std::map<int, double> merged;
    for (const auto& e : entries) merged[canonical_offset(e.offset, nx)] += e.weight;
    std::vector<StencilEntry> st;
    for (const auto& [o, w] : merged) st.push_back({o, w});
    return {nx, std::move(st)};
  }
};

RawStencil sl_raw_stencil(int p, double step_cfl) {
  const auto g = sl_geometry(p, step_cfl);
  RawStencil raw;
  if (g.eps == 0.0) {
    raw.entries.push_back({g.shift, 1.0});
    return raw;
  }
  const auto w = lagrange_weights(g.window, g.eps);
  const auto offsets = g.window.offsets();
  for (std::size_t j = 0; j < offsets.size(); ++j) raw.entries.push_back({g.shift + offsets[j], w[j]});
  return raw;
}

struct SlImpl final : StepperImpl {
  SlImpl(RawStencil raw, int nx, double cfl, std::string label)
      : StepperImpl(raw.wrapped(nx), ApplyMode::assembled, cfl, std::move(label)),
        raw(std::move(raw)) {}

  Complex symbol(double omega) const override { return raw.symbol(omega); }
  Complex log_symbol(double omega) const override { return raw.log_symbol(omega); }

  RawStencil raw;
};

struct ModifiedImpl final : StepperImpl {
  ModifiedImpl(CirculantOperator assembled, double cfl, std::string label, RawStencil sl_raw,
               CirculantOperator sl, CirculantOperator D, double phi, CorrectionSolver solver)
      : StepperImpl(std::move(assembled), ApplyMode::staged, cfl, std::move(label)),
        sl_raw(std::move(sl_raw)),
        sl(std::move(sl)),
        D(std::move(D)),
        phi(phi),
        solver(solver),
        K(add(CirculantOperator::identity(this->D.nx()), scale(this->D, -phi))) {
    if (solver.kind == CorrectionSolver::Kind::direct) K_inverse.emplace(K);
  }

  Complex symbol(double omega) const override {
    return sl_raw.symbol(omega) / (1.0 - phi * D.symbol(omega));
  }

  Complex log_symbol(double omega) const override {
    return sl_raw.log_symbol(omega) - log1p_complex(-phi * D.symbol_increment(omega));
  }

  void step(std::span<const double> in, std::span<double> out) const override {
    Vector mid(in.size());
    sl.apply(in, mid);
    if (K_inverse) {
      K_inverse->solve(mid, out);
      return;
    }
    const auto result = solve_gmres(K, mid, solver.rel_tol, solver.max_iters);
    std::copy(result.x.begin(), result.x.end(), out.begin());
  }

  RawStencil sl_raw;
  CirculantOperator sl;
  CirculantOperator D;
  double phi;
  CorrectionSolver solver;
  CirculantOperator K;
  std::optional<CirculantInverse> K_inverse;
};

struct PowerImpl final : StepperImpl {
  PowerImpl(Stepper base, int m)
      : StepperImpl(power(base.assembled(), m), ApplyMode::assembled, base.step_cfl() * m,
                    base.label() + "^" + std::to_string(m)),
        base(std::move(base)),
        m(m) {}

  Complex symbol(double omega) const override { return std::pow(base.symbol(omega), m); }
  Complex log_symbol(double omega) const override {
    return static_cast<double>(m) * base.log_symbol(omega);
  }

  Stepper base;
  int m;
};

double cached_cfl_limit(int p, const ButcherTableau& tab) {
  static std::mutex mutex;
  static std::map<std::pair<int, std::string>, double> cache;
  const auto key = std::make_pair(p, tab.name);
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const double c = cfl_limit(p, tab);
  std::lock_guard lock(mutex);
  cache.emplace(key, c);
  return c;
}

double rms(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s / static_cast<double>(v.size()));
}

std::vector<double> mesh(int nx) {
  std::vector<double> x(static_cast<std::size_t>(nx));
  const double h = DiscretizationSpec::kDomainLength / nx;
  for (int i = 0; i < nx; ++i) x[i] = -1.0 + i * h;
  return x;
}

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::erk:
      return "erk";
    case Family::sdirk:
      return "sdirk";
    case Family::semi_lagrangian:
      return "semi_lagrangian";
  }
  return "?";
}

ButcherTableau tableau_for(const DiscretizationSpec& spec) {
  switch (spec.family) {
    case Family::erk:
      return erk_tableau(spec.q);
    case Family::sdirk:
      return sdirk_tableau(spec.q);
    case Family::semi_lagrangian:
      break;
  }
  throw InputError("semi-Lagrangian discretizations have no Butcher tableau");
}

Stepper::Stepper(std::shared_ptr<const detail::StepperImpl> impl) : impl_(std::move(impl)) {}

int Stepper::nx() const { return impl_->op.nx(); }

void Stepper::step(std::span<const double> in, std::span<double> out) const {
  check_length(in, out, nx());
  impl_->step(in, out);
}

Vector Stepper::step(std::span<const double> in) const {
  Vector out(in.size());
  step(in, out);
  return out;
}

Complex Stepper::symbol(double omega) const { return impl_->symbol(omega); }
Complex Stepper::log_symbol(double omega) const { return impl_->log_symbol(omega); }
const CirculantOperator& Stepper::assembled() const { return impl_->op; }
ApplyMode Stepper::mode() const { return impl_->mode; }
double Stepper::step_cfl() const { return impl_->step_cfl; }
bool Stepper::above_cfl_limit() const { return impl_->above_cfl_limit; }
const std::string& Stepper::label() const { return impl_->label; }

Stepper mol_stepper(const DiscretizationSpec& spec, const ButcherTableau& tab, ApplyMode mode) {
  if (spec.family == Family::semi_lagrangian ||
      (spec.family == Family::erk) != (tab.kind == TableauKind::explicit_rk)) {
    throw InputError("discretization family " + to_string(spec.family) +
                     " does not match tableau " + tab.name);
  }
  if (!(spec.cfl > 0.0)) throw InputError("CFL number must be positive");
  auto L = upwind_derivative(spec.p, spec.nx);
  const double c = spec.cfl;
  std::optional<CirculantOperator> op;
  if (tab.kind == TableauKind::explicit_rk) {
    op = erk_polynomial(tab, L, c);
  } else {
    const auto sigma = L.eigenvalues();
    std::vector<Complex> lambda(sigma.size());
    for (std::size_t k = 0; k < sigma.size(); ++k) lambda[k] = stability_function(tab, -c * sigma[k]);
    op = CirculantOperator::from_eigenvalues(lambda);
  }
  const std::string label = tab.name + "+U" + std::to_string(spec.p) + " c=" + format_cfl(c);
  auto impl = std::make_shared<MolImpl>(std::move(*op), mode, c, label, tab, std::move(L));
  if (tab.kind == TableauKind::explicit_rk) {
    impl->above_cfl_limit = c > cached_cfl_limit(spec.p, tab) + 1e-9;
  }
  return Stepper(std::move(impl));
}

Stepper fine_stepper(const DiscretizationSpec& spec, ApplyMode mode) {
  if (spec.family == Family::semi_lagrangian) return sl_stepper(spec.p, spec.cfl, spec.nx);
  return mol_stepper(spec, tableau_for(spec), mode);
}

SlGeometry sl_geometry(int p, double step_cfl) {
  if (p < 1) throw InputError("semi-Lagrangian order must be positive");
  if (!(step_cfl > 0.0)) throw InputError("semi-Lagrangian step needs a positive CFL number");
  SlGeometry g;
  const double nearest = std::round(step_cfl);
  if (std::abs(step_cfl - nearest) <= 1e-12 * std::max(1.0, step_cfl)) {
    g.shift = -static_cast<int>(nearest);
    g.eps = 0.0;
  } else {
    const double fl = std::floor(step_cfl);
    g.shift = -static_cast<int>(fl);
    g.eps = step_cfl - fl;
  }
  if (p % 2 == 1) {
    g.window = {(p + 1) / 2, (p - 1) / 2};
  } else if (g.eps > 0.5) {
    g.window = {p / 2 + 1, p / 2 - 1};
  } else {
    g.window = {p / 2, p / 2};
  }
  return g;
}

Stepper sl_stepper(int p, double step_cfl, int nx) {
  auto raw = sl_raw_stencil(p, step_cfl);
  const auto g = sl_geometry(p, step_cfl);
  if (nx < g.window.size() || nx <= 2 * std::max(g.window.left, g.window.right)) {
    throw InputError("mesh of " + std::to_string(nx) + " points is too small for order-" +
                     std::to_string(p) + " interpolation");
  }
  return Stepper(std::make_shared<SlImpl>(std::move(raw), nx, step_cfl,
                                          "SL" + std::to_string(p) + " c=" + format_cfl(step_cfl)));
}

double cfl_limit(int p, const ButcherTableau& tab, double growth_tol) {
  if (tab.kind != TableauKind::explicit_rk) {
    throw InputError(tab.name + ": CFL limits are defined for explicit methods");
  }
  constexpr int kSamples = 4096;
  const auto window = upwind_window(p);
  const auto weights = fd_weights(1, window.offsets(), 0.0);
  std::vector<Complex> sigma(kSamples);
  for (int k = 0; k < kSamples; ++k) {
    const double omega = -std::numbers::pi + 2.0 * std::numbers::pi * k / kSamples;
    Complex s = 0.0;
    for (int j = 0; j < window.size(); ++j) s += weights[j] * std::polar(1.0, (j - window.left) * omega);
    sigma[k] = s;
  }
  const auto stable = [&](double c) {
    for (const auto& s : sigma) {
      if (std::abs(stability_function(tab, -c * s)) > 1.0 + growth_tol) return false;
    }
    return true;
  };
  double lo = 0.0;
  double hi = 0.125;
  while (stable(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1024.0) return std::numeric_limits<double>::infinity();
  }
  while (hi - lo > 1e-7) {
    const double mid = 0.5 * (lo + hi);
    (stable(mid) ? lo : hi) = mid;
  }
  return lo;
}

double phi_coefficient(int p, double c, std::span<const int> factors, double e_fd, double e_rk) {
  if (factors.empty()) throw InputError("phi_coefficient needs level >= 1");
  const double sign = p % 2 == 0 ? -1.0 : 1.0;  // (-1)^{p+1}
  const auto f_at = [p](double step_cfl) {
    const auto g = sl_geometry(p, step_cfl);
    return f_poly(p, g.window, g.eps);
  };
  double cfl = c * factors[0];
  double phi = factors[0] * (c * e_fd + std::pow(-c, p + 1) * e_rk) + sign * f_at(cfl);
  for (std::size_t l = 1; l < factors.size(); ++l) {
    const int m = factors[l];
    const double prev = cfl;
    cfl *= m;
    phi = sign * (-m * f_at(prev) + f_at(cfl)) + m * phi;
  }
  return phi;
}

double phi_coefficient(int p, double c, int m, int level, double e_fd, double e_rk) {
  if (level < 1) throw InputError("phi_coefficient needs level >= 1");
  const std::vector<int> factors(static_cast<std::size_t>(level), m);
  return phi_coefficient(p, c, factors, e_fd, e_rk);
}

CirculantOperator correction_derivative(int p, int nx) {
  if (p % 2 == 1) return high_derivative_operator(p + 1, 2, StencilBias::symmetric, nx);
  return high_derivative_operator(p + 1, 1, StencilBias::left_biased, nx);
}

Stepper modified_coarse_stepper(const DiscretizationSpec& fine, const ButcherTableau& tab,
                                std::span<const int> factors, CorrectionSolver solver) {
  if (fine.family == Family::semi_lagrangian) {
    throw InputError("the modified coarse operator corrects a method-of-lines fine grid");
  }
  const int m_total = std::accumulate(factors.begin(), factors.end(), 1, std::multiplies<>());
  const double cfl = fine.cfl * m_total;
  const double phi =
      phi_coefficient(fine.p, fine.cfl, factors, fd_error_constant(fine.p), rk_error_constant(tab));

  auto raw = sl_raw_stencil(fine.p, cfl);
  auto sl = raw.wrapped(fine.nx);
  auto D = correction_derivative(fine.p, fine.nx);

  const auto s_eig = sl.eigenvalues();
  const auto d_eig = D.eigenvalues();
  std::vector<Complex> mu(s_eig.size());
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const Complex denom = 1.0 - phi * d_eig[k];
    if (std::abs(denom) < 1e-14) {
      throw SingularityError("modified coarse operator: I - phi D is singular (phi = " +
                             format_cfl(phi) + ", omega = " +
                             format_cfl(2.0 * std::numbers::pi * k / fine.nx) + ")");
    }
    mu[k] = s_eig[k] / denom;
  }
  auto assembled = CirculantOperator::from_eigenvalues(mu);
  const std::string label = "modified(" + tab.name + "+U" + std::to_string(fine.p) +
                            ") c=" + format_cfl(cfl) + " phi=" + format_cfl(phi);
  return Stepper(std::make_shared<ModifiedImpl>(std::move(assembled), cfl, label, std::move(raw),
                                                std::move(sl), std::move(D), phi, solver));
}

Stepper modified_coarse_stepper(const DiscretizationSpec& fine, const ButcherTableau& tab, int m,
                                int level, CorrectionSolver solver) {
  if (level < 1) throw InputError("modified coarse operator needs level >= 1");
  const std::vector<int> factors(static_cast<std::size_t>(level), m);
  return modified_coarse_stepper(fine, tab, factors, solver);
}

Stepper rediscretized_coarse_stepper(const DiscretizationSpec& fine, const ButcherTableau& tab,
                                     int m_total) {
  if (tab.kind == TableauKind::explicit_rk) {
    throw InputError("rediscretizing an explicit scheme with a larger step is unstable");
  }
  auto coarse = fine;
  coarse.cfl = fine.cfl * m_total;
  return mol_stepper(coarse, tab);
}

Stepper plain_sl_coarse_stepper(const DiscretizationSpec& fine, int m_total) {
  return sl_stepper(fine.p, fine.cfl * m_total, fine.nx);
}

Stepper ideal_coarse_stepper(const Stepper& fine, int m_total) {
  if (m_total < 1) throw InputError("ideal coarse operator needs m >= 1");
  return Stepper(std::make_shared<PowerImpl>(fine, m_total));
}

double mol_truncation_coefficient(int p, double c, double e_fd, double e_rk) {
  return -(c * e_fd + std::pow(-c, p + 1) * e_rk);
}

double sl_truncation_coefficient(int p, double step_cfl) {
  const auto g = sl_geometry(p, step_cfl);
  const double sign = p % 2 == 0 ? -1.0 : 1.0;
  return sign * f_poly(p, g.window, g.eps);
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("slope fit needs two or more points");
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

TruncationReport truncation_residual(const std::function<Stepper(int nx)>& make_stepper,
                                     double step_cfl, double predicted_coefficient,
                                     int derivative_order, std::span<const int> nx_list) {
  constexpr double t0 = 0.3;
  const double pi = std::numbers::pi;
  TruncationReport report;
  std::vector<double> hs;
  for (int nx : nx_list) {
    const auto stepper = make_stepper(nx);
    const double h = DiscretizationSpec::kDomainLength / nx;
    const double dt = step_cfl * h;
    const auto x = mesh(nx);
    Vector u(x.size()), exact(x.size()), predicted(x.size());
    const double scale = predicted_coefficient * std::pow(h * pi, derivative_order);
    for (std::size_t i = 0; i < x.size(); ++i) {
      u[i] = std::sin(pi * (x[i] - t0));
      const double phase = pi * (x[i] - t0 - dt);
      exact[i] = std::sin(phase);
      predicted[i] = scale * std::sin(phase + derivative_order * pi / 2);
    }
    const auto stepped = stepper.step(u);
    Vector tau(x.size()), rest(x.size());
    double dot = 0.0, norm2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      tau[i] = exact[i] - stepped[i];
      rest[i] = tau[i] - predicted[i];
      dot += tau[i] * predicted[i];
      norm2 += predicted[i] * predicted[i];
    }
    report.nx.push_back(nx);
    report.residual_rms.push_back(rms(tau));
    report.remainder_rms.push_back(rms(rest));
    report.constant_ratio.push_back(norm2 > 0.0 ? dot / norm2
                                                : std::numeric_limits<double>::quiet_NaN());
    hs.push_back(h);
  }
  if (hs.size() >= 2) {
    const auto positive = [](const std::vector<double>& v) {
      return std::all_of(v.begin(), v.end(), [](double a) { return a > 0.0; });
    };
    if (positive(report.residual_rms)) report.residual_order = loglog_slope(hs, report.residual_rms);
    if (positive(report.remainder_rms)) {
      report.remainder_order = loglog_slope(hs, report.remainder_rms);
    }
  }
  return report;
}

GlobalOrderReport global_order(const std::function<Stepper(int nx)>& make_stepper, double step_cfl,
                               std::span<const int> nx_list) {
  const double pi = std::numbers::pi;
  GlobalOrderReport report;
  std::vector<double> hs;
  for (int nx : nx_list) {
    const auto stepper = make_stepper(nx);
    const double h = DiscretizationSpec::kDomainLength / nx;
    const int nt = static_cast<int>(std::ceil(1.0 / (step_cfl * h) - 1e-9));
    const double T = nt * step_cfl * h;
    const auto x = mesh(nx);
    Vector u(x.size()), next(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) u[i] = std::sin(pi * x[i]);
    for (int n = 0; n < nt; ++n) {
      stepper.step(u, next);
      u.swap(next);
    }
    for (std::size_t i = 0; i < x.size(); ++i) u[i] -= std::sin(pi * (x[i] - T));
    report.nx.push_back(nx);
    report.error.push_back(rms(u));
    hs.push_back(h);
  }
  if (hs.size() >= 2) report.order = loglog_slope(hs, report.error);
  return report;
}

}  // namespace mgritsl
