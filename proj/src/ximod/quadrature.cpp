#include "ximod/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ximod/errors.hpp"

namespace ximod {

namespace {

template <class Real>
struct Rule {
  // Kronrod abscissae x_0 = 0 < x_1 < ... < x_7; Gauss nodes are the even ones.
  const std::array<Real, 8>& xk = boost::math::quadrature::gauss_kronrod<Real, 15>::abscissa();
  const std::array<Real, 8>& wk = boost::math::quadrature::gauss_kronrod<Real, 15>::weights();
  const std::array<Real, 4>& wg = boost::math::quadrature::gauss<Real, 7>::weights();
};

template <class Real>
const Rule<Real>& rule() {
  static const Rule<Real> r;
  return r;
}

template <class Real>
struct Panel {
  Real a, b;
  std::vector<Real> value, err, resabs;
  Real worst{0};
  bool splittable{true};
};

template <class Real>
class PanelEvaluator {
 public:
  PanelEvaluator(const VectorIntegrand<Real>& f, std::size_t dim) : f_(f), dim_(dim), fx_(15 * dim) {}

  void operator()(Panel<Real>& p) {
    using std::abs;
    using std::max;
    const Rule<Real>& r = rule<Real>();
    const Real c = (p.a + p.b) / 2;
    const Real h = (p.b - p.a) / 2;
    // slot 0: centre; slots 2i-1, 2i: c - h x_i, c + h x_i
    f_(c, std::span<Real>(fx_.data(), dim_));
    for (int i = 1; i < 8; ++i) {
      f_(c - h * r.xk[i], std::span<Real>(fx_.data() + (2 * i - 1) * dim_, dim_));
      f_(c + h * r.xk[i], std::span<Real>(fx_.data() + (2 * i) * dim_, dim_));
    }
    p.value.assign(dim_, Real(0));
    p.err.assign(dim_, Real(0));
    p.resabs.assign(dim_, Real(0));
    p.worst = 0;
    for (std::size_t d = 0; d < dim_; ++d) {
      const Real f0 = fx_[d];
      Real k = r.wk[0] * f0;
      Real g = r.wg[0] * f0;
      Real ka = r.wk[0] * abs(f0);
      for (int i = 1; i < 8; ++i) {
        const Real fl = fx_[(2 * i - 1) * dim_ + d];
        const Real fr = fx_[(2 * i) * dim_ + d];
        k += r.wk[i] * (fl + fr);
        ka += r.wk[i] * (abs(fl) + abs(fr));
        if (i % 2 == 0) g += r.wg[i / 2] * (fl + fr);
      }
      p.value[d] = k * h;
      p.err[d] = abs((k - g) * h);
      p.resabs[d] = ka * abs(h);
      p.worst = max(p.worst, p.err[d]);
    }
    const Real scale = max(abs(p.a), abs(p.b));
    p.splittable = (p.b - p.a) > 64 * machine_eps<Real>() * max(scale, Real(1e-300));
  }

 private:
  const VectorIntegrand<Real>& f_;
  std::size_t dim_;
  std::vector<Real> fx_;
};

template <class Real>
void check_finite_args(Real a, Real b, Real tol) {
  if (!(a < b)) throw DomainError("integrate: requires a < b");
  if (!(tol > 0)) throw DomainError("integrate: tolerance must be positive");
}

template <class Real>
QuadratureResult<Real> scalar_view(const VectorQuadratureResult<Real>& v) {
  return {v.value[0], v.err[0], v.panels, v.roundoff_limited};
}

template <class Real>
VectorIntegrand<Real> lift(const Integrand<Real>& f) {
  return [&f](Real x, std::span<Real> out) { out[0] = f(x); };
}

}  // namespace

template <class Real>
Real VectorQuadratureResult<Real>::max_err() const {
  Real m = 0;
  for (const Real& e : err) m = std::max(m, e);
  return m;
}

template <class Real>
VectorQuadratureResult<Real> integrate_finite_vec(const VectorIntegrand<Real>& f, std::size_t dim,
                                                  Real a, Real b, Real tol, OscillationHint hint,
                                                  QuadratureOptions opts) {
  using std::ceil;
  check_finite_args(a, b, tol);
  if (dim == 0) throw DomainError("integrate: dimension must be positive");

  int n0 = std::max(1, opts.initial_panels);
  if (hint.frequency > 0) {
    const double width_cap = boost::math::constants::pi<double>() / (2 * hint.frequency);
    const double need = std::ceil(to_double(b - a) / width_cap);
    n0 = std::max<int>(n0, static_cast<int>(need));
  }
  if (n0 > opts.max_panels) {
    throw PrecisionError("integrate: oscillation cap needs more panels than the budget", 0.0,
                         std::numeric_limits<double>::infinity());
  }

  PanelEvaluator<Real> eval(f, dim);
  std::vector<Panel<Real>> panels(static_cast<std::size_t>(n0));
  const Real width = (b - a) / n0;
  for (int i = 0; i < n0; ++i) {
    panels[i].a = a + width * i;
    panels[i].b = (i + 1 == n0) ? b : a + width * (i + 1);
    eval(panels[i]);
  }

  std::vector<Real> tot_err(dim, Real(0)), tot_abs(dim, Real(0));
  using Entry = std::pair<Real, std::size_t>;
  std::priority_queue<Entry> queue;
  for (std::size_t i = 0; i < panels.size(); ++i) {
    for (std::size_t d = 0; d < dim; ++d) {
      tot_err[d] += panels[i].err[d];
      tot_abs[d] += panels[i].resabs[d];
    }
    if (panels[i].splittable) queue.emplace(panels[i].worst, i);
  }

  const Real floor_factor = 50 * machine_eps<Real>();
  bool roundoff = false;
  auto converged = [&]() {
    bool all = true;
    bool limited = false;
    for (std::size_t d = 0; d < dim; ++d) {
      if (tot_err[d] <= tol) continue;
      if (tot_err[d] <= floor_factor * tot_abs[d]) {
        limited = true;
        continue;
      }
      all = false;
    }
    roundoff = limited;
    return all;
  };

  while (!converged()) {
    if (queue.empty() || static_cast<int>(panels.size()) >= opts.max_panels) {
      Real best = 0, worst = 0;
      for (const auto& p : panels) best += p.value[0];
      for (std::size_t d = 0; d < dim; ++d) worst = std::max(worst, tot_err[d]);
      throw PrecisionError(queue.empty() ? "integrate: panels cannot be refined further"
                                         : "integrate: panel budget exhausted",
                           to_double(best), to_double(worst));
    }
    const std::size_t i = queue.top().second;
    queue.pop();
    Panel<Real> right;
    const Real mid = (panels[i].a + panels[i].b) / 2;
    right.a = mid;
    right.b = panels[i].b;
    for (std::size_t d = 0; d < dim; ++d) {
      tot_err[d] -= panels[i].err[d];
      tot_abs[d] -= panels[i].resabs[d];
    }
    panels[i].b = mid;
    eval(panels[i]);
    eval(right);
    panels.push_back(std::move(right));
    const std::size_t j = panels.size() - 1;
    for (std::size_t k : {i, j}) {
      for (std::size_t d = 0; d < dim; ++d) {
        tot_err[d] += panels[k].err[d];
        tot_abs[d] += panels[k].resabs[d];
      }
      if (panels[k].splittable) queue.emplace(panels[k].worst, k);
    }
  }

  std::sort(panels.begin(), panels.end(),
            [](const Panel<Real>& l, const Panel<Real>& r) { return l.a < r.a; });
  VectorQuadratureResult<Real> out;
  out.value.assign(dim, Real(0));
  out.err.assign(dim, Real(0));
  for (const auto& p : panels) {
    for (std::size_t d = 0; d < dim; ++d) {
      out.value[d] += p.value[d];
      out.err[d] += p.err[d];
    }
  }
  out.panels = static_cast<int>(panels.size());
  out.roundoff_limited = roundoff;
  return out;
}

template <class Real>
QuadratureResult<Real> integrate_finite(const Integrand<Real>& f, Real a, Real b, Real tol,
                                        OscillationHint hint, QuadratureOptions opts) {
  return scalar_view(integrate_finite_vec<Real>(lift(f), 1, a, b, tol, hint, opts));
}

template <class Real>
VectorQuadratureResult<Real> integrate_semiinf_vec(const VectorIntegrand<Real>& f,
                                                   std::size_t dim, Real a, Real tol,
                                                   Real decay_scale, OscillationHint hint,
                                                   QuadratureOptions opts) {
  using std::abs;
  if (!(decay_scale > 0)) throw DomainError("integrate_semiinf: decay_scale must be positive");
  if (!(tol > 0)) throw DomainError("integrate: tolerance must be positive");
  std::vector<Real> buf(dim);
  auto envelope = [&](Real x) {
    f(x, std::span<Real>(buf));
    Real m = 0;
    for (const Real& v : buf) m = std::max(m, abs(v));
    return m;
  };
  const Real step = Real(1) / decay_scale;
  Real cut = a + step;
  Real tail = 0;
  constexpr int kMaxSteps = 4096;
  int k = 0;
  for (;; ++k) {
    if (k == kMaxSteps) {
      throw PrecisionError("integrate_semiinf: integrand does not decay at the stated scale", 0.0,
                           to_double(tail));
    }
    const Real m = std::max(envelope(cut), envelope(cut + step / 2));
    tail = 4 * m / decay_scale;
    if (tail <= tol / 2) break;
    cut += step;
  }
  VectorQuadratureResult<Real> out = integrate_finite_vec<Real>(f, dim, a, cut, tol / 2, hint, opts);
  for (Real& e : out.err) e += tail;
  return out;
}

template <class Real>
QuadratureResult<Real> integrate_semiinf(const Integrand<Real>& f, Real a, Real tol,
                                         Real decay_scale, OscillationHint hint,
                                         QuadratureOptions opts) {
  return scalar_view(integrate_semiinf_vec<Real>(lift(f), 1, a, tol, decay_scale, hint, opts));
}

template <class Real>
VectorQuadratureResult<Real> integrate_line_vec(const VectorIntegrand<Real>& f, std::size_t dim,
                                                Real tol, Real decay_scale,
                                                QuadratureOptions opts) {
  using std::abs;
  if (!(decay_scale > 0)) throw DomainError("integrate_line: decay_scale must be positive");
  if (!(tol > 0)) throw DomainError("integrate: tolerance must be positive");
  Real half = Real(2) / decay_scale;
  QuadratureOptions core_opts = opts;
  core_opts.initial_panels = std::max(opts.initial_panels, 8);
  VectorQuadratureResult<Real> out =
      integrate_finite_vec<Real>(f, dim, -half, half, tol / 2, {}, core_opts);

  constexpr int kMaxDoublings = 40;
  Real seg_tol = tol / 16;
  for (int k = 0;; ++k) {
    if (k == kMaxDoublings) {
      throw PrecisionError("integrate_line: envelope does not decay", to_double(out.value[0]),
                           to_double(out.max_err()));
    }
    auto right = integrate_finite_vec<Real>(f, dim, half, 2 * half, seg_tol, {}, opts);
    auto left = integrate_finite_vec<Real>(f, dim, -2 * half, -half, seg_tol, {}, opts);
    Real contribution = 0;
    for (std::size_t d = 0; d < dim; ++d) {
      out.value[d] += right.value[d] + left.value[d];
      out.err[d] += right.err[d] + left.err[d];
      contribution = std::max(contribution, abs(right.value[d]) + abs(left.value[d]));
    }
    out.panels += right.panels + left.panels;
    out.roundoff_limited = out.roundoff_limited || right.roundoff_limited || left.roundoff_limited;
    half *= 2;
    seg_tol /= 2;
    if (contribution < tol / 4) {
      // The newest pair bounds what lies beyond it for these envelopes.
      for (Real& e : out.err) e += contribution;
      break;
    }
  }
  return out;
}

template <class Real>
QuadratureResult<Real> integrate_line(const Integrand<Real>& f, Real tol, Real decay_scale,
                                      QuadratureOptions opts) {
  return scalar_view(integrate_line_vec<Real>(lift(f), 1, tol, decay_scale, opts));
}

#define XIMOD_INSTANTIATE_QUADRATURE(Real)                                                     \
  template struct VectorQuadratureResult<Real>;                                               \
  template QuadratureResult<Real> integrate_finite<Real>(const Integrand<Real>&, Real, Real,  \
                                                         Real, OscillationHint,                \
                                                         QuadratureOptions);                   \
  template VectorQuadratureResult<Real> integrate_finite_vec<Real>(                           \
      const VectorIntegrand<Real>&, std::size_t, Real, Real, Real, OscillationHint,           \
      QuadratureOptions);                                                                     \
  template QuadratureResult<Real> integrate_semiinf<Real>(const Integrand<Real>&, Real, Real, \
                                                          Real, OscillationHint,               \
                                                          QuadratureOptions);                  \
  template VectorQuadratureResult<Real> integrate_semiinf_vec<Real>(                          \
      const VectorIntegrand<Real>&, std::size_t, Real, Real, Real, OscillationHint,           \
      QuadratureOptions);                                                                     \
  template QuadratureResult<Real> integrate_line<Real>(const Integrand<Real>&, Real, Real,    \
                                                       QuadratureOptions);                     \
  template VectorQuadratureResult<Real> integrate_line_vec<Real>(                             \
      const VectorIntegrand<Real>&, std::size_t, Real, Real, QuadratureOptions);

XIMOD_INSTANTIATE_QUADRATURE(double)
XIMOD_INSTANTIATE_QUADRATURE(Float128)

}  // namespace ximod
