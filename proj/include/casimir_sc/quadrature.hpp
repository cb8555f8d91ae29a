#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature, scalar and
// vector-valued. The vector form evaluates an expensive integrand once per
// node and feeds every component, which is how the Kramers-Kronig tables are
// built: one Mattis-Bardeen evaluation serves all imaginary frequencies.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <sstream>
#include <vector>

#include "casimir_sc/errors.hpp"

namespace casimir_sc::quadrature {

struct Options {
  double rel_tol = 1e-8;
  double abs_tol = 0.0;
  std::size_t max_intervals = 4000;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;  // integral of |f|, the scale the relative tolerance uses
  std::size_t evaluations = 0;
  std::size_t intervals = 0;
  bool converged = false;
};

struct VectorResult {
  std::vector<double> value;
  std::vector<double> error;
  std::vector<double> l1;
  std::size_t evaluations = 0;
  std::size_t intervals = 0;
  bool converged = false;
  double last_a = 0.0;  // widest-error interval when the budget ran out
  double last_b = 0.0;
};

/// How the relative tolerance is applied to a vector integrand.
enum class Norm {
  per_component,  // every component meets rel_tol against its own L1 norm
  shared,         // the summed error meets rel_tol against the summed L1 norm
};

namespace detail {

// Kronrod abscissae (positive half, descending) and weights for the 15-point
// rule; the embedded 7-point Gauss rule uses every odd abscissa.
inline constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline constexpr std::size_t kNodes = 15;

inline std::array<double, kNodes> nodes(double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<double, kNodes> x{};
  for (std::size_t j = 0; j < 7; ++j) {
    x[2 * j] = center - half * xgk[j];
    x[2 * j + 1] = center + half * xgk[j];
  }
  x[14] = center;
  return x;
}

// QUADPACK error heuristic applied to one component.
inline double gk_error(double kronrod, double gauss, double resasc) {
  double err = std::abs(kronrod - gauss);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  return err;
}

struct Panel {
  double a, b;
  std::vector<double> value, error, l1;
  double score;
};

struct PanelOrder {
  bool operator()(const Panel& lhs, const Panel& rhs) const { return lhs.score < rhs.score; }
};

}  // namespace detail

/// f(x, out) writes `n` components into out.
template <class F>
VectorResult integrate_vector(F&& f, std::span<const double> breakpoints, std::size_t n,
                              const Options& opts = {}, Norm norm = Norm::per_component) {
  using detail::kNodes;
  if (breakpoints.size() < 2) throw DomainError("integrate_vector: need at least two breakpoints");

  VectorResult res;
  res.value.assign(n, 0.0);
  res.error.assign(n, 0.0);
  res.l1.assign(n, 0.0);

  std::vector<double> fx(kNodes * n);
  auto rule = [&](double a, double b) {
    const auto x = detail::nodes(a, b);
    for (std::size_t j = 0; j < kNodes; ++j) f(x[j], std::span<double>(fx.data() + j * n, n));
    res.evaluations += kNodes;
    const double half = 0.5 * (b - a);
    detail::Panel p{a, b, std::vector<double>(n), std::vector<double>(n), std::vector<double>(n), 0.0};
    for (std::size_t k = 0; k < n; ++k) {
      auto at = [&](std::size_t j) { return fx[j * n + k]; };
      const double fc = at(14);
      double kron = detail::wgk[7] * fc;
      double gauss = detail::wg[3] * fc;
      double abs_sum = detail::wgk[7] * std::abs(fc);
      for (std::size_t j = 0; j < 7; ++j) {
        const double pair = at(2 * j) + at(2 * j + 1);
        kron += detail::wgk[j] * pair;
        abs_sum += detail::wgk[j] * (std::abs(at(2 * j)) + std::abs(at(2 * j + 1)));
        if (j % 2 == 1) gauss += detail::wg[j / 2] * pair;
      }
      const double mean = 0.5 * kron;
      double resasc = detail::wgk[7] * std::abs(fc - mean);
      for (std::size_t j = 0; j < 7; ++j)
        resasc += detail::wgk[j] * (std::abs(at(2 * j) - mean) + std::abs(at(2 * j + 1) - mean));
      p.value[k] = kron * half;
      p.l1[k] = abs_sum * std::abs(half);
      p.error[k] = detail::gk_error(kron * half, gauss * half, resasc * std::abs(half));
      if (!std::isfinite(p.value[k])) {
        std::ostringstream msg;
        msg << "integrate_vector: non-finite integrand on [" << a << ", " << b << "] component " << k;
        throw NumericError(msg.str());
      }
    }
    return p;
  };

  std::vector<detail::Panel> initial;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (breakpoints[i + 1] == breakpoints[i]) continue;
    initial.push_back(rule(breakpoints[i], breakpoints[i + 1]));
  }

  // Fixed per-component weights from the first pass keep the heap ordering
  // static; the stopping test below always uses the running totals.
  std::vector<double> weight(n, 0.0);
  for (const auto& p : initial)
    for (std::size_t k = 0; k < n; ++k) {
      res.value[k] += p.value[k];
      res.error[k] += p.error[k];
      res.l1[k] += p.l1[k];
    }
  double shared_weight = 0.0;
  for (std::size_t k = 0; k < n; ++k) shared_weight += res.l1[k];
  for (std::size_t k = 0; k < n; ++k) {
    const double w = norm == Norm::shared ? shared_weight : res.l1[k];
    weight[k] = std::max({w * opts.rel_tol, opts.abs_tol, std::numeric_limits<double>::min()});
  }
  auto score = [&](const detail::Panel& p) {
    double s = 0.0;
    if (norm == Norm::shared) {
      for (std::size_t k = 0; k < n; ++k) s += p.error[k];
      return s / weight[0];
    }
    for (std::size_t k = 0; k < n; ++k) s = std::max(s, p.error[k] / weight[k]);
    return s;
  };

  std::priority_queue<detail::Panel, std::vector<detail::Panel>, detail::PanelOrder> heap;
  for (auto& p : initial) {
    p.score = score(p);
    heap.push(std::move(p));
  }

  auto done = [&] {
    if (norm == Norm::shared) {
      double err = 0.0, l1 = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        err += res.error[k];
        l1 += res.l1[k];
      }
      return err <= std::max(opts.abs_tol, opts.rel_tol * l1);
    }
    for (std::size_t k = 0; k < n; ++k)
      if (res.error[k] > std::max(opts.abs_tol, opts.rel_tol * res.l1[k])) return false;
    return true;
  };

  while (!done()) {
    if (heap.size() >= opts.max_intervals || heap.empty()) {
      res.intervals = heap.size();
      if (!heap.empty()) {
        res.last_a = heap.top().a;
        res.last_b = heap.top().b;
      }
      return res;
    }
    detail::Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Interval collapsed to machine precision; accept what we have.
      res.intervals = heap.size() + 1;
      res.last_a = worst.a;
      res.last_b = worst.b;
      return res;
    }
    auto left = rule(worst.a, mid);
    auto right = rule(mid, worst.b);
    for (std::size_t k = 0; k < n; ++k) {
      res.value[k] += left.value[k] + right.value[k] - worst.value[k];
      res.error[k] += left.error[k] + right.error[k] - worst.error[k];
      res.l1[k] += left.l1[k] + right.l1[k] - worst.l1[k];
      res.error[k] = std::max(res.error[k], 0.0);
    }
    left.score = score(left);
    right.score = score(right);
    heap.push(std::move(left));
    heap.push(std::move(right));
  }

  // Re-sum from the leaves so the reported value is free of the running
  // add/subtract round-off and independent of refinement history.
  std::vector<detail::Panel> leaves;
  leaves.reserve(heap.size());
  while (!heap.empty()) {
    leaves.push_back(heap.top());
    heap.pop();
  }
  std::sort(leaves.begin(), leaves.end(), [](const auto& l, const auto& r) { return l.a < r.a; });
  std::fill(res.value.begin(), res.value.end(), 0.0);
  std::fill(res.error.begin(), res.error.end(), 0.0);
  std::fill(res.l1.begin(), res.l1.end(), 0.0);
  for (const auto& p : leaves)
    for (std::size_t k = 0; k < n; ++k) {
      res.value[k] += p.value[k];
      res.error[k] += p.error[k];
      res.l1[k] += p.l1[k];
    }
  res.intervals = leaves.size();
  res.converged = true;
  return res;
}

template <class F>
Result integrate(F&& f, std::span<const double> breakpoints, const Options& opts = {}) {
  auto vr = integrate_vector(
      [&](double x, std::span<double> out) { out[0] = f(x); }, breakpoints, 1, opts);
  Result r;
  r.value = vr.value[0];
  r.error = vr.error[0];
  r.l1 = vr.l1[0];
  r.evaluations = vr.evaluations;
  r.intervals = vr.intervals;
  r.converged = vr.converged;
  return r;
}

template <class F>
Result integrate(F&& f, double a, double b, const Options& opts = {}) {
  const std::array<double, 2> bp{a, b};
  return integrate(std::forward<F>(f), std::span<const double>(bp), opts);
}

/// Like integrate(), but throws NumericError naming `context` on failure.
template <class F>
Result integrate_or_throw(F&& f, double a, double b, const Options& opts, const char* context) {
  auto r = integrate(std::forward<F>(f), a, b, opts);
  if (!r.converged) {
    std::ostringstream msg;
    msg << context << ": quadrature did not converge on [" << a << ", " << b << "] after "
        << r.evaluations << " evaluations (value " << r.value << ", error " << r.error << ")";
    throw NumericError(msg.str());
  }
  return r;
}

/// n+1 points spaced evenly in log between lo and hi (both > 0).
inline std::vector<double> log_breakpoints(double lo, double hi, std::size_t n) {
  std::vector<double> out(n + 1);
  const double l0 = std::log(lo), l1 = std::log(hi);
  for (std::size_t i = 0; i <= n; ++i) out[i] = std::exp(l0 + (l1 - l0) * double(i) / double(n));
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace casimir_sc::quadrature
