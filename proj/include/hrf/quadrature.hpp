#pragma once

#include <cmath>
#include <complex>
#include <queue>
#include <vector>

namespace hrf::quad {

template <class T>
struct Result {
  T value{};
  double error = 0.0;
  bool converged = true;
  int evaluations = 0;
};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

namespace detail {

inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                  0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Panel {
  double a, b;
  T value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

}  // namespace detail

/// One 15-point Gauss-Kronrod panel; the error is |K15 - G7|.
template <class T, class F>
detail::Panel<T> gk15(const F& f, double a, double b) {
  using namespace detail;
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const T fc = f(c);
  T kron = fc * kWgk[7];
  T gauss = fc * kWg[3];
  for (int i = 0; i < 7; ++i) {
    const double dxi = h * kXgk[i];
    const T pair = f(c - dxi) + f(c + dxi);
    kron += pair * kWgk[i];
    if (i % 2 == 1) gauss += pair * kWg[i / 2];
  }
  kron *= h;
  gauss *= h;
  return {a, b, kron, magnitude(kron - gauss)};
}

/// Globally adaptive Gauss-Kronrod on [a, b]: bisect the worst panel until the
/// summed error is below max(abs_tol, rel_tol * |I|) or max_panels is reached.
template <class T, class F>
Result<T> integrate(const F& f, double a, double b, double abs_tol, double rel_tol, int max_panels = 4000) {
  Result<T> res;
  if (a == b) return res;
  std::priority_queue<detail::Panel<T>> heap;
  heap.push(gk15<T>(f, a, b));
  res.evaluations = 15;
  T total = heap.top().value;
  double err = heap.top().error;
  int splits = 0;
  while (err > std::max(abs_tol, rel_tol * magnitude(total))) {
    if (static_cast<int>(heap.size()) >= max_panels) {
      res.converged = false;
      break;
    }
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const auto left = gk15<T>(f, worst.a, mid);
    const auto right = gk15<T>(f, mid, worst.b);
    res.evaluations += 30;
    heap.push(left);
    heap.push(right);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    // Running sums drift; rebuild them from the panels now and then.
    if (++splits % 64 == 0) {
      total = T{};
      err = 0.0;
      auto copy = heap;
      while (!copy.empty()) {
        total += copy.top().value;
        err += copy.top().error;
        copy.pop();
      }
    }
  }
  if (splits > 0) {
    total = T{};
    err = 0.0;
    while (!heap.empty()) {
      total += heap.top().value;
      err += heap.top().error;
      heap.pop();
    }
  }
  res.value = total;
  res.error = err;
  return res;
}

/// Adaptive integration over consecutive panels [edges[i], edges[i+1]].
template <class T, class F>
Result<T> integrate_panels(const F& f, const std::vector<double>& edges, double abs_tol, double rel_tol) {
  Result<T> res;
  if (edges.size() < 2) return res;
  const double per_panel = abs_tol / static_cast<double>(edges.size() - 1);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const auto part = integrate<T>(f, edges[i], edges[i + 1], per_panel, rel_tol);
    res.value += part.value;
    res.error += part.error;
    res.evaluations += part.evaluations;
    res.converged = res.converged && part.converged;
  }
  return res;
}

}  // namespace hrf::quad
