#include "core/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "core/error.hpp"

namespace hfl::numerics {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Kronrod 15-point abscissae (positive half) and weights; the 7-point Gauss
// rule uses the odd-indexed abscissae.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr std::size_t kMaxSegments = 400000;

struct Segment {
  double lo;
  double hi;
  double value;
  double error;
  int depth;
};

Segment gauss_kronrod(const RealFn& f, double lo, double hi, int depth) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  double resabs = std::abs(kronrod);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    kronrod += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  Segment s{lo, hi, kronrod * half, std::abs((kronrod - gauss) * half), depth};
  // Below this floor the estimate is rounding noise and bisection cannot
  // improve the result.
  if (s.error <= 50.0 * kEps * resabs * std::abs(half)) s.error = 0.0;
  return s;
}

struct ByError {
  bool operator()(const Segment& a, const Segment& b) const {
    return a.error < b.error;
  }
};

}  // namespace

void QuadSpec::validate() const {
  require(abs_tol > 0.0, ErrorCode::InvalidArgument, "QuadSpec: abs_tol must be > 0");
  require(rel_tol >= 0.0, ErrorCode::InvalidArgument, "QuadSpec: rel_tol must be >= 0");
  require(max_depth >= 1, ErrorCode::InvalidArgument, "QuadSpec: max_depth must be >= 1");
  require(initial_panels >= 1, ErrorCode::InvalidArgument,
          "QuadSpec: initial_panels must be >= 1");
}

Bracket Bracket::make(const RealFn& f, double lo, double hi) {
  Bracket b{lo, hi, f(lo), f(hi)};
  b.validate();
  return b;
}

void Bracket::validate() const {
  require(lo < hi, ErrorCode::InvalidArgument, "Bracket: lo must be < hi");
  require(f_lo * f_hi < 0.0, ErrorCode::InvalidArgument,
          "Bracket: f must change sign on [lo, hi]");
}

double integrate(const RealFn& f, double lo, double hi, const QuadSpec& spec) {
  spec.validate();
  require(lo < hi, ErrorCode::InvalidArgument, "integrate: lo must be < hi");

  std::vector<Segment> heap;
  heap.reserve(64);
  const double width = (hi - lo) / spec.initial_panels;
  for (int i = 0; i < spec.initial_panels; ++i) {
    const double a = lo + i * width;
    const double b = (i + 1 == spec.initial_panels) ? hi : lo + (i + 1) * width;
    heap.push_back(gauss_kronrod(f, a, b, 0));
  }
  std::make_heap(heap.begin(), heap.end(), ByError{});

  auto totals = [&heap]() {
    CompensatedSum value;
    double error = 0.0;
    for (const auto& s : heap) {
      value.add(s.value);
      error += s.error;
    }
    return std::pair{value.value(), error};
  };

  auto [value, error] = totals();
  while (std::isfinite(value)) {
    const double tol = std::max(spec.abs_tol, spec.rel_tol * std::abs(value));
    if (error <= tol) break;
    const Segment worst = heap.front();
    if (worst.error == 0.0) break;  // rounding-limited everywhere
    if (worst.depth >= spec.max_depth || heap.size() >= kMaxSegments) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "integrate: subdivision limit reached on [%.17g, %.17g], error estimate %.3g",
                    worst.lo, worst.hi, error);
      fail(ErrorCode::DepthExceeded, buf);
    }
    std::pop_heap(heap.begin(), heap.end(), ByError{});
    heap.pop_back();
    const double mid = 0.5 * (worst.lo + worst.hi);
    const Segment left = gauss_kronrod(f, worst.lo, mid, worst.depth + 1);
    const Segment right = gauss_kronrod(f, mid, worst.hi, worst.depth + 1);
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), ByError{});
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), ByError{});
    value += (left.value + right.value) - worst.value;
    error += (left.error + right.error) - worst.error;
    if (heap.size() % 256 == 0) std::tie(value, error) = totals();
  }
  return totals().first;
}

double envelope_cutoff(const RealFn& damping, double lo, double threshold) {
  if (damping(lo) < threshold) return lo;
  double step = 1.0;
  while (damping(lo + step) >= threshold) {
    step *= 2.0;
    if (step > 1e12)
      fail(ErrorCode::InvalidEnvelope, "envelope does not decay below threshold");
  }
  double a = lo + 0.5 * step;
  double b = lo + step;
  if (step == 1.0) a = lo;
  for (int i = 0; i < 200 && b - a > 1e-12 * std::max(1.0, b); ++i) {
    const double m = 0.5 * (a + b);
    if (damping(m) >= threshold)
      a = m;
    else
      b = m;
  }
  return b;
}

double integrate_semi_infinite(const RealFn& f, double lo, const RealFn& damping,
                               const QuadSpec& spec) {
  spec.validate();
  require(lo >= 0.0, ErrorCode::InvalidArgument, "integrate_semi_infinite: lo must be >= 0");
  const double cutoff = envelope_cutoff(damping, lo, spec.abs_tol * 1e-2);
  if (cutoff <= lo) return 0.0;

  constexpr int kSamples = 64;
  double previous = damping(lo);
  for (int i = 1; i <= kSamples; ++i) {
    const double v = damping(lo + (cutoff - lo) * i / kSamples);
    if (!(v <= previous * (1.0 + 1e-12) + 1e-300))
      fail(ErrorCode::InvalidEnvelope, "damping envelope is not decreasing");
    previous = v;
  }
  return integrate(f, lo, cutoff, spec);
}

double find_root(const RealFn& f, const Bracket& br, double tol) {
  br.validate();
  require(tol > 0.0, ErrorCode::InvalidArgument, "find_root: tol must be > 0");
  // Stopping at a quarter of tol leaves the final sign-change interval no
  // wider than tol/2 on either side of the returned point.
  const double target = 0.25 * tol;
  double a = br.lo, b = br.hi, c = br.hi;
  double fa = br.f_lo, fb = br.f_hi, fc = fb;
  double d = b - a, e = d;
  for (int iter = 0; iter < 500; ++iter) {
    if ((fb > 0.0 && fc > 0.0) || (fb < 0.0 && fc < 0.0)) {
      c = a;
      fc = fa;
      e = d = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * kEps * std::abs(b) + 0.5 * target;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      // Inverse quadratic interpolation, or secant when only two points.
      const double s = fb / fa;
      double p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
      const double min2 = std::abs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;  // interpolation left the bracket: bisect
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : std::copysign(tol1, xm);
    fb = f(b);
  }
  fail(ErrorCode::NoConvergence, "find_root: iteration limit reached");
}

Derivatives fd_derivatives(const RealFn& f, double x, double h) {
  require(h > 0.0, ErrorCode::InvalidArgument, "fd_derivatives: h must be > 0");
  const double fm2 = f(x - 2.0 * h);
  const double fm1 = f(x - h);
  const double f0 = f(x);
  const double fp1 = f(x + h);
  const double fp2 = f(x + 2.0 * h);
  return {(fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h),
          (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h)};
}

}  // namespace hfl::numerics
