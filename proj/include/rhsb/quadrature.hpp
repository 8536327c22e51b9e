#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <queue>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include "rhsb/errors.hpp"
#include "rhsb/model.hpp"

namespace rhsb {

/// Tolerances and truncation radii shared by every integral in the library.
struct QuadratureSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-12;
    double spatial_radius = 40.0;  ///< line integrals run over [-R, R]
    double k_max = 40.0;           ///< energy integrals run over k in (0, k_max]
    int max_subdivisions = 4000;

    void validate() const {
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
            throw DomainError("quadrature tolerances must be positive");
        if (!(spatial_radius > 0.0) || !(k_max > 0.0))
            throw DomainError("truncation radii must be positive");
        if (max_subdivisions < 1) throw DomainError("max_subdivisions must be positive");
    }

    /// Same spec with tolerances scaled by `factor`.
    QuadratureSpec tightened(double factor) const {
        QuadratureSpec s = *this;
        s.abs_tol *= factor;
        s.rel_tol = std::max(s.rel_tol * factor, 1e-14);
        return s;
    }

    bool operator==(const QuadratureSpec&) const = default;
};

struct Interval {
    double lo;
    double hi;

    double length() const noexcept { return hi - lo; }
    bool empty() const noexcept { return !(hi > lo); }

    Interval intersect(const Interval& o) const noexcept {
        return {std::max(lo, o.lo), std::min(hi, o.hi)};
    }
    Interval hull(const Interval& o) const noexcept {
        return {std::min(lo, o.lo), std::max(hi, o.hi)};
    }
};

/// Fixed-size complex vector; lets one quadrature sweep integrate several
/// integrands that share expensive intermediate values.
template <std::size_t N>
struct CVec {
    std::array<cplx, N> v{};

    cplx& operator[](std::size_t i) { return v[i]; }
    const cplx& operator[](std::size_t i) const { return v[i]; }

    CVec& operator+=(const CVec& o) {
        for (std::size_t i = 0; i < N; ++i) v[i] += o.v[i];
        return *this;
    }
    CVec& operator-=(const CVec& o) {
        for (std::size_t i = 0; i < N; ++i) v[i] -= o.v[i];
        return *this;
    }
    CVec& operator*=(double s) {
        for (auto& x : v) x *= s;
        return *this;
    }
    friend CVec operator+(CVec a, const CVec& b) { return a += b; }
    friend CVec operator-(CVec a, const CVec& b) { return a -= b; }
    friend CVec operator*(CVec a, double s) { return a *= s; }
    friend CVec operator*(double s, CVec a) { return a *= s; }
};

inline double magnitude(double x) noexcept { return std::abs(x); }
inline double magnitude(const cplx& z) noexcept { return std::abs(z); }
template <std::size_t N>
double magnitude(const CVec<N>& z) noexcept {
    double m = 0.0;
    for (const auto& x : z.v) m = std::max(m, std::abs(x));
    return m;
}

inline cplx first_component(double x) { return x; }
inline cplx first_component(const cplx& z) { return z; }
template <std::size_t N>
cplx first_component(const CVec<N>& z) {
    return z.v[0];
}

template <class V>
struct QuadResult {
    V value{};
    double error = 0.0;
    int panels = 0;
    long evaluations = 0;
    bool converged = true;
};

namespace detail {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208031086371, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <class V>
struct Panel {
    double lo;
    double hi;
    V value;
    double error;
};

template <class V, class F>
Panel<V> gauss_kronrod_21(F& f, double lo, double hi) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);

    std::array<V, 21> samples;
    samples[10] = f(center);
    for (int j = 0; j < 10; ++j) {
        const double dx = half * kXgk[j];
        samples[j] = f(center - dx);
        samples[20 - j] = f(center + dx);
    }

    V kronrod = samples[10] * kWgk[10];
    V gauss{};
    double resabs = kWgk[10] * magnitude(samples[10]);
    for (int j = 0; j < 10; ++j) {
        const V pair = samples[j] + samples[20 - j];
        kronrod += pair * kWgk[j];
        resabs += kWgk[j] * (magnitude(samples[j]) + magnitude(samples[20 - j]));
        if (j % 2 == 1) gauss += pair * kWg[j / 2];
    }
    const V mean = kronrod * 0.5;
    double resasc = kWgk[10] * magnitude(samples[10] - mean);
    for (int j = 0; j < 10; ++j)
        resasc += kWgk[j] * (magnitude(samples[j] - mean) + magnitude(samples[20 - j] - mean));

    // QUADPACK's calibrated error estimate.
    double err = magnitude(kronrod - gauss) * half;
    resabs *= half;
    resasc *= half;
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
        err = std::max(err, 50.0 * eps * resabs);
    if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();
    return {lo, hi, kronrod * half, err};
}

/// Breaks [lo, hi] at the interior break points and into pieces no wider
/// than `width`, at most `max_pieces` in total.
inline std::vector<double> initial_partition(double lo, double hi, std::span<const double> breaks,
                                             double width, int max_pieces) {
    std::vector<double> cuts{lo};
    std::vector<double> b(breaks.begin(), breaks.end());
    std::sort(b.begin(), b.end());
    for (double x : b)
        if (x > lo && x < hi) cuts.push_back(x);
    cuts.push_back(hi);

    const double len = hi - lo;
    int total = static_cast<int>(std::ceil(len / width));
    total = std::clamp(total, 1, max_pieces);
    std::vector<double> out{lo};
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double s = cuts[i], e = cuts[i + 1];
        const int pieces = std::max(1, static_cast<int>(std::ceil(total * (e - s) / len)));
        for (int p = 1; p <= pieces; ++p) out.push_back(p == pieces ? e : s + (e - s) * p / pieces);
    }
    return out;
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration of f over [lo, hi].
///
/// The interval is first cut at `breaks` and into panels of width at most
/// `panel_width`; the panel with the largest error estimate is then bisected
/// until the summed estimate meets max(abs_tol, rel_tol*|I|). The final sum
/// runs over panels in left-to-right order, so identical inputs give
/// bit-identical results. Does not throw; check `converged`.
template <class F>
auto integrate_adaptive(F&& f, double lo, double hi, const QuadratureSpec& spec,
                        std::span<const double> breaks = {}, double panel_width = 1.0)
    -> QuadResult<std::decay_t<std::invoke_result_t<F&, double>>> {
    using V = std::decay_t<std::invoke_result_t<F&, double>>;
    QuadResult<V> out;
    if (!(hi > lo)) return out;

    const int max_initial = std::max(1, std::min(spec.max_subdivisions / 4, 512));
    const auto cuts = detail::initial_partition(lo, hi, breaks, panel_width, max_initial);

    std::vector<detail::Panel<V>> panels;
    panels.reserve(cuts.size() * 2);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        panels.push_back(detail::gauss_kronrod_21<V>(f, cuts[i], cuts[i + 1]));
    out.evaluations = 21L * static_cast<long>(panels.size());

    auto worse = [&](std::size_t x, std::size_t y) {
        if (panels[x].error != panels[y].error) return panels[x].error < panels[y].error;
        return x > y;
    };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(worse)> queue(worse);
    std::vector<bool> active(panels.size(), true);
    V total{};
    double total_err = 0.0;
    for (std::size_t i = 0; i < panels.size(); ++i) {
        queue.push(i);
        total += panels[i].value;
        total_err += panels[i].error;
    }

    const double min_width = (hi - lo) * 1e-13;
    auto meets = [&] { return total_err <= std::max(spec.abs_tol, spec.rel_tol * magnitude(total)); };
    // Left-to-right sum over the active panels; also the final result.
    auto resum = [&] {
        std::vector<std::size_t> order;
        for (std::size_t i = 0; i < panels.size(); ++i)
            if (active[i]) order.push_back(i);
        std::sort(order.begin(), order.end(), [&](auto x, auto y) { return panels[x].lo < panels[y].lo; });
        total = V{};
        total_err = 0.0;
        for (auto i : order) {
            total += panels[i].value;
            total_err += panels[i].error;
        }
        return order.size();
    };
    // Running sums drift, so confirm with the exact sum before stopping.
    auto done = [&] { return meets() && (resum(), meets()); };

    int live = static_cast<int>(panels.size());
    while (!done() && !queue.empty()) {
        if (live >= spec.max_subdivisions) break;
        const std::size_t worst = queue.top();
        queue.pop();
        const auto p = panels[worst];
        if (p.hi - p.lo < min_width) continue;  // cannot refine further
        const double mid = 0.5 * (p.lo + p.hi);
        active[worst] = false;
        total -= p.value;
        total_err -= p.error;
        for (auto [s, e] : {std::pair{p.lo, mid}, std::pair{mid, p.hi}}) {
            panels.push_back(detail::gauss_kronrod_21<V>(f, s, e));
            active.push_back(true);
            total += panels.back().value;
            total_err += panels.back().error;
            queue.push(panels.size() - 1);
        }
        out.evaluations += 42;
        ++live;
    }

    out.panels = static_cast<int>(resum());
    out.value = total;
    out.error = total_err;
    out.converged = out.error <= std::max(spec.abs_tol, spec.rel_tol * magnitude(out.value));
    return out;
}

/// As integrate_adaptive, but a failure to converge raises AccuracyError.
template <class F>
auto integrate(F&& f, double lo, double hi, const QuadratureSpec& spec,
               std::span<const double> breaks = {}, double panel_width = 1.0) {
    auto r = integrate_adaptive(std::forward<F>(f), lo, hi, spec, breaks, panel_width);
    if (!r.converged)
        throw AccuracyError("quadrature did not converge within max_subdivisions",
                            first_component(r.value), r.error);
    return r;
}

/// Integral over the real line, truncated to [-R, R] and optionally to a
/// region `support` outside which the integrand is known to be negligible.
template <class F>
auto integrate_line(F&& f, const QuadratureSpec& spec, std::span<const double> breaks = {},
                    Interval support = {-std::numeric_limits<double>::infinity(),
                                        std::numeric_limits<double>::infinity()}) {
    spec.validate();
    const Interval range = Interval{-spec.spatial_radius, spec.spatial_radius}.intersect(support);
    return integrate(std::forward<F>(f), range.lo, std::max(range.lo, range.hi), spec, breaks);
}

/// Integral of g(k) over k in [k_lo, k_hi] (no Jacobian).
template <class F>
auto integrate_wavenumber(F&& g, double k_lo, double k_hi, const QuadratureSpec& spec) {
    spec.validate();
    return integrate(std::forward<F>(g), std::max(0.0, k_lo), std::min(k_hi, spec.k_max), spec);
}

/// Integral of g(E) over E in (E(k_lo), E(k_hi)], carried out in the wave
/// number: dE = (hbar^2 k / m) dk. The Jacobian cancels the 1/sqrt(E)
/// singularity of the continuum normalization at E = 0.
template <class F>
auto integrate_energy(F&& g, const BarrierModel& model, const QuadratureSpec& spec, double k_lo = 0.0,
                      double k_hi = std::numeric_limits<double>::infinity()) {
    auto in_k = [&](double k) { return g(model.energy_from_k(k)) * model.energy_jacobian(k); };
    return integrate_wavenumber(in_k, k_lo, k_hi, spec);
}

// ---------------------------------------------------------------------------
// Fixed composite rules

/// n-point Gauss-Legendre nodes and weights on [-1, 1].
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
    std::vector<double> x(n), w(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return {x, w};
}

/// Nodes and weights of a composite Gauss-Legendre rule: [lo, hi] split into
/// equal panels no wider than `panel_width`, `order` points per panel.
struct CompositeRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    static CompositeRule make(double lo, double hi, double panel_width, int order) {
        const auto [x, w] = gauss_legendre(order);
        const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / panel_width)));
        const double h = (hi - lo) / panels;
        CompositeRule r;
        r.nodes.reserve(static_cast<std::size_t>(panels) * order);
        r.weights.reserve(r.nodes.capacity());
        for (int p = 0; p < panels; ++p) {
            const double c = lo + (p + 0.5) * h;
            for (int j = 0; j < order; ++j) {
                r.nodes.push_back(c + 0.5 * h * x[j]);
                r.weights.push_back(0.5 * h * w[j]);
            }
        }
        return r;
    }
};

// ---------------------------------------------------------------------------
// Piecewise Chebyshev interpolation

/// Adaptive piecewise Chebyshev interpolant of a (vector-valued) function.
/// Each panel holds the Chebyshev coefficients of the degree n-1 interpolant
/// at first-kind nodes; a panel is bisected until its trailing coefficients
/// fall below the tolerance. The trailing-coefficient size is kept as the
/// tracked interpolation error.
template <class V>
class ChebyshevTable {
public:
    struct Piece {
        double lo;
        double hi;
        std::vector<V> coeffs;
    };

    template <class F>
    static ChebyshevTable build(F&& f, double lo, double hi, double initial_width, int order,
                                double tol, double min_width) {
        ChebyshevTable t;
        t.lo_ = lo;
        t.hi_ = hi;
        const auto cuts = detail::initial_partition(lo, hi, {}, initial_width, 4096);
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
            t.refine(f, cuts[i], cuts[i + 1], order, tol, min_width);
        return t;
    }

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    double max_error() const noexcept { return max_error_; }
    long samples() const noexcept { return samples_; }
    const std::vector<Piece>& pieces() const noexcept { return pieces_; }

    /// Interpolated value; zero outside [lo, hi].
    V operator()(double x) const {
        if (x < lo_ || x > hi_ || pieces_.empty()) return V{};
        auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                                   [](double v, const Piece& p) { return v < p.lo; });
        if (it != pieces_.begin()) --it;
        return clenshaw(*it, x);
    }

    /// Magnitude of the interpolant at the upper end, used as a truncation estimate.
    double upper_tail() const { return pieces_.empty() ? 0.0 : magnitude((*this)(hi_)); }

private:
    template <class F>
    void refine(F& f, double lo, double hi, int n, double tol, double min_width) {
        std::vector<V> values(n);
        for (int j = 0; j < n; ++j) {
            const double t = std::cos(std::numbers::pi * (j + 0.5) / n);
            values[j] = f(0.5 * (lo + hi) + 0.5 * (hi - lo) * t);
        }
        samples_ += n;
        std::vector<V> c(n);
        for (int m = 0; m < n; ++m) {
            V acc{};
            for (int j = 0; j < n; ++j) acc += values[j] * std::cos(std::numbers::pi * m * (j + 0.5) / n);
            c[m] = acc * (2.0 / n);
        }
        c[0] *= 0.5;
        const double tail = magnitude(c[n - 1]) + magnitude(c[n - 2]) + magnitude(c[n - 3]);
        if (tail <= tol || hi - lo <= min_width) {
            max_error_ = std::max(max_error_, tail);
            pieces_.push_back({lo, hi, std::move(c)});
            return;
        }
        const double mid = 0.5 * (lo + hi);
        refine(f, lo, mid, n, tol, min_width);
        refine(f, mid, hi, n, tol, min_width);
    }

    static V clenshaw(const Piece& p, double x) {
        const double t = (2.0 * x - p.lo - p.hi) / (p.hi - p.lo);
        V b1{}, b2{};
        for (std::size_t m = p.coeffs.size() - 1; m >= 1; --m) {
            V b0 = p.coeffs[m] + b1 * (2.0 * t) - b2;
            b2 = b1;
            b1 = b0;
        }
        return p.coeffs[0] + b1 * t - b2;
    }

    double lo_ = 0.0;
    double hi_ = 0.0;
    double max_error_ = 0.0;
    long samples_ = 0;
    std::vector<Piece> pieces_;
};

}  // namespace rhsb
