#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "rhsb/errors.hpp"
#include "rhsb/model.hpp"
#include "rhsb/quadrature.hpp"

namespace rhsb {

inline constexpr int kDefaultOrderCap = 16;
inline constexpr std::size_t kDefaultTermBudget = 1'000'000;

/// Family descriptor: ((x-c)/w)^deg e^{iqx} e^{-((x-c)/w)^2}, times the barrier window.
struct PacketDescriptor {
    double center = 0.0;
    double width = 1.0;
    double momentum = 0.0;
    int poly_degree = 0;

    bool operator==(const PacketDescriptor&) const = default;
};

/// Region masks for terms produced by multiplying with the potential.
enum Region : std::uint8_t { kLeft = 1, kInside = 2, kRight = 4, kEverywhere = 7 };

/// An element of S(R \ {a,b}) in the closed normal form
///
///   phi(x) = W(x) * sum_g [region_g(x)] e^{i q_g x} e^{-y_g^2} P_g(y_g) (x-a)^{-i_g} (x-b)^{-j_g},
///   y_g = (x - c_g) / w_g,   W(x) = w_s(x-a) w_s(x-b),   w_s(t) = exp(-s^2/t^2).
///
/// The family is closed under d/dx, under multiplication by x, and under
/// multiplication by the piecewise-constant potential. Every derivative of
/// W vanishes at a and b, so every term (and every derivative) is zero
/// there; the potential jump never produces boundary terms.
///
/// Values are immutable and cheap to copy (shared representation).
class TestFunction {
public:
    struct Kernel {
        double center;
        double width;
        double momentum;
        bool operator==(const Kernel&) const = default;
    };

    struct Group {
        int kernel;
        std::uint8_t mask;
        int pole_a;
        int pole_b;
        std::vector<cplx> poly;  ///< coefficients in y, lowest degree first
    };

    static TestFunction zero(const BarrierModel& model, bool windowed = true) {
        return TestFunction(blank(model, windowed));
    }

    /// Windowed Gaussian packet; `sharpness` <= 0 selects the default s = 0.1 (b - a).
    static TestFunction packet(const PacketDescriptor& desc, const BarrierModel& model, double sharpness = 0.0) {
        if (!(desc.width > 0.0) || !std::isfinite(desc.width)) throw DomainError("packet width must be positive");
        if (desc.poly_degree < 0) throw DomainError("poly_degree must be non-negative");
        if (!std::isfinite(desc.center) || !std::isfinite(desc.momentum))
            throw DomainError("packet center and momentum must be finite");
        auto d = blank(model, true);
        if (sharpness > 0.0) d->sharpness = sharpness;
        d->kernels.push_back({desc.center, desc.width, desc.momentum});
        std::vector<cplx> poly(desc.poly_degree + 1, 0.0);
        poly.back() = 1.0;
        d->groups.push_back({0, kEverywhere, 0, 0, std::move(poly)});
        return TestFunction(std::move(d));
    }

    /// Plain Gaussian e^{iqx} e^{-((x-c)/w)^2} without the barrier window.
    /// Not a member of the test space (it does not vanish at a, b); used to
    /// check closed forms.
    static TestFunction unwindowed_gaussian(const BarrierModel& model, double center, double width,
                                            double momentum = 0.0) {
        if (!(width > 0.0)) throw DomainError("packet width must be positive");
        auto d = blank(model, false);
        d->kernels.push_back({center, width, momentum});
        d->groups.push_back({0, kEverywhere, 0, 0, {1.0}});
        return TestFunction(std::move(d));
    }

    const BarrierModel& model() const noexcept { return data_->model; }
    bool windowed() const noexcept { return data_->windowed; }
    double sharpness() const noexcept { return data_->sharpness; }
    int order() const noexcept { return data_->order; }
    int order_cap() const noexcept { return data_->order_cap; }
    const std::vector<Kernel>& kernels() const noexcept { return data_->kernels; }
    const std::vector<Group>& groups() const noexcept { return data_->groups; }
    bool is_zero() const noexcept { return data_->groups.empty(); }

    std::size_t term_count() const noexcept {
        std::size_t n = 0;
        for (const auto& g : data_->groups) n += g.poly.size();
        return n;
    }

    int max_degree() const noexcept {
        int d = 0;
        for (const auto& g : data_->groups) d = std::max<int>(d, static_cast<int>(g.poly.size()) - 1);
        return d;
    }

    /// phi(x). Returns exactly 0 at x = a and x = b for windowed functions.
    cplx operator()(double x) const { return data_->eval(x); }

    /// n-th derivative, memoized per function.
    TestFunction derivative(int n = 1) const {
        if (n < 0) throw DomainError("derivative order must be non-negative");
        if (data_->order + n > data_->order_cap)
            throw CapabilityError("derivative order " + std::to_string(data_->order + n) + " exceeds the order cap " +
                                  std::to_string(data_->order_cap));
        if (n == 0) return *this;
        std::shared_ptr<const Data> cur;
        {
            std::lock_guard lock(data_->memo->mutex);
            auto& cache = data_->memo->derivatives;
            if (static_cast<int>(cache.size()) >= n) return TestFunction(cache[n - 1]);
            cur = cache.empty() ? data_ : cache.back();
        }
        std::vector<std::shared_ptr<const Data>> fresh;
        int have;
        {
            std::lock_guard lock(data_->memo->mutex);
            have = static_cast<int>(data_->memo->derivatives.size());
        }
        for (int i = have; i < n; ++i) {
            cur = cur->differentiate();
            fresh.push_back(cur);
        }
        std::lock_guard lock(data_->memo->mutex);
        auto& cache = data_->memo->derivatives;
        for (auto& f : fresh)
            if (static_cast<int>(cache.size()) < n) cache.push_back(f);
        return TestFunction(cache[n - 1]);
    }

    /// x * phi(x).
    TestFunction times_x() const {
        auto d = data_->blank_copy();
        std::map<Key, std::vector<cplx>> acc;
        for (const auto& g : data_->groups) {
            const auto& k = data_->kernels[g.kernel];
            std::vector<cplx> p(g.poly.size() + 1, 0.0);
            for (std::size_t n = 0; n < g.poly.size(); ++n) {
                p[n] += k.center * g.poly[n];
                p[n + 1] += k.width * g.poly[n];
            }
            add_into(acc, {g.kernel, g.mask, g.pole_a, g.pole_b}, p);
        }
        d->assign(std::move(acc));
        return TestFunction(std::move(d));
    }

    /// V(x) * phi(x), represented by restricting every term to the interior region.
    TestFunction times_potential() const {
        auto d = data_->blank_copy();
        std::map<Key, std::vector<cplx>> acc;
        if (data_->model.v0 != 0.0) {
            for (const auto& g : data_->groups) {
                const std::uint8_t mask = g.mask & kInside;
                if (mask == 0) continue;
                std::vector<cplx> p = g.poly;
                for (auto& c : p) c *= data_->model.v0;
                add_into(acc, {g.kernel, mask, g.pole_a, g.pole_b}, p);
            }
        }
        d->assign(std::move(acc));
        return TestFunction(std::move(d));
    }

    TestFunction scaled(cplx s) const {
        auto d = data_->blank_copy();
        std::map<Key, std::vector<cplx>> acc;
        if (s != 0.0) {
            for (const auto& g : data_->groups) {
                std::vector<cplx> p = g.poly;
                for (auto& c : p) c *= s;
                add_into(acc, {g.kernel, g.mask, g.pole_a, g.pole_b}, p);
            }
        }
        d->assign(std::move(acc));
        return TestFunction(std::move(d));
    }

    friend TestFunction operator+(const TestFunction& f, const TestFunction& g) { return combine(f, g, 1.0); }
    friend TestFunction operator-(const TestFunction& f, const TestFunction& g) { return combine(f, g, -1.0); }
    friend TestFunction operator*(cplx s, const TestFunction& f) { return f.scaled(s); }

    /// Interval outside of which |phi| is negligible (below e^-60 of its
    /// coefficient scale), conservatively including the neighbourhoods of
    /// a and b whenever pole terms could be visible there.
    Interval support() const {
        const auto& d = *data_;
        Interval hull{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
        const double s = d.sharpness;
        for (std::size_t kk = 0; kk < d.kernels.size(); ++kk) {
            const auto& k = d.kernels[kk];
            double log_c = 0.0;
            int deg = 0, poles = 0;
            bool any = false;
            for (const auto& g : d.groups) {
                if (g.kernel != static_cast<int>(kk)) continue;
                any = true;
                for (const auto& c : g.poly)
                    if (c != 0.0) log_c = std::max(log_c, std::log(std::abs(c)));
                deg = std::max<int>(deg, static_cast<int>(g.poly.size()) - 1);
                poles = std::max(poles, std::max(g.pole_a, g.pole_b));
            }
            if (!any) continue;
            double y = 8.0;
            for (int it = 0; it < 6; ++it) y = std::sqrt(60.0 + log_c + deg * std::log(std::max(y, 1.0)));
            hull = hull.hull({k.center - k.width * y, k.center + k.width * y});
            if (poles > 0 && d.windowed) {
                // max_t t^-p e^{-s^2/t^2} = (p / (2 e s^2))^{p/2}
                const double pole_log = 0.5 * poles * std::log(poles / (2.0 * std::numbers::e * s * s));
                for (double edge : {d.model.a, d.model.b}) {
                    const double dist = std::max(0.0, std::abs(edge - k.center) - 3.0 * s) / k.width;
                    const double log_mag = log_c + deg * std::log(1.0 + dist) + pole_log - dist * dist;
                    if (log_mag > -60.0) hull = hull.hull({edge - 1.0, edge + 1.0});
                }
            }
        }
        return hull;
    }

private:
    struct Key {
        int kernel;
        std::uint8_t mask;
        int pole_a;
        int pole_b;
        auto operator<=>(const Key&) const = default;
    };

    struct Data;

    struct Memo {
        std::mutex mutex;
        std::vector<std::shared_ptr<const Data>> derivatives;
    };

    struct Data {
        BarrierModel model;
        bool windowed = true;
        double sharpness = 0.1;
        int order = 0;
        int order_cap = kDefaultOrderCap;
        std::size_t term_budget = kDefaultTermBudget;
        std::vector<Kernel> kernels;
        std::vector<Group> groups;
        int max_pole_a = 0;
        int max_pole_b = 0;
        std::shared_ptr<Memo> memo = std::make_shared<Memo>();

        std::shared_ptr<Data> blank_copy() const {
            auto d = std::make_shared<Data>();
            d->model = model;
            d->windowed = windowed;
            d->sharpness = sharpness;
            d->order = order;
            d->order_cap = order_cap;
            d->term_budget = term_budget;
            d->kernels = kernels;
            return d;
        }

        void assign(std::map<Key, std::vector<cplx>>&& acc) {
            groups.clear();
            std::size_t terms = 0;
            for (auto& [key, poly] : acc) {
                while (!poly.empty() && poly.back() == 0.0) poly.pop_back();
                if (poly.empty()) continue;
                terms += poly.size();
                groups.push_back({key.kernel, key.mask, key.pole_a, key.pole_b, std::move(poly)});
            }
            if (terms > term_budget)
                throw CapabilityError("symbolic expression exceeds the term budget at derivative order " +
                                      std::to_string(order));
            max_pole_a = max_pole_b = 0;
            for (const auto& g : groups) {
                max_pole_a = std::max(max_pole_a, g.pole_a);
                max_pole_b = std::max(max_pole_b, g.pole_b);
            }
            if (max_pole_a >= kMaxPole || max_pole_b >= kMaxPole)
                throw CapabilityError("pole order exceeds the evaluator table at derivative order " +
                                      std::to_string(order));
        }

        std::shared_ptr<const Data> differentiate() const {
            auto d = blank_copy();
            d->order = order + 1;
            std::map<Key, std::vector<cplx>> acc;
            const double two_s2 = 2.0 * sharpness * sharpness;
            for (const auto& g : groups) {
                const auto& k = kernels[g.kernel];
                const double inv_w = 1.0 / k.width;
                const std::size_t n = g.poly.size();
                // Kernel and polynomial: P'(y)/w + (iq - 2y/w) P(y).
                std::vector<cplx> p(n + 1, 0.0);
                for (std::size_t m = 0; m < n; ++m) {
                    if (m > 0) p[m - 1] += static_cast<double>(m) * inv_w * g.poly[m];
                    p[m] += cplx(0.0, k.momentum) * g.poly[m];
                    p[m + 1] += -2.0 * inv_w * g.poly[m];
                }
                add_into(acc, {g.kernel, g.mask, g.pole_a, g.pole_b}, p);
                // Existing poles.
                if (g.pole_a > 0) add_scaled(acc, {g.kernel, g.mask, g.pole_a + 1, g.pole_b}, g.poly, -g.pole_a);
                if (g.pole_b > 0) add_scaled(acc, {g.kernel, g.mask, g.pole_a, g.pole_b + 1}, g.poly, -g.pole_b);
                // Window: W'/W = 2 s^2 ((x-a)^-3 + (x-b)^-3).
                if (windowed) {
                    add_scaled(acc, {g.kernel, g.mask, g.pole_a + 3, g.pole_b}, g.poly, two_s2);
                    add_scaled(acc, {g.kernel, g.mask, g.pole_a, g.pole_b + 3}, g.poly, two_s2);
                }
            }
            d->assign(std::move(acc));
            return d;
        }

        cplx eval(double x) const {
            if (groups.empty()) return 0.0;
            const double a = model.a, b = model.b;
            double wexp = 0.0;
            std::array<double, kMaxPole> pa, pb;
            if (windowed) {
                if (x == a || x == b) return 0.0;
                const double ta = x - a, tb = x - b;
                const double s2 = sharpness * sharpness;
                wexp = -s2 / (ta * ta) - s2 / (tb * tb);
                if (wexp < -745.0) return 0.0;
                pa[0] = pb[0] = 1.0;
                for (int i = 1; i <= max_pole_a; ++i) pa[i] = pa[i - 1] / ta;
                for (int j = 1; j <= max_pole_b; ++j) pb[j] = pb[j - 1] / tb;
            } else {
                pa[0] = pb[0] = 1.0;
            }
            const std::uint8_t region = x < a ? kLeft : (x > b ? kRight : kInside);

            cplx total = 0.0;
            int current = -1;
            cplx factor = 0.0;
            double y = 0.0;
            bool skip = false;
            for (const auto& g : groups) {
                if (g.kernel != current) {
                    current = g.kernel;
                    const auto& k = kernels[current];
                    y = (x - k.center) / k.width;
                    const double e = wexp - y * y;
                    skip = e < -745.0;
                    if (!skip) factor = std::polar(std::exp(e), k.momentum * x);
                }
                if (skip || !(g.mask & region)) continue;
                cplx p = g.poly.back();
                for (std::size_t m = g.poly.size() - 1; m-- > 0;) p = p * y + g.poly[m];
                total += factor * (p * (pa[g.pole_a] * pb[g.pole_b]));
            }
            return total;
        }
    };

    static constexpr int kMaxPole = 64;

    static std::shared_ptr<Data> blank(const BarrierModel& model, bool windowed) {
        model.validate();
        auto d = std::make_shared<Data>();
        d->model = model;
        d->windowed = windowed;
        d->sharpness = 0.1 * model.width();
        return d;
    }

    explicit TestFunction(std::shared_ptr<const Data> d) : data_(std::move(d)) {}

    static void add_into(std::map<Key, std::vector<cplx>>& acc, const Key& key, const std::vector<cplx>& p) {
        auto& dst = acc[key];
        if (dst.size() < p.size()) dst.resize(p.size(), 0.0);
        for (std::size_t i = 0; i < p.size(); ++i) dst[i] += p[i];
    }

    static void add_scaled(std::map<Key, std::vector<cplx>>& acc, const Key& key, const std::vector<cplx>& p,
                           double s) {
        auto& dst = acc[key];
        if (dst.size() < p.size()) dst.resize(p.size(), 0.0);
        for (std::size_t i = 0; i < p.size(); ++i) dst[i] += s * p[i];
    }

    static TestFunction combine(const TestFunction& f, const TestFunction& g, double sign) {
        const auto& df = *f.data_;
        const auto& dg = *g.data_;
        if (!(df.model == dg.model) || df.windowed != dg.windowed || df.sharpness != dg.sharpness)
            throw DomainError("cannot combine test functions over different models or windows");
        auto d = df.blank_copy();
        d->order = std::max(df.order, dg.order);
        std::map<Key, std::vector<cplx>> acc;
        for (const auto& gr : df.groups) add_into(acc, {gr.kernel, gr.mask, gr.pole_a, gr.pole_b}, gr.poly);
        for (const auto& gr : dg.groups) {
            const auto& k = dg.kernels[gr.kernel];
            auto it = std::find(d->kernels.begin(), d->kernels.end(), k);
            const int idx = static_cast<int>(it - d->kernels.begin());
            if (it == d->kernels.end()) d->kernels.push_back(k);
            add_scaled(acc, {idx, gr.mask, gr.pole_a, gr.pole_b}, gr.poly, sign);
        }
        d->assign(std::move(acc));
        return TestFunction(std::move(d));
    }

    std::shared_ptr<const Data> data_;
};

/// Builds the windowed Gaussian packet described by `desc`.
inline TestFunction build_test_function(const PacketDescriptor& desc, const BarrierModel& model) {
    return TestFunction::packet(desc, model);
}

/// n-th derivative of f at x, from the exact symbolic derivative.
inline cplx evaluate(const TestFunction& f, double x, int n = 0) {
    if (n == 0) return f(x);
    return f.derivative(n)(x);
}

/// Q f = x f, P f = -i hbar f', H f = -(hbar^2 / 2m) f'' + V f.
inline TestFunction apply_observable(Observable obs, const TestFunction& f) {
    const auto& m = f.model();
    switch (obs) {
        case Observable::Q: return f.times_x();
        case Observable::P: return f.derivative(1).scaled(cplx(0.0, -m.hbar));
        case Observable::H:
            return f.derivative(2).scaled(-m.hbar * m.hbar / (2.0 * m.mass)) + f.times_potential();
    }
    throw DomainError("unknown observable");
}

/// Break points a, b for integrals involving test functions.
inline std::array<double, 2> barrier_breaks(const BarrierModel& m) { return {m.a, m.b}; }

/// (f, g) = integral of conj(f) g over the line.
inline cplx inner_product(const TestFunction& f, const TestFunction& g, const QuadratureSpec& spec = {}) {
    if (f.is_zero() || g.is_zero()) return 0.0;
    const Interval supp = f.support().intersect(g.support());
    if (supp.empty()) return 0.0;
    const auto br = barrier_breaks(f.model());
    return integrate_line([&](double x) { return std::conj(f(x)) * g(x); }, spec, br, supp).value;
}

/// ||f||_2.
inline double l2_norm(const TestFunction& f, const QuadratureSpec& spec = {}) {
    if (f.is_zero()) return 0.0;
    const auto br = barrier_breaks(f.model());
    const auto r = integrate_line([&](double x) { return std::norm(f(x)); }, spec, br, f.support());
    return std::sqrt(std::max(0.0, r.value));
}

/// f / ||f||.
inline TestFunction normalized(const TestFunction& f, const QuadratureSpec& spec = {}) {
    const double n = l2_norm(f, spec);
    if (!(n > 0.0)) throw DomainError("cannot normalize the zero function");
    return f.scaled(1.0 / n);
}

/// ||P^n Q^m H^l f||_2.
inline double seminorm(const TestFunction& f, int n, int m, int l, const QuadratureSpec& spec = {}) {
    if (n < 0 || m < 0 || l < 0) throw DomainError("seminorm indices must be non-negative");
    if (n + m + 2 * l > f.order_cap())
        throw CapabilityError("seminorm order n+m+2l = " + std::to_string(n + m + 2 * l) + " exceeds the order cap");
    TestFunction g = f;
    for (int i = 0; i < l; ++i) g = apply_observable(Observable::H, g);
    for (int i = 0; i < m; ++i) g = apply_observable(Observable::Q, g);
    for (int i = 0; i < n; ++i) g = apply_observable(Observable::P, g);
    return l2_norm(g, spec);
}

}  // namespace rhsb
