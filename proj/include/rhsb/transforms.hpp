#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <utility>

#include "rhsb/eigenbasis.hpp"
#include "rhsb/errors.hpp"
#include "rhsb/model.hpp"
#include "rhsb/quadrature.hpp"
#include "rhsb/scattering.hpp"
#include "rhsb/testspace.hpp"

namespace rhsb {

/// Controls for the amplitude caches.
struct TransformOptions {
    bool cached = true;
    int order = 32;              ///< Chebyshev nodes per cache panel
    double initial_width = 4.0;  ///< initial cache panel width in k (or p / hbar)
    double interp_factor = 0.1;  ///< cache tolerance relative to abs_tol
    double sample_factor = 0.1;  ///< per-sample quadrature tolerance relative to abs_tol
};

/// Channel-resolved energy amplitudes _c<(sign)E|f>.
///
/// Internally the amplitude is held in reduced form
///   a_c(k) = integral of conj(chi_c(x, k)) f(x) dx,
/// where chi is the eigenfunction without its continuum prefactor; a_c is
/// smooth down to k = 0, which makes it suitable for interpolation.
/// amplitude(E, c) = prefactor(k) * a_c(k).
class EnergyAmplitude {
public:
    using Reduced = std::function<CVec<2>(double k)>;

    EnergyAmplitude(const BarrierModel& model, SignLabel sign, double k_max, Reduced direct,
                    std::shared_ptr<const ChebyshevTable<CVec<2>>> cache = nullptr)
        : model_(model), sign_(sign), k_max_(k_max), direct_(std::move(direct)), cache_(std::move(cache)) {}

    /// Amplitude given pointwise in energy (for probes and externally defined inputs).
    static EnergyAmplitude from_function(const BarrierModel& model, SignLabel sign,
                                         std::function<cplx(double, Channel)> amp, double k_max) {
        auto reduced = [model, amp = std::move(amp)](double k) {
            CVec<2> r;
            if (!(k > 0.0)) return r;
            const double e = model.energy_from_k(k);
            const double pre = eigen_prefactor(model, k);
            r[0] = amp(e, Channel::left) / pre;
            r[1] = amp(e, Channel::right) / pre;
            return r;
        };
        return EnergyAmplitude(model, sign, k_max, std::move(reduced));
    }

    const BarrierModel& model() const noexcept { return model_; }
    SignLabel sign() const noexcept { return sign_; }
    double k_max() const noexcept { return k_max_; }
    bool cached() const noexcept { return cache_ != nullptr; }
    double interpolation_error() const noexcept { return cache_ ? cache_->max_error() : 0.0; }
    const ChebyshevTable<CVec<2>>* cache() const noexcept { return cache_.get(); }

    CVec<2> reduced(double k) const {
        if (!(k > 0.0)) return {};
        if (cache_ && k <= cache_->hi()) return (*cache_)(k);
        return direct_ ? direct_(k) : CVec<2>{};
    }

    /// Uncached reduced amplitude.
    CVec<2> reduced_direct(double k) const { return (k > 0.0 && direct_) ? direct_(k) : CVec<2>{}; }

    cplx operator()(double energy, Channel c) const {
        if (!(energy > 0.0)) throw DomainError("energy must lie in the open continuous spectrum");
        const double k = model_.k_from_energy(energy);
        return eigen_prefactor(model_, k) * reduced(k)[c == Channel::left ? 0 : 1];
    }

private:
    BarrierModel model_;
    SignLabel sign_;
    double k_max_;
    Reduced direct_;
    std::shared_ptr<const ChebyshevTable<CVec<2>>> cache_;
};

namespace detail {

inline QuadratureSpec sample_spec(const QuadratureSpec& spec, const TransformOptions& opt) {
    QuadratureSpec s = spec;
    s.abs_tol = spec.abs_tol * opt.sample_factor;
    return s;
}

/// Reduced amplitudes of f at wave number k for both channels.
inline CVec<2> reduced_energy_amplitude(const TestFunction& f, SignLabel sign, double k, const QuadratureSpec& spec) {
    if (f.is_zero() || !(k > 0.0)) return {};
    const auto& model = f.model();
    const auto sol = solve_matching_at_k(model, k);
    const Interval supp = f.support();
    const auto br = barrier_breaks(model);
    auto integrand = [&](double x) {
        const auto chi = reduced_plus_eigenfunctions(model, sol, x);
        const cplx fx = f(x);
        CVec<2> v;
        if (sign == SignLabel::plus) {
            v[0] = std::conj(chi.left) * fx;
            v[1] = std::conj(chi.right) * fx;
        } else {
            v[0] = chi.left * fx;
            v[1] = chi.right * fx;
        }
        return v;
    };
    return integrate_line(integrand, spec, br, supp).value;
}

}  // namespace detail

/// Energy analysis of f in the (sign) basis.
inline EnergyAmplitude energy_transform(const TestFunction& f, SignLabel sign, const QuadratureSpec& spec = {},
                                        const TransformOptions& opt = {}) {
    spec.validate();
    const auto sspec = detail::sample_spec(spec, opt);
    auto direct = [f, sign, sspec](double k) { return detail::reduced_energy_amplitude(f, sign, k, sspec); };
    if (!opt.cached || f.is_zero()) return EnergyAmplitude(f.model(), sign, spec.k_max, direct);
    auto table = std::make_shared<ChebyshevTable<CVec<2>>>(ChebyshevTable<CVec<2>>::build(
        direct, 0.0, spec.k_max, opt.initial_width, opt.order, opt.interp_factor * spec.abs_tol,
        1e-4 * opt.initial_width));
    return EnergyAmplitude(f.model(), sign, spec.k_max, direct, std::move(table));
}

/// Single amplitude _c<(sign)E|f>, computed directly by one line integral.
inline cplx energy_amplitude(const TestFunction& f, SignLabel sign, double energy, Channel c,
                             const QuadratureSpec& spec = {}) {
    const auto w = wave_numbers(f.model(), energy);
    const double k = w.k.real();
    return eigen_prefactor(f.model(), k) *
           detail::reduced_energy_amplitude(f, sign, k, spec)[c == Channel::left ? 0 : 1];
}

/// Ket action <f|E(sign)>_c = integral of conj(f) <x|E(sign)>_c dx, computed as its own integral.
inline cplx ket_action(const TestFunction& f, SignLabel sign, double energy, Channel c,
                       const QuadratureSpec& spec = {}) {
    if (f.is_zero()) return 0.0;
    const auto h = EigenfunctionHandle::make(f.model(), energy, c, sign);
    const auto br = barrier_breaks(f.model());
    return integrate_line([&](double x) { return std::conj(f(x)) * h(x); }, spec, br, f.support()).value;
}

/// Sum over channels of integral of <x|E(sign)>_c amp(E, c) dE.
inline cplx synthesize_energy(const EnergyAmplitude& amp, double x, const QuadratureSpec& spec = {},
                              std::array<bool, 2> channels = {true, true}) {
    const auto& model = amp.model();
    auto integrand = [&](double k) -> cplx {
        if (!(k > 0.0)) return 0.0;
        const auto a = amp.reduced(k);
        if (a[0] == 0.0 && a[1] == 0.0) return 0.0;
        const auto sol = solve_matching_at_k(model, k);
        const auto chi = reduced_eigenfunctions(model, sol, x, amp.sign());
        cplx s = 0.0;
        if (channels[0]) s += chi.left * a[0];
        if (channels[1]) s += chi.right * a[1];
        return s;
    };
    return integrate_wavenumber(integrand, 0.0, amp.k_max(), spec).value / (2.0 * std::numbers::pi);
}

/// Sum over channels of integral of conj(amp_f) amp_g dE.
inline cplx energy_overlap(const EnergyAmplitude& f, const EnergyAmplitude& g, const QuadratureSpec& spec = {},
                           double k_lo = 0.0, double k_hi = std::numeric_limits<double>::infinity(),
                           const std::function<double(double)>& weight = {}) {
    const double hi = std::min({k_hi, f.k_max(), g.k_max()});
    auto integrand = [&](double k) -> cplx {
        const auto a = f.reduced(k);
        const auto b = g.reduced(k);
        cplx s = std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1];
        if (weight) s *= weight(k);
        return s;
    };
    return integrate_wavenumber(integrand, k_lo, hi, spec).value / (2.0 * std::numbers::pi);
}

// ---------------------------------------------------------------------------
// Momentum representation

/// <p|f> on p in [-p_max, p_max].
class MomentumAmplitude {
public:
    using Direct = std::function<cplx(double p)>;

    MomentumAmplitude(const BarrierModel& model, double p_max, Direct direct,
                      std::shared_ptr<const ChebyshevTable<cplx>> cache = nullptr)
        : model_(model), p_max_(p_max), direct_(std::move(direct)), cache_(std::move(cache)) {}

    const BarrierModel& model() const noexcept { return model_; }
    double p_max() const noexcept { return p_max_; }
    double interpolation_error() const noexcept { return cache_ ? cache_->max_error() : 0.0; }

    cplx operator()(double p) const {
        if (cache_ && p >= cache_->lo() && p <= cache_->hi()) return (*cache_)(p);
        return direct_ ? direct_(p) : 0.0;
    }

    cplx direct(double p) const { return direct_ ? direct_(p) : 0.0; }

private:
    BarrierModel model_;
    double p_max_;
    Direct direct_;
    std::shared_ptr<const ChebyshevTable<cplx>> cache_;
};

/// <p|f> = integral of e^{-ipx/hbar} f(x) dx / sqrt(2 pi hbar), one value.
inline cplx momentum_amplitude(const TestFunction& f, double p, const QuadratureSpec& spec = {}) {
    if (f.is_zero()) return 0.0;
    const auto& model = f.model();
    const auto br = barrier_breaks(model);
    return integrate_line([&](double x) { return std::conj(eval_plane_wave(model, p, x)) * f(x); }, spec, br,
                          f.support())
        .value;
}

/// Momentum analysis of f, cached over |p| <= hbar k_max.
inline MomentumAmplitude momentum_transform(const TestFunction& f, const QuadratureSpec& spec = {},
                                            const TransformOptions& opt = {}) {
    spec.validate();
    const auto sspec = detail::sample_spec(spec, opt);
    const double p_max = f.model().hbar * spec.k_max;
    auto direct = [f, sspec](double p) { return momentum_amplitude(f, p, sspec); };
    if (!opt.cached || f.is_zero()) return MomentumAmplitude(f.model(), p_max, direct);
    const double w = opt.initial_width * f.model().hbar;
    auto table = std::make_shared<ChebyshevTable<cplx>>(ChebyshevTable<cplx>::build(
        direct, -p_max, p_max, w, opt.order, opt.interp_factor * spec.abs_tol, 1e-4 * w));
    return MomentumAmplitude(f.model(), p_max, direct, std::move(table));
}

/// f(x) = integral of <x|p> <p|f> dp over |p| <= p_max.
inline cplx synthesize_momentum(const MomentumAmplitude& amp, double x, const QuadratureSpec& spec = {}) {
    const auto& model = amp.model();
    const std::array<double, 1> br{0.0};
    return integrate([&](double p) { return eval_plane_wave(model, p, x) * amp(p); }, -amp.p_max(), amp.p_max(),
                     spec, br, model.hbar)
        .value;
}

/// integral of conj(<p|f>) <p|g> w(p) dp.
inline cplx momentum_overlap(const MomentumAmplitude& f, const MomentumAmplitude& g, const QuadratureSpec& spec = {},
                             const std::function<double(double)>& weight = {}) {
    const double pm = std::min(f.p_max(), g.p_max());
    const std::array<double, 1> br{0.0};
    return integrate(
               [&](double p) {
                   cplx s = std::conj(f(p)) * g(p);
                   if (weight) s *= weight(p);
                   return s;
               },
               -pm, pm, spec, br, f.model().hbar)
        .value;
}

// ---------------------------------------------------------------------------
// Identities and spectral quantities

enum class Basis { position, momentum, energy_plus, energy_minus };

inline std::string_view to_string(Basis b) {
    switch (b) {
        case Basis::position: return "position";
        case Basis::momentum: return "momentum";
        case Basis::energy_plus: return "energy+";
        case Basis::energy_minus: return "energy-";
    }
    return "?";
}

/// Overlap (f, g) expanded in the given basis.
inline cplx basis_overlap(const TestFunction& f, const TestFunction& g, Basis basis, const QuadratureSpec& spec = {},
                          const TransformOptions& opt = {}) {
    switch (basis) {
        case Basis::position: return inner_product(f, g, spec);
        case Basis::momentum: return momentum_overlap(momentum_transform(f, spec, opt), momentum_transform(g, spec, opt), spec);
        case Basis::energy_plus:
        case Basis::energy_minus: {
            const auto s = basis == Basis::energy_plus ? SignLabel::plus : SignLabel::minus;
            return energy_overlap(energy_transform(f, s, spec, opt), energy_transform(g, s, spec, opt), spec);
        }
    }
    throw DomainError("unknown basis");
}

/// |(f, g) - basis-expanded overlap|.
inline double parseval_defect(const TestFunction& f, const TestFunction& g, Basis basis,
                              const QuadratureSpec& spec = {}, const TransformOptions& opt = {}) {
    return std::abs(inner_product(f, g, spec) - basis_overlap(f, g, basis, spec, opt));
}

/// Spectral-side matrix element of obs between f and g:
/// P: integral of p conj(<p|f>) <p|g> dp; Q: integral of x conj(f) g dx;
/// H: sum_c integral of E conj(amp_f) amp_g dE (plus basis unless `sign` says otherwise).
inline cplx spectral_matrix_element(Observable obs, const TestFunction& f, const TestFunction& g,
                                    const QuadratureSpec& spec = {}, const TransformOptions& opt = {},
                                    SignLabel sign = SignLabel::plus) {
    const auto& model = f.model();
    switch (obs) {
        case Observable::Q: {
            if (f.is_zero() || g.is_zero()) return 0.0;
            const Interval supp = f.support().intersect(g.support());
            if (supp.empty()) return 0.0;
            const auto br = barrier_breaks(model);
            return integrate_line([&](double x) { return x * std::conj(f(x)) * g(x); }, spec, br, supp).value;
        }
        case Observable::P:
            return momentum_overlap(momentum_transform(f, spec, opt), momentum_transform(g, spec, opt), spec,
                                    [](double p) { return p; });
        case Observable::H:
            return energy_overlap(energy_transform(f, sign, spec, opt), energy_transform(g, sign, spec, opt), spec,
                                  0.0, std::numeric_limits<double>::infinity(),
                                  [&model](double k) { return model.energy_from_k(k); });
    }
    throw DomainError("unknown observable");
}

/// Direct-side matrix element (f, A g).
inline cplx direct_matrix_element(Observable obs, const TestFunction& f, const TestFunction& g,
                                  const QuadratureSpec& spec = {}) {
    return inner_product(f, apply_observable(obs, g), spec);
}

struct MeanSpread {
    double mean;
    double spread;
};

/// <A> and Delta A of the state f.
inline MeanSpread expectation_uncertainty(Observable obs, const TestFunction& f, const QuadratureSpec& spec = {}) {
    const double nn = inner_product(f, f, spec).real();
    if (!(nn > 0.0)) throw DomainError("expectation value of the zero function");
    const auto af = apply_observable(obs, f);
    const double mean = inner_product(f, af, spec).real() / nn;
    const double second = inner_product(f, apply_observable(obs, af), spec).real() / nn;
    return {mean, std::sqrt(std::max(0.0, second - mean * mean))};
}

struct ProbabilityResult {
    double probability;
    double tail_estimate;  ///< bound on the weight above k_max when E_hi = infinity
};

/// Sum_c integral over [E_lo, E_hi] of |amp(E, c)|^2 dE for a normalized state f.
inline ProbabilityResult spectral_probability_detail(const EnergyAmplitude& amp, double e_lo, double e_hi,
                                                     const QuadratureSpec& spec = {}) {
    if (!(e_lo >= 0.0) || !(e_hi > e_lo)) throw DomainError("spectral window must satisfy 0 <= E_lo < E_hi");
    const auto& model = amp.model();
    const double k_lo = e_lo > 0.0 ? model.k_from_energy(e_lo) : 0.0;
    const double k_hi = std::isinf(e_hi) ? amp.k_max() : std::min(amp.k_max(), model.k_from_energy(e_hi));
    ProbabilityResult r{0.0, 0.0};
    if (k_hi > k_lo) r.probability = energy_overlap(amp, amp, spec, k_lo, k_hi).real();
    if (std::isinf(e_hi) || model.k_from_energy(e_hi) > amp.k_max()) {
        // A Gaussian-like tail beyond k_max weighs at most about |a(k_max)|^2 / (2 pi).
        const auto a = amp.reduced(amp.k_max());
        r.tail_estimate = (std::norm(a[0]) + std::norm(a[1])) / (2.0 * std::numbers::pi);
    }
    return r;
}

inline double spectral_probability(const TestFunction& f, double e_lo, double e_hi, SignLabel sign,
                                   const QuadratureSpec& spec = {}, const TransformOptions& opt = {}) {
    const double nn = inner_product(f, f, spec).real();
    if (std::abs(nn - 1.0) > 1e-8) throw DomainError("spectral_probability requires a normalized state");
    return spectral_probability_detail(energy_transform(f, sign, spec, opt), e_lo, e_hi, spec).probability;
}

}  // namespace rhsb
