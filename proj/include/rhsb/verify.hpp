#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "rhsb/eigenbasis.hpp"
#include "rhsb/errors.hpp"
#include "rhsb/model.hpp"
#include "rhsb/quadrature.hpp"
#include "rhsb/scattering.hpp"
#include "rhsb/testspace.hpp"
#include "rhsb/transforms.hpp"

namespace rhsb {

struct Witness {
    std::string descriptor;
    double residual;
};

struct ResidualReport {
    std::string check_name;
    double residual = 0.0;
    double tolerance = 0.0;
    std::vector<Witness> witnesses;
    bool passed = true;
    bool inconclusive = false;

    void add(std::string descriptor, double r) {
        witnesses.push_back({std::move(descriptor), r});
        if (!(r <= residual)) residual = r;  // NaN propagates
    }

    void finish() {
        passed = residual <= tolerance;
        if (witnesses.empty()) witnesses.push_back({"(none)", residual});
    }
};

/// A battery member: a test function with a printable descriptor.
struct BatteryItem {
    std::string label;
    TestFunction f;
};

inline std::string fmt_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string describe(const PacketDescriptor& d) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "gaussian_packet(center=%g,width=%g,momentum=%g,poly_degree=%d)", d.center,
                  d.width, d.momentum, d.poly_degree);
    return buf;
}

/// Six packets on both sides of the barrier moving toward and away from it.
inline std::vector<PacketDescriptor> default_packets() {
    return {{-20.0, 1.0, 0.0, 0}, {-20.0, 1.0, 3.0, 0}, {-20.0, 2.0, -3.0, 0},
            {21.0, 2.0, 0.0, 0},  {21.0, 1.0, -3.0, 0}, {21.0, 2.0, 3.0, 0}};
}

inline std::vector<BatteryItem> make_battery(const std::vector<PacketDescriptor>& packets, const BarrierModel& model) {
    std::vector<BatteryItem> out;
    for (const auto& p : packets) out.push_back({describe(p), build_test_function(p, model)});
    return out;
}

inline std::vector<BatteryItem> default_battery(const BarrierModel& model) {
    return make_battery(default_packets(), model);
}

enum class Placement {
    far,   ///< centers at distance 15..25 from the barrier, either side
    near,  ///< centers within a few widths of the barrier
};

/// Seeded random packets.
inline std::vector<PacketDescriptor> random_packets(std::uint64_t seed, int count, Placement where,
                                                    const BarrierModel& model) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<PacketDescriptor> out;
    for (int i = 0; i < count; ++i) {
        PacketDescriptor d;
        d.width = 1.0 + u(rng);
        d.momentum = -3.0 + 6.0 * u(rng);
        d.poly_degree = static_cast<int>(u(rng) * 2.0);
        if (where == Placement::far) {
            const double dist = 15.0 + 10.0 * u(rng);
            d.center = u(rng) < 0.5 ? model.a - dist : model.b + dist;
        } else {
            d.center = model.a - 3.0 + (model.width() + 6.0) * u(rng);
            d.width = 0.5 + 1.5 * u(rng);
        }
        out.push_back(d);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Eigen equations

/// Bra action <(sign)E|f>_c; its integrand is the exact conjugate of the ket action's.
inline cplx bra_action(const TestFunction& f, const EigenfunctionHandle& h, const QuadratureSpec& spec) {
    if (f.is_zero()) return 0.0;
    const auto br = barrier_breaks(f.model());
    return integrate_line([&](double x) { return std::conj(h(x)) * f(x); }, spec, br, f.support()).value;
}

inline cplx ket_action(const TestFunction& f, const EigenfunctionHandle& h, const QuadratureSpec& spec) {
    if (f.is_zero()) return 0.0;
    const auto br = barrier_breaks(f.model());
    return integrate_line([&](double x) { return std::conj(f(x)) * h(x); }, spec, br, f.support()).value;
}

inline cplx plane_wave_ket_action(const TestFunction& f, double p, const QuadratureSpec& spec) {
    if (f.is_zero()) return 0.0;
    const auto& m = f.model();
    const auto br = barrier_breaks(m);
    return integrate_line([&](double x) { return std::conj(f(x)) * eval_plane_wave(m, p, x); }, spec, br,
                          f.support())
        .value;
}

/// Smeared eigen-equation <A f|lambda> = lambda <f|lambda>.
///
/// H: lambda = E, kets of the given channel and sign; residual normalized by (1+E)||f||.
/// P: lambda = p (the `value` argument), plane-wave kets; normalized by (1+|p|)||f||.
/// Q: lambda = x0; the position kernel acts by evaluation, so the identity
///    route compares (Qf)(x0) with x0 f(x0); normalized by (1+|x0|)||f||.
inline ResidualReport check_eigen_equation(const BarrierModel& model, double value, Channel channel, SignLabel sign,
                                           const std::vector<BatteryItem>& battery, const QuadratureSpec& spec = {},
                                           Observable obs = Observable::H, double tolerance = -1.0) {
    if (battery.empty()) throw DomainError("battery must not be empty");
    ResidualReport rep;
    rep.check_name = "eigen_equation[" + std::string(to_string(obs)) + "," + fmt_num(value);
    if (obs == Observable::H) rep.check_name += "," + std::string(to_string(channel)) + std::string(to_string(sign));
    rep.check_name += "]";
    rep.tolerance = tolerance > 0.0 ? tolerance : (obs == Observable::H ? 1e-6 : (obs == Observable::P ? 1e-8 : 1e-12));

    if (obs == Observable::H) {
        const auto h = EigenfunctionHandle::make(model, value, channel, sign);
        for (const auto& item : battery) {
            if (item.f.is_zero()) {
                rep.add(item.label, 0.0);
                continue;
            }
            const cplx lhs = ket_action(apply_observable(Observable::H, item.f), h, spec);
            const cplx rhs = value * ket_action(item.f, h, spec);
            rep.add(item.label, std::abs(lhs - rhs) / ((1.0 + value) * l2_norm(item.f, spec)));
        }
    } else if (obs == Observable::P) {
        for (const auto& item : battery) {
            if (item.f.is_zero()) {
                rep.add(item.label, 0.0);
                continue;
            }
            const cplx lhs = plane_wave_ket_action(apply_observable(Observable::P, item.f), value, spec);
            const cplx rhs = value * plane_wave_ket_action(item.f, value, spec);
            rep.add(item.label, std::abs(lhs - rhs) / ((1.0 + std::abs(value)) * l2_norm(item.f, spec)));
        }
    } else {
        for (const auto& item : battery) {
            if (item.f.is_zero()) {
                rep.add(item.label, 0.0);
                continue;
            }
            const cplx lhs = std::conj(apply_observable(Observable::Q, item.f)(value));
            const cplx rhs = value * std::conj(item.f(value));
            rep.add(item.label, std::abs(lhs - rhs) / ((1.0 + std::abs(value)) * l2_norm(item.f, spec)));
        }
    }
    rep.finish();
    return rep;
}

inline constexpr double kConjugationTolerance = 1e-12;

/// Bras as conjugated kets, and the smeared eigenbra equation <E|Hf> = E <E|f>.
/// The conjugation residual is scaled by tolerance / 1e-12 so that one
/// threshold covers both parts.
inline ResidualReport check_eigenbra_conjugation(const BarrierModel& model, double energy, Channel channel,
                                                 SignLabel sign, const std::vector<BatteryItem>& battery,
                                                 const QuadratureSpec& spec = {}, double tolerance = 1e-6) {
    if (battery.empty()) throw DomainError("battery must not be empty");
    ResidualReport rep;
    rep.check_name = "eigenbra_conjugation[" + fmt_num(energy) + "," + std::string(to_string(channel)) +
                     std::string(to_string(sign)) + "]";
    rep.tolerance = tolerance;
    const auto h = EigenfunctionHandle::make(model, energy, channel, sign);
    for (const auto& item : battery) {
        if (item.f.is_zero()) {
            rep.add(item.label, 0.0);
            continue;
        }
        const double norm = l2_norm(item.f, spec);
        const cplx bra = bra_action(item.f, h, spec);
        const cplx ket = ket_action(item.f, h, spec);
        const double conj_res = std::abs(bra - std::conj(ket)) / norm;
        const cplx bra_h = bra_action(apply_observable(Observable::H, item.f), h, spec);
        const double eq_res = std::abs(bra_h - energy * bra) / ((1.0 + energy) * norm);
        rep.add(item.label, std::max(eq_res, conj_res * tolerance / kConjugationTolerance));
    }
    rep.finish();
    return rep;
}

// ---------------------------------------------------------------------------
// Delta normalization

/// height * exp(-((v - center) / width)^2), in energy or momentum.
struct GaussianProbe {
    double center = 5.0;
    double width = 0.5;
    double height = 1.0;

    double operator()(double v) const {
        const double y = (v - center) / width;
        return height * std::exp(-y * y);
    }
};

inline constexpr double kProbeSpan = 6.4;  ///< probe treated as zero beyond center +- 6.4 width

namespace detail {

inline CompositeRule join(std::initializer_list<CompositeRule> parts) {
    CompositeRule r;
    for (const auto& p : parts) {
        r.nodes.insert(r.nodes.end(), p.nodes.begin(), p.nodes.end());
        r.weights.insert(r.weights.end(), p.weights.begin(), p.weights.end());
    }
    return r;
}

}  // namespace detail

/// Smeared <E',c'|E,channel> = delta(E-E') delta_{c' channel}: the probe amplitude
/// is synthesized into a wave function with kets of the given sign and analyzed
/// again with the bras; the residual is max |out(E',c') - probe(E') delta| / height
/// over a grid of E' across the probe, including the cross channel.
inline ResidualReport check_delta_normalization(const BarrierModel& model, SignLabel sign, const GaussianProbe& probe,
                                                Channel channel, double tolerance = 1e-5, int grid_points = 33) {
    ResidualReport rep;
    rep.check_name = "delta_normalization[E," + std::string(to_string(channel)) + std::string(to_string(sign)) + "]";
    rep.tolerance = tolerance;
    if (!(probe.width > 0.0)) throw DomainError("probe width must be positive");
    const double e_lo = probe.center - kProbeSpan * probe.width;
    const double e_hi = probe.center + kProbeSpan * probe.width;
    if (!(e_lo > 0.0)) throw DomainError("probe must stay away from E = 0");
    if (probe.height == 0.0) {
        rep.add("zero probe", 0.0);
        rep.finish();
        return rep;
    }

    const double k_lo = model.k_from_energy(e_lo), k_hi = model.k_from_energy(e_hi);
    const double k0 = model.k_from_energy(probe.center);
    // Width of the probe in k and the spatial extent of the synthesized packet.
    const double dk = probe.width / model.energy_jacobian(k0);
    const double radius = 12.0 / dk + std::max(std::abs(model.a), std::abs(model.b));

    const auto krule = CompositeRule::make(k_lo, k_hi, std::min(0.5, 6.0 / radius), 16);
    const double xw = std::min(0.5, 3.0 / k_hi);
    const auto xrule = detail::join({CompositeRule::make(-radius, model.a, xw, 16),
                                     CompositeRule::make(model.a, model.b, xw, 16),
                                     CompositeRule::make(model.b, radius, xw, 16)});

    const int ch = channel == Channel::left ? 0 : 1;
    std::vector<ScatteringSolution> sols;
    std::vector<double> kweight;
    for (std::size_t j = 0; j < krule.nodes.size(); ++j) {
        const double k = krule.nodes[j];
        sols.push_back(solve_matching_at_k(model, k));
        kweight.push_back(krule.weights[j] * model.energy_jacobian(k) * eigen_prefactor(model, k) *
                          probe(model.energy_from_k(k)));
    }
    std::vector<cplx> psi(xrule.nodes.size());
    for (std::size_t i = 0; i < xrule.nodes.size(); ++i) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < sols.size(); ++j) {
            const auto chi = reduced_eigenfunctions(model, sols[j], xrule.nodes[i], sign);
            s += kweight[j] * (ch == 0 ? chi.left : chi.right);
        }
        psi[i] = s;
    }

    double leak = 0.0, diag = 0.0;
    for (int n = 0; n < grid_points; ++n) {
        const double e = e_lo + (e_hi - e_lo) * (n + 0.5) / grid_points;
        const double k = model.k_from_energy(e);
        const auto sol = solve_matching_at_k(model, k);
        cplx out[2] = {0.0, 0.0};
        for (std::size_t i = 0; i < xrule.nodes.size(); ++i) {
            const auto chi = reduced_eigenfunctions(model, sol, xrule.nodes[i], sign);
            out[0] += xrule.weights[i] * std::conj(chi.left) * psi[i];
            out[1] += xrule.weights[i] * std::conj(chi.right) * psi[i];
        }
        const double pre = eigen_prefactor(model, k);
        for (int c = 0; c < 2; ++c) {
            const double expected = c == ch ? probe(e) : 0.0;
            const double r = std::abs(pre * out[c] - expected) / std::abs(probe.height);
            (c == ch ? diag : leak) = std::max(c == ch ? diag : leak, r);
        }
    }
    rep.add("same channel", diag);
    rep.add("cross channel", leak);
    rep.finish();
    return rep;
}

/// Momentum analogue: <p'|p> = delta(p - p') smeared with a Gaussian probe in p.
inline ResidualReport check_delta_normalization_momentum(const BarrierModel& model, const GaussianProbe& probe,
                                                         double tolerance = 1e-8, int grid_points = 33) {
    ResidualReport rep;
    rep.check_name = "delta_normalization[p]";
    rep.tolerance = tolerance;
    if (!(probe.width > 0.0)) throw DomainError("probe width must be positive");
    if (probe.height == 0.0) {
        rep.add("zero probe", 0.0);
        rep.finish();
        return rep;
    }
    const double p_lo = probe.center - kProbeSpan * probe.width;
    const double p_hi = probe.center + kProbeSpan * probe.width;
    const double radius = 12.0 * model.hbar / probe.width;
    const double pmax = std::max(std::abs(p_lo), std::abs(p_hi));
    const auto prule = CompositeRule::make(p_lo, p_hi, std::min(0.5, 6.0 * model.hbar / radius), 16);
    const auto xrule = CompositeRule::make(-radius, radius, std::min(0.5, 3.0 * model.hbar / pmax), 16);

    std::vector<cplx> psi(xrule.nodes.size());
    for (std::size_t i = 0; i < xrule.nodes.size(); ++i) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < prule.nodes.size(); ++j)
            s += prule.weights[j] * probe(prule.nodes[j]) * eval_plane_wave(model, prule.nodes[j], xrule.nodes[i]);
        psi[i] = s;
    }
    double worst = 0.0;
    for (int n = 0; n < grid_points; ++n) {
        const double p = p_lo + (p_hi - p_lo) * (n + 0.5) / grid_points;
        cplx out = 0.0;
        for (std::size_t i = 0; i < xrule.nodes.size(); ++i)
            out += xrule.weights[i] * std::conj(eval_plane_wave(model, p, xrule.nodes[i])) * psi[i];
        worst = std::max(worst, std::abs(out - probe(p)) / std::abs(probe.height));
    }
    rep.add("plane waves", worst);
    rep.finish();
    return rep;
}

// ---------------------------------------------------------------------------
// Commutators

/// (f,[Q,P]g) = i hbar (f,g); (f,[H,Q]g) = -(i hbar/m)(f,Pg); (f,[H,P]g) = 0.
/// Each product is an independent quadrature; residuals are normalized by ||f|| ||g||.
inline ResidualReport check_commutators(const TestFunction& f, const TestFunction& g, const QuadratureSpec& spec = {},
                                        double tolerance = 1e-8, const std::string& label = "") {
    ResidualReport rep;
    rep.check_name = "commutators" + (label.empty() ? std::string() : "[" + label + "]");
    rep.tolerance = tolerance;
    if (f.is_zero() || g.is_zero()) {
        for (const char* n : {"[Q,P]", "[H,Q]", "[H,P]"}) rep.add(n, 0.0);
        rep.finish();
        return rep;
    }
    const auto& m = f.model();
    const cplx ih(0.0, m.hbar);
    auto ip = [&](const TestFunction& h) { return inner_product(f, h, spec); };
    auto A = [](Observable o, const TestFunction& h) { return apply_observable(o, h); };
    using O = Observable;
    const double scale = l2_norm(f, spec) * l2_norm(g, spec);

    const cplx qp = ip(A(O::Q, A(O::P, g))) - ip(A(O::P, A(O::Q, g)));
    rep.add("[Q,P]", std::abs(qp - ih * ip(g)) / scale);
    const cplx hq = ip(A(O::H, A(O::Q, g))) - ip(A(O::Q, A(O::H, g)));
    rep.add("[H,Q]", std::abs(hq + ih / m.mass * ip(A(O::P, g))) / scale);
    const cplx hp = ip(A(O::H, A(O::P, g))) - ip(A(O::P, A(O::H, g)));
    rep.add("[H,P]", std::abs(hp) / scale);
    rep.finish();
    return rep;
}

// ---------------------------------------------------------------------------
// Membership and invariance

struct SeminormEntry {
    int n, m, l;
    double value;
};

/// ||P^n Q^m H^l f|| for all n + m + 2l <= max_order.
inline std::vector<SeminormEntry> seminorm_battery(const TestFunction& f, int max_order = 8,
                                                   const QuadratureSpec& spec = {}) {
    std::vector<SeminormEntry> out;
    for (int l = 0; 2 * l <= max_order; ++l) {
        TestFunction hl = f;
        for (int i = 0; i < l; ++i) hl = apply_observable(Observable::H, hl);
        for (int m = 0; 2 * l + m <= max_order; ++m) {
            TestFunction qm = hl;
            for (int i = 0; i < m; ++i) qm = apply_observable(Observable::Q, qm);
            TestFunction pn = qm;
            for (int n = 0; 2 * l + m + n <= max_order; ++n) {
                if (n > 0) pn = apply_observable(Observable::P, pn);
                out.push_back({n, m, l, l2_norm(pn, spec)});
            }
        }
    }
    return out;
}

/// Applies every word in {Q, P, H} of total order <= max_total_order
/// (Q and P count 1, H counts 2) and checks that each image has a finite
/// L2 norm. Residual 0 when all are finite, 1 otherwise; symbolic growth
/// beyond the capability limits yields an inconclusive report.
inline ResidualReport check_invariance_battery(const TestFunction& f, int max_total_order,
                                               const QuadratureSpec& spec = {}, const std::string& label = "") {
    ResidualReport rep;
    rep.check_name = "invariance[" + (label.empty() ? std::string("f") : label) + ",order=" +
                     std::to_string(max_total_order) + "]";
    rep.tolerance = 0.0;
    if (max_total_order < 0 || max_total_order > f.order_cap())
        throw CapabilityError("max_total_order exceeds the order cap");

    double largest = 0.0;
    std::string largest_word = "1";
    bool finite = true;
    std::function<void(const TestFunction&, const std::string&, int)> visit = [&](const TestFunction& g,
                                                                                  const std::string& word, int order) {
        const double n = l2_norm(g, spec);
        if (!std::isfinite(n)) {
            finite = false;
            rep.witnesses.push_back({word.empty() ? "1" : word, n});
        }
        if (n > largest) {
            largest = n;
            largest_word = word.empty() ? "1" : word;
        }
        for (auto [o, w] : {std::pair{Observable::Q, 1}, std::pair{Observable::P, 1}, std::pair{Observable::H, 2}}) {
            if (order + w > max_total_order) continue;
            visit(apply_observable(o, g), std::string(to_string(o)) + word, order + w);
        }
    };
    try {
        visit(f, "", 0);
    } catch (const CapabilityError& e) {
        rep.inconclusive = true;
        rep.witnesses.push_back({std::string("inconclusive: ") + e.what(), 0.0});
    }
    rep.residual = finite ? 0.0 : 1.0;
    rep.witnesses.insert(rep.witnesses.begin(), Witness{"largest norm: " + largest_word, largest});
    rep.finish();
    return rep;
}

/// Growth of ||Q g|| restricted to [-R, R] as R increases.
struct DomainProbe {
    std::vector<double> radii;
    std::vector<double> q_norms;
    double growth = 0.0;  ///< ratio of the last two truncated norms
    bool member = true;
};

/// Classifies an L2 function as outside D(Q) when its truncated ||Q g||
/// keeps growing with the truncation radius.
inline DomainProbe probe_position_domain(const std::function<cplx(double)>& g,
                                         std::vector<double> radii = {10.0, 100.0, 1000.0},
                                         const QuadratureSpec& spec = {}, double growth_threshold = 1.5) {
    DomainProbe out;
    out.radii = radii;
    for (double r : radii) {
        QuadratureSpec s = spec;
        s.spatial_radius = r;
        s.max_subdivisions = std::max(spec.max_subdivisions, 8000);
        const auto v = integrate_adaptive([&](double x) { return x * x * std::norm(g(x)); }, -r, r, s, {}, 1.0);
        out.q_norms.push_back(std::sqrt(std::max(0.0, v.value)));
    }
    if (out.q_norms.size() >= 2) {
        const double prev = out.q_norms[out.q_norms.size() - 2];
        out.growth = prev > 0.0 ? out.q_norms.back() / prev : std::numeric_limits<double>::infinity();
        out.member = out.growth <= growth_threshold;
    }
    return out;
}

/// Report form of the non-member probe for 1/(x+i): passes when the
/// function is recognized as outside D(Q).
inline ResidualReport check_non_member(const QuadratureSpec& spec = {}) {
    ResidualReport rep;
    rep.check_name = "non_member[1/(x+i)]";
    rep.tolerance = 0.0;
    const auto p = probe_position_domain([](double x) { return 1.0 / cplx(x, 1.0); }, {10.0, 100.0, 1000.0}, spec);
    for (std::size_t i = 0; i < p.radii.size(); ++i) rep.witnesses.push_back({"||Qg|| on R=" + fmt_num(p.radii[i]), p.q_norms[i]});
    rep.residual = p.member ? 1.0 : 0.0;
    rep.finish();
    return rep;
}

// ---------------------------------------------------------------------------
// Default suite

enum class Suite : unsigned { eigen = 1, eigenbra = 2, delta = 4, commutators = 8, invariance = 16, all = 31 };

inline constexpr std::array<std::pair<std::string_view, Suite>, 5> kSuiteNames = {{
    {"eigen", Suite::eigen},
    {"eigenbra", Suite::eigenbra},
    {"delta", Suite::delta},
    {"commutators", Suite::commutators},
    {"invariance", Suite::invariance},
}};

struct SuiteOptions {
    unsigned selection = static_cast<unsigned>(Suite::all);
    double tolerance = -1.0;  ///< overrides every check's tolerance when positive
    std::uint64_t seed = 20240601;
    int invariance_order = 4;
};

/// Runs the selected checks with the default batteries.
inline std::vector<ResidualReport> run_suite(const BarrierModel& model, const QuadratureSpec& spec,
                                             const SuiteOptions& opt = {}) {
    if (opt.selection == 0) throw DomainError("empty suite selection");
    const auto battery = default_battery(model);
    const auto tol = [&](double dflt) { return opt.tolerance > 0.0 ? opt.tolerance : dflt; };
    const auto selected = [&](Suite s) { return (opt.selection & static_cast<unsigned>(s)) != 0; };
    std::vector<ResidualReport> out;

    const std::vector<double> energies = {0.5, 1.0, 2.0 + std::numbers::pi * std::numbers::pi, 20.0};
    if (selected(Suite::eigen)) {
        for (double e : energies)
            for (auto c : kChannels)
                for (auto s : {SignLabel::plus, SignLabel::minus})
                    out.push_back(check_eigen_equation(model, e, c, s, battery, spec, Observable::H, tol(1e-6)));
        for (double p : {-5.0, -1.0, 0.5, 3.0})
            out.push_back(check_eigen_equation(model, p, Channel::left, SignLabel::plus, battery, spec, Observable::P,
                                               tol(1e-8)));
        for (double x : {-20.0, 0.5 * (model.a + model.b), 21.0})
            out.push_back(check_eigen_equation(model, x, Channel::left, SignLabel::plus, battery, spec, Observable::Q,
                                               tol(1e-12)));
    }
    if (selected(Suite::eigenbra)) {
        for (double e : energies)
            for (auto c : kChannels)
                for (auto s : {SignLabel::plus, SignLabel::minus})
                    out.push_back(check_eigenbra_conjugation(model, e, c, s, battery, spec, tol(1e-6)));
    }
    if (selected(Suite::delta)) {
        const GaussianProbe probe{5.0, 0.5, 1.0};
        for (auto c : kChannels)
            for (auto s : {SignLabel::plus, SignLabel::minus})
                out.push_back(check_delta_normalization(model, s, probe, c, tol(1e-5)));
        out.push_back(check_delta_normalization_momentum(model, GaussianProbe{1.0, 1.0, 1.0}, tol(1e-8)));
    }
    if (selected(Suite::commutators)) {
        const auto pk = random_packets(opt.seed, 6, Placement::near, model);
        for (std::size_t i = 0; i + 1 < pk.size(); i += 2)
            out.push_back(check_commutators(build_test_function(pk[i], model), build_test_function(pk[i + 1], model),
                                            spec, tol(1e-8), describe(pk[i]) + ";" + describe(pk[i + 1])));
    }
    if (selected(Suite::invariance)) {
        for (const auto& item : battery) out.push_back(check_invariance_battery(item.f, opt.invariance_order, spec, item.label));
        out.push_back(check_non_member(spec));
    }
    return out;
}

}  // namespace rhsb
