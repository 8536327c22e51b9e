// Acceptance runner: one PASS/FAIL line per criterion with its runtime.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "rhsb/rhsb.hpp"
#include "support/ode_oracle.hpp"

using namespace rhsb;

namespace {

struct Outcome {
    bool passed = true;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

/// Tracks the worst value of a metric against its bound.
struct Worst {
    const char* label;
    double bound;
    double value = 0.0;
    std::string where = "-";
    bool seen = false;

    void see(double v, const std::string& at) {
        if (!seen || !(v <= value)) {
            seen = true;
            value = v;
            where = at;
        }
    }
    bool ok() const { return value < bound; }
    std::string str() const { return std::string(label) + "=" + fmt(value) + " (bound " + fmt(bound) + ", at " + where + ")"; }
};

Outcome combine(std::initializer_list<const Worst*> parts) {
    Outcome o;
    for (const Worst* w : parts) {
        o.passed = o.passed && w->ok();
        if (!o.detail.empty()) o.detail += "; ";
        o.detail += w->str();
    }
    return o;
}

double rel(cplx got, cplx want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, double(i) / (n - 1)));
    return out;
}

const BarrierModel kModel{};
const QuadratureSpec kSpec{};
constexpr std::uint64_t kSeed = 20240601;

const char* sign_name(SignLabel s) { return s == SignLabel::plus ? "+" : "-"; }

// 1 -------------------------------------------------------------------------
Outcome scattering_oracle() {
    Worst w{"max rel defect", 1e-8};
    for (double e : log_grid(0.01, 100.0, 50)) {
        const auto s = solve_matching(kModel, e);
        const auto o = oracle::solve(kModel, e);
        const double d = std::max({rel(s.T, o.T_l), rel(s.T_right, o.T_r), rel(s.R_l, o.R_l), rel(s.R_r, o.R_r),
                                   rel(s.A_l, o.A_l), rel(s.B_l, o.B_l), rel(s.A_r, o.A_r), rel(s.B_r, o.B_r)});
        w.see(d, "E=" + fmt(e));
    }
    return combine({&w});
}

// 2 -------------------------------------------------------------------------
Outcome unitarity() {
    Worst w{"max |S^dag S - I|", 1e-10};
    for (double e : log_grid(0.01, 100.0, 200)) w.see(unitarity_defect(s_matrix(kModel, e)), "E=" + fmt(e));
    return combine({&w});
}

// 3 -------------------------------------------------------------------------
Outcome spot_values() {
    const double sh = std::sinh(1.0);
    Worst t{"| |T(1)|^2 - 1/(1+sinh^2 1) |", 1e-8};
    t.see(std::abs(std::norm(solve_matching(kModel, 1.0).T) - 1.0 / (1.0 + sh * sh)), "E=1");
    Worst r{"| |T(2+pi^2)|^2 - 1 |", 1e-8};
    const double er = 2.0 + std::numbers::pi * std::numbers::pi;
    r.see(std::abs(std::norm(solve_matching(kModel, er).T) - 1.0), "E=2+pi^2");
    return combine({&t, &r});
}

// 4 -------------------------------------------------------------------------
Outcome reconstruction() {
    Worst w{"max |f - synth f| / ||f||", 1e-6};
    for (const auto& d : default_packets()) {
        const auto f = build_test_function(d, kModel);
        const double nf = l2_norm(f, kSpec);
        for (auto s : {SignLabel::plus, SignLabel::minus}) {
            const auto amp = energy_transform(f, s, kSpec);
            for (int i = 0; i < 50; ++i) {
                const double x = d.center - 4.0 * d.width + 8.0 * d.width * i / 49.0;
                w.see(std::abs(synthesize_energy(amp, x, kSpec) - f(x)) / nf,
                      describe(d) + " " + sign_name(s) + " x=" + fmt(x));
            }
        }
    }
    return combine({&w});
}

// 5 -------------------------------------------------------------------------
Outcome parseval() {
    Worst we{"energy defect / ||f|| ||g||", 1e-6};
    Worst wp{"momentum defect / ||f|| ||g||", 1e-8};
    const auto pk = random_packets(kSeed, 20, Placement::far, kModel);
    for (std::size_t i = 0; i + 1 < pk.size(); i += 2) {
        const auto f = build_test_function(pk[i], kModel);
        const auto g = build_test_function(pk[i + 1], kModel);
        const double scale = l2_norm(f, kSpec) * l2_norm(g, kSpec);
        const std::string at = "pair " + std::to_string(i / 2);
        we.see(parseval_defect(f, g, Basis::energy_plus, kSpec) / scale, at + " +");
        we.see(parseval_defect(f, g, Basis::energy_minus, kSpec) / scale, at + " -");
        wp.see(parseval_defect(f, g, Basis::momentum, kSpec) / scale, at);
    }
    return combine({&we, &wp});
}

// 6 -------------------------------------------------------------------------
Outcome eigen_equations() {
    const auto battery = default_battery(kModel);
    Worst wh{"H residual", 1e-6};
    for (double e : log_grid(0.05, 50.0, 10))
        for (auto c : kChannels)
            for (auto s : {SignLabel::plus, SignLabel::minus}) {
                const auto r = check_eigen_equation(kModel, e, c, s, battery, kSpec, Observable::H, 1e-6);
                wh.see(r.residual, r.check_name);
            }
    Worst wp{"P residual", 1e-8};
    for (int i = 0; i < 10; ++i) {
        const double p = -5.0 + 10.0 * i / 9.0;
        const auto r = check_eigen_equation(kModel, p, Channel::left, SignLabel::plus, battery, kSpec, Observable::P, 1e-8);
        wp.see(r.residual, r.check_name);
    }
    return combine({&wh, &wp});
}

// 7 -------------------------------------------------------------------------
Outcome delta_normalization() {
    Worst we{"energy residual", 1e-5};
    Worst wl{"cross-channel leakage", 1e-5};
    for (auto c : kChannels)
        for (auto s : {SignLabel::plus, SignLabel::minus}) {
            const auto r = check_delta_normalization(kModel, s, GaussianProbe{5.0, 0.5, 1.0}, c, 1e-5);
            for (const auto& w : r.witnesses)
                (w.descriptor == "cross channel" ? wl : we).see(w.residual, r.check_name);
        }
    Worst wp{"momentum residual", 1e-8};
    const auto rp = check_delta_normalization_momentum(kModel, GaussianProbe{1.0, 1.0, 1.0}, 1e-8);
    wp.see(rp.residual, rp.check_name);
    return combine({&we, &wl, &wp});
}

// 8 -------------------------------------------------------------------------
Outcome commutators() {
    Worst w{"max residual / ||f|| ||g||", 1e-8};
    Worst whp{"[H,P] residual", 1e-8};
    const auto pk = random_packets(kSeed, 20, Placement::near, kModel);
    for (std::size_t i = 0; i + 1 < pk.size(); i += 2) {
        const auto r = check_commutators(build_test_function(pk[i], kModel), build_test_function(pk[i + 1], kModel),
                                         kSpec, 1e-8, describe(pk[i]) + ";" + describe(pk[i + 1]));
        for (const auto& wt : r.witnesses) {
            w.see(wt.residual, "pair " + std::to_string(i / 2) + " " + wt.descriptor);
            if (wt.descriptor == "[H,P]") whp.see(wt.residual, "pair " + std::to_string(i / 2));
        }
    }
    return combine({&w, &whp});
}

// 9 -------------------------------------------------------------------------
Outcome membership() {
    Outcome o;
    int finite = 0, total = 0;
    std::string bad;
    for (const auto& item : default_battery(kModel)) {
        const std::pair<const char*, TestFunction> images[] = {
            {"f", item.f},
            {"Qf", apply_observable(Observable::Q, item.f)},
            {"Pf", apply_observable(Observable::P, item.f)},
            {"Hf", apply_observable(Observable::H, item.f)},
        };
        for (const auto& [name, g] : images)
            for (const auto& e : seminorm_battery(g, 8, kSpec)) {
                ++total;
                if (std::isfinite(e.value)) {
                    ++finite;
                } else if (bad.empty()) {
                    bad = std::string(name) + " of " + item.label;
                }
            }
    }
    const auto nm = check_non_member(kSpec);
    o.passed = finite == total && nm.passed;
    o.detail = "finite seminorms " + std::to_string(finite) + "/" + std::to_string(total) +
               (bad.empty() ? "" : " (first non-finite: " + bad + ")") +
               "; 1/(x+i) flagged as non-member: " + (nm.passed ? "yes" : "no");
    return o;
}

// 10 ------------------------------------------------------------------------
Outcome spectral_probability_sanity() {
    const double inf = std::numeric_limits<double>::infinity();
    Worst wt{"| P[0,inf) - 1 |", 1e-6};
    Worst ws{"| P+ - P- |", 1e-6};
    for (const auto& d : default_packets()) {
        const auto f = normalized(build_test_function(d, kModel), kSpec);
        const auto plus = energy_transform(f, SignLabel::plus, kSpec);
        const auto minus = energy_transform(f, SignLabel::minus, kSpec);
        const double tp = spectral_probability_detail(plus, 0.0, inf, kSpec).probability;
        const double tm = spectral_probability_detail(minus, 0.0, inf, kSpec).probability;
        wt.see(std::abs(tp - 1.0), describe(d) + " +");
        wt.see(std::abs(tm - 1.0), describe(d) + " -");
        for (double e : {1.0, 4.0, 9.0}) {
            const double a = spectral_probability_detail(plus, 0.0, e, kSpec).probability;
            const double b = spectral_probability_detail(minus, 0.0, e, kSpec).probability;
            ws.see(std::abs(a - b), describe(d) + " E<" + fmt(e));
        }
    }
    return combine({&wt, &ws});
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all = {
        {1, "scattering oracle equivalence", 10.0, scattering_oracle},
        {2, "S-matrix unitarity", 5.0, unitarity},
        {3, "tunneling and resonance spot values", 1.0, spot_values},
        {4, "completeness / reconstruction", 120.0, reconstruction},
        {5, "Parseval in energy and momentum bases", 60.0, parseval},
        {6, "distributional eigen-equations", 120.0, eigen_equations},
        {7, "delta normalization", 60.0, delta_normalization},
        {8, "commutators", 30.0, commutators},
        {9, "membership and invariance", 120.0, membership},
        {10, "spectral probability sanity", 60.0, spectral_probability_sanity},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& c : all) {
        if (!selected.empty() && !selected.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.budget_seconds;
        const bool ok = o.passed && in_time;
        failures += ok ? 0 : 1;
        std::printf("%s [%d] %s: %s; runtime %.2f s (budget %.0f s%s)\n", ok ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), secs, c.budget_seconds, in_time ? "" : ", exceeded");
        std::fflush(stdout);
    }
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
