// rhsb: batch front end for the barrier spectral engine.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rhsb/io.hpp"
#include "rhsb/rhsb.hpp"

using namespace rhsb;

namespace {

constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct Grid {
    double lo = 0.0;
    double hi = 1.0;
    int points = 11;
    bool log = false;
    std::vector<double> explicit_values;

    std::vector<double> values() const {
        if (!explicit_values.empty()) return explicit_values;
        if (points < 1) throw ConfigError("grid needs at least one point");
        if (!(hi >= lo)) throw ConfigError("grid needs max >= min");
        if (log && !(lo > 0.0)) throw ConfigError("log grid needs min > 0");
        std::vector<double> v(points);
        for (int i = 0; i < points; ++i) {
            const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
            v[i] = log ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))) : lo + t * (hi - lo);
        }
        return v;
    }
};

Grid parse_grid(const json& j, const std::string& where, Grid g) {
    if (j.is_array()) {
        g.explicit_values.clear();
        for (const auto& v : j) {
            if (!v.is_number()) throw ConfigError(where + ": grid values must be numbers");
            g.explicit_values.push_back(v.get<double>());
        }
        if (g.explicit_values.empty()) throw ConfigError(where + ": empty grid");
        return g;
    }
    require_keys(j, {"min", "max", "points", "spacing"}, where);
    read_opt(j, "min", g.lo, where);
    read_opt(j, "max", g.hi, where);
    read_opt(j, "points", g.points, where);
    std::string spacing = g.log ? "log" : "linear";
    read_opt(j, "spacing", spacing, where);
    if (spacing != "linear" && spacing != "log") throw ConfigError(where + ": spacing must be linear or log");
    g.log = spacing == "log";
    return g;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("cannot parse number \"" + item + "\"");
        }
    }
    if (out.empty()) throw ConfigError("empty list");
    return out;
}

struct Common {
    std::string config;
    std::string out;
    std::optional<double> tol;
    std::optional<double> kmax;
};

struct GridFlags {
    std::optional<double> lo, hi;
    std::optional<int> points;
    bool log = false;
    std::string list;

    void apply(Grid& g) const {
        if (lo) g.lo = *lo;
        if (hi) g.hi = *hi;
        if (points) g.points = *points;
        if (log) g.log = true;
        if (lo || hi || points || log) g.explicit_values.clear();
        if (!list.empty()) g.explicit_values = parse_list(list);
    }
};

struct PacketFlags {
    std::optional<double> center, width, momentum;
    std::optional<int> degree;

    void apply(PacketDescriptor& p) const {
        if (center) p.center = *center;
        if (width) p.width = *width;
        if (momentum) p.momentum = *momentum;
        if (degree) p.poly_degree = *degree;
    }
};

void add_packet_flags(CLI::App* sub, PacketFlags& pf) {
    sub->add_option("--center", pf.center, "packet center");
    sub->add_option("--width", pf.width, "packet width");
    sub->add_option("--momentum", pf.momentum, "packet momentum");
    sub->add_option("--degree", pf.degree, "packet polynomial degree");
}

struct Loaded {
    json root;
    BarrierModel model;
    QuadratureSpec quad;
};

Loaded load(const Common& c, const char* section, std::initializer_list<const char*> top_keys) {
    Loaded L;
    if (!c.config.empty()) L.root = read_json_file(c.config);
    else L.root = json::object();
    require_keys(L.root, top_keys, "config");
    if (L.root.contains("model")) L.model = L.root.at("model").get<BarrierModel>();
    if (L.root.contains("quadrature")) L.quad = L.root.at("quadrature").get<QuadratureSpec>();
    if (c.kmax) L.quad.k_max = *c.kmax;
    if (c.tol && std::string(section) != "verify") L.quad.abs_tol = *c.tol;
    try {
        L.model.validate();
        L.quad.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    if (!L.root.contains(section)) L.root[section] = json::object();
    return L;
}

// coeffs ------------------------------------------------------------------------

struct CoeffsArgs {
    GridFlags grid;
};

int cmd_coeffs(const Common& c, const CoeffsArgs& a) {
    auto L = load(c, "coeffs", {"model", "quadrature", "coeffs"});
    const auto& sec = L.root.at("coeffs");
    require_keys(sec, {"energies"}, "coeffs");
    Grid g{0.01, 100.0, 50, true, {}};
    if (sec.contains("energies")) g = parse_grid(sec.at("energies"), "coeffs.energies", g);
    a.grid.apply(g);
    const auto energies = g.values();
    for (double e : energies)
        if (!(e > 0.0) || !std::isfinite(e)) throw ConfigError("energy grid must be positive: " + num(e));

    CsvWriter csv({"E", "k", "re_T", "im_T", "re_Rl", "im_Rl", "re_Rr", "im_Rr", "abs_T2", "abs_Rl2",
                   "unitarity_defect"});
    for (double e : energies) {
        const auto s = solve_matching(L.model, e);
        csv.row(e, s.wave.k.real(), s.T.real(), s.T.imag(), s.R_l.real(), s.R_l.imag(), s.R_r.real(), s.R_r.imag(),
                std::norm(s.T), std::norm(s.R_l), unitarity_defect(s_matrix(s)));
    }
    write_output(c.out, csv.str());
    return 0;
}

// eigfun ------------------------------------------------------------------------

struct EigfunArgs {
    std::optional<double> energy;
    std::string channel, sign;
    GridFlags grid;
};

int cmd_eigfun(const Common& c, const EigfunArgs& a) {
    auto L = load(c, "eigfun", {"model", "quadrature", "eigfun"});
    const auto& sec = L.root.at("eigfun");
    require_keys(sec, {"energy", "channel", "sign", "x"}, "eigfun");
    double energy = 1.0;
    std::string channel = "l", sign = "+";
    read_opt(sec, "energy", energy, "eigfun");
    read_opt(sec, "channel", channel, "eigfun");
    read_opt(sec, "sign", sign, "eigfun");
    Grid g{L.model.a - 5.0, L.model.b + 5.0, 221, false, {}};
    if (sec.contains("x")) g = parse_grid(sec.at("x"), "eigfun.x", g);
    if (a.energy) energy = *a.energy;
    if (!a.channel.empty()) channel = a.channel;
    if (!a.sign.empty()) sign = a.sign;
    a.grid.apply(g);
    if (!(energy > 0.0)) throw ConfigError("energy must be positive");

    const auto h = EigenfunctionHandle::make(L.model, energy, parse_channel(channel), parse_sign(sign));
    CsvWriter csv({"x", "re_psi", "im_psi", "abs2_psi"});
    for (double x : g.values()) {
        const cplx v = eval_energy_eigenfunction(h, x);
        csv.row(x, v.real(), v.imag(), std::norm(v));
    }
    write_output(c.out, csv.str());
    return 0;
}

// transform ---------------------------------------------------------------------

struct TransformArgs {
    PacketFlags packet;
    std::string sign;
    GridFlags grid;
};

PacketDescriptor section_packet(const json& sec, const std::string& where) {
    PacketDescriptor p = default_packets().front();
    if (sec.contains("packet")) {
        try {
            p = sec.at("packet").get<PacketDescriptor>();
        } catch (const ConfigError& e) {
            throw ConfigError(where + "." + e.what());
        }
    }
    return p;
}

int cmd_transform(const Common& c, const TransformArgs& a) {
    auto L = load(c, "transform", {"model", "quadrature", "transform"});
    const auto& sec = L.root.at("transform");
    require_keys(sec, {"packet", "sign", "energies"}, "transform");
    PacketDescriptor p = section_packet(sec, "transform");
    std::string sign = "+";
    read_opt(sec, "sign", sign, "transform");
    Grid g{0.05, 20.0, 100, false, {}};
    if (sec.contains("energies")) g = parse_grid(sec.at("energies"), "transform.energies", g);
    a.packet.apply(p);
    if (!a.sign.empty()) sign = a.sign;
    a.grid.apply(g);
    const auto energies = g.values();
    for (double e : energies)
        if (!(e > 0.0) || !std::isfinite(e)) throw ConfigError("energy grid must be positive: " + num(e));

    const auto f = build_test_function(p, L.model);
    const auto amp = energy_transform(f, parse_sign(sign), L.quad);
    CsvWriter csv({"E", "channel", "re_amp", "im_amp", "abs2"});
    for (double e : energies)
        for (auto ch : kChannels) {
            const cplx v = amp(e, ch);
            csv.row(e, to_string(ch), v.real(), v.imag(), std::norm(v));
        }
    write_output(c.out, csv.str());
    return 0;
}

// reconstruct -------------------------------------------------------------------

struct ReconstructArgs {
    PacketFlags packet;
    std::string sign;
    GridFlags grid;
};

int cmd_reconstruct(const Common& c, const ReconstructArgs& a) {
    auto L = load(c, "reconstruct", {"model", "quadrature", "reconstruct"});
    const auto& sec = L.root.at("reconstruct");
    require_keys(sec, {"packet", "sign", "x"}, "reconstruct");
    PacketDescriptor p = section_packet(sec, "reconstruct");
    std::string sign = "+";
    read_opt(sec, "sign", sign, "reconstruct");
    a.packet.apply(p);
    Grid g{p.center - 4.0 * p.width, p.center + 4.0 * p.width, 50, false, {}};
    if (sec.contains("x")) g = parse_grid(sec.at("x"), "reconstruct.x", g);
    if (!a.sign.empty()) sign = a.sign;
    a.grid.apply(g);
    const auto xs = g.values();

    const auto f = build_test_function(p, L.model);
    const auto amp = energy_transform(f, parse_sign(sign), L.quad);
    double max_res = 0.0, sum2 = 0.0;
    for (double x : xs) {
        const double r = std::abs(synthesize_energy(amp, x, L.quad) - f(x));
        max_res = std::max(max_res, r);
        sum2 += r * r;
    }
    // Discrete L2 norm over the probe grid, with the mean grid spacing as weight.
    const double h = xs.size() > 1 ? (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1) : 1.0;
    json out{{"l2_residual", std::sqrt(sum2 * std::abs(h))},
             {"max_residual", max_res},
             {"probe_points", static_cast<int>(xs.size())}};
    write_output(c.out, out.dump(2) + "\n");
    return 0;
}

// probe -------------------------------------------------------------------------

struct ProbeArgs {
    PacketFlags packet;
    std::string sign;
    std::optional<double> e_lo, e_hi;
};

int cmd_probe(const Common& c, const ProbeArgs& a) {
    auto L = load(c, "probe", {"model", "quadrature", "probe"});
    const auto& sec = L.root.at("probe");
    require_keys(sec, {"packet", "sign", "e_lo", "e_hi"}, "probe");
    PacketDescriptor p = section_packet(sec, "probe");
    std::string sign = "+";
    double e_lo = 0.0, e_hi = std::numeric_limits<double>::infinity();
    read_opt(sec, "sign", sign, "probe");
    read_opt(sec, "e_lo", e_lo, "probe");
    if (sec.contains("e_hi") && !sec.at("e_hi").is_null()) read_opt(sec, "e_hi", e_hi, "probe");
    a.packet.apply(p);
    if (!a.sign.empty()) sign = a.sign;
    if (a.e_lo) e_lo = *a.e_lo;
    if (a.e_hi) e_hi = *a.e_hi;
    if (!(e_lo >= 0.0) || !(e_hi > e_lo)) throw ConfigError("probe window must satisfy 0 <= e_lo < e_hi");

    const auto f = normalized(build_test_function(p, L.model), L.quad);
    const auto s = parse_sign(sign);
    const auto amp = energy_transform(f, s, L.quad);
    const auto r = spectral_probability_detail(amp, e_lo, e_hi, L.quad);
    json out{{"probability", r.probability},
             {"tail_estimate", r.tail_estimate},
             {"e_lo", e_lo},
             {"e_hi", std::isinf(e_hi) ? json(nullptr) : json(e_hi)},
             {"sign", std::string(to_string(s))},
             {"packet", p}};
    write_output(c.out, out.dump(2) + "\n");
    return 0;
}

// verify ------------------------------------------------------------------------

struct VerifyArgs {
    std::vector<std::string> suites;
    bool suites_given = false;
    std::optional<std::uint64_t> seed;
};

unsigned parse_suites(const std::vector<std::string>& names) {
    unsigned sel = 0;
    for (const auto& n : names) {
        if (n == "all") {
            sel |= static_cast<unsigned>(Suite::all);
            continue;
        }
        bool found = false;
        for (const auto& [name, s] : kSuiteNames)
            if (n == name) {
                sel |= static_cast<unsigned>(s);
                found = true;
            }
        if (!found) throw ConfigError("unknown suite \"" + n + "\"");
    }
    return sel;
}

int cmd_verify(const Common& c, const VerifyArgs& a) {
    auto L = load(c, "verify", {"model", "quadrature", "verify"});
    const auto& sec = L.root.at("verify");
    require_keys(sec, {"suites", "seed", "invariance_order"}, "verify");
    SuiteOptions opt;
    std::vector<std::string> names = {"all"};
    read_opt(sec, "suites", names, "verify");
    read_opt(sec, "seed", opt.seed, "verify");
    read_opt(sec, "invariance_order", opt.invariance_order, "verify");
    if (a.suites_given) {
        names.clear();
        for (const auto& s : a.suites)
            if (!s.empty()) names.push_back(s);
    }
    if (a.seed) opt.seed = *a.seed;
    if (c.tol) opt.tolerance = *c.tol;
    opt.selection = parse_suites(names);
    if (opt.selection == 0) throw ConfigError("empty suite selection");

    const auto reports = run_suite(L.model, L.quad, opt);
    bool ok = true;
    for (const auto& r : reports) {
        if (!r.passed) {
            ok = false;
            std::cerr << "FAILED " << r.check_name << " residual=" << num(r.residual) << " tolerance=" << num(r.tolerance)
                      << '\n';
        }
    }
    write_output(c.out, json(reports).dump(2) + "\n");
    return ok ? 0 : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral engine for the one-dimensional rectangular barrier"};
    app.require_subcommand(1);
    app.fallthrough();
    Common common;
    app.add_option("--config", common.config, "JSON configuration file");
    app.add_option("--out", common.out, "output file (default: standard output)");
    app.add_option("--tol", common.tol, "quadrature abs_tol; for verify, the check tolerance");
    app.add_option("--kmax", common.kmax, "wave-number truncation k_max");

    auto grid_flags = [](CLI::App* sub, GridFlags& g, const std::string& what) {
        sub->add_option("--min", g.lo, what + " grid minimum");
        sub->add_option("--max", g.hi, what + " grid maximum");
        sub->add_option("--points", g.points, what + " grid points");
        sub->add_flag("--log", g.log, "logarithmic spacing");
        sub->add_option("--values", g.list, "comma-separated explicit " + what + " values");
    };

    CoeffsArgs coeffs;
    auto* s_coeffs = app.add_subcommand("coeffs", "transmission and reflection coefficients on an energy grid");
    grid_flags(s_coeffs, coeffs.grid, "energy");

    EigfunArgs eig;
    auto* s_eig = app.add_subcommand("eigfun", "sample an energy eigenfunction on an x grid");
    s_eig->add_option("--energy", eig.energy, "energy E > 0");
    s_eig->add_option("--channel", eig.channel, "l or r");
    s_eig->add_option("--sign", eig.sign, "+ or -");
    grid_flags(s_eig, eig.grid, "x");

    TransformArgs tr;
    auto* s_tr = app.add_subcommand("transform", "energy amplitudes of a wave packet");
    add_packet_flags(s_tr, tr.packet);
    s_tr->add_option("--sign", tr.sign, "+ or -");
    grid_flags(s_tr, tr.grid, "energy");

    ReconstructArgs rc;
    auto* s_rc = app.add_subcommand("reconstruct", "round-trip a packet through the energy basis");
    add_packet_flags(s_rc, rc.packet);
    s_rc->add_option("--sign", rc.sign, "+ or -");
    grid_flags(s_rc, rc.grid, "x");

    ProbeArgs pr;
    auto* s_pr = app.add_subcommand("probe", "energy-window probability of a normalized packet");
    add_packet_flags(s_pr, pr.packet);
    s_pr->add_option("--sign", pr.sign, "+ or -");
    s_pr->add_option("--elo", pr.e_lo, "lower energy");
    s_pr->add_option("--ehi", pr.e_hi, "upper energy (default: infinity)");

    VerifyArgs vf;
    auto* s_vf = app.add_subcommand("verify", "run the distributional verification suite");
    auto* suite_opt = s_vf->add_option("--suite", vf.suites, "eigen, eigenbra, delta, commutators, invariance, all")
                          ->expected(0, -1);
    s_vf->add_option("--seed", vf.seed, "seed for the random packet pairs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc_parse = app.exit(e);
        return rc_parse == 0 ? 0 : kExitUsage;
    }
    vf.suites_given = suite_opt->count() > 0;

    try {
        if (*s_coeffs) return cmd_coeffs(common, coeffs);
        if (*s_eig) return cmd_eigfun(common, eig);
        if (*s_tr) return cmd_transform(common, tr);
        if (*s_rc) return cmd_reconstruct(common, rc);
        if (*s_pr) return cmd_probe(common, pr);
        if (*s_vf) return cmd_verify(common, vf);
    } catch (const ConfigError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
    return kExitUsage;
}
