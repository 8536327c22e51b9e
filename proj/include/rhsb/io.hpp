#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "json.hpp"
#include "rhsb/errors.hpp"
#include "rhsb/model.hpp"
#include "rhsb/quadrature.hpp"
#include "rhsb/scattering.hpp"
#include "rhsb/testspace.hpp"
#include "rhsb/verify.hpp"

namespace rhsb {

using json = nlohmann::json;

/// Raised for malformed configuration; maps to the usage exit status.
class ConfigError : public Error {
public:
    using Error::Error;
};

inline void require_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j.items())
        if (!ok.count(key)) throw ConfigError(where + ": unknown key \"" + key + "\"");
}

template <class T>
void read_opt(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + ": bad value for \"" + key + "\"");
    }
}

// BarrierModel ----------------------------------------------------------------

inline void to_json(json& j, const BarrierModel& m) {
    j = json{{"a", m.a}, {"b", m.b}, {"v0", m.v0}, {"hbar", m.hbar}, {"mass", m.mass}};
}

inline void from_json(const json& j, BarrierModel& m) {
    require_keys(j, {"a", "b", "v0", "hbar", "mass"}, "model");
    read_opt(j, "a", m.a, "model");
    read_opt(j, "b", m.b, "model");
    read_opt(j, "v0", m.v0, "model");
    read_opt(j, "hbar", m.hbar, "model");
    read_opt(j, "mass", m.mass, "model");
}

// QuadratureSpec --------------------------------------------------------------

inline void to_json(json& j, const QuadratureSpec& q) {
    j = json{{"abs_tol", q.abs_tol},
             {"rel_tol", q.rel_tol},
             {"spatial_radius", q.spatial_radius},
             {"k_max", q.k_max},
             {"max_subdivisions", q.max_subdivisions}};
}

inline void from_json(const json& j, QuadratureSpec& q) {
    require_keys(j, {"abs_tol", "rel_tol", "spatial_radius", "k_max", "max_subdivisions"}, "quadrature");
    read_opt(j, "abs_tol", q.abs_tol, "quadrature");
    read_opt(j, "rel_tol", q.rel_tol, "quadrature");
    read_opt(j, "spatial_radius", q.spatial_radius, "quadrature");
    read_opt(j, "k_max", q.k_max, "quadrature");
    read_opt(j, "max_subdivisions", q.max_subdivisions, "quadrature");
}

// PacketDescriptor ------------------------------------------------------------

inline void to_json(json& j, const PacketDescriptor& p) {
    j = json{{"kind", "gaussian_packet"},
             {"center", p.center},
             {"width", p.width},
             {"momentum", p.momentum},
             {"poly_degree", p.poly_degree}};
}

inline void from_json(const json& j, PacketDescriptor& p) {
    require_keys(j, {"kind", "center", "width", "momentum", "poly_degree"}, "packet");
    std::string kind = "gaussian_packet";
    read_opt(j, "kind", kind, "packet");
    if (kind != "gaussian_packet") throw ConfigError("packet: unsupported kind \"" + kind + "\"");
    read_opt(j, "center", p.center, "packet");
    read_opt(j, "width", p.width, "packet");
    read_opt(j, "momentum", p.momentum, "packet");
    read_opt(j, "poly_degree", p.poly_degree, "packet");
}

// ResidualReport --------------------------------------------------------------

inline void to_json(json& j, const Witness& w) { j = json{{"descriptor", w.descriptor}, {"residual", w.residual}}; }

inline void from_json(const json& j, Witness& w) {
    w.descriptor = j.at("descriptor").get<std::string>();
    w.residual = j.at("residual").is_null() ? std::numeric_limits<double>::quiet_NaN() : j.at("residual").get<double>();
}

inline void to_json(json& j, const ResidualReport& r) {
    j = json{{"check_name", r.check_name}, {"residual", r.residual},   {"tolerance", r.tolerance},
             {"witnesses", r.witnesses},   {"passed", r.passed},       {"inconclusive", r.inconclusive}};
}

inline void from_json(const json& j, ResidualReport& r) {
    r.check_name = j.at("check_name").get<std::string>();
    r.residual = j.at("residual").is_null() ? std::numeric_limits<double>::quiet_NaN() : j.at("residual").get<double>();
    r.tolerance = j.at("tolerance").get<double>();
    r.witnesses = j.at("witnesses").get<std::vector<Witness>>();
    r.passed = j.at("passed").get<bool>();
    r.inconclusive = j.value("inconclusive", false);
}

// Labels ----------------------------------------------------------------------

inline Channel parse_channel(const std::string& s) {
    if (s == "l" || s == "left") return Channel::left;
    if (s == "r" || s == "right") return Channel::right;
    throw ConfigError("channel must be one of l, r, left, right");
}

inline SignLabel parse_sign(const std::string& s) {
    if (s == "+" || s == "plus") return SignLabel::plus;
    if (s == "-" || s == "minus") return SignLabel::minus;
    throw ConfigError("sign must be one of +, -, plus, minus");
}

// Output ----------------------------------------------------------------------

/// Fixed 17-significant-digit rendering, independent of the locale.
inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Comma-separated table with a header row.
class CsvWriter {
public:
    explicit CsvWriter(std::initializer_list<std::string> header) {
        bool first = true;
        for (const auto& h : header) {
            if (!first) out_ << ',';
            out_ << h;
            first = false;
        }
        out_ << '\n';
    }

    template <class... Cells>
    void row(const Cells&... cells) {
        bool first = true;
        ((out_ << (first ? "" : ","), out_ << cell(cells), first = false), ...);
        out_ << '\n';
    }

    std::string str() const { return out_.str(); }

private:
    static std::string cell(double v) { return num(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(std::string_view s) { return std::string(s); }
    static std::string cell(const char* s) { return s; }

    std::ostringstream out_;
};

/// Writes `content` to `path` through a temporary file and a rename.
/// An empty path or "-" writes to standard output.
inline void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        std::cout.flush();
        return;
    }
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot open " + tmp.string() + " for writing");
        f << content;
        f.flush();
        if (!f) throw Error("failed writing " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error("cannot move output into place at " + target.string() + ": " + ec.message());
    }
}

inline json read_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file " + path);
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
}

}  // namespace rhsb
