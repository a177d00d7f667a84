#include "thzrf/aser.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/lexical_cast.hpp>

#include <charconv>
#include <cmath>
#include <numbers>

namespace thzrf::aser {

RqamScheme RqamScheme::make(int m_i, int m_q, double beta) {
    if (m_i < 1 || m_q < 1 || m_i * m_q < 2) throw std::invalid_argument("rqam: need M_I, M_Q >= 1 and M_I*M_Q >= 2");
    if (!(beta > 0.0)) throw std::invalid_argument("rqam: beta must be > 0");
    RqamScheme s;
    s.m_i = m_i;
    s.m_q = m_q;
    s.beta = beta;
    s.p = 1.0 - 1.0 / m_i;
    s.q = 1.0 - 1.0 / m_q;
    s.a = std::sqrt(6.0 / ((m_i * m_i - 1.0) + (m_q * m_q - 1.0) * beta * beta));
    // A single quadrature level carries no information in that dimension.
    s.b = (m_q == 1) ? 0.0 : beta * s.a;
    const double root2pi = std::sqrt(2.0 * std::numbers::pi);
    s.D = s.a * s.p * (s.q - 1.0) / root2pi;
    s.F = s.b * (s.p - 1.0) * s.q / root2pi;
    s.G = s.a * s.b * s.p * s.q / std::sqrt(std::numbers::pi);
    return s;
}

RqamScheme RqamScheme::square(int m) {
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m))));
    if (m < 4 || side * side != m) throw std::invalid_argument("sqam: M must be a perfect square >= 4");
    return make(side, side, 1.0);
}

RqamScheme RqamScheme::bpsk() { return make(2, 1, 1.0); }

HqamScheme HqamScheme::table(int m) {
    // Counts from the bundled geometry files: nearest-neighbour pairs, unit
    // triangles and the average energy in squared lattice constants.
    struct Row {
        int m, pairs, triangles;
        double energy;
    };
    static constexpr Row rows[] = {
        {4, 5, 2, 0.5},
        {8, 14, 7, 69.0 / 64.0},
        {16, 33, 18, 35.0 / 16.0},
        {32, 75, 44, 4503.0 / 1024.0},
        {64, 163, 100, 141.0 / 16.0},
    };
    for (const auto& r : rows) {
        if (r.m != m) continue;
        HqamScheme s;
        s.m = m;
        s.b_param = 2.0 * r.pairs / m;
        s.bc_param = 3.0 * r.triangles / m;
        s.alpha_h = 1.0 / (2.0 * r.energy);
        return s;
    }
    throw std::invalid_argument("hqam: M must be one of 4, 8, 16, 32, 64");
}

NcfskScheme NcfskScheme::make(int m) {
    if (m < 2 || m > 16) throw std::invalid_argument("ncfsk: M must lie in [2, 16]");
    return NcfskScheme{m};
}

ModulationScheme parse_scheme(const std::string& text) {
    std::string t = boost::algorithm::trim_copy(boost::algorithm::to_lower_copy(text));
    std::vector<std::string> parts;
    boost::algorithm::split(parts, t, boost::is_any_of(":"));
    for (auto& p : parts) boost::algorithm::trim(p);
    auto to_int = [&](const std::string& s) {
        try {
            return boost::lexical_cast<int>(s);
        } catch (const boost::bad_lexical_cast&) {
            throw std::invalid_argument("scheme '" + text + "': '" + s + "' is not an integer");
        }
    };
    const std::string& kind = parts[0];
    if (kind == "bpsk" && parts.size() == 1) return RqamScheme::bpsk();
    if (kind == "sqam" && parts.size() == 2) return RqamScheme::square(to_int(parts[1]));
    if (kind == "hqam" && parts.size() == 2) return HqamScheme::table(to_int(parts[1]));
    if (kind == "ncfsk" && parts.size() == 2) return NcfskScheme::make(to_int(parts[1]));
    if (kind == "rqam" && (parts.size() == 2 || parts.size() == 3)) {
        std::vector<std::string> dims;
        boost::algorithm::split(dims, parts[1], boost::is_any_of("x"));
        if (dims.size() != 2) throw std::invalid_argument("scheme '" + text + "': expected rqam:<MI>x<MQ>[:beta]");
        double beta = 1.0;
        if (parts.size() == 3) {
            try {
                beta = boost::lexical_cast<double>(parts[2]);
            } catch (const boost::bad_lexical_cast&) {
                throw std::invalid_argument("scheme '" + text + "': bad beta");
            }
        }
        return RqamScheme::make(to_int(dims[0]), to_int(dims[1]), beta);
    }
    throw std::invalid_argument("unknown modulation scheme '" + text + "'");
}

std::string scheme_id(const ModulationScheme& scheme) {
    struct Visitor {
        std::string operator()(const RqamScheme& s) const {
            if (s.m_i == 2 && s.m_q == 1) return "bpsk";
            if (s.m_i == s.m_q && s.beta == 1.0) return "sqam:" + std::to_string(s.m_i * s.m_q);
            char buf[32];
            const auto r = std::to_chars(buf, buf + sizeof buf, s.beta);
            return "rqam:" + std::to_string(s.m_i) + "x" + std::to_string(s.m_q) + ":" + std::string(buf, r.ptr);
        }
        std::string operator()(const HqamScheme& s) const { return "hqam:" + std::to_string(s.m); }
        std::string operator()(const NcfskScheme& s) const { return "ncfsk:" + std::to_string(s.m); }
    };
    return std::visit(Visitor{}, scheme);
}

int constellation_size(const ModulationScheme& scheme) {
    struct Visitor {
        int operator()(const RqamScheme& s) const { return s.m_i * s.m_q; }
        int operator()(const HqamScheme& s) const { return s.m; }
        int operator()(const NcfskScheme& s) const { return s.m; }
    };
    return std::visit(Visitor{}, scheme);
}

HexGeometryStats hex_geometry_stats(const std::vector<std::complex<double>>& points) {
    HexGeometryStats st;
    const std::size_t n = points.size();
    if (n < 2) throw std::invalid_argument("hex_geometry_stats: need at least two points");
    double energy = 0.0;
    for (const auto& p : points) energy += std::norm(p);
    energy /= static_cast<double>(n);
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) dmin = std::min(dmin, std::abs(points[i] - points[j]));
    auto close = [&](std::size_t i, std::size_t j) {
        return std::fabs(std::abs(points[i] - points[j]) - dmin) <= 1e-9 * dmin;
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (!close(i, j)) continue;
            ++st.pairs;
            for (std::size_t k = j + 1; k < n; ++k)
                if (close(i, k) && close(j, k)) ++st.triangles;
        }
    }
    st.min_distance = dmin;
    st.b_param = 2.0 * st.pairs / static_cast<double>(n);
    st.bc_param = 3.0 * st.triangles / static_cast<double>(n);
    st.alpha_h = dmin * dmin / (2.0 * energy);
    return st;
}

}  // namespace thzrf::aser
