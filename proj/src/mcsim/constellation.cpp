#include "thzrf/mcsim.hpp"

#include <boost/algorithm/string/trim.hpp>

#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#ifndef THZRF_DATA_DIR
#define THZRF_DATA_DIR "data"
#endif

namespace thzrf::mcsim {

double Constellation::mean_energy() const {
    double e = 0.0;
    for (const auto& p : points) e += std::norm(p);
    return e / static_cast<double>(points.size());
}

double Constellation::min_distance() const {
    if (orthogonal) return std::sqrt(2.0) * std::abs(points.front());
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) d = std::min(d, std::abs(points[i] - points[j]));
    return d;
}

std::filesystem::path data_dir() {
    if (const char* env = std::getenv("THZRF_DATA_DIR"); env && *env) return env;
    return THZRF_DATA_DIR;
}

std::vector<std::complex<double>> load_points(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open constellation file " + path.string());
    std::vector<std::complex<double>> pts;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        boost::algorithm::trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        double re = 0.0, im = 0.0;
        std::string extra;
        if (!(ls >> re >> im) || (ls >> extra))
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected \"re im\"");
        pts.emplace_back(re, im);
    }
    if (pts.empty()) throw std::runtime_error(path.string() + ": no points");
    return pts;
}

namespace {

Constellation rectangular(const aser::RqamScheme& s) {
    // Levels +-1, +-3, ... scaled so that half the in-phase spacing is a/sqrt(2)
    // at unit energy; the quadrature spacing is beta times larger.
    Constellation c;
    c.label_count = s.m_i * s.m_q;
    const double di = s.a / std::sqrt(2.0);
    const double dq = s.beta * di;
    for (int i = 0; i < s.m_i; ++i) {
        for (int q = 0; q < s.m_q; ++q) {
            const double x = (2.0 * i - (s.m_i - 1)) * di;
            const double y = s.m_q == 1 ? 0.0 : (2.0 * q - (s.m_q - 1)) * dq;
            c.points.emplace_back(x, y);
        }
    }
    return c;
}

}  // namespace

Constellation build_constellation(const aser::ModulationScheme& scheme) {
    if (const auto* r = std::get_if<aser::RqamScheme>(&scheme)) {
        return rectangular(*r);
    }
    if (const auto* h = std::get_if<aser::HqamScheme>(&scheme)) {
        Constellation c;
        c.points = load_points(data_dir() / "hqam" / ("hqam_" + std::to_string(h->m) + ".txt"));
        c.label_count = h->m;
        if (static_cast<int>(c.points.size()) != h->m)
            throw std::runtime_error("hqam geometry file has " + std::to_string(c.points.size()) + " points, expected " +
                                     std::to_string(h->m));
        return c;
    }
    const auto& f = std::get<aser::NcfskScheme>(scheme);
    Constellation c;
    c.orthogonal = true;
    c.label_count = f.m;
    c.points.assign(f.m, std::complex<double>(1.0, 0.0));
    return c;
}

}  // namespace thzrf::mcsim
