#include "paths.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "klooster.hpp"

namespace kloostpath {

KloostermanPath path_vertices(const PrimePowerModulus& m, std::uint64_t a,
                              std::uint64_t b) {
    a %= m.q();
    b %= m.q();
    if (!m.is_unit(a) || !m.is_unit(b))
        throw NotAUnit("path_vertices requires unit a, b");
    KloostermanPath path{&m, a, b, PathVariant::Standard, {}};
    path.vertices.reserve(m.phi());
    const double norm = 1.0 / std::sqrt(static_cast<double>(m.q()));
    std::complex<double> run{0.0, 0.0};
    for (std::uint64_t x = 1; x < m.q(); ++x) {
        if (x % m.p() == 0) continue;
        run += unit_phase(m.add(m.mul(a, x), m.mul(b, m.inv(x))), m.q()) * norm;
        path.vertices.push_back(run);
    }
    return path;
}

namespace {

std::complex<double> piecewise_linear(const std::vector<std::complex<double>>& v,
                                      double t) {
    const std::size_t count = v.size();
    if (count == 1) return v[0];
    double u = t * static_cast<double>(count - 1);
    auto i = static_cast<std::size_t>(u);
    if (i >= count - 1) return v[count - 1];
    double lambda = u - static_cast<double>(i);
    return v[i] + lambda * (v[i + 1] - v[i]);
}

} // namespace

std::complex<double> path_eval(const KloostermanPath& path, double t) {
    if (!(t >= 0.0 && t <= 1.0))
        throw UsageError("path parameter t must lie in [0, 1]");
    if (path.vertices.empty()) throw UsageError("empty path");
    if (path.variant == PathVariant::Renormalized) {
        const PrimePowerModulus& m = *path.modulus;
        if (t == 0.0) return {0.0, 0.0};
        std::uint64_t cut = completion_cut(m, t);
        std::uint64_t units = m.units_up_to(cut);
        if (units == 0) return {0.0, 0.0};
        return path.vertices[units - 1];
    }
    return piecewise_linear(path.vertices, t);
}

std::uint64_t completion_cut(const PrimePowerModulus& m, double t) {
    const std::uint64_t pn1 = m.q() / m.p();
    double kk = std::ceil(t * static_cast<double>(pn1) - 1e-12);
    std::uint64_t k = kk < 1.0 ? 1 : static_cast<std::uint64_t>(kk);
    k = std::min(k, pn1);
    double x = static_cast<double>(m.phi()) * t + static_cast<double>(k - 1);
    auto cut = static_cast<std::uint64_t>(std::floor(x + 1e-9));
    return std::min(cut, m.q() - 1);
}

std::complex<double> renormalized_eval(const PrimePowerModulus& m, std::uint64_t a,
                                       std::uint64_t b, double t) {
    if (!(t >= 0.0 && t <= 1.0))
        throw UsageError("path parameter t must lie in [0, 1]");
    a %= m.q();
    b %= m.q();
    if (!m.is_unit(a) || !m.is_unit(b))
        throw NotAUnit("renormalized_eval requires unit a, b");
    if (t == 0.0) return {0.0, 0.0};
    return incomplete_sum(m, a, b, 1, completion_cut(m, t));
}

KloostermanPath rearranged_vertices(const PrimePowerModulus& m, std::uint64_t a,
                                    std::uint64_t b) {
    if (m.n() < 3) throw UnsupportedDepth("rearranged paths require n >= 3");
    a %= m.q();
    b %= m.q();
    if (!m.is_unit(a) || !m.is_unit(b))
        throw NotAUnit("rearranged_vertices requires unit a, b");
    KloostermanPath path{&m, a, b, PathVariant::Rearranged, {}};
    const std::uint64_t pn1 = m.q() / m.p();
    path.vertices.reserve(m.phi() / m.p());
    const double norm = 1.0 / std::sqrt(static_cast<double>(m.q()));
    std::complex<double> run{0.0, 0.0};
    for (std::uint64_t x = 1; x <= pn1; ++x) {
        if (x % m.p() == 0) continue;
        for (std::uint64_t k = 0; k < m.p(); ++k) {
            std::uint64_t xk = m.add(x, m.mul(k % m.q(), pn1 % m.q()));
            run += unit_phase(m.add(m.mul(a, xk), m.mul(b, m.inv(xk))), m.q()) * norm;
        }
        path.vertices.push_back(run);
    }
    return path;
}

std::complex<double> completion_alpha(const PrimePowerModulus& m, double t,
                                      std::int64_t h) {
    if (!(t > 0.0 && t <= 1.0))
        throw UsageError("completion coefficients are defined for t in (0, 1]");
    const std::uint64_t cut = completion_cut(m, t);
    const double root_q = std::sqrt(static_cast<double>(m.q()));
    std::uint64_t hr = m.reduce_signed(h);
    if (hr == 0) return {static_cast<double>(cut) / root_q, 0.0};
    // geometric sum_{x=1..cut} e(hx/q) = e(i theta (cut+1)/2) sin(cut theta/2)/sin(theta/2)
    double theta = kTwoPi * (static_cast<double>(hr) / static_cast<double>(m.q()));
    double half = 0.5 * theta;
    double mag = std::sin(half * static_cast<double>(cut)) / std::sin(half);
    double arg = half * static_cast<double>(cut + 1);
    return std::complex<double>{std::cos(arg), std::sin(arg)} * (mag / root_q);
}

std::complex<double> completion_beta(double t, std::int64_t h) {
    if (h == 0) return {t, 0.0};
    double x = kTwoPi * static_cast<double>(h) * t;
    std::complex<double> num{std::cos(x) - 1.0, std::sin(x)};
    return num / std::complex<double>{0.0, kTwoPi * static_cast<double>(h)};
}

std::vector<CompletionCoefficient> completion_coeffs(const PrimePowerModulus& m,
                                                     double t, std::int64_t h_min,
                                                     std::int64_t h_max) {
    if (h_min > h_max) throw UsageError("empty frequency range");
    std::vector<CompletionCoefficient> coeffs;
    coeffs.reserve(static_cast<std::size_t>(h_max - h_min + 1));
    for (std::int64_t h = h_min; h <= h_max; ++h)
        coeffs.push_back({h, t, completion_alpha(m, t, h), completion_beta(t, h)});
    return coeffs;
}

double completion_identity_check(const PrimePowerModulus& m, std::uint64_t a,
                                 std::uint64_t b, double t, const SqrtBranch& br) {
    if (m.n() < 2) throw UnsupportedDepth("completion check requires n >= 2");
    a %= m.q();
    b %= m.q();
    if (!m.is_unit(a) || !m.is_unit(b))
        throw NotAUnit("completion check requires unit a, b");
    if (!(t > 0.0 && t <= 1.0))
        throw UsageError("completion check requires t in (0, 1]");

    std::complex<double> lhs = renormalized_eval(m, a, b, t);

    const double root_q = std::sqrt(static_cast<double>(m.q()));
    std::complex<double> rhs{0.0, 0.0};
    for (std::uint64_t h = 0; h < m.q(); ++h) {
        std::uint64_t shifted = m.sub(a, h);
        if (m.legendre(m.mul(shifted, b)) != 1) continue;
        double kl = kloosterman_closed(m, shifted, b, br);
        if (kl == 0.0) continue;
        rhs += completion_alpha(m, t, static_cast<std::int64_t>(h)) * kl;
    }
    rhs /= root_q;
    return std::abs(lhs - rhs);
}

std::complex<double> incomplete_sum(const PrimePowerModulus& m, std::uint64_t a,
                                    std::uint64_t b, std::uint64_t x0,
                                    std::uint64_t x1) {
    a %= m.q();
    b %= m.q();
    std::complex<double> sum{0.0, 0.0};
    for (std::uint64_t x = std::max<std::uint64_t>(x0, 1); x <= x1; ++x) {
        if (x % m.p() == 0) continue;
        sum += unit_phase(m.add(m.mul(a, x % m.q()), m.mul(b, m.inv(x % m.q()))), m.q());
    }
    return sum / std::sqrt(static_cast<double>(m.q()));
}

namespace {

const char* variant_name(PathVariant v) {
    switch (v) {
        case PathVariant::Standard: return "standard";
        case PathVariant::Renormalized: return "renormalized";
        case PathVariant::Rearranged: return "rearranged";
    }
    return "standard";
}

void export_csv(const KloostermanPath& path, std::ostream& out) {
    out << "index,re,im\n";
    char line[96];
    for (std::size_t i = 0; i < path.vertices.size(); ++i) {
        std::snprintf(line, sizeof line, "%zu,%.12g,%.12g\n", i + 1,
                      path.vertices[i].real(), path.vertices[i].imag());
        out << line;
    }
}

void export_json(const KloostermanPath& path, std::ostream& out) {
    nlohmann::ordered_json doc;
    doc["p"] = path.modulus->p();
    doc["n"] = path.modulus->n();
    doc["a"] = path.a;
    doc["b"] = path.b;
    doc["variant"] = variant_name(path.variant);
    auto& verts = doc["vertices"] = nlohmann::ordered_json::array();
    for (const auto& v : path.vertices)
        verts.push_back({v.real(), v.imag()});
    out << doc.dump();
}

void export_svg(const KloostermanPath& path, std::ostream& out,
                const SvgOptions& opt) {
    std::vector<std::complex<double>> pts;
    if (opt.decimate && path.vertices.size() > opt.decimate_cap) {
        std::size_t stride = (path.vertices.size() + opt.decimate_cap - 1) / opt.decimate_cap;
        for (std::size_t i = 0; i < path.vertices.size(); i += stride)
            pts.push_back(path.vertices[i]);
        pts.push_back(path.vertices.back());
    } else {
        pts = path.vertices;
    }

    double xmin = std::numeric_limits<double>::max(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& v : pts) {
        xmin = std::min(xmin, v.real());
        xmax = std::max(xmax, v.real());
        ymin = std::min(ymin, v.imag());
        ymax = std::max(ymax, v.imag());
    }
    double w = std::max(xmax - xmin, 1e-9), h = std::max(ymax - ymin, 1e-9);
    double pad = 0.05 * std::max(w, h);
    xmin -= pad; ymin -= pad; w += 2 * pad; h += 2 * pad;
    double stroke = 0.0015 * std::max(w, h);

    char buf[160];
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
                  "viewBox=\"%.6g %.6g %.6g %.6g\">\n",
                  xmin, ymin, w, h);
    out << buf;
    std::snprintf(buf, sizeof buf,
                  "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"%.6g\" points=\"",
                  stroke);
    out << buf;
    for (const auto& v : pts) {
        // SVG y-axis points down; mirror within the viewBox
        std::snprintf(buf, sizeof buf, "%.8g,%.8g ", v.real(),
                      2.0 * ymin + h - v.imag());
        out << buf;
    }
    out << "\"/>\n</svg>\n";
}

} // namespace

void export_path(const KloostermanPath& path, PathFormat format, std::ostream& out,
                 const SvgOptions& svg) {
    switch (format) {
        case PathFormat::Csv: export_csv(path, out); break;
        case PathFormat::Json: export_json(path, out); break;
        case PathFormat::Svg: export_svg(path, out, svg); break;
    }
    if (!out) throw std::ios_base::failure("path export failed");
}

} // namespace kloostpath
