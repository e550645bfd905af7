#include "ibflow/surface.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "ibflow/errors.hpp"

namespace ibflow {

TriSurface::TriSurface(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> triangles)
    : vertices_(std::move(vertices)), tris_(std::move(triangles)) {
    finalize();
}

void TriSurface::finalize() {
    const int nv = n_vertices();
    const int nt = n_triangles();
    if (nt < 4) throw SurfaceQualityError("surface has too few triangles to be closed");

    area_.resize(nt);
    centre_.resize(nt);
    normal_.resize(nt);
    bbox_min_ = Vec3::Constant(std::numeric_limits<double>::max());
    bbox_max_ = Vec3::Constant(std::numeric_limits<double>::lowest());
    for (const auto& v : vertices_) {
        bbox_min_ = bbox_min_.cwiseMin(v);
        bbox_max_ = bbox_max_.cwiseMax(v);
    }
    const double scale = (bbox_max_ - bbox_min_).norm();

    total_area_ = 0.0;
    enclosed_volume_ = 0.0;
    centroid_ = Vec3::Zero();
    for (int t = 0; t < nt; ++t) {
        const auto& tri = tris_[t];
        for (int k = 0; k < 3; ++k)
            if (tri[k] < 0 || tri[k] >= nv)
                throw SurfaceQualityError("triangle vertex id out of range");
        const Vec3& a = vertices_[tri[0]];
        const Vec3& b = vertices_[tri[1]];
        const Vec3& c = vertices_[tri[2]];
        const Vec3 n2 = (b - a).cross(c - a);
        const double area2 = n2.norm();
        if (area2 <= 1e-14 * scale * scale)
            throw SurfaceQualityError("zero-area triangle");
        area_[t] = 0.5 * area2;
        centre_[t] = (a + b + c) / 3.0;
        normal_[t] = n2 / area2;
        total_area_ += area_[t];
        enclosed_volume_ += a.dot(b.cross(c)) / 6.0;
        centroid_ += area_[t] * centre_[t];
    }
    centroid_ /= total_area_;
    enclosed_volume_ = std::abs(enclosed_volume_);

    // manifold gate: every directed edge exactly once, so every undirected
    // edge is shared by exactly two consistently oriented triangles
    std::map<std::pair<int, int>, int> directed;
    for (int t = 0; t < nt; ++t) {
        for (int k = 0; k < 3; ++k) {
            const int a = tris_[t][k];
            const int b = tris_[t][(k + 1) % 3];
            if (a == b) throw SurfaceQualityError("degenerate triangle edge");
            if (!directed.emplace(std::make_pair(a, b), t).second)
                throw SurfaceQualityError("non-manifold or inconsistently oriented edge");
        }
    }
    edge_tris_.assign(nt, {-1, -1, -1});
    for (int t = 0; t < nt; ++t) {
        for (int k = 0; k < 3; ++k) {
            const int a = tris_[t][k];
            const int b = tris_[t][(k + 1) % 3];
            auto it = directed.find(std::make_pair(b, a));
            if (it == directed.end())
                throw SurfaceQualityError("open edge: surface is not closed");
            edge_tris_[t][k] = it->second;
        }
    }
    vertex_tris_.assign(nv, {});
    for (int t = 0; t < nt; ++t)
        for (int k = 0; k < 3; ++k) vertex_tris_[tris_[t][k]].push_back(t);

    // acceleration grid
    const Vec3 extent = (bbox_max_ - bbox_min_).cwiseMax(Vec3::Constant(1e-12));
    const int target = std::max(1, static_cast<int>(std::cbrt(static_cast<double>(nt) / 4.0)));
    for (int k = 0; k < 3; ++k) grid_.dims[k] = std::max(1, target);
    grid_.origin = bbox_min_;
    for (int k = 0; k < 3; ++k) grid_.cell[k] = extent[k] / grid_.dims[k];
    grid_.bins.assign(static_cast<size_t>(grid_.dims[0]) * grid_.dims[1] * grid_.dims[2], {});
    auto bin_of = [&](int i, int j, int k) {
        return static_cast<size_t>(i) + grid_.dims[0] * (static_cast<size_t>(j) + grid_.dims[1] * k);
    };
    for (int t = 0; t < nt; ++t) {
        Vec3 lo = vertices_[tris_[t][0]], hi = lo;
        for (int k = 1; k < 3; ++k) {
            lo = lo.cwiseMin(vertices_[tris_[t][k]]);
            hi = hi.cwiseMax(vertices_[tris_[t][k]]);
        }
        std::array<int, 3> ilo, ihi;
        for (int k = 0; k < 3; ++k) {
            ilo[k] = std::clamp(static_cast<int>((lo[k] - grid_.origin[k]) / grid_.cell[k]), 0,
                                grid_.dims[k] - 1);
            ihi[k] = std::clamp(static_cast<int>((hi[k] - grid_.origin[k]) / grid_.cell[k]), 0,
                                grid_.dims[k] - 1);
        }
        for (int k = ilo[2]; k <= ihi[2]; ++k)
            for (int j = ilo[1]; j <= ihi[1]; ++j)
                for (int i = ilo[0]; i <= ihi[0]; ++i)
                    grid_.bins[bin_of(i, j, k)].push_back(t);
    }
}

std::vector<int> TriSurface::candidates_near(const Vec3& p, double radius) const {
    std::array<int, 3> ilo, ihi;
    for (int k = 0; k < 3; ++k) {
        ilo[k] = std::clamp(static_cast<int>((p[k] - radius - grid_.origin[k]) / grid_.cell[k]), 0,
                            grid_.dims[k] - 1);
        ihi[k] = std::clamp(static_cast<int>((p[k] + radius - grid_.origin[k]) / grid_.cell[k]), 0,
                            grid_.dims[k] - 1);
    }
    std::vector<int> out;
    for (int k = ilo[2]; k <= ihi[2]; ++k)
        for (int j = ilo[1]; j <= ihi[1]; ++j)
            for (int i = ilo[0]; i <= ihi[0]; ++i) {
                const auto& bin =
                    grid_.bins[static_cast<size_t>(i) +
                               grid_.dims[0] * (static_cast<size_t>(j) + grid_.dims[1] * k)];
                out.insert(out.end(), bin.begin(), bin.end());
            }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

TriSurface TriSurface::transformed(const Vec3& axis, const Vec3& anchor, double angle,
                                   const Vec3& translation) const {
    const Vec3 u = axis.normalized();
    const Eigen::AngleAxisd rot(angle, u);
    std::vector<Vec3> verts(vertices_.size());
    for (size_t i = 0; i < vertices_.size(); ++i)
        verts[i] = anchor + rot * (vertices_[i] - anchor) + translation;
    return TriSurface(std::move(verts), tris_);
}

Vec3 TriSurface::pseudo_normal(int tri, const Vec3& bary) const {
    constexpr double eps = 1e-9;
    int zero_count = 0;
    std::array<bool, 3> zero{};
    for (int k = 0; k < 3; ++k) {
        zero[k] = bary[k] < eps;
        if (zero[k]) ++zero_count;
    }
    if (zero_count == 0) return normal_[tri];
    if (zero_count == 1) {
        // on the edge opposite the zero coordinate
        int k = zero[0] ? 0 : (zero[1] ? 1 : 2);
        // edge between the two non-zero barycentric vertices: local edge index
        // edges: k=0 ->(v0,v1), 1->(v1,v2), 2->(v2,v0); zero coord k means edge (k+1, k+2)
        const int edge = (k + 1) % 3;
        const int other = edge_tris_[tri][edge];
        Vec3 n = normal_[tri] + normal_[other];
        const double m = n.norm();
        return m > 0.0 ? Vec3(n / m) : normal_[tri];
    }
    // vertex case: angle-weighted average of incident triangle normals
    int k = !zero[0] ? 0 : (!zero[1] ? 1 : 2);
    const int v = tris_[tri][k];
    Vec3 n = Vec3::Zero();
    for (int t : vertex_tris_[v]) {
        const auto& tv = tris_[t];
        int local = tv[0] == v ? 0 : (tv[1] == v ? 1 : 2);
        const Vec3& a = vertices_[tv[local]];
        const Vec3& b = vertices_[tv[(local + 1) % 3]];
        const Vec3& c = vertices_[tv[(local + 2) % 3]];
        const Vec3 e1 = (b - a).normalized();
        const Vec3 e2 = (c - a).normalized();
        const double angle = std::acos(std::clamp(e1.dot(e2), -1.0, 1.0));
        n += angle * normal_[t];
    }
    const double m = n.norm();
    return m > 0.0 ? Vec3(n / m) : normal_[tri];
}

// ---------------- STL ----------------

namespace {

TriSurface from_soup(const std::vector<std::array<Vec3, 3>>& soup) {
    // weld vertices exactly (STL repeats coordinates verbatim)
    std::map<std::array<double, 3>, int> index;
    std::vector<Vec3> verts;
    std::vector<std::array<int, 3>> tris;
    tris.reserve(soup.size());
    for (const auto& t : soup) {
        std::array<int, 3> ids;
        for (int k = 0; k < 3; ++k) {
            std::array<double, 3> key{t[k].x(), t[k].y(), t[k].z()};
            auto [it, inserted] = index.emplace(key, static_cast<int>(verts.size()));
            if (inserted) verts.push_back(t[k]);
            ids[k] = it->second;
        }
        tris.push_back(ids);
    }
    return TriSurface(std::move(verts), std::move(tris));
}

} // namespace

TriSurface load_stl(std::istream& in) {
    // sniff: binary STL has an 80-byte header then uint32 count
    char head[6] = {0};
    in.read(head, 5);
    for (int i = 0; i < 5; ++i) head[i] = static_cast<char>(std::tolower(head[i]));
    in.seekg(0);
    std::vector<std::array<Vec3, 3>> soup;
    if (std::strncmp(head, "solid", 5) == 0) {
        std::string tok;
        std::array<Vec3, 3> tri;
        int vcount = 0;
        while (in >> tok) {
            if (tok == "vertex") {
                Vec3 v;
                if (!(in >> v.x() >> v.y() >> v.z()))
                    throw InvalidInputError("bad STL vertex");
                if (vcount > 2) throw InvalidInputError("facet with more than 3 vertices");
                tri[vcount++] = v;
            } else if (tok == "endfacet") {
                if (vcount != 3) throw InvalidInputError("facet without 3 vertices");
                soup.push_back(tri);
                vcount = 0;
            }
        }
    } else {
        char header[80];
        in.read(header, 80);
        uint32_t n = 0;
        in.read(reinterpret_cast<char*>(&n), 4);
        if (!in) throw InvalidInputError("truncated binary STL");
        soup.resize(n);
        for (uint32_t t = 0; t < n; ++t) {
            float buf[12];
            in.read(reinterpret_cast<char*>(buf), 48);
            uint16_t attr;
            in.read(reinterpret_cast<char*>(&attr), 2);
            if (!in) throw InvalidInputError("truncated binary STL");
            for (int k = 0; k < 3; ++k)
                soup[t][k] = Vec3(buf[3 + 3 * k], buf[4 + 3 * k], buf[5 + 3 * k]);
        }
    }
    if (soup.empty()) throw InvalidInputError("empty STL");
    return from_soup(soup);
}

TriSurface load_stl_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInputError("cannot open STL '" + path + "'");
    return load_stl(in);
}

void write_stl_file(const std::string& path, const TriSurface& s, const std::string& name) {
    std::ofstream out(path);
    if (!out) throw InvalidInputError("cannot open '" + path + "' for writing");
    out << "solid " << name << "\n";
    out.precision(17);
    for (int t = 0; t < s.n_triangles(); ++t) {
        const Vec3& n = s.triangle_normal(t);
        out << "  facet normal " << n.x() << " " << n.y() << " " << n.z() << "\n";
        out << "    outer loop\n";
        for (int k = 0; k < 3; ++k) {
            const Vec3& v = s.vertex(s.triangle(t)[k]);
            out << "      vertex " << v.x() << " " << v.y() << " " << v.z() << "\n";
        }
        out << "    endloop\n  endfacet\n";
    }
    out << "endsolid " << name << "\n";
}

// ---------------- primitives ----------------

TriSurface make_icosphere(const Vec3& centre, double radius, int subdivisions) {
    if (!(radius > 0.0)) throw InvalidGeometryError("icosphere radius must be positive");
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> verts = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
    std::vector<std::array<int, 3>> tris = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    for (auto& v : verts) v.normalize();

    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            Vec3 m = (verts[a] + verts[b]).normalized();
            verts.push_back(m);
            int id = static_cast<int>(verts.size()) - 1;
            midpoint.emplace(key, id);
            return id;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(tris.size() * 4);
        for (const auto& t : tris) {
            int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
            next.push_back({t[0], ab, ca});
            next.push_back({t[1], bc, ab});
            next.push_back({t[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        tris.swap(next);
    }
    for (auto& v : verts) v = centre + radius * v;
    return TriSurface(std::move(verts), std::move(tris));
}

TriSurface make_cylinder(const Vec3& anchor, const Vec3& axis, double radius,
                         double half_length, int segments, int axial_segments) {
    if (!(radius > 0.0) || !(half_length > 0.0))
        throw InvalidGeometryError("cylinder radius and half_length must be positive");
    if (segments < 3 || axial_segments < 1)
        throw InvalidInputError("cylinder needs >=3 segments and >=1 axial segment");
    const Vec3 w = axis.normalized();
    Vec3 u = w.cross(Vec3::UnitX());
    if (u.norm() < 1e-8) u = w.cross(Vec3::UnitY());
    u.normalize();
    const Vec3 v = w.cross(u);

    std::vector<Vec3> verts;
    std::vector<std::array<int, 3>> tris;
    const int nz = axial_segments;
    auto ring_vid = [&](int k, int j) { return k * segments + (j % segments); };
    for (int k = 0; k <= nz; ++k) {
        const double z = -half_length + 2.0 * half_length * k / nz;
        for (int j = 0; j < segments; ++j) {
            const double th = 2.0 * M_PI * j / segments;
            verts.push_back(anchor + radius * (std::cos(th) * u + std::sin(th) * v) + z * w);
        }
    }
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < segments; ++j) {
            const int a = ring_vid(k, j), b = ring_vid(k, j + 1);
            const int c = ring_vid(k + 1, j), d = ring_vid(k + 1, j + 1);
            tris.push_back({a, b, d});
            tris.push_back({a, d, c});
        }
    // caps (fans around axis points)
    const int bottom = static_cast<int>(verts.size());
    verts.push_back(anchor - half_length * w);
    const int top = static_cast<int>(verts.size());
    verts.push_back(anchor + half_length * w);
    for (int j = 0; j < segments; ++j) {
        tris.push_back({bottom, ring_vid(0, j + 1), ring_vid(0, j)});
        tris.push_back({top, ring_vid(nz, j), ring_vid(nz, j + 1)});
    }
    return TriSurface(std::move(verts), std::move(tris));
}

// ---------------- queries ----------------

namespace {

// Moller-Trumbore; returns t along dir, barycentric (u,v), or false.
bool ray_triangle(const Vec3& orig, const Vec3& dir, const Vec3& a, const Vec3& b,
                  const Vec3& c, double& t, double& u, double& v) {
    constexpr double eps = 1e-14;
    const Vec3 e1 = b - a, e2 = c - a;
    const Vec3 p = dir.cross(e2);
    const double det = e1.dot(p);
    if (std::abs(det) < eps) return false;
    const double inv = 1.0 / det;
    const Vec3 s = orig - a;
    u = s.dot(p) * inv;
    if (u < -1e-12 || u > 1.0 + 1e-12) return false;
    const Vec3 q = s.cross(e1);
    v = dir.dot(q) * inv;
    if (v < -1e-12 || u + v > 1.0 + 1e-12) return false;
    t = e2.dot(q) * inv;
    return true;
}

// fixed set of ray directions; later entries are fallbacks when a cast
// grazes an edge or runs parallel to a facet
const Vec3 kRayDirs[] = {
    Vec3(0.5773502691896258, 0.5773502691896258, 0.5773502691896258),
    Vec3(0.8554003465840493, -0.4960411476728245, 0.1478094111296141),
    Vec3(-0.2726062665379241, 0.9320587271509318, 0.2390408030731537),
    Vec3(0.1097643621837915, -0.3357838522657312, 0.9355196541628049),
    Vec3(-0.7738549481393456, -0.5335231136525646, 0.3414687316543218),
    Vec3(0.6651411200621050, 0.2657814260909617, -0.6978201802368124),
    Vec3(-0.4900471537791950, 0.1193785502417417, -0.8634909992032264),
    Vec3(0.9486450981383550, 0.3121123529338436, 0.0520948516783638)};

} // namespace

Containment is_inside(const TriSurface& s, const Vec3& p) {
    const Vec3 lo = s.bbox_min();
    const Vec3 hi = s.bbox_max();
    for (int k = 0; k < 3; ++k)
        if (p[k] < lo[k] || p[k] > hi[k]) return Containment::Outside;

    const double scale = (hi - lo).norm();
    const double on_eps = 1e-12 * scale;

    for (const Vec3& dir : kRayDirs) {
        int crossings = 0;
        bool unreliable = false;
        for (int t = 0; t < s.n_triangles() && !unreliable; ++t) {
            const auto& tri = s.triangle(t);
            double tt, u, v;
            if (!ray_triangle(p, dir, s.vertex(tri[0]), s.vertex(tri[1]), s.vertex(tri[2]), tt,
                              u, v))
                continue;
            if (std::abs(tt) <= on_eps) return Containment::Boundary;
            if (tt < 0.0) continue;
            // hits near an edge or vertex could double-count; retry
            const double w = 1.0 - u - v;
            if (u < 1e-10 || v < 1e-10 || w < 1e-10) {
                unreliable = true;
                break;
            }
            ++crossings;
        }
        if (!unreliable) return crossings % 2 == 1 ? Containment::Inside : Containment::Outside;
    }
    // all rays grazed; fall back to parity of the last (deterministic)
    int crossings = 0;
    for (int t = 0; t < s.n_triangles(); ++t) {
        const auto& tri = s.triangle(t);
        double tt, u, v;
        if (ray_triangle(p, kRayDirs[0], s.vertex(tri[0]), s.vertex(tri[1]), s.vertex(tri[2]),
                         tt, u, v) &&
            tt > on_eps)
            ++crossings;
    }
    return crossings % 2 == 1 ? Containment::Inside : Containment::Outside;
}

namespace {

// Ericson, Real-Time Collision Detection: closest point on a triangle.
Vec3 closest_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c,
                         Vec3& bary) {
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) {
        bary = Vec3(1, 0, 0);
        return a;
    }
    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) {
        bary = Vec3(0, 1, 0);
        return b;
    }
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
        const double t = d1 / (d1 - d3);
        bary = Vec3(1 - t, t, 0);
        return a + t * ab;
    }
    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) {
        bary = Vec3(0, 0, 1);
        return c;
    }
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
        const double t = d2 / (d2 - d6);
        bary = Vec3(1 - t, 0, t);
        return a + t * ac;
    }
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        const double t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        bary = Vec3(0, 1 - t, t);
        return b + t * (c - b);
    }
    const double denom = 1.0 / (va + vb + vc);
    const double v = vb * denom, w = vc * denom;
    bary = Vec3(1 - v - w, v, w);
    return a + ab * v + ac * w;
}

} // namespace

IbPoint project_to_surface(const TriSurface& s, const Vec3& p) {
    IbPoint best;
    double best_d2 = std::numeric_limits<double>::max();
    Vec3 best_bary = Vec3::Zero();

    // ring search over the acceleration grid, widening until a hit is safe
    const double cell = s.grid().cell.minCoeff();
    double radius = std::max(cell, 1e-12);
    std::vector<int> cand;
    for (int iter = 0; iter < 64; ++iter) {
        cand = s.candidates_near(p, radius);
        for (int t : cand) {
            const auto& tri = s.triangle(t);
            Vec3 bary;
            const Vec3 q =
                closest_on_triangle(p, s.vertex(tri[0]), s.vertex(tri[1]), s.vertex(tri[2]), bary);
            const double d2 = (q - p).squaredNorm();
            if (d2 < best_d2) {
                best_d2 = d2;
                best.point = q;
                best.triangle = t;
                best_bary = bary;
            }
        }
        // safe once the found distance is within the searched radius
        if (best_d2 <= radius * radius) break;
        radius *= 2.0;
        if (cand.size() == static_cast<size_t>(s.n_triangles())) break;
    }
    if (best.triangle < 0) {
        for (int t = 0; t < s.n_triangles(); ++t) {
            const auto& tri = s.triangle(t);
            Vec3 bary;
            const Vec3 q =
                closest_on_triangle(p, s.vertex(tri[0]), s.vertex(tri[1]), s.vertex(tri[2]), bary);
            const double d2 = (q - p).squaredNorm();
            if (d2 < best_d2) {
                best_d2 = d2;
                best.point = q;
                best.triangle = t;
                best_bary = bary;
            }
        }
    }
    best.distance = std::sqrt(best_d2);
    // outward pseudo-normal, flipped inward the solid set
    best.normal = -s.pseudo_normal(best.triangle, best_bary);
    return best;
}

int Classification::count(CellLabel l) const {
    int n = 0;
    for (auto x : labels)
        if (x == l) ++n;
    return n;
}

Classification classify_cells_multi(const Mesh& mesh,
                                    const std::vector<const TriSurface*>& surfaces,
                                    AdjacencyMode mode) {
    Classification cls;
    const int nc = mesh.n_cells();
    cls.labels.assign(nc, CellLabel::Fluid);

    bool any_overlap = false;
    for (const TriSurface* s : surfaces) {
        bool overlap = true;
        for (int k = 0; k < 3; ++k)
            if (s->bbox_max()[k] < mesh.bbox_min()[k] || s->bbox_min()[k] > mesh.bbox_max()[k])
                overlap = false;
        if (!overlap) continue;
        any_overlap = true;
        for (int c = 0; c < nc; ++c) {
            if (cls.labels[c] == CellLabel::Solid) continue;
            if (is_inside(*s, mesh.cell_centre(c)) != Containment::Outside)
                cls.labels[c] = CellLabel::Solid;
        }
    }
    if (!surfaces.empty() && !any_overlap) cls.all_fluid_warning = true;

    for (int c = 0; c < nc; ++c) {
        if (cls.labels[c] == CellLabel::Solid) continue;
        for (int n : mesh.neighbours(c, mode)) {
            if (cls.labels[n] == CellLabel::Solid) {
                cls.labels[c] = CellLabel::Ib;
                break;
            }
        }
    }
    for (int c = 0; c < nc; ++c)
        if (cls.labels[c] == CellLabel::Ib) cls.ib_cells.push_back(c);
    return cls;
}

Classification classify_cells(const Mesh& mesh, const TriSurface& surface, AdjacencyMode mode,
                              bool invert) {
    if (!invert) return classify_cells_multi(mesh, {&surface}, mode);

    // internal flow: swap solid and fluid roles
    Classification cls;
    const int nc = mesh.n_cells();
    cls.labels.assign(nc, CellLabel::Fluid);
    for (int c = 0; c < nc; ++c)
        if (is_inside(surface, mesh.cell_centre(c)) == Containment::Outside)
            cls.labels[c] = CellLabel::Solid;
    for (int c = 0; c < nc; ++c) {
        if (cls.labels[c] == CellLabel::Solid) continue;
        for (int n : mesh.neighbours(c, mode)) {
            if (cls.labels[n] == CellLabel::Solid) {
                cls.labels[c] = CellLabel::Ib;
                break;
            }
        }
    }
    for (int c = 0; c < nc; ++c)
        if (cls.labels[c] == CellLabel::Ib) cls.ib_cells.push_back(c);
    return cls;
}

Vec3 boundary_velocity(const RigidMotion& motion, const Vec3& point, double time) {
    (void)time; // motions are steady in rate; kept for the call protocol
    return motion.translation + motion.omega * motion.axis.normalized().cross(point - motion.anchor);
}

PlanetaryKinematics planetary_kinematics(double R_s, double R_p, double omega_s) {
    if (!(R_s > 0.0) || !(R_p > 0.0))
        throw InvalidGeometryError("planetary radii must be positive");
    PlanetaryKinematics k;
    k.R_s = R_s;
    k.R_p = R_p;
    k.R_r = R_s + 2.0 * R_p;
    k.omega_s = omega_s;
    k.omega_c = omega_s * R_s / (2.0 * (R_s + R_p));
    k.omega_p = -k.omega_c * (R_s + R_p) / R_p;
    k.omega_s_rel = omega_s - k.omega_c;
    k.omega_r_rel = -k.omega_c;
    k.omega_p_rel = k.omega_p - k.omega_c;
    return k;
}

} // namespace ibflow
