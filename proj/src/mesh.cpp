#include "ibflow/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "ibflow/errors.hpp"

namespace ibflow {

std::string to_string(BcTag tag) {
    switch (tag) {
    case BcTag::Wall: return "wall";
    case BcTag::Inflow: return "inflow";
    case BcTag::Outflow: return "outflow";
    case BcTag::Symmetry: return "symmetry";
    }
    return "wall";
}

BcTag bc_tag_from_string(const std::string& s) {
    if (s == "wall") return BcTag::Wall;
    if (s == "inflow") return BcTag::Inflow;
    if (s == "outflow") return BcTag::Outflow;
    if (s == "symmetry") return BcTag::Symmetry;
    throw InvalidInputError("unknown boundary tag '" + s + "'");
}

Mesh::Mesh(std::vector<Vec3> vertices, std::vector<Face> faces,
           std::vector<std::vector<int>> cell_faces, std::vector<Patch> patches)
    : vertices_(std::move(vertices)),
      faces_(std::move(faces)),
      cell_faces_(std::move(cell_faces)),
      patches_(std::move(patches)) {
    validate();
    n_internal_ = 0;
    for (const auto& f : faces_) {
        if (f.neighbour != kNoNeighbour) ++n_internal_;
    }
    // internal-first ordering is part of the construction contract
    for (int f = 0; f < n_internal_; ++f) {
        if (faces_[f].neighbour == kNoNeighbour)
            throw InvalidGeometryError("faces must be ordered internal-first");
    }
    face_patch_.assign(faces_.size(), -1);
    for (int p = 0; p < static_cast<int>(patches_.size()); ++p) {
        for (int f : patches_[p].faces) {
            if (f < n_internal_ || f >= n_faces())
                throw InvalidGeometryError("patch '" + patches_[p].name +
                                           "' references a non-boundary face");
            if (face_patch_[f] != -1)
                throw InvalidGeometryError("face in more than one patch");
            face_patch_[f] = p;
        }
    }
    for (int f = n_internal_; f < n_faces(); ++f) {
        if (face_patch_[f] == -1)
            throw InvalidGeometryError("boundary face missing from all patches");
    }

    cell_vertices_.resize(cell_faces_.size());
    for (int c = 0; c < n_cells(); ++c) {
        std::set<int> vs;
        for (int f : cell_faces_[c])
            vs.insert(faces_[f].vertices.begin(), faces_[f].vertices.end());
        cell_vertices_[c].assign(vs.begin(), vs.end());
    }

    compute_geometry();
    build_adjacency();
}

void Mesh::validate() const {
    const int nv = static_cast<int>(vertices_.size());
    const int nc = static_cast<int>(cell_faces_.size());
    if (nc == 0) throw InvalidGeometryError("mesh has no cells");
    for (const auto& f : faces_) {
        if (f.vertices.size() < 3) throw InvalidGeometryError("face with <3 vertices");
        for (int v : f.vertices)
            if (v < 0 || v >= nv) throw InvalidGeometryError("face vertex id out of range");
        if (f.owner < 0 || f.owner >= nc) throw InvalidGeometryError("face owner out of range");
        if (f.neighbour != kNoNeighbour && (f.neighbour < 0 || f.neighbour >= nc))
            throw InvalidGeometryError("face neighbour out of range");
        if (f.neighbour == f.owner) throw InvalidGeometryError("face owner equals neighbour");
    }
    for (int c = 0; c < nc; ++c) {
        if (cell_faces_[c].size() < 4) throw InvalidGeometryError("cell with <4 faces");
        for (int f : cell_faces_[c]) {
            if (f < 0 || f >= static_cast<int>(faces_.size()))
                throw InvalidGeometryError("cell face id out of range");
            const Face& ff = faces_[f];
            if (ff.owner != c && ff.neighbour != c)
                throw InvalidGeometryError("cell references a face it does not bound");
        }
    }
}

namespace {

struct FaceGeom {
    Vec3 centre;
    Vec3 area;
};

FaceGeom face_geometry(const std::vector<Vec3>& verts, const std::vector<int>& loop) {
    Vec3 mean = Vec3::Zero();
    for (int v : loop) mean += verts[v];
    mean /= static_cast<double>(loop.size());

    Vec3 area = Vec3::Zero();
    Vec3 ctr = Vec3::Zero();
    double mag_sum = 0.0;
    const int n = static_cast<int>(loop.size());
    for (int k = 0; k < n; ++k) {
        const Vec3& a = verts[loop[k]];
        const Vec3& b = verts[loop[(k + 1) % n]];
        const Vec3 tri_area = 0.5 * (a - mean).cross(b - mean);
        const double m = tri_area.norm();
        area += tri_area;
        ctr += m * (mean + a + b) / 3.0;
        mag_sum += m;
    }
    FaceGeom g;
    g.area = area;
    g.centre = mag_sum > 0.0 ? Vec3(ctr / mag_sum) : mean;
    return g;
}

} // namespace

void Mesh::compute_geometry() {
    const int nf = n_faces();
    const int nc = n_cells();
    face_centre_.resize(nf);
    face_area_.resize(nf);
    face_area_mag_.resize(nf);
    for (int f = 0; f < nf; ++f) {
        FaceGeom g = face_geometry(vertices_, faces_[f].vertices);
        face_centre_[f] = g.centre;
        face_area_[f] = g.area;
        face_area_mag_[f] = g.area.norm();
        if (!(face_area_mag_[f] > 0.0))
            throw InvalidGeometryError("zero-area face");
    }

    // Orientation pass against rough cell centres, then exact measures.
    std::vector<Vec3> rough(nc, Vec3::Zero());
    std::vector<int> cnt(nc, 0);
    for (int c = 0; c < nc; ++c) {
        for (int f : cell_faces_[c]) {
            rough[c] += face_centre_[f];
            ++cnt[c];
        }
        rough[c] /= static_cast<double>(cnt[c]);
    }
    for (int f = 0; f < nf; ++f) {
        Face& ff = faces_[f];
        const Vec3 to = ff.neighbour == kNoNeighbour ? Vec3(face_centre_[f] - rough[ff.owner])
                                                     : Vec3(rough[ff.neighbour] - rough[ff.owner]);
        if (face_area_[f].dot(to) < 0.0) {
            std::reverse(ff.vertices.begin(), ff.vertices.end());
            face_area_[f] = -face_area_[f];
        }
    }

    cell_centre_.assign(nc, Vec3::Zero());
    cell_volume_.assign(nc, 0.0);
    for (int c = 0; c < nc; ++c) {
        Vec3 ref = Vec3::Zero();
        for (int v : cell_vertices_[c]) ref += vertices_[v];
        ref /= static_cast<double>(cell_vertices_[c].size());

        double vol = 0.0;
        Vec3 ctr = Vec3::Zero();
        for (int f : cell_faces_[c]) {
            const double sign = faces_[f].owner == c ? 1.0 : -1.0;
            const auto& loop = faces_[f].vertices;
            Vec3 mean = Vec3::Zero();
            for (int v : loop) mean += vertices_[v];
            mean /= static_cast<double>(loop.size());
            const int n = static_cast<int>(loop.size());
            for (int k = 0; k < n; ++k) {
                const Vec3& a = vertices_[loop[k]];
                const Vec3& b = vertices_[loop[(k + 1) % n]];
                // tetrahedron (ref, mean, a, b); outward faces give positive volume
                const double v6 = sign * (a - ref).cross(b - ref).dot(mean - ref);
                const double tv = v6 / 6.0;
                vol += tv;
                ctr += tv * (ref + mean + a + b) / 4.0;
            }
        }
        if (!(vol > 0.0)) throw InvalidGeometryError("non-positive cell volume");
        cell_volume_[c] = vol;
        cell_centre_[c] = ctr / vol;
    }

    cell_diameter_.assign(nc, 0.0);
    for (int c = 0; c < nc; ++c) {
        double d2 = 0.0;
        const auto& vs = cell_vertices_[c];
        for (size_t i = 0; i < vs.size(); ++i)
            for (size_t j = i + 1; j < vs.size(); ++j)
                d2 = std::max(d2, (vertices_[vs[i]] - vertices_[vs[j]]).squaredNorm());
        cell_diameter_[c] = std::sqrt(d2);
    }
    h_ = *std::max_element(cell_diameter_.begin(), cell_diameter_.end());
    total_volume_ = 0.0;
    for (double v : cell_volume_) total_volume_ += v;
    mean_face_area_ = 0.0;
    for (double a : face_area_mag_) mean_face_area_ += a;
    mean_face_area_ /= static_cast<double>(nf);

    face_delta_.resize(nf);
    face_weight_.resize(nf);
    for (int f = 0; f < nf; ++f) {
        const Face& ff = faces_[f];
        if (ff.neighbour != kNoNeighbour) {
            face_delta_[f] = cell_centre_[ff.neighbour] - cell_centre_[ff.owner];
            const double do_ = (face_centre_[f] - cell_centre_[ff.owner]).norm();
            const double dn_ = (face_centre_[f] - cell_centre_[ff.neighbour]).norm();
            face_weight_[f] = dn_ / std::max(do_ + dn_, 1e-300);
        } else {
            face_delta_[f] = face_centre_[f] - cell_centre_[ff.owner];
            face_weight_[f] = 1.0;
        }
    }

    bbox_min_ = Vec3::Constant(std::numeric_limits<double>::max());
    bbox_max_ = Vec3::Constant(std::numeric_limits<double>::lowest());
    for (const auto& v : vertices_) {
        bbox_min_ = bbox_min_.cwiseMin(v);
        bbox_max_ = bbox_max_.cwiseMax(v);
    }
}

void Mesh::build_adjacency() {
    const int nc = n_cells();
    face_adj_.assign(nc, {});
    for (int f = 0; f < n_internal_; ++f) {
        face_adj_[faces_[f].owner].push_back(faces_[f].neighbour);
        face_adj_[faces_[f].neighbour].push_back(faces_[f].owner);
    }
    for (auto& v : face_adj_) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }

    std::vector<std::vector<int>> vert_cells(vertices_.size());
    for (int c = 0; c < nc; ++c)
        for (int v : cell_vertices_[c]) vert_cells[v].push_back(c);
    vertex_adj_.assign(nc, {});
    for (int c = 0; c < nc; ++c) {
        std::set<int> s;
        for (int v : cell_vertices_[c])
            s.insert(vert_cells[v].begin(), vert_cells[v].end());
        s.erase(c);
        vertex_adj_[c].assign(s.begin(), s.end());
    }
}

const std::vector<int>& Mesh::neighbours(int c, AdjacencyMode m) const {
    if (c < 0 || c >= n_cells()) throw IndexError("cell id out of range");
    return m == AdjacencyMode::Face ? face_adj_[c] : vertex_adj_[c];
}

const Patch* Mesh::find_patch(const std::string& name) const {
    for (const auto& p : patches_)
        if (p.name == name) return &p;
    return nullptr;
}

std::vector<int> cell_neighbours(const Mesh& mesh, int cell_id, AdjacencyMode mode) {
    return mesh.neighbours(cell_id, mode);
}

namespace {

std::vector<double> axis_coords(double lo, double hi, int n, double grading) {
    if (!(hi > lo)) throw InvalidGeometryError("extent must be positive");
    if (n < 1) throw InvalidInputError("divisions must be >= 1");
    if (!(grading > 0.0)) throw InvalidInputError("grading must be > 0");
    const double len = hi - lo;
    std::vector<double> x(n + 1);
    x[0] = lo;
    if (n == 1 || grading == 1.0) {
        for (int i = 1; i <= n; ++i) x[i] = lo + len * i / n;
    } else {
        const double r = std::pow(grading, 1.0 / (n - 1));
        const double w0 = len * (1.0 - r) / (1.0 - std::pow(r, n));
        double w = w0;
        for (int i = 1; i <= n; ++i) {
            x[i] = x[i - 1] + w;
            w *= r;
        }
        x[n] = hi; // absorb roundoff
    }
    return x;
}

} // namespace

Mesh build_structured_grid(const Vec3& lo, const Vec3& hi,
                           std::array<int, 3> divisions, const Vec3& grading) {
    const int nx = divisions[0], ny = divisions[1], nz = divisions[2];
    const auto xs = axis_coords(lo.x(), hi.x(), nx, grading.x());
    const auto ys = axis_coords(lo.y(), hi.y(), ny, grading.y());
    const auto zs = axis_coords(lo.z(), hi.z(), nz, grading.z());

    auto vid = [&](int i, int j, int k) { return i + (nx + 1) * (j + (ny + 1) * k); };
    auto cid = [&](int i, int j, int k) { return i + nx * (j + ny * k); };

    std::vector<Vec3> verts((nx + 1) * (ny + 1) * (nz + 1));
    for (int k = 0; k <= nz; ++k)
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i <= nx; ++i) verts[vid(i, j, k)] = Vec3(xs[i], ys[j], zs[k]);

    std::vector<Face> faces;
    std::vector<std::vector<int>> cell_faces(nx * ny * nz);
    auto add_face = [&](std::vector<int> loop, int owner, int neighbour) {
        const int id = static_cast<int>(faces.size());
        faces.push_back(Face{std::move(loop), owner, neighbour});
        cell_faces[owner].push_back(id);
        if (neighbour != kNoNeighbour) cell_faces[neighbour].push_back(id);
        return id;
    };

    // internal faces
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 1; i < nx; ++i)
                add_face({vid(i, j, k), vid(i, j + 1, k), vid(i, j + 1, k + 1), vid(i, j, k + 1)},
                         cid(i - 1, j, k), cid(i, j, k));
    for (int k = 0; k < nz; ++k)
        for (int j = 1; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                add_face({vid(i, j, k), vid(i, j, k + 1), vid(i + 1, j, k + 1), vid(i + 1, j, k)},
                         cid(i, j - 1, k), cid(i, j, k));
    for (int k = 1; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                add_face({vid(i, j, k), vid(i + 1, j, k), vid(i + 1, j + 1, k), vid(i, j + 1, k)},
                         cid(i, j, k - 1), cid(i, j, k));

    std::vector<Patch> patches(6);
    const char* names[6] = {"xmin", "xmax", "ymin", "ymax", "zmin", "zmax"};
    for (int p = 0; p < 6; ++p) patches[p].name = names[p];

    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j) {
            patches[0].faces.push_back(add_face(
                {vid(0, j, k), vid(0, j, k + 1), vid(0, j + 1, k + 1), vid(0, j + 1, k)},
                cid(0, j, k), kNoNeighbour));
            patches[1].faces.push_back(add_face(
                {vid(nx, j, k), vid(nx, j + 1, k), vid(nx, j + 1, k + 1), vid(nx, j, k + 1)},
                cid(nx - 1, j, k), kNoNeighbour));
        }
    for (int k = 0; k < nz; ++k)
        for (int i = 0; i < nx; ++i) {
            patches[2].faces.push_back(add_face(
                {vid(i, 0, k), vid(i + 1, 0, k), vid(i + 1, 0, k + 1), vid(i, 0, k + 1)},
                cid(i, 0, k), kNoNeighbour));
            patches[3].faces.push_back(add_face(
                {vid(i, ny, k), vid(i, ny, k + 1), vid(i + 1, ny, k + 1), vid(i + 1, ny, k)},
                cid(i, ny - 1, k), kNoNeighbour));
        }
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            patches[4].faces.push_back(add_face(
                {vid(i, j, 0), vid(i, j + 1, 0), vid(i + 1, j + 1, 0), vid(i + 1, j, 0)},
                cid(i, j, 0), kNoNeighbour));
            patches[5].faces.push_back(add_face(
                {vid(i, j, nz), vid(i + 1, j, nz), vid(i + 1, j + 1, nz), vid(i, j + 1, nz)},
                cid(i, j, nz - 1), kNoNeighbour));
        }

    return Mesh(std::move(verts), std::move(faces), std::move(cell_faces), std::move(patches));
}

Mesh annular_grid(double inner_radius, double outer_radius,
                  std::array<int, 3> divisions, double depth) {
    if (!(inner_radius > 0.0) || !(outer_radius > inner_radius))
        throw InvalidGeometryError("annulus requires 0 < inner_radius < outer_radius");
    if (!(depth > 0.0)) throw InvalidGeometryError("annulus depth must be positive");
    const int nr = divisions[0], nt = divisions[1], nz = divisions[2];
    if (nr < 1 || nt < 3 || nz < 1)
        throw InvalidInputError("annulus divisions require nr>=1, ntheta>=3, nz>=1");

    auto vid = [&](int i, int j, int k) { return i + (nr + 1) * ((j % nt) + nt * k); };
    auto cid = [&](int i, int j, int k) { return i + nr * ((j % nt) + nt * k); };

    std::vector<Vec3> verts((nr + 1) * nt * (nz + 1));
    for (int k = 0; k <= nz; ++k)
        for (int j = 0; j < nt; ++j)
            for (int i = 0; i <= nr; ++i) {
                const double r = inner_radius + (outer_radius - inner_radius) * i / nr;
                const double th = 2.0 * M_PI * j / nt;
                verts[vid(i, j, k)] = Vec3(r * std::cos(th), r * std::sin(th), depth * k / nz);
            }

    std::vector<Face> faces;
    std::vector<std::vector<int>> cell_faces(nr * nt * nz);
    auto add_face = [&](std::vector<int> loop, int owner, int neighbour) {
        const int id = static_cast<int>(faces.size());
        faces.push_back(Face{std::move(loop), owner, neighbour});
        cell_faces[owner].push_back(id);
        if (neighbour != kNoNeighbour) cell_faces[neighbour].push_back(id);
        return id;
    };

    // radial-normal internal faces (between radial layers)
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < nt; ++j)
            for (int i = 1; i < nr; ++i)
                add_face({vid(i, j, k), vid(i, j + 1, k), vid(i, j + 1, k + 1), vid(i, j, k + 1)},
                         cid(i - 1, j, k), cid(i, j, k));
    // azimuthal faces, wrapping: face at angle index j separates cells j-1 and j
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < nt; ++j) {
            for (int i = 0; i < nr; ++i) {
                int c_prev = cid(i, (j + nt - 1) % nt, k);
                int c_next = cid(i, j, k);
                int owner = std::min(c_prev, c_next);
                int neigh = std::max(c_prev, c_next);
                add_face({vid(i, j, k), vid(i, j, k + 1), vid(i + 1, j, k + 1), vid(i + 1, j, k)},
                         owner, neigh);
            }
        }
    // axial internal faces
    for (int k = 1; k < nz; ++k)
        for (int j = 0; j < nt; ++j)
            for (int i = 0; i < nr; ++i)
                add_face({vid(i, j, k), vid(i + 1, j, k), vid(i + 1, j + 1, k), vid(i, j + 1, k)},
                         cid(i, j, k - 1), cid(i, j, k));

    std::vector<Patch> patches(4);
    patches[0].name = "inner";
    patches[1].name = "outer";
    patches[2].name = "front";
    patches[2].tag = BcTag::Symmetry;
    patches[3].name = "back";
    patches[3].tag = BcTag::Symmetry;

    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < nt; ++j) {
            patches[0].faces.push_back(
                add_face({vid(0, j, k), vid(0, j, k + 1), vid(0, j + 1, k + 1), vid(0, j + 1, k)},
                         cid(0, j, k), kNoNeighbour));
            patches[1].faces.push_back(
                add_face({vid(nr, j, k), vid(nr, j + 1, k), vid(nr, j + 1, k + 1), vid(nr, j, k + 1)},
                         cid(nr - 1, j, k), kNoNeighbour));
        }
    for (int j = 0; j < nt; ++j)
        for (int i = 0; i < nr; ++i) {
            patches[2].faces.push_back(
                add_face({vid(i, j, 0), vid(i, j + 1, 0), vid(i + 1, j + 1, 0), vid(i + 1, j, 0)},
                         cid(i, j, 0), kNoNeighbour));
            patches[3].faces.push_back(
                add_face({vid(i, j, nz), vid(i + 1, j, nz), vid(i + 1, j + 1, nz), vid(i, j + 1, nz)},
                         cid(i, j, nz - 1), kNoNeighbour));
        }

    // boundary faces are appended after internal ones by construction
    return Mesh(std::move(verts), std::move(faces), std::move(cell_faces), std::move(patches));
}

} // namespace ibflow
