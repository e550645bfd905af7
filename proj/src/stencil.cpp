#include "ibflow/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace ibflow {

void StencilCriteria::validate() const {
    if (max_level < 1) throw InvalidInputError("stencil max_level must be >= 1");
    if (!(limit_distance > 0.0)) throw InvalidInputError("stencil limit_distance must be > 0");
    if (!(fov_angle > 0.0) || fov_angle > M_PI + 1e-12)
        throw InvalidInputError("stencil fov_angle must be in (0, pi]");
    if (points_cap < 0) throw InvalidInputError("points_cap must be >= 0");
}

std::vector<int> connectivity_stencil(const Mesh& mesh, int cell_id, int level,
                                      AdjacencyMode mode) {
    if (cell_id < 0 || cell_id >= mesh.n_cells()) throw IndexError("cell id out of range");
    if (level < 0) throw InvalidInputError("connectivity level must be >= 0");
    std::set<int> visited{cell_id};
    std::vector<int> frontier{cell_id};
    for (int c = 0; c < level; ++c) {
        std::vector<int> next;
        for (int id : frontier)
            for (int n : mesh.neighbours(id, mode))
                if (visited.insert(n).second) next.push_back(n);
        if (next.empty()) break;
        frontier.swap(next);
    }
    return {visited.begin(), visited.end()};
}

PrincipalDirections principal_directions(const Mesh& mesh, int cell_id) {
    if (cell_id < 0 || cell_id >= mesh.n_cells()) throw IndexError("cell id out of range");
    const auto& vs = mesh.cell_vertices(cell_id);
    const Vec3 b = mesh.cell_centre(cell_id);
    Mat3 cov = Mat3::Zero();
    for (int v : vs) {
        const Vec3 d = mesh.vertex(v) - b;
        cov += d * d.transpose();
    }
    cov /= static_cast<double>(vs.size());

    Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
    PrincipalDirections pd;
    const Vec3 evals = eig.eigenvalues();
    const double scale = mesh.cell_diameter(cell_id);
    if (evals.minCoeff() <= 1e-12 * scale * scale) {
        pd.isotropic_fallback = true;
        pd.T_pd = Mat3::Identity();
        pd.lambda = Vec3::Constant(std::max(scale, 1e-300));
        return pd;
    }
    for (int k = 0; k < 3; ++k) {
        Vec3 dir = eig.eigenvectors().col(k);
        // deterministic sign: largest-magnitude component positive
        int arg = 0;
        dir.cwiseAbs().maxCoeff(&arg);
        if (dir[arg] < 0.0) dir = -dir;
        pd.T_pd.row(k) = dir.transpose();
        pd.lambda[k] = std::sqrt(evals[k]);
    }
    return pd;
}

double anisotropic_distance(const PrincipalDirections& pd, const Vec3& a, const Vec3& b) {
    if (!(pd.lambda.minCoeff() > 0.0))
        throw InvalidInputError("anisotropic metric requires positive eigenvalues");
    const Vec3 local = pd.T_pd * (a - b);
    return (local.array() / pd.lambda.array()).matrix().norm();
}

Stencil build_extended_stencil(const Mesh& mesh, const Classification& cls,
                               const IbPoint& ib, const StencilCriteria& criteria) {
    criteria.validate();
    const int owner = ib.cell;
    if (owner < 0 || owner >= mesh.n_cells()) throw IndexError("IB point owner out of range");
    if (!cls.is_ib(owner))
        throw InvalidInputError("extended stencil requested for a non-IB cell");

    Stencil s;
    s.owner = owner;
    s.ib = ib;

    const double r_max = criteria.distance_in_h
                             ? criteria.limit_distance * mesh.cell_diameter(owner)
                             : criteria.limit_distance;
    const double cos_fov = std::cos(criteria.fov_angle);
    const Vec3 fluid_dir = -ib.normal; // unit, away from the solid
    const Vec3 k_own = mesh.cell_centre(owner);

    auto candidates = connectivity_stencil(mesh, owner, criteria.max_level, criteria.mode);
    s.diagnostics.candidates = static_cast<int>(candidates.size());

    for (int c : candidates) {
        if (c == owner) {
            ++s.diagnostics.removed_owner;
            continue;
        }
        if (cls.is_solid(c)) {
            ++s.diagnostics.removed_solid;
            continue;
        }
        const Vec3 k = mesh.cell_centre(c);
        if ((k - k_own).norm() > r_max) {
            ++s.diagnostics.removed_distance;
            continue;
        }
        const Vec3 to = k - ib.point;
        const double len = to.norm();
        // the IB point's own cell centre always sees the surface
        if (len > 1e-14 && to.dot(fluid_dir) < cos_fov * len) {
            ++s.diagnostics.removed_fov;
            continue;
        }
        s.members.push_back({c, k});
    }
    s.diagnostics.kept = static_cast<int>(s.members.size());
    if (s.members.empty()) {
        throw StencilStarvationError(
            "stencil of cell " + std::to_string(owner) + " is empty after filtering",
            s.diagnostics);
    }
    return s;
}

Stencil apply_points_cap(const Stencil& stencil, int n_cap, const PrincipalDirections& pd) {
    if (n_cap < 1) throw InvalidInputError("points cap must be >= 1");
    if (static_cast<int>(stencil.members.size()) <= n_cap) return stencil;

    std::vector<int> order(stencil.members.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> dist(stencil.members.size());
    for (size_t i = 0; i < stencil.members.size(); ++i)
        dist[i] = anisotropic_distance(pd, stencil.ib.point, stencil.members[i].centre);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (dist[a] != dist[b]) return dist[a] < dist[b];
        return stencil.members[a].cell < stencil.members[b].cell;
    });

    Stencil out = stencil;
    out.members.clear();
    for (int k = 0; k < n_cap; ++k) out.members.push_back(stencil.members[order[k]]);
    std::sort(out.members.begin(), out.members.end(),
              [](const StencilMember& a, const StencilMember& b) { return a.cell < b.cell; });
    out.diagnostics.removed_cap =
        static_cast<int>(stencil.members.size()) - static_cast<int>(out.members.size());
    out.diagnostics.kept = static_cast<int>(out.members.size());
    return out;
}

Stencil enrich_with_boundary_points(const Stencil& stencil, const Mesh& mesh,
                                    const std::vector<int>& conforming_patches,
                                    const std::vector<std::vector<IbPoint>>& other_surface_points,
                                    const StencilCriteria& criteria) {
    Stencil out = stencil;
    const double r_max = criteria.distance_in_h
                             ? criteria.limit_distance * mesh.cell_diameter(stencil.owner)
                             : criteria.limit_distance;
    const double cos_fov = std::cos(criteria.fov_angle);
    const Vec3 fluid_dir = -stencil.ib.normal;
    const Vec3 k_own = mesh.cell_centre(stencil.owner);

    auto admissible = [&](const Vec3& p) {
        if ((p - k_own).norm() > r_max) return false;
        const Vec3 to = p - stencil.ib.point;
        const double len = to.norm();
        if (len <= 1e-14) return false; // coincides with the IB point
        return to.dot(fluid_dir) >= cos_fov * len;
    };

    for (int pi : conforming_patches) {
        const Patch& patch = mesh.patches()[pi];
        for (int f : patch.faces) {
            const Vec3& fc = mesh.face_centre(f);
            if (!admissible(fc)) continue;
            BoundaryObs o;
            o.source = BoundaryObs::Source::ConformingPatch;
            o.position = fc;
            o.patch = pi;
            o.face = f;
            out.boundary_obs.push_back(o);
        }
    }
    for (int si = 0; si < static_cast<int>(other_surface_points.size()); ++si) {
        for (const IbPoint& q : other_surface_points[si]) {
            if (!admissible(q.point)) continue;
            BoundaryObs o;
            o.source = BoundaryObs::Source::OtherSurface;
            o.position = q.point;
            o.surface = si;
            o.cell = q.cell;
            out.boundary_obs.push_back(o);
        }
    }
    return out;
}

std::size_t ExchangeMap::total_exchanged() const {
    std::size_t n = 0;
    for (const auto& ch : channels) n += ch.cells.size();
    return n;
}

ExchangeMap build_exchange_map(const std::vector<int>& partition_of_cell,
                               const std::vector<Stencil>& stencils) {
    int n_part = 0;
    for (int p : partition_of_cell) n_part = std::max(n_part, p + 1);

    // (owner partition, needing partition) -> needed cells
    std::map<std::pair<int, int>, std::set<int>> need;
    for (const Stencil& s : stencils) {
        const int mine = partition_of_cell[s.owner];
        for (const StencilMember& m : s.members) {
            const int theirs = partition_of_cell[m.cell];
            if (theirs != mine) need[{theirs, mine}].insert(m.cell);
        }
        for (const BoundaryObs& o : s.boundary_obs) {
            if (o.source == BoundaryObs::Source::OtherSurface && o.cell >= 0) {
                const int theirs = partition_of_cell[o.cell];
                if (theirs != mine) need[{theirs, mine}].insert(o.cell);
            }
        }
    }

    ExchangeMap map;
    map.n_partitions = n_part;
    for (const auto& [key, cells] : need) {
        ExchangeChannel ch;
        ch.from = key.first;
        ch.to = key.second;
        ch.cells.assign(cells.begin(), cells.end());
        map.channels.push_back(std::move(ch));
    }
    return map;
}

std::vector<std::vector<std::pair<int, double>>> gather_exchange(
    const ExchangeMap& map, const std::vector<int>& partition_of_cell, const VecX& values) {
    std::vector<std::vector<std::pair<int, double>>> halo(map.n_partitions);
    for (const auto& ch : map.channels) {
        for (int cell : ch.cells) {
            if (partition_of_cell[cell] != ch.from)
                throw InvalidInputError("exchange channel lists a cell it does not own");
            halo[ch.to].emplace_back(cell, values(cell));
        }
    }
    for (auto& h : halo)
        std::sort(h.begin(), h.end());
    return halo;
}

std::vector<int> partition_cells(const Mesh& mesh, int n_partitions) {
    if (n_partitions < 1) throw InvalidInputError("partition count must be >= 1");
    const int nc = mesh.n_cells();
    std::vector<int> part(nc);
    const int chunk = (nc + n_partitions - 1) / n_partitions;
    for (int c = 0; c < nc; ++c) part[c] = std::min(c / chunk, n_partitions - 1);
    return part;
}

} // namespace ibflow
