#pragma once

#include <vector>

#include "ibflow/errors.hpp"
#include "ibflow/mesh.hpp"
#include "ibflow/surface.hpp"
#include "ibflow/types.hpp"

namespace ibflow {

struct StencilCriteria {
    int max_level = 2;             // connectivity bound c
    double limit_distance = 3.0;   // metres, or multiples of owner h
    bool distance_in_h = true;
    double fov_angle = 2.0 * M_PI / 3.0; // half-angle about the fluid direction
    int points_cap = 0;            // 0 = 2 * N_coeffs of the WLS degree
    AdjacencyMode mode = AdjacencyMode::Face;

    void validate() const;
};

struct StencilMember {
    int cell;
    Vec3 centre;
};

struct BoundaryObs {
    enum class Source { ConformingPatch, OtherSurface };
    Source source = Source::ConformingPatch;
    Vec3 position = Vec3::Zero();
    int patch = -1;   // patch index for ConformingPatch
    int face = -1;    // boundary face id for ConformingPatch
    int surface = -1; // surface index for OtherSurface
    int cell = -1;    // IB cell owning the borrowed IB point
};

struct Stencil {
    int owner = -1;
    IbPoint ib;
    std::vector<StencilMember> members;      // sorted by cell id
    std::vector<BoundaryObs> boundary_obs;
    StencilDiagnostics diagnostics;
};

struct PrincipalDirections {
    Mat3 T_pd = Mat3::Identity();  // rows are principal directions
    Vec3 lambda = Vec3::Ones();    // metres, strictly positive
    bool isotropic_fallback = false;
};

/// K^c of Eq-style recursion: K^0 = {cell}, K^c = neighbours of K^{c-1}
/// together with all lower levels. Sorted, includes the seed cell.
std::vector<int> connectivity_stencil(const Mesh& mesh, int cell_id, int level,
                                      AdjacencyMode mode);

/// Principal directions of a cell from the vertex-coordinate covariance
/// about the barycentre; lambda holds square-rooted eigenvalues.
PrincipalDirections principal_directions(const Mesh& mesh, int cell_id);

/// dist = |Lambda^-1 T_pd (a - b)|
double anisotropic_distance(const PrincipalDirections& pd, const Vec3& a, const Vec3& b);

/// Connectivity + spatial distance + field of view filters, owner excluded.
/// Throws StencilStarvationError with elimination counts when empty.
Stencil build_extended_stencil(const Mesh& mesh, const Classification& cls,
                               const IbPoint& ib, const StencilCriteria& criteria);

/// Keep the n_cap members nearest to the IB point in the anisotropic
/// metric; ties break on ascending cell id.
Stencil apply_points_cap(const Stencil& stencil, int n_cap, const PrincipalDirections& pd);

/// Append boundary-face centres of the given conforming patches and IB
/// points of other surfaces that fall inside the distance and field-of-view
/// window of the stencil.
Stencil enrich_with_boundary_points(const Stencil& stencil, const Mesh& mesh,
                                    const std::vector<int>& conforming_patches,
                                    const std::vector<std::vector<IbPoint>>& other_surface_points,
                                    const StencilCriteria& criteria);

// ---------------- exchange map (simulated partitions) ----------------

struct ExchangeChannel {
    int from = -1;              // owning partition of the cells
    int to = -1;                // partition that needs them
    std::vector<int> cells;     // ascending global cell ids
};

struct ExchangeMap {
    int n_partitions = 0;
    std::vector<ExchangeChannel> channels; // sorted by (from, to)

    std::size_t total_exchanged() const;
};

/// Minimal send/receive plan: every stencil member owned by a foreign
/// partition appears in exactly one channel toward the stencil owner's
/// partition.
ExchangeMap build_exchange_map(const std::vector<int>& partition_of_cell,
                               const std::vector<Stencil>& stencils);

/// Replay of the exchange: per-partition halo stores filled only through
/// the map. halo[p] maps global cell id -> value for every foreign cell
/// partition p needs.
std::vector<std::vector<std::pair<int, double>>> gather_exchange(
    const ExchangeMap& map, const std::vector<int>& partition_of_cell, const VecX& values);

/// Deterministic block partition of cells for `--partitions n` runs.
std::vector<int> partition_cells(const Mesh& mesh, int n_partitions);

} // namespace ibflow
