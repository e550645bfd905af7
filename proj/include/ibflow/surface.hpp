#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "ibflow/mesh.hpp"
#include "ibflow/types.hpp"

namespace ibflow {

/// Closed triangulated manifold. Construction runs the quality gate:
/// non-manifold edges, inconsistent orientation, and zero-area triangles
/// are rejected rather than repaired.
class TriSurface {
public:
    TriSurface(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> triangles);

    int n_vertices() const { return static_cast<int>(vertices_.size()); }
    int n_triangles() const { return static_cast<int>(tris_.size()); }
    const Vec3& vertex(int v) const { return vertices_[v]; }
    const std::array<int, 3>& triangle(int t) const { return tris_[t]; }

    double triangle_area(int t) const { return area_[t]; }
    const Vec3& triangle_centre(int t) const { return centre_[t]; }
    const Vec3& triangle_normal(int t) const { return normal_[t]; } // outward unit

    double total_area() const { return total_area_; }
    double enclosed_volume() const { return enclosed_volume_; }
    const Vec3& bbox_min() const { return bbox_min_; }
    const Vec3& bbox_max() const { return bbox_max_; }
    Vec3 centroid() const { return centroid_; }

    /// Rigid transform: rotate by angle about (axis through anchor), then
    /// translate. Returns a new surface.
    TriSurface transformed(const Vec3& axis, const Vec3& anchor, double angle,
                           const Vec3& translation) const;

    /// Angle-weighted pseudo-normal of the surface feature nearest to the
    /// barycentric coordinates (face interior / edge / vertex), outward.
    Vec3 pseudo_normal(int tri, const Vec3& bary) const;

    // spatial acceleration (shared read-only)
    struct Grid {
        Vec3 origin;
        Vec3 cell;
        std::array<int, 3> dims;
        std::vector<std::vector<int>> bins;
    };
    const Grid& grid() const { return grid_; }
    std::vector<int> candidates_near(const Vec3& p, double radius) const;

private:
    void finalize();

    std::vector<Vec3> vertices_;
    std::vector<std::array<int, 3>> tris_;
    std::vector<double> area_;
    std::vector<Vec3> centre_, normal_;
    std::vector<std::array<int, 3>> edge_tris_; // per tri: adjacent tri across edge k..k+1
    std::vector<std::vector<int>> vertex_tris_;
    double total_area_ = 0.0, enclosed_volume_ = 0.0;
    Vec3 bbox_min_, bbox_max_, centroid_;
    Grid grid_;
};

TriSurface load_stl(std::istream& in);
TriSurface load_stl_file(const std::string& path);
void write_stl_file(const std::string& path, const TriSurface& s, const std::string& name = "surface");

TriSurface make_icosphere(const Vec3& centre, double radius, int subdivisions);
/// Closed cylinder of given radius about (axis through anchor), spanning
/// [-half_length, +half_length] along the axis, with capped ends.
TriSurface make_cylinder(const Vec3& anchor, const Vec3& axis, double radius,
                         double half_length, int segments, int axial_segments = 1);

enum class Containment { Outside, Inside, Boundary };

/// Parity ray cast. Points within 1e-12 * scale of the surface report
/// Boundary; callers treat that as inside (conservative toward SOLID).
Containment is_inside(const TriSurface& s, const Vec3& p);
inline bool is_inside_bool(const TriSurface& s, const Vec3& p) {
    return is_inside(s, p) != Containment::Outside;
}

/// Projection of a point onto the surface. normal points inward the solid.
struct IbPoint {
    int cell = -1;
    Vec3 point = Vec3::Zero();
    Vec3 normal = Vec3::Zero(); // unit, toward the solid side
    double distance = 0.0;
    int triangle = -1;
};

IbPoint project_to_surface(const TriSurface& s, const Vec3& p);

enum class CellLabel : int { Fluid = 0, Ib = 1, Solid = 2 };

struct Classification {
    std::vector<CellLabel> labels;
    std::vector<int> ib_cells; // ascending
    bool all_fluid_warning = false;

    bool is_solid(int c) const { return labels[c] == CellLabel::Solid; }
    bool is_ib(int c) const { return labels[c] == CellLabel::Ib; }
    bool is_fluid(int c) const { return labels[c] == CellLabel::Fluid; }
    int count(CellLabel l) const;
};

/// SOLID = barycentre inside; IB = non-solid with a SOLID neighbour;
/// FLUID = rest. invert swaps solid/fluid for internal flows.
Classification classify_cells(const Mesh& mesh, const TriSurface& surface,
                              AdjacencyMode mode = AdjacencyMode::Face,
                              bool invert = false);

/// Union classification over several surfaces (solid if inside any).
Classification classify_cells_multi(const Mesh& mesh,
                                    const std::vector<const TriSurface*>& surfaces,
                                    AdjacencyMode mode = AdjacencyMode::Face);

struct RigidMotion {
    Vec3 axis = Vec3::UnitZ();     // unit length
    Vec3 anchor = Vec3::Zero();
    double omega = 0.0;            // rad/s
    Vec3 translation = Vec3::Zero(); // m/s
    bool shape_invariant = false;  // surface maps to itself under its motion
};

Vec3 boundary_velocity(const RigidMotion& motion, const Vec3& point, double time = 0.0);

struct PlanetaryKinematics {
    double R_s = 0.0, R_r = 0.0, R_p = 0.0;
    double omega_s = 0.0;
    double omega_c = 0.0, omega_p = 0.0;
    double omega_s_rel = 0.0, omega_r_rel = 0.0, omega_p_rel = 0.0;
};

/// Planet-carrier kinematics of a planetary roller: carrier rate, planet
/// spin, and the rates seen from the frame co-rotating with the carrier.
PlanetaryKinematics planetary_kinematics(double R_s, double R_p, double omega_s);

} // namespace ibflow
