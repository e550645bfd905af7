#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "ibflow/types.hpp"

namespace ibflow {

enum class BcTag { Wall, Inflow, Outflow, Symmetry };

std::string to_string(BcTag tag);
BcTag bc_tag_from_string(const std::string& s);

struct Face {
    std::vector<int> vertices; // ordered loop, normal by right-hand rule
    int owner = -1;
    int neighbour = kNoNeighbour; // kNoNeighbour for boundary faces
};

struct Patch {
    std::string name;
    BcTag tag = BcTag::Wall;
    std::vector<int> faces;
};

enum class AdjacencyMode { Face, Vertex };

/// Immutable polyhedral mesh. Faces are ordered internal-first; every
/// boundary face belongs to exactly one patch. Face normals point from
/// owner to neighbour (outward on the boundary).
class Mesh {
public:
    Mesh(std::vector<Vec3> vertices, std::vector<Face> faces,
         std::vector<std::vector<int>> cell_faces, std::vector<Patch> patches);

    int n_cells() const { return static_cast<int>(cell_faces_.size()); }
    int n_faces() const { return static_cast<int>(faces_.size()); }
    int n_internal_faces() const { return n_internal_; }
    int n_vertices() const { return static_cast<int>(vertices_.size()); }

    const Face& face(int f) const { return faces_[f]; }
    bool is_internal(int f) const { return faces_[f].neighbour != kNoNeighbour; }
    const std::vector<int>& cell_faces(int c) const { return cell_faces_[c]; }
    const std::vector<int>& cell_vertices(int c) const { return cell_vertices_[c]; }
    const Vec3& vertex(int v) const { return vertices_[v]; }
    const std::vector<Vec3>& vertices() const { return vertices_; }

    const std::vector<Patch>& patches() const { return patches_; }
    const Patch* find_patch(const std::string& name) const;
    /// Patch index owning a boundary face, -1 for internal faces.
    int face_patch(int f) const { return face_patch_[f]; }

    const Vec3& face_centre(int f) const { return face_centre_[f]; }
    const Vec3& face_area(int f) const { return face_area_[f]; } // owner->neighbour
    double face_area_mag(int f) const { return face_area_mag_[f]; }
    double mean_face_area() const { return mean_face_area_; }

    const Vec3& cell_centre(int c) const { return cell_centre_[c]; }
    double cell_volume(int c) const { return cell_volume_[c]; }
    double cell_diameter(int c) const { return cell_diameter_[c]; }
    double h() const { return h_; }
    double total_volume() const { return total_volume_; }

    /// Linear interpolation weight of the owner cell at face f, in (0,1).
    double face_weight(int f) const { return face_weight_[f]; }
    /// Centre-to-centre vector (owner to neighbour); owner to face centre on
    /// the boundary.
    const Vec3& face_delta(int f) const { return face_delta_[f]; }

    const std::vector<int>& neighbours(int c, AdjacencyMode m) const;

    const Vec3& bbox_min() const { return bbox_min_; }
    const Vec3& bbox_max() const { return bbox_max_; }

private:
    void compute_geometry();
    void build_adjacency();
    void validate() const;

    std::vector<Vec3> vertices_;
    std::vector<Face> faces_;
    std::vector<std::vector<int>> cell_faces_;
    std::vector<std::vector<int>> cell_vertices_;
    std::vector<Patch> patches_;
    std::vector<int> face_patch_;
    int n_internal_ = 0;

    std::vector<Vec3> face_centre_, face_area_, face_delta_;
    std::vector<double> face_area_mag_, face_weight_;
    std::vector<Vec3> cell_centre_;
    std::vector<double> cell_volume_, cell_diameter_;
    double h_ = 0.0, total_volume_ = 0.0, mean_face_area_ = 0.0;
    Vec3 bbox_min_, bbox_max_;

    std::vector<std::vector<int>> face_adj_, vertex_adj_;
};

/// Hexahedral grid on an axis-aligned box. grading[k] is the ratio of the
/// last to the first cell width along axis k (1 = uniform). Patches:
/// xmin/xmax/ymin/ymax/zmin/zmax, tagged Wall by default.
Mesh build_structured_grid(const Vec3& lo, const Vec3& hi,
                           std::array<int, 3> divisions,
                           const Vec3& grading = Vec3::Ones());

/// Body-fitted annulus around the z axis spanning z in [0, depth].
/// divisions = (radial, azimuthal, axial). Patches: inner, outer (walls)
/// and front/back (symmetry).
Mesh annular_grid(double inner_radius, double outer_radius,
                  std::array<int, 3> divisions, double depth = 1.0);

/// Cells sharing a face (or at least one vertex) with cell_id, excluding
/// the cell itself.
std::vector<int> cell_neighbours(const Mesh& mesh, int cell_id, AdjacencyMode mode);

// --- mesh file format `ibflow-mesh v1` (meshio.cpp) ---
Mesh read_mesh(std::istream& in);
Mesh read_mesh_file(const std::string& path);
void write_mesh(std::ostream& out, const Mesh& mesh);
void write_mesh_file(const std::string& path, const Mesh& mesh);

// --- legacy VTK ASCII export (vtk.cpp) ---
struct VtkCellField {
    std::string name;
    const VecX* scalar = nullptr;
    const std::array<VecX, 3>* vector = nullptr;
    const std::vector<int>* labels = nullptr;
};
void write_vtk(std::ostream& out, const Mesh& mesh,
               const std::vector<VtkCellField>& fields, const std::string& title = "ibflow");
void write_vtk_file(const std::string& path, const Mesh& mesh,
                    const std::vector<VtkCellField>& fields, const std::string& title = "ibflow");

} // namespace ibflow
