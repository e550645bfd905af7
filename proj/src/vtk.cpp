#include <fstream>
#include <iomanip>
#include <ostream>

#include "ibflow/errors.hpp"
#include "ibflow/mesh.hpp"

namespace ibflow {

void write_vtk(std::ostream& out, const Mesh& mesh,
               const std::vector<VtkCellField>& fields, const std::string& title) {
    out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";
    out << std::setprecision(12);
    out << "POINTS " << mesh.n_vertices() << " double\n";
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        const Vec3& p = mesh.vertex(v);
        out << p.x() << " " << p.y() << " " << p.z() << "\n";
    }

    // polyhedron face-stream cells: [nIds, nFaces, (nPts, ids...)*]
    std::size_t total = 0;
    for (int c = 0; c < mesh.n_cells(); ++c) {
        std::size_t ids = 1;
        for (int f : mesh.cell_faces(c)) ids += 1 + mesh.face(f).vertices.size();
        total += 1 + ids;
    }
    out << "CELLS " << mesh.n_cells() << " " << total << "\n";
    for (int c = 0; c < mesh.n_cells(); ++c) {
        std::size_t ids = 1;
        for (int f : mesh.cell_faces(c)) ids += 1 + mesh.face(f).vertices.size();
        out << ids << " " << mesh.cell_faces(c).size();
        for (int f : mesh.cell_faces(c)) {
            const auto& vs = mesh.face(f).vertices;
            out << " " << vs.size();
            for (int v : vs) out << " " << v;
        }
        out << "\n";
    }
    out << "CELL_TYPES " << mesh.n_cells() << "\n";
    for (int c = 0; c < mesh.n_cells(); ++c) out << "42\n";

    if (!fields.empty()) {
        out << "CELL_DATA " << mesh.n_cells() << "\n";
        for (const auto& f : fields) {
            if (f.scalar) {
                out << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
                for (int c = 0; c < mesh.n_cells(); ++c) out << (*f.scalar)(c) << "\n";
            } else if (f.labels) {
                out << "SCALARS " << f.name << " int 1\nLOOKUP_TABLE default\n";
                for (int c = 0; c < mesh.n_cells(); ++c) out << (*f.labels)[c] << "\n";
            } else if (f.vector) {
                out << "VECTORS " << f.name << " double\n";
                for (int c = 0; c < mesh.n_cells(); ++c)
                    out << (*f.vector)[0](c) << " " << (*f.vector)[1](c) << " "
                        << (*f.vector)[2](c) << "\n";
            }
        }
    }
}

void write_vtk_file(const std::string& path, const Mesh& mesh,
                    const std::vector<VtkCellField>& fields, const std::string& title) {
    std::ofstream out(path);
    if (!out) throw InvalidInputError("cannot open '" + path + "' for writing");
    write_vtk(out, mesh, fields, title);
}

} // namespace ibflow
