#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "ibflow/errors.hpp"
#include "ibflow/mesh.hpp"

namespace ibflow {

namespace {

std::string next_content_line(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r\n");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r\n");
        return line.substr(first, last - first + 1);
    }
    throw InvalidInputError("unexpected end of mesh file");
}

} // namespace

Mesh read_mesh(std::istream& in) {
    std::string header = next_content_line(in);
    if (header != "ibflow-mesh v1")
        throw InvalidInputError("bad mesh header, expected 'ibflow-mesh v1'");

    auto expect = [&](const std::string& key) {
        std::istringstream ls(next_content_line(in));
        std::string k;
        long n = -1;
        ls >> k >> n;
        if (k != key || n < 0)
            throw InvalidInputError("expected '" + key + " <count>' in mesh file");
        return n;
    };

    const long nv = expect("vertices");
    std::vector<Vec3> verts(nv);
    for (long i = 0; i < nv; ++i) {
        std::istringstream ls(next_content_line(in));
        if (!(ls >> verts[i].x() >> verts[i].y() >> verts[i].z()))
            throw InvalidInputError("bad vertex line");
    }

    const long nf = expect("faces");
    std::vector<Face> faces(nf);
    for (long i = 0; i < nf; ++i) {
        std::istringstream ls(next_content_line(in));
        int k = 0;
        if (!(ls >> k) || k < 3) throw InvalidInputError("bad face line");
        faces[i].vertices.resize(k);
        for (int j = 0; j < k; ++j)
            if (!(ls >> faces[i].vertices[j])) throw InvalidInputError("bad face line");
    }

    if (expect("owner") != nf) throw InvalidInputError("owner count mismatch");
    for (long i = 0; i < nf; ++i) {
        std::istringstream ls(next_content_line(in));
        if (!(ls >> faces[i].owner)) throw InvalidInputError("bad owner line");
    }
    if (expect("neighbour") != nf) throw InvalidInputError("neighbour count mismatch");
    int n_cells = 0;
    for (long i = 0; i < nf; ++i) {
        std::istringstream ls(next_content_line(in));
        if (!(ls >> faces[i].neighbour)) throw InvalidInputError("bad neighbour line");
        n_cells = std::max(n_cells, faces[i].owner + 1);
        n_cells = std::max(n_cells, faces[i].neighbour + 1);
    }

    const long np = expect("patches");
    std::vector<Patch> patches(np);
    for (long p = 0; p < np; ++p) {
        std::istringstream ls(next_content_line(in));
        std::string name, tag;
        long n = 0;
        if (!(ls >> name >> tag >> n)) throw InvalidInputError("bad patch line");
        patches[p].name = name;
        patches[p].tag = bc_tag_from_string(tag);
        patches[p].faces.resize(n);
        long got = 0;
        while (got < n) {
            std::istringstream fs(next_content_line(in));
            int id;
            while (got < n && fs >> id) patches[p].faces[got++] = id;
        }
    }

    // reorder internal-first, preserving relative order
    std::vector<int> order(nf), rank(nf);
    int pos = 0;
    for (long i = 0; i < nf; ++i)
        if (faces[i].neighbour != kNoNeighbour) order[pos++] = static_cast<int>(i);
    for (long i = 0; i < nf; ++i)
        if (faces[i].neighbour == kNoNeighbour) order[pos++] = static_cast<int>(i);
    for (long i = 0; i < nf; ++i) rank[order[i]] = static_cast<int>(i);

    std::vector<Face> sorted(nf);
    for (long i = 0; i < nf; ++i) sorted[i] = std::move(faces[order[i]]);
    for (auto& p : patches)
        for (auto& f : p.faces) f = rank[f];

    std::vector<std::vector<int>> cell_faces(n_cells);
    for (long i = 0; i < nf; ++i) {
        cell_faces[sorted[i].owner].push_back(static_cast<int>(i));
        if (sorted[i].neighbour != kNoNeighbour)
            cell_faces[sorted[i].neighbour].push_back(static_cast<int>(i));
    }

    return Mesh(std::move(verts), std::move(sorted), std::move(cell_faces), std::move(patches));
}

Mesh read_mesh_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInputError("cannot open mesh file '" + path + "'");
    return read_mesh(in);
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
    out << "ibflow-mesh v1\n";
    out << std::setprecision(17);
    out << "vertices " << mesh.n_vertices() << "\n";
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        const Vec3& p = mesh.vertex(v);
        out << p.x() << " " << p.y() << " " << p.z() << "\n";
    }
    out << "faces " << mesh.n_faces() << "\n";
    for (int f = 0; f < mesh.n_faces(); ++f) {
        const auto& vs = mesh.face(f).vertices;
        out << vs.size();
        for (int v : vs) out << " " << v;
        out << "\n";
    }
    out << "owner " << mesh.n_faces() << "\n";
    for (int f = 0; f < mesh.n_faces(); ++f) out << mesh.face(f).owner << "\n";
    out << "neighbour " << mesh.n_faces() << "\n";
    for (int f = 0; f < mesh.n_faces(); ++f) out << mesh.face(f).neighbour << "\n";
    out << "patches " << mesh.patches().size() << "\n";
    for (const auto& p : mesh.patches()) {
        out << p.name << " " << to_string(p.tag) << " " << p.faces.size() << "\n";
        for (size_t i = 0; i < p.faces.size(); ++i)
            out << p.faces[i] << ((i + 1) % 10 == 0 || i + 1 == p.faces.size() ? "\n" : " ");
    }
}

void write_mesh_file(const std::string& path, const Mesh& mesh) {
    std::ofstream out(path);
    if (!out) throw InvalidInputError("cannot open '" + path + "' for writing");
    write_mesh(out, mesh);
}

} // namespace ibflow
