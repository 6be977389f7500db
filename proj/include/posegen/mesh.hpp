#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "posegen/errors.hpp"
#include "posegen/math.hpp"

namespace posegen {

using Face = std::array<uint32_t, 3>;

/// Triangle mesh with optional per-vertex colors (RGB in [0,1]) and normals.
struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<Vec3> colors;   // empty or vertices.size()
    std::vector<Vec3> normals;  // empty or vertices.size()
    std::vector<Face> faces;

    bool has_colors() const { return !colors.empty(); }
    bool has_normals() const { return !normals.empty(); }

    /// Throws std::invalid_argument if an invariant is broken (index range,
    /// degenerate index triples, attribute count mismatch).
    void validate() const;

    /// Color used when a source file carries no per-vertex colors.
    static constexpr double kDefaultGray = 0.5;
};

struct DiagnosticsReport {
    size_t vertex_count = 0;
    size_t face_count = 0;
    size_t non_manifold_edge_count = 0;
    size_t boundary_loop_count = 0;
    size_t duplicate_vertex_count = 0;
    Vec3 bbox_min{}, bbox_max{};

    std::string to_text() const;
};

namespace mesh_io {

/// Wavefront OBJ. `v` lines may carry 3 (position) or 6 (position + RGB)
/// numbers; faces with >3 indices are fan-triangulated; 1-based and negative
/// indices supported. Material/group statements are skipped.
Mesh parse_obj(const std::string& text);

enum class PlyMode { Ascii, Binary };

/// PLY 1.0, ascii or binary_little_endian. uchar colors are scaled by 1/255.
Mesh parse_ply(const std::string& bytes);

/// Self-describing PLY. Binary round-trips the mesh exactly: positions and
/// normals as float64; colors as uchar when every component is an exact
/// multiple of 1/255, float64 otherwise.
std::string write_ply(const Mesh& mesh, PlyMode mode);

Mesh load_mesh_file(const std::string& path);

}  // namespace mesh_io

/// Area-weighted per-vertex normals from face geometry.
void recompute_normals(Mesh& mesh);

/// Ensures colors/normals exist (default gray, recomputed normals).
void ensure_render_attributes(Mesh& mesh);

DiagnosticsReport diagnose(const Mesh& mesh);

}  // namespace posegen
