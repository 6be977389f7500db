#include "posegen/mesh.hpp"

#include <algorithm>
#include <cstring>
#include <functional>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace posegen {

void Mesh::validate() const {
    if (!colors.empty() && colors.size() != vertices.size())
        throw std::invalid_argument("mesh: color count != vertex count");
    if (!normals.empty() && normals.size() != vertices.size())
        throw std::invalid_argument("mesh: normal count != vertex count");
    for (const Face& f : faces) {
        for (uint32_t idx : f)
            if (idx >= vertices.size())
                throw std::invalid_argument("mesh: face index out of range");
        if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2])
            throw std::invalid_argument("mesh: face with repeated vertex index");
    }
}

std::string DiagnosticsReport::to_text() const {
    std::ostringstream os;
    os << "vertices:            " << vertex_count << "\n"
       << "faces:               " << face_count << "\n"
       << "non-manifold edges:  " << non_manifold_edge_count << "\n"
       << "boundary loops:      " << boundary_loop_count << "\n"
       << "duplicate vertices:  " << duplicate_vertex_count << "\n"
       << "bbox min:            " << bbox_min << "\n"
       << "bbox max:            " << bbox_max << "\n";
    return os.str();
}

namespace {

double parse_number(const std::string& tok, size_t line) {
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
        throw ParseError("line " + std::to_string(line) + ": malformed numeric token '" + tok + "'");
    return v;
}

long parse_integer(const std::string& tok, size_t line) {
    char* end = nullptr;
    long v = std::strtol(tok.c_str(), &end, 10);
    if (end == tok.c_str())
        throw ParseError("line " + std::to_string(line) + ": malformed index token '" + tok + "'");
    return v;
}

}  // namespace

namespace mesh_io {

Mesh parse_obj(const std::string& text) {
    Mesh mesh;
    // Raw face records, resolved against the final vertex count at the end
    // (negative indices are relative and resolved immediately).
    struct RawFace { std::vector<long> idx; size_t line; };
    std::vector<RawFace> raw_faces;

    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw) || kw[0] == '#') continue;

        if (kw == "v") {
            std::vector<double> nums;
            std::string tok;
            while (ls >> tok) nums.push_back(parse_number(tok, lineno));
            if (nums.size() != 3 && nums.size() != 6)
                throw ParseError("line " + std::to_string(lineno) +
                                 ": 'v' expects 3 or 6 numbers, got " + std::to_string(nums.size()));
            mesh.vertices.push_back({nums[0], nums[1], nums[2]});
            if (nums.size() == 6) {
                mesh.colors.resize(mesh.vertices.size() - 1, {Mesh::kDefaultGray, Mesh::kDefaultGray, Mesh::kDefaultGray});
                mesh.colors.push_back({nums[3], nums[4], nums[5]});
            } else if (!mesh.colors.empty()) {
                mesh.colors.push_back({Mesh::kDefaultGray, Mesh::kDefaultGray, Mesh::kDefaultGray});
            }
        } else if (kw == "vn") {
            std::string a, b, c;
            if (!(ls >> a >> b >> c))
                throw ParseError("line " + std::to_string(lineno) + ": 'vn' expects 3 numbers");
            mesh.normals.push_back({parse_number(a, lineno), parse_number(b, lineno), parse_number(c, lineno)});
        } else if (kw == "f") {
            RawFace rf;
            rf.line = lineno;
            std::string tok;
            while (ls >> tok) {
                // vertex index is everything before the first '/'
                size_t slash = tok.find('/');
                std::string vtok = slash == std::string::npos ? tok : tok.substr(0, slash);
                long idx = parse_integer(vtok, lineno);
                if (idx == 0)
                    throw ParseError("line " + std::to_string(lineno) + ": OBJ index 0 is invalid");
                if (idx < 0) {
                    long resolved = long(mesh.vertices.size()) + idx;
                    if (resolved < 0)
                        throw ParseError("line " + std::to_string(lineno) + ": face index out of range");
                    rf.idx.push_back(resolved);
                } else {
                    rf.idx.push_back(idx - 1);
                }
            }
            if (rf.idx.size() < 3)
                throw ParseError("line " + std::to_string(lineno) + ": face needs at least 3 indices");
            raw_faces.push_back(std::move(rf));
        }
        // everything else (mtllib, usemtl, g, o, s, vt, ...) is skipped
    }

    for (const auto& rf : raw_faces) {
        for (long idx : rf.idx)
            if (idx >= long(mesh.vertices.size()))
                throw ParseError("line " + std::to_string(rf.line) + ": face index out of range");
        for (size_t k = 1; k + 1 < rf.idx.size(); ++k)
            mesh.faces.push_back({uint32_t(rf.idx[0]), uint32_t(rf.idx[k]), uint32_t(rf.idx[k + 1])});
    }
    if (!mesh.normals.empty() && mesh.normals.size() != mesh.vertices.size())
        mesh.normals.clear();  // per-corner OBJ normals don't map 1:1; recompute later
    if (!mesh.colors.empty()) mesh.colors.resize(mesh.vertices.size(), {Mesh::kDefaultGray, Mesh::kDefaultGray, Mesh::kDefaultGray});
    return mesh;
}

namespace {

enum class PlyType { Char, UChar, Short, UShort, Int, UInt, Float, Double };

size_t ply_type_size(PlyType t) {
    switch (t) {
        case PlyType::Char: case PlyType::UChar: return 1;
        case PlyType::Short: case PlyType::UShort: return 2;
        case PlyType::Int: case PlyType::UInt: case PlyType::Float: return 4;
        case PlyType::Double: return 8;
    }
    return 0;
}

PlyType ply_type_from(const std::string& s, const std::string& where) {
    if (s == "char" || s == "int8") return PlyType::Char;
    if (s == "uchar" || s == "uint8") return PlyType::UChar;
    if (s == "short" || s == "int16") return PlyType::Short;
    if (s == "ushort" || s == "uint16") return PlyType::UShort;
    if (s == "int" || s == "int32") return PlyType::Int;
    if (s == "uint" || s == "uint32") return PlyType::UInt;
    if (s == "float" || s == "float32") return PlyType::Float;
    if (s == "double" || s == "float64") return PlyType::Double;
    throw ParseError("ply: unknown property type '" + s + "' in element " + where);
}

struct PlyProperty {
    std::string name;
    PlyType type = PlyType::Float;
    bool is_list = false;
    PlyType count_type = PlyType::UChar;
};

struct PlyElement {
    std::string name;
    size_t count = 0;
    std::vector<PlyProperty> props;
};

class BinaryReader {
public:
    BinaryReader(const std::string& data, size_t offset, const std::string& element)
        : data_(data), pos_(offset), element_(element) {}

    double read(PlyType t) {
        size_t n = ply_type_size(t);
        if (pos_ + n > data_.size())
            throw ParseError("ply: truncated binary payload in element " + element_);
        const char* p = data_.data() + pos_;
        pos_ += n;
        switch (t) {
            case PlyType::Char: { int8_t v; std::memcpy(&v, p, 1); return v; }
            case PlyType::UChar: { uint8_t v; std::memcpy(&v, p, 1); return v; }
            case PlyType::Short: { int16_t v; std::memcpy(&v, p, 2); return v; }
            case PlyType::UShort: { uint16_t v; std::memcpy(&v, p, 2); return v; }
            case PlyType::Int: { int32_t v; std::memcpy(&v, p, 4); return v; }
            case PlyType::UInt: { uint32_t v; std::memcpy(&v, p, 4); return v; }
            case PlyType::Float: { float v; std::memcpy(&v, p, 4); return v; }
            case PlyType::Double: { double v; std::memcpy(&v, p, 8); return v; }
        }
        return 0;
    }

    void set_element(const std::string& e) { element_ = e; }

private:
    const std::string& data_;
    size_t pos_;
    std::string element_;
};

class AsciiReader {
public:
    AsciiReader(const std::string& data, size_t offset, const std::string& element)
        : in_(data.substr(offset)), element_(element) {}

    double read(PlyType) {
        std::string tok;
        if (!(in_ >> tok))
            throw ParseError("ply: truncated ascii payload in element " + element_);
        char* end = nullptr;
        double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0')
            throw ParseError("ply: malformed value '" + tok + "' in element " + element_);
        return v;
    }

    void set_element(const std::string& e) { element_ = e; }

private:
    std::istringstream in_;
    std::string element_;
};

double scale_color(double raw, PlyType t) {
    return t == PlyType::UChar ? raw / 255.0 : raw;
}

template <class Reader>
Mesh read_ply_body(Reader& reader, const std::vector<PlyElement>& elements) {
    Mesh mesh;
    for (const PlyElement& el : elements) {
        reader.set_element(el.name);
        if (el.name == "vertex") {
            int ix = -1, iy = -1, iz = -1, ir = -1, ig = -1, ib = -1, inx = -1, iny = -1, inz = -1;
            for (size_t p = 0; p < el.props.size(); ++p) {
                const std::string& n = el.props[p].name;
                if (n == "x") ix = int(p);
                else if (n == "y") iy = int(p);
                else if (n == "z") iz = int(p);
                else if (n == "red") ir = int(p);
                else if (n == "green") ig = int(p);
                else if (n == "blue") ib = int(p);
                else if (n == "nx") inx = int(p);
                else if (n == "ny") iny = int(p);
                else if (n == "nz") inz = int(p);
            }
            if (ix < 0 || iy < 0 || iz < 0)
                throw ParseError("ply: element vertex is missing x/y/z properties");
            bool with_color = ir >= 0 && ig >= 0 && ib >= 0;
            bool with_normal = inx >= 0 && iny >= 0 && inz >= 0;
            mesh.vertices.reserve(el.count);
            std::vector<double> row(el.props.size());
            for (size_t i = 0; i < el.count; ++i) {
                for (size_t p = 0; p < el.props.size(); ++p) {
                    if (el.props[p].is_list) {
                        size_t n = size_t(reader.read(el.props[p].count_type));
                        for (size_t k = 0; k < n; ++k) reader.read(el.props[p].type);
                        row[p] = 0;
                    } else {
                        row[p] = reader.read(el.props[p].type);
                    }
                }
                mesh.vertices.push_back({row[ix], row[iy], row[iz]});
                if (with_color)
                    mesh.colors.push_back({scale_color(row[ir], el.props[ir].type),
                                           scale_color(row[ig], el.props[ig].type),
                                           scale_color(row[ib], el.props[ib].type)});
                if (with_normal)
                    mesh.normals.push_back({row[inx], row[iny], row[inz]});
            }
        } else if (el.name == "face") {
            int ilist = -1;
            for (size_t p = 0; p < el.props.size(); ++p)
                if (el.props[p].is_list &&
                    (el.props[p].name == "vertex_indices" || el.props[p].name == "vertex_index"))
                    ilist = int(p);
            if (ilist < 0)
                throw ParseError("ply: element face is missing a vertex_indices list property");
            for (size_t i = 0; i < el.count; ++i) {
                for (size_t p = 0; p < el.props.size(); ++p) {
                    if (int(p) == ilist) {
                        size_t n = size_t(reader.read(el.props[p].count_type));
                        if (n < 3)
                            throw ParseError("ply: face with fewer than 3 indices in element face");
                        std::vector<uint32_t> idx(n);
                        for (size_t k = 0; k < n; ++k) {
                            double v = reader.read(el.props[p].type);
                            if (v < 0 || v >= double(mesh.vertices.size()))
                                throw ParseError("ply: face index out of range in element face");
                            idx[k] = uint32_t(v);
                        }
                        for (size_t k = 1; k + 1 < n; ++k)
                            mesh.faces.push_back({idx[0], idx[k], idx[k + 1]});
                    } else if (el.props[p].is_list) {
                        size_t n = size_t(reader.read(el.props[p].count_type));
                        for (size_t k = 0; k < n; ++k) reader.read(el.props[p].type);
                    } else {
                        reader.read(el.props[p].type);
                    }
                }
            }
        } else {
            // unknown element: consume and ignore
            for (size_t i = 0; i < el.count; ++i)
                for (const PlyProperty& prop : el.props) {
                    if (prop.is_list) {
                        size_t n = size_t(reader.read(prop.count_type));
                        for (size_t k = 0; k < n; ++k) reader.read(prop.type);
                    } else {
                        reader.read(prop.type);
                    }
                }
        }
    }
    return mesh;
}

}  // namespace

Mesh parse_ply(const std::string& bytes) {
    // header is ascii lines terminated by end_header
    size_t pos = 0;
    auto next_line = [&]() -> std::string {
        size_t nl = bytes.find('\n', pos);
        if (nl == std::string::npos) throw ParseError("ply: unterminated header");
        std::string line = bytes.substr(pos, nl - pos);
        pos = nl + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    };

    if (next_line() != "ply") throw ParseError("ply: missing 'ply' magic line");
    bool binary = false;
    bool have_format = false;
    std::vector<PlyElement> elements;
    for (;;) {
        std::string line = next_line();
        std::istringstream ls(line);
        std::string kw;
        ls >> kw;
        if (kw == "end_header") break;
        if (kw == "comment" || kw == "obj_info" || kw.empty()) continue;
        if (kw == "format") {
            std::string fmt, ver;
            ls >> fmt >> ver;
            if (fmt == "ascii") binary = false;
            else if (fmt == "binary_little_endian") binary = true;
            else throw ParseError("ply: unsupported format '" + fmt + "'");
            have_format = true;
        } else if (kw == "element") {
            PlyElement el;
            if (!(ls >> el.name >> el.count))
                throw ParseError("ply: malformed element line '" + line + "'");
            elements.push_back(el);
        } else if (kw == "property") {
            if (elements.empty())
                throw ParseError("ply: property before any element");
            PlyElement& el = elements.back();
            std::string t1;
            ls >> t1;
            PlyProperty prop;
            if (t1 == "list") {
                std::string ct, vt;
                if (!(ls >> ct >> vt >> prop.name))
                    throw ParseError("ply: malformed list property in element " + el.name);
                prop.is_list = true;
                prop.count_type = ply_type_from(ct, el.name);
                prop.type = ply_type_from(vt, el.name);
            } else {
                if (!(ls >> prop.name))
                    throw ParseError("ply: malformed property in element " + el.name);
                prop.type = ply_type_from(t1, el.name);
            }
            el.props.push_back(prop);
        } else {
            throw ParseError("ply: unknown header statement '" + kw + "'");
        }
    }
    if (!have_format) throw ParseError("ply: header has no format line");

    Mesh mesh;
    if (binary) {
        BinaryReader reader(bytes, pos, "");
        mesh = read_ply_body(reader, elements);
    } else {
        AsciiReader reader(bytes, pos, "");
        mesh = read_ply_body(reader, elements);
    }
    mesh.validate();
    return mesh;
}

namespace {

bool colors_fit_uchar(const Mesh& mesh) {
    for (const Vec3& c : mesh.colors)
        for (double v : {c.x, c.y, c.z}) {
            if (v < 0 || v > 1) return false;
            double scaled = v * 255.0;
            if (scaled != std::floor(scaled)) return false;
        }
    return true;
}

void append_le(std::string& out, const void* p, size_t n) {
    out.append(reinterpret_cast<const char*>(p), n);
}

}  // namespace

std::string write_ply(const Mesh& mesh, PlyMode mode) {
    mesh.validate();
    bool uchar_colors = mesh.has_colors() && colors_fit_uchar(mesh);
    std::ostringstream h;
    h << "ply\n";
    h << "format " << (mode == PlyMode::Binary ? "binary_little_endian" : "ascii") << " 1.0\n";
    h << "element vertex " << mesh.vertices.size() << "\n";
    h << "property double x\nproperty double y\nproperty double z\n";
    if (mesh.has_normals())
        h << "property double nx\nproperty double ny\nproperty double nz\n";
    if (mesh.has_colors()) {
        const char* t = uchar_colors ? "uchar" : "double";
        h << "property " << t << " red\nproperty " << t << " green\nproperty " << t << " blue\n";
    }
    h << "element face " << mesh.faces.size() << "\n";
    h << "property list uchar uint vertex_indices\n";
    h << "end_header\n";

    std::string out = h.str();
    if (mode == PlyMode::Binary) {
        for (size_t i = 0; i < mesh.vertices.size(); ++i) {
            const Vec3& v = mesh.vertices[i];
            append_le(out, &v.x, 8); append_le(out, &v.y, 8); append_le(out, &v.z, 8);
            if (mesh.has_normals()) {
                const Vec3& n = mesh.normals[i];
                append_le(out, &n.x, 8); append_le(out, &n.y, 8); append_le(out, &n.z, 8);
            }
            if (mesh.has_colors()) {
                const Vec3& c = mesh.colors[i];
                if (uchar_colors) {
                    uint8_t rgb[3] = {uint8_t(c.x * 255.0 + 0.5), uint8_t(c.y * 255.0 + 0.5), uint8_t(c.z * 255.0 + 0.5)};
                    append_le(out, rgb, 3);
                } else {
                    append_le(out, &c.x, 8); append_le(out, &c.y, 8); append_le(out, &c.z, 8);
                }
            }
        }
        for (const Face& f : mesh.faces) {
            uint8_t n = 3;
            append_le(out, &n, 1);
            append_le(out, f.data(), 12);
        }
    } else {
        std::ostringstream b;
        b.precision(17);
        for (size_t i = 0; i < mesh.vertices.size(); ++i) {
            const Vec3& v = mesh.vertices[i];
            b << v.x << " " << v.y << " " << v.z;
            if (mesh.has_normals()) {
                const Vec3& n = mesh.normals[i];
                b << " " << n.x << " " << n.y << " " << n.z;
            }
            if (mesh.has_colors()) {
                const Vec3& c = mesh.colors[i];
                if (uchar_colors)
                    b << " " << int(c.x * 255.0 + 0.5) << " " << int(c.y * 255.0 + 0.5) << " " << int(c.z * 255.0 + 0.5);
                else
                    b << " " << c.x << " " << c.y << " " << c.z;
            }
            b << "\n";
        }
        for (const Face& f : mesh.faces)
            b << "3 " << f[0] << " " << f[1] << " " << f[2] << "\n";
        out += b.str();
    }
    return out;
}

Mesh load_mesh_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open mesh file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string data = ss.str();
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".obj")
        return parse_obj(data);
    return parse_ply(data);
}

}  // namespace mesh_io

void recompute_normals(Mesh& mesh) {
    mesh.normals.assign(mesh.vertices.size(), Vec3{});
    for (const Face& f : mesh.faces) {
        Vec3 a = mesh.vertices[f[0]], b = mesh.vertices[f[1]], c = mesh.vertices[f[2]];
        Vec3 n = cross(b - a, c - a);  // magnitude = 2*area, giving area weighting
        mesh.normals[f[0]] += n;
        mesh.normals[f[1]] += n;
        mesh.normals[f[2]] += n;
    }
    for (Vec3& n : mesh.normals) n = normalized(n);
}

void ensure_render_attributes(Mesh& mesh) {
    if (!mesh.has_colors())
        mesh.colors.assign(mesh.vertices.size(), {Mesh::kDefaultGray, Mesh::kDefaultGray, Mesh::kDefaultGray});
    if (!mesh.has_normals() || mesh.normals.size() != mesh.vertices.size())
        recompute_normals(mesh);
}

DiagnosticsReport diagnose(const Mesh& mesh) {
    mesh.validate();
    DiagnosticsReport rep;
    rep.vertex_count = mesh.vertices.size();
    rep.face_count = mesh.faces.size();

    if (!mesh.vertices.empty()) {
        rep.bbox_min = rep.bbox_max = mesh.vertices[0];
        for (const Vec3& v : mesh.vertices) {
            rep.bbox_min.x = std::min(rep.bbox_min.x, v.x);
            rep.bbox_min.y = std::min(rep.bbox_min.y, v.y);
            rep.bbox_min.z = std::min(rep.bbox_min.z, v.z);
            rep.bbox_max.x = std::max(rep.bbox_max.x, v.x);
            rep.bbox_max.y = std::max(rep.bbox_max.y, v.y);
            rep.bbox_max.z = std::max(rep.bbox_max.z, v.z);
        }
    }

    // undirected edge -> incident face count
    std::unordered_map<uint64_t, uint32_t> edge_faces;
    edge_faces.reserve(mesh.faces.size() * 3);
    auto edge_key = [](uint32_t a, uint32_t b) {
        if (a > b) std::swap(a, b);
        return (uint64_t(a) << 32) | b;
    };
    for (const Face& f : mesh.faces)
        for (int k = 0; k < 3; ++k)
            ++edge_faces[edge_key(f[k], f[(k + 1) % 3])];

    std::vector<uint64_t> boundary_edges;
    for (const auto& [key, count] : edge_faces) {
        if (count > 2) ++rep.non_manifold_edge_count;
        else if (count == 1) boundary_edges.push_back(key);
    }

    // boundary loops = connected components of the boundary-edge graph
    std::unordered_map<uint32_t, uint32_t> parent;
    std::function<uint32_t(uint32_t)> find = [&](uint32_t v) -> uint32_t {
        auto it = parent.find(v);
        if (it == parent.end()) { parent[v] = v; return v; }
        if (it->second == v) return v;
        uint32_t root = find(it->second);
        parent[v] = root;
        return root;
    };
    for (uint64_t key : boundary_edges) {
        uint32_t a = uint32_t(key >> 32), b = uint32_t(key & 0xffffffffu);
        uint32_t ra = find(a), rb = find(b);
        if (ra != rb) parent[ra] = rb;
    }
    std::unordered_map<uint32_t, bool> roots;
    for (uint64_t key : boundary_edges) {
        roots[find(uint32_t(key >> 32))] = true;
    }
    rep.boundary_loop_count = roots.size();

    // exact-coordinate duplicates
    std::unordered_map<std::string, uint32_t> coord_count;
    for (const Vec3& v : mesh.vertices) {
        std::string key(sizeof(double) * 3, '\0');
        std::memcpy(key.data(), &v.x, 8);
        std::memcpy(key.data() + 8, &v.y, 8);
        std::memcpy(key.data() + 16, &v.z, 8);
        if (++coord_count[key] > 1) ++rep.duplicate_vertex_count;
    }
    return rep;
}

}  // namespace posegen
