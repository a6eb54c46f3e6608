#include "mesh.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace radml::features::detail {

namespace {

using Vec3 = std::array<double, 3>;

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

constexpr double kIso = 0.5;

struct Field {
    // samples on [-1, nx] x [-1, ny] x [-1, nz]
    std::size_t sx, sy, sz;
    std::vector<float> values;

    double at(long x, long y, long z) const {
        return values[static_cast<std::size_t>((z + 1) * static_cast<long>(sy * sx) +
                                               (y + 1) * static_cast<long>(sx) + (x + 1))];
    }
};

// Separable [1 2 1]/4 smoothing of the occupancy. The binary transition
// becomes linear over two voxels, which removes most of the staircase bias in
// the surface area; masks thinner than three voxels fall below the iso level
// and yield no mesh.
Field build_field(const RoiMask& mask) {
    const long nx = static_cast<long>(mask.dims[0]);
    const long ny = static_cast<long>(mask.dims[1]);
    const long nz = static_cast<long>(mask.dims[2]);
    auto occ = [&](long x, long y, long z) -> double {
        if (x < 0 || y < 0 || z < 0 || x >= nx || y >= ny || z >= nz) return 0.0;
        return mask.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y),
                       static_cast<std::size_t>(z)) ? 1.0 : 0.0;
    };
    auto smooth1d = [](double a, double b, double c) { return 0.25 * a + 0.5 * b + 0.25 * c; };

    Field f;
    f.sx = static_cast<std::size_t>(nx + 2);
    f.sy = static_cast<std::size_t>(ny + 2);
    f.sz = static_cast<std::size_t>(nz + 2);
    f.values.resize(f.sx * f.sy * f.sz);

    // pass 1: x; pass 2: y; pass 3: z (with one-sample apron on all sides)
    std::vector<float> tmp1(f.values.size()), tmp2(f.values.size());
    auto idx = [&](long x, long y, long z) {
        return static_cast<std::size_t>((z + 1) * static_cast<long>(f.sy * f.sx) +
                                        (y + 1) * static_cast<long>(f.sx) + (x + 1));
    };
    for (long z = -1; z <= nz; ++z) {
        for (long y = -1; y <= ny; ++y) {
            for (long x = -1; x <= nx; ++x) {
                tmp1[idx(x, y, z)] =
                    static_cast<float>(smooth1d(occ(x - 1, y, z), occ(x, y, z), occ(x + 1, y, z)));
            }
        }
    }
    auto get1 = [&](long x, long y, long z) -> double {
        if (x < -1 || y < -1 || z < -1 || x > nx || y > ny || z > nz) return 0.0;
        return tmp1[idx(x, y, z)];
    };
    for (long z = -1; z <= nz; ++z) {
        for (long y = -1; y <= ny; ++y) {
            for (long x = -1; x <= nx; ++x) {
                tmp2[idx(x, y, z)] =
                    static_cast<float>(smooth1d(get1(x, y - 1, z), get1(x, y, z), get1(x, y + 1, z)));
            }
        }
    }
    auto get2 = [&](long x, long y, long z) -> double {
        if (x < -1 || y < -1 || z < -1 || x > nx || y > ny || z > nz) return 0.0;
        return tmp2[idx(x, y, z)];
    };
    for (long z = -1; z <= nz; ++z) {
        for (long y = -1; y <= ny; ++y) {
            for (long x = -1; x <= nx; ++x) {
                f.values[idx(x, y, z)] =
                    static_cast<float>(smooth1d(get2(x, y, z - 1), get2(x, y, z), get2(x, y, z + 1)));
            }
        }
    }
    return f;
}

// Cube corner offsets; all six tetrahedra share the 0-6 diagonal, which keeps
// shared cube faces split along the same diagonal in neighboring cells.
constexpr int kCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                               {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
constexpr int kTets[6][4] = {{0, 5, 1, 6}, {0, 1, 2, 6}, {0, 2, 3, 6},
                             {0, 3, 7, 6}, {0, 7, 4, 6}, {0, 4, 5, 6}};

struct Accumulator {
    double area = 0.0;
    double signed_volume = 0.0;
    std::size_t triangles = 0;

    void add(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& inside_ref) {
        Vec3 v0 = a, v1 = b, v2 = c;
        Vec3 n = cross(sub(v1, v0), sub(v2, v0));
        const Vec3 centroid = {(v0[0] + v1[0] + v2[0]) / 3.0, (v0[1] + v1[1] + v2[1]) / 3.0,
                               (v0[2] + v1[2] + v2[2]) / 3.0};
        if (dot(n, sub(centroid, inside_ref)) < 0.0) {
            std::swap(v1, v2);
            n = {-n[0], -n[1], -n[2]};
        }
        const double len = std::sqrt(dot(n, n));
        area += 0.5 * len;
        signed_volume += dot(v0, cross(v1, v2)) / 6.0;
        ++triangles;
    }
};

} // namespace

MeshResult mask_mesh(const RoiMask& mask) {
    const Field field = build_field(mask);
    const long nx = static_cast<long>(mask.dims[0]);
    const long ny = static_cast<long>(mask.dims[1]);
    const long nz = static_cast<long>(mask.dims[2]);
    const double spx = mask.spacing[0], spy = mask.spacing[1], spz = mask.spacing[2];

    Accumulator acc;
    std::array<Vec3, 8> pos;
    std::array<double, 8> val;

    for (long z = -1; z < nz; ++z) {
        for (long y = -1; y < ny; ++y) {
            for (long x = -1; x < nx; ++x) {
                bool any_in = false, any_out = false;
                for (int c = 0; c < 8; ++c) {
                    const long cx = x + kCorner[c][0], cy = y + kCorner[c][1], cz = z + kCorner[c][2];
                    const double f = field.at(cx, cy, cz);
                    val[static_cast<std::size_t>(c)] = f;
                    pos[static_cast<std::size_t>(c)] = {cx * spx, cy * spy, cz * spz};
                    (f > kIso ? any_in : any_out) = true;
                }
                if (!any_in || !any_out) continue;

                for (const auto& tet : kTets) {
                    int inside[4], n_in = 0;
                    int outside[4], n_out = 0;
                    for (int i = 0; i < 4; ++i) {
                        if (val[static_cast<std::size_t>(tet[i])] > kIso) inside[n_in++] = tet[i];
                        else outside[n_out++] = tet[i];
                    }
                    if (n_in == 0 || n_in == 4) continue;

                    auto edge_point = [&](int a, int b) -> Vec3 {
                        const double fa = val[static_cast<std::size_t>(a)];
                        const double fb = val[static_cast<std::size_t>(b)];
                        const double t = (kIso - fa) / (fb - fa);
                        const Vec3& pa = pos[static_cast<std::size_t>(a)];
                        const Vec3& pb = pos[static_cast<std::size_t>(b)];
                        return {pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1]),
                                pa[2] + t * (pb[2] - pa[2])};
                    };

                    if (n_in == 1) {
                        const Vec3 ref = pos[static_cast<std::size_t>(inside[0])];
                        acc.add(edge_point(inside[0], outside[0]), edge_point(inside[0], outside[1]),
                                edge_point(inside[0], outside[2]), ref);
                    } else if (n_in == 3) {
                        const Vec3 ref = pos[static_cast<std::size_t>(inside[0])];
                        acc.add(edge_point(outside[0], inside[0]), edge_point(outside[0], inside[1]),
                                edge_point(outside[0], inside[2]), ref);
                    } else { // 2 in, 2 out: quad split into two triangles
                        const Vec3 ref = pos[static_cast<std::size_t>(inside[0])];
                        const Vec3 p00 = edge_point(inside[0], outside[0]);
                        const Vec3 p01 = edge_point(inside[0], outside[1]);
                        const Vec3 p10 = edge_point(inside[1], outside[0]);
                        const Vec3 p11 = edge_point(inside[1], outside[1]);
                        acc.add(p00, p01, p11, ref);
                        acc.add(p00, p11, p10, ref);
                    }
                }
            }
        }
    }

    MeshResult result;
    result.valid = acc.triangles > 0;
    result.surface_area = acc.area;
    result.volume = std::abs(acc.signed_volume);
    return result;
}

} // namespace radml::features::detail
