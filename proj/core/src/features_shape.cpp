#include "radml/features.hpp"

#include "mesh.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace radml::features {

namespace {

struct Point2 {
    double x, y;
};

double dist2(const Point2& a, const Point2& b) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

/// Andrew's monotone chain; returns hull vertices in counterclockwise order.
std::vector<Point2> convex_hull(std::vector<Point2> pts) {
    std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Point2& a, const Point2& b) { return a.x == b.x && a.y == b.y; }),
              pts.end());
    const std::size_t n = pts.size();
    if (n < 3) return pts;
    auto cross = [](const Point2& o, const Point2& a, const Point2& b) {
        return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    };
    std::vector<Point2> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

double polygon_perimeter(const std::vector<Point2>& poly) {
    if (poly.size() < 2) return 0.0;
    double p = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        p += std::sqrt(dist2(poly[i], poly[(i + 1) % poly.size()]));
    }
    return p;
}

double polygon_area(const std::vector<Point2>& poly) {
    if (poly.size() < 3) return 0.0;
    double a = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const auto& p = poly[i];
        const auto& q = poly[(i + 1) % poly.size()];
        a += p.x * q.y - q.x * p.y;
    }
    return std::abs(a) * 0.5;
}

struct SliceGeometry {
    double area = 0;
    double perimeter = 0;
    double compactness = 0;
    double radial_distance = 0;
    double roughness = 0;
    double convexity = 1;
    double circular_variance = 0;
    double axes_ratio = 1;
    double elliptic_variance = 0;
    double solidity = 1;
};

/// Marching-squares contour length of a binary slice (iso 0.5, crossings at
/// edge midpoints). Cells one step outside the slice close the contour.
double marching_squares_perimeter(const std::vector<char>& occ, long nx, long ny, double sx,
                                  double sy) {
    auto at = [&](long x, long y) -> int {
        if (x < 0 || y < 0 || x >= nx || y >= ny) return 0;
        return occ[static_cast<std::size_t>(y) * static_cast<std::size_t>(nx) +
                   static_cast<std::size_t>(x)];
    };
    double total = 0.0;
    auto seg = [&](double x0, double y0, double x1, double y1) {
        const double dx = (x1 - x0) * sx, dy = (y1 - y0) * sy;
        total += std::sqrt(dx * dx + dy * dy);
    };
    for (long y = -1; y < ny; ++y) {
        for (long x = -1; x < nx; ++x) {
            const int c = at(x, y) | (at(x + 1, y) << 1) | (at(x + 1, y + 1) << 2) |
                          (at(x, y + 1) << 3);
            const double xm = x + 0.5, ym = y + 0.5;
            // edge midpoints: bottom (xm, y), right (x+1, ym), top (xm, y+1), left (x, ym)
            switch (c) {
                case 1: case 14: seg(x, ym, xm, y); break;
                case 2: case 13: seg(xm, y, x + 1, ym); break;
                case 4: case 11: seg(x + 1, ym, xm, y + 1); break;
                case 8: case 7: seg(xm, y + 1, x, ym); break;
                case 3: case 12: seg(x, ym, x + 1, ym); break;
                case 6: case 9: seg(xm, y, xm, y + 1); break;
                case 5: // saddle: corners 0 and 2
                    seg(x, ym, xm, y);
                    seg(x + 1, ym, xm, y + 1);
                    break;
                case 10: // saddle: corners 1 and 3
                    seg(xm, y, x + 1, ym);
                    seg(xm, y + 1, x, ym);
                    break;
                default: break; // 0, 15
            }
        }
    }
    return total;
}

SliceGeometry slice_geometry(const std::vector<char>& occ, long nx, long ny, double sx, double sy) {
    SliceGeometry g;
    std::vector<Point2> pixels, boundary;
    auto at = [&](long x, long y) -> int {
        if (x < 0 || y < 0 || x >= nx || y >= ny) return 0;
        return occ[static_cast<std::size_t>(y) * static_cast<std::size_t>(nx) +
                   static_cast<std::size_t>(x)];
    };
    for (long y = 0; y < ny; ++y) {
        for (long x = 0; x < nx; ++x) {
            if (!at(x, y)) continue;
            const Point2 p{x * sx, y * sy};
            pixels.push_back(p);
            if (!at(x - 1, y) || !at(x + 1, y) || !at(x, y - 1) || !at(x, y + 1)) {
                boundary.push_back(p);
            }
        }
    }
    const double n = static_cast<double>(pixels.size());
    g.area = n * sx * sy;
    g.perimeter = marching_squares_perimeter(occ, nx, ny, sx, sy);
    g.compactness = g.perimeter > 0 ? 4.0 * std::numbers::pi * g.area / (g.perimeter * g.perimeter)
                                    : 1.0;

    Point2 centroid{0, 0};
    for (const auto& p : pixels) {
        centroid.x += p.x;
        centroid.y += p.y;
    }
    centroid.x /= n;
    centroid.y /= n;

    std::vector<double> radii;
    radii.reserve(boundary.size());
    for (const auto& p : boundary) radii.push_back(std::sqrt(dist2(p, centroid)));
    double r_mean = 0;
    for (double r : radii) r_mean += r;
    r_mean /= static_cast<double>(radii.size());
    g.radial_distance = r_mean;
    if (r_mean > 0) {
        double mad = 0, var = 0;
        for (double r : radii) {
            mad += std::abs(r - r_mean);
            var += (r - r_mean) * (r - r_mean);
        }
        mad /= static_cast<double>(radii.size());
        var /= static_cast<double>(radii.size());
        g.roughness = mad / r_mean;
        g.circular_variance = var / (r_mean * r_mean);
    }

    auto hull = convex_hull(boundary);
    if (hull.size() >= 3) {
        const double hull_perimeter = polygon_perimeter(hull);
        const double hull_area = polygon_area(hull);
        if (g.perimeter > 0) g.convexity = hull_perimeter / g.perimeter;
        if (hull_area > 0) g.solidity = g.area / hull_area;
    }

    // 2-D inertia with the within-pixel variance added, so single pixels stay finite
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (const auto& p : pixels) {
        const double dx = p.x - centroid.x, dy = p.y - centroid.y;
        cov(0, 0) += dx * dx;
        cov(0, 1) += dx * dy;
        cov(1, 1) += dy * dy;
    }
    cov(1, 0) = cov(0, 1);
    cov /= n;
    cov(0, 0) += sx * sx / 12.0;
    cov(1, 1) += sy * sy / 12.0;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
    g.axes_ratio = std::sqrt(eig.eigenvalues()(0) / eig.eigenvalues()(1));

    if (boundary.size() >= 3) {
        Eigen::Matrix2d bc = Eigen::Matrix2d::Zero();
        Point2 bcent{0, 0};
        for (const auto& p : boundary) {
            bcent.x += p.x;
            bcent.y += p.y;
        }
        bcent.x /= static_cast<double>(boundary.size());
        bcent.y /= static_cast<double>(boundary.size());
        for (const auto& p : boundary) {
            const double dx = p.x - bcent.x, dy = p.y - bcent.y;
            bc(0, 0) += dx * dx;
            bc(0, 1) += dx * dy;
            bc(1, 1) += dy * dy;
        }
        bc(1, 0) = bc(0, 1);
        bc /= static_cast<double>(boundary.size());
        bc(0, 0) += sx * sx / 12.0;
        bc(1, 1) += sy * sy / 12.0;
        const Eigen::Matrix2d inv = bc.inverse();
        std::vector<double> mahal;
        mahal.reserve(boundary.size());
        for (const auto& p : boundary) {
            Eigen::Vector2d d(p.x - bcent.x, p.y - bcent.y);
            mahal.push_back(std::sqrt(std::max(0.0, d.dot(inv * d))));
        }
        double m = 0;
        for (double v : mahal) m += v;
        m /= static_cast<double>(mahal.size());
        if (m > 0) {
            double var = 0;
            for (double v : mahal) var += (v - m) * (v - m);
            var /= static_cast<double>(mahal.size());
            g.elliptic_variance = var / (m * m);
        }
    }
    return g;
}

void mean_std(const std::vector<double>& v, double& mean, double& stdev) {
    mean = 0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0;
    for (double x : v) var += (x - mean) * (x - mean);
    stdev = std::sqrt(var / static_cast<double>(v.size()));
}

/// Max squared pairwise distance; points are expected to be few (hull points).
double max_pairwise_dist(const std::vector<Point2>& pts) {
    double best = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::max(best, dist2(pts[i], pts[j]));
    }
    return std::sqrt(best);
}

} // namespace

std::vector<double> shape_features(const RoiMask& mask) {
    mask.validate();
    const long nx = static_cast<long>(mask.dims[0]);
    const long ny = static_cast<long>(mask.dims[1]);
    const long nz = static_cast<long>(mask.dims[2]);
    const double sx = mask.spacing[0], sy = mask.spacing[1], sz = mask.spacing[2];

    std::vector<double> compactness, radial, roughness, convexity, circ_var, axes_ratio,
        ellip_var, solidity, areas;

    // boundary voxels in physical coordinates, grouped for the 2-D diameters
    std::vector<std::vector<Point2>> by_slice(static_cast<std::size_t>(nz));
    std::vector<std::vector<Point2>> by_row(static_cast<std::size_t>(nx));   // fixed x: (y, z)
    std::vector<std::vector<Point2>> by_column(static_cast<std::size_t>(ny)); // fixed y: (x, z)

    auto at = [&](long x, long y, long z) -> bool {
        if (x < 0 || y < 0 || z < 0 || x >= nx || y >= ny || z >= nz) return false;
        return mask.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y),
                       static_cast<std::size_t>(z));
    };

    for (long z = 0; z < nz; ++z) {
        std::vector<char> occ(static_cast<std::size_t>(nx * ny), 0);
        bool any = false;
        for (long y = 0; y < ny; ++y) {
            for (long x = 0; x < nx; ++x) {
                if (!at(x, y, z)) continue;
                occ[static_cast<std::size_t>(y * nx + x)] = 1;
                any = true;
                const bool boundary = !at(x - 1, y, z) || !at(x + 1, y, z) || !at(x, y - 1, z) ||
                                      !at(x, y + 1, z) || !at(x, y, z - 1) || !at(x, y, z + 1);
                if (boundary) {
                    by_slice[static_cast<std::size_t>(z)].push_back({x * sx, y * sy});
                    by_row[static_cast<std::size_t>(x)].push_back({y * sy, z * sz});
                    by_column[static_cast<std::size_t>(y)].push_back({x * sx, z * sz});
                }
            }
        }
        if (!any) continue;
        const SliceGeometry g = slice_geometry(occ, nx, ny, sx, sy);
        compactness.push_back(g.compactness);
        radial.push_back(g.radial_distance);
        roughness.push_back(g.roughness);
        convexity.push_back(g.convexity);
        circ_var.push_back(g.circular_variance);
        axes_ratio.push_back(g.axes_ratio);
        ellip_var.push_back(g.elliptic_variance);
        solidity.push_back(g.solidity);
        areas.push_back(g.area);
    }

    std::vector<double> out;
    out.reserve(35);
    for (const auto* v : {&compactness, &radial, &roughness, &convexity, &circ_var, &axes_ratio,
                          &ellip_var, &solidity}) {
        double m, s;
        mean_std(*v, m, s);
        out.push_back(m);
        out.push_back(s);
    }
    {
        double m, s;
        mean_std(areas, m, s);
        out.push_back(m);
        out.push_back(s);
        out.push_back(*std::min_element(areas.begin(), areas.end()));
        out.push_back(*std::max_element(areas.begin(), areas.end()));
    }

    const double voxel_count = static_cast<double>(mask.foreground_count());
    const auto mesh = detail::mask_mesh(mask);
    out.push_back(voxel_count);
    out.push_back(mesh.valid ? mesh.volume : missing_value());
    out.push_back(voxel_count * sx * sy * sz);

    // 3-D inertia over voxel centers (physical), with the within-voxel variance
    Eigen::Vector3d com = Eigen::Vector3d::Zero();
    std::vector<Eigen::Vector3d> coords;
    coords.reserve(static_cast<std::size_t>(voxel_count));
    for (long z = 0; z < nz; ++z) {
        for (long y = 0; y < ny; ++y) {
            for (long x = 0; x < nx; ++x) {
                if (!at(x, y, z)) continue;
                coords.emplace_back(x * sx, y * sy, z * sz);
                com += coords.back();
            }
        }
    }
    com /= voxel_count;
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& c : coords) {
        const Eigen::Vector3d d = c - com;
        cov += d * d.transpose();
    }
    cov /= voxel_count;
    cov(0, 0) += sx * sx / 12.0;
    cov(1, 1) += sy * sy / 12.0;
    cov(2, 2) += sz * sz / 12.0;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    const double l_least = eig.eigenvalues()(0);
    const double l_minor = eig.eigenvalues()(1);
    const double l_major = eig.eigenvalues()(2);
    out.push_back(std::sqrt(l_major / l_minor)); // elongation: rod >> cube
    out.push_back(std::sqrt(l_major / l_least)); // flatness
    out.push_back(4.0 * std::sqrt(l_least));
    out.push_back(4.0 * std::sqrt(l_major));
    out.push_back(4.0 * std::sqrt(l_minor));

    // diameters from boundary points; 3-D extremes lie on per-slice hulls
    std::vector<Point2> dummy;
    std::vector<Eigen::Vector3d> hull_points_3d;
    for (long z = 0; z < nz; ++z) {
        const auto& pts = by_slice[static_cast<std::size_t>(z)];
        if (pts.empty()) continue;
        for (const auto& h : convex_hull(pts)) {
            hull_points_3d.emplace_back(h.x, h.y, z * sz);
        }
    }
    double max3d = 0;
    for (std::size_t i = 0; i < hull_points_3d.size(); ++i) {
        for (std::size_t j = i + 1; j < hull_points_3d.size(); ++j) {
            max3d = std::max(max3d, (hull_points_3d[i] - hull_points_3d[j]).squaredNorm());
        }
    }
    out.push_back(std::sqrt(max3d));

    auto plane_diameter = [](const std::vector<std::vector<Point2>>& groups) {
        double best = 0;
        for (const auto& g : groups) {
            if (g.size() < 2) continue;
            best = std::max(best, max_pairwise_dist(convex_hull(g)));
        }
        return best;
    };
    out.push_back(plane_diameter(by_row));
    out.push_back(plane_diameter(by_column));
    out.push_back(plane_diameter(by_slice));

    if (mesh.valid && mesh.volume > 0 && mesh.surface_area > 0) {
        const double sphericity = std::pow(std::numbers::pi, 1.0 / 3.0) *
                                  std::pow(6.0 * mesh.volume, 2.0 / 3.0) / mesh.surface_area;
        out.push_back(sphericity);
        out.push_back(mesh.surface_area);
        out.push_back(mesh.surface_area / mesh.volume);
    } else {
        out.push_back(missing_value());
        out.push_back(missing_value());
        out.push_back(missing_value());
    }
    return out;
}

} // namespace radml::features
