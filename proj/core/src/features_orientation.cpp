#include "radml/features.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace radml::features {

std::vector<double> orientation_features(const RoiMask& mask) {
    mask.validate();
    const double sx = mask.spacing[0], sy = mask.spacing[1], sz = mask.spacing[2];

    Eigen::Vector3d com_index = Eigen::Vector3d::Zero();
    double n = 0;
    for (std::size_t z = 0; z < mask.dims[2]; ++z) {
        for (std::size_t y = 0; y < mask.dims[1]; ++y) {
            for (std::size_t x = 0; x < mask.dims[0]; ++x) {
                if (!mask.at(x, y, z)) continue;
                com_index += Eigen::Vector3d(static_cast<double>(x), static_cast<double>(y),
                                             static_cast<double>(z));
                n += 1.0;
            }
        }
    }
    com_index /= n;

    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (std::size_t z = 0; z < mask.dims[2]; ++z) {
        for (std::size_t y = 0; y < mask.dims[1]; ++y) {
            for (std::size_t x = 0; x < mask.dims[0]; ++x) {
                if (!mask.at(x, y, z)) continue;
                const Eigen::Vector3d d(x * sx - com_index(0) * sx, y * sy - com_index(1) * sy,
                                        z * sz - com_index(2) * sz);
                cov += d * d.transpose();
            }
        }
    }
    cov /= n;
    cov(0, 0) += sx * sx / 12.0;
    cov(1, 1) += sy * sy / 12.0;
    cov(2, 2) += sz * sz / 12.0;

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    const double l_major = eig.eigenvalues()(2);
    const double l_second = eig.eigenvalues()(1);

    double theta_x = 0, theta_y = 0, theta_z = 0;
    // Degenerate top eigenvalues (e.g. a sphere) leave the major axis
    // undefined; angles are reported as 0 then.
    if (l_major - l_second > 1e-9 * l_major) {
        const Eigen::Vector3d major = eig.eigenvectors().col(2);
        auto angle_deg = [&](int axis) {
            const double c = std::min(1.0, std::abs(major(axis)) / major.norm());
            return std::acos(c) * 180.0 / std::numbers::pi;
        };
        theta_x = angle_deg(0);
        theta_y = angle_deg(1);
        theta_z = angle_deg(2);
    }

    return {theta_x,
            theta_y,
            theta_z,
            com_index(0),
            com_index(1),
            com_index(2),
            com_index(0) * sx,
            com_index(1) * sy,
            com_index(2) * sz};
}

} // namespace radml::features
