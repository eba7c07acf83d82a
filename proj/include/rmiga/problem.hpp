#pragma once

#include <functional>

#include <Eigen/Dense>

#include "rmiga/geometry.hpp"
#include "rmiga/material.hpp"
#include "rmiga/tensor_space.hpp"

namespace rmiga {

/// Transversal load as a function of physical coordinates.
using LoadFunction = std::function<double(double x, double y)>;

/// Thickness-scaled Reissner-Mindlin bending problem on one mapped patch:
/// find rotations theta and deflection w with
///   a(theta, eta) + mu k t^{-2} (theta - grad w, eta - grad v) = (f, v)
/// for all admissible (eta, v), all essential data homogeneous.
struct PlateProblem {
    MaterialParams material;
    double thickness = 1e-3;
    GeometryMap geometry;
    BoundarySpec bc;
    LoadFunction load;

    void validate() const {
        material.validate();
        if (!(thickness > 0.0))
            throw InvalidArgument("PlateProblem: thickness must be positive, got " +
                                  std::to_string(thickness));
        bc.validate();
        if (!load)
            throw InvalidArgument("PlateProblem: load function not set");
    }
};

/// Physical plate fields at a parametric point of the patch; used both for
/// analytic solutions and for fine-mesh reference solutions.
struct PlateFieldSample {
    double w = 0.0;
    Eigen::Vector2d grad_w = Eigen::Vector2d::Zero();
    Eigen::Vector2d theta = Eigen::Vector2d::Zero();
    Eigen::Matrix2d grad_theta = Eigen::Matrix2d::Zero(); // (i,j) = d theta_i / d x_j
    Eigen::Vector2d shear = Eigen::Vector2d::Zero();
};

using ReferenceField = std::function<PlateFieldSample(double uhat, double vhat)>;

} // namespace rmiga
