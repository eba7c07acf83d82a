#pragma once

#include <string>

#include <Eigen/Dense>

#include "rmiga/errors.hpp"

namespace rmiga {

/// Isotropic plate material. The defaults are calibrated so that
/// bending_modulus() evaluates to 1.0e6 exactly in double arithmetic.
struct MaterialParams {
    double E = 1.092e7;
    double nu = 0.3;
    double k_shear = 5.0 / 6.0;

    double shear_modulus() const { return E / (2.0 * (1.0 + nu)); }
    double bending_modulus() const { return E / (12.0 * (1.0 - nu * nu)); }

    void validate() const {
        if (!(E > 0.0))
            throw InvalidArgument("MaterialParams: E must be positive, got " + std::to_string(E));
        if (!(nu > 0.0 && nu < 0.5))
            throw InvalidArgument("MaterialParams: nu must lie in (0, 0.5), got " + std::to_string(nu));
        if (!(k_shear > 0.0))
            throw InvalidArgument("MaterialParams: shear correction factor must be positive");
    }
};

/// Plane bending stress C eps = D [(1 - nu) eps + nu tr(eps) I].
inline Eigen::Matrix2d bending_stress(const MaterialParams& mat, const Eigen::Matrix2d& eps) {
    const double d = mat.bending_modulus();
    return d * ((1.0 - mat.nu) * eps + mat.nu * eps.trace() * Eigen::Matrix2d::Identity());
}

} // namespace rmiga
