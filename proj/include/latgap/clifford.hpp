#pragma once

// Euclidean Hermitian gamma matrices in the chiral basis (gamma5 diagonal),
// chirality projectors, and the algebra checks used by the tests.

#include <Eigen/Dense>
#include <array>
#include <complex>

namespace latgap {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;

struct Clifford {
    std::array<Mat4, 4> gamma;  // gamma[0..3] <-> directions 1..4
    Mat4 gamma5;
    Mat4 p_left;   // (1 - gamma5)/2, projects onto the first two components
    Mat4 p_right;  // (1 + gamma5)/2

    Clifford() {
        const cplx i(0.0, 1.0);
        Mat2 s1, s2, s3, id2;
        s1 << 0, 1, 1, 0;
        s2 << 0, -i, i, 0;
        s3 << 1, 0, 0, -1;
        id2.setIdentity();
        std::array<Mat2, 3> sigma{s1, s2, s3};
        for (int k = 0; k < 3; ++k) {
            gamma[k].setZero();
            gamma[k].topRightCorner<2, 2>() = -i * sigma[k];
            gamma[k].bottomLeftCorner<2, 2>() = i * sigma[k];
        }
        gamma[3].setZero();
        gamma[3].topRightCorner<2, 2>() = id2;
        gamma[3].bottomLeftCorner<2, 2>() = id2;
        gamma5 = -(gamma[0] * gamma[1] * gamma[2] * gamma[3]);
        p_right = 0.5 * (Mat4::Identity() + gamma5);
        p_left = 0.5 * (Mat4::Identity() - gamma5);
    }

    static const Clifford& instance() {
        static const Clifford c;
        return c;
    }
};

}  // namespace latgap
