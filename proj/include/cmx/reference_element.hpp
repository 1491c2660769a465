#ifndef CMX_REFERENCE_ELEMENT_HPP
#define CMX_REFERENCE_ELEMENT_HPP

#include <Eigen/Dense>

#include <array>

namespace cmx
{
    /// Gauss-Jacobi quadrature on [-1,1] with weight (1-x)^alpha (1+x)^beta
    /// (Golub-Welsch). alpha = beta = 0 gives Gauss-Legendre.
    void gauss_jacobi(int n, double alpha, double beta, Eigen::VectorXd& x, Eigen::VectorXd& w);

    /// Nodal basis data on the reference triangle with vertices
    /// (-1,-1), (1,-1), (-1,1). Local face k runs from vertex k to vertex (k+1)%3.
    ///
    /// The nodal set is unisolvent: vertices for q = 1; vertices, two
    /// Gauss-Lobatto points per edge and the centroid for q = 3 (the warp&blend
    /// set at this degree).
    class ReferenceElement
    {
    public:
        explicit ReferenceElement(int degree);

        int degree() const { return q_; }
        int n_nodes() const { return n_nodes_; }
        int n_face_quad() const { return n_fq_; }
        int n_volume_quad() const { return static_cast<int>(vq_w_.size()); }

        /// Nodal coordinates (n_nodes x 2) in reference (r,s).
        const Eigen::MatrixXd& nodes() const { return nodes_; }

        /// Reference mass matrix and its inverse (affine elements scale by det J).
        const Eigen::MatrixXd& mass() const { return mass_; }
        const Eigen::MatrixXd& mass_inv() const { return mass_inv_; }

        /// Nodal differentiation in reference coordinates.
        const Eigen::MatrixXd& Dr() const { return Dr_; }
        const Eigen::MatrixXd& Ds() const { return Ds_; }

        /// Interpolation from nodal values to the Gauss points of local face f,
        /// traversed forward (vertex f -> vertex f+1) or reversed. (n_fq x n_nodes)
        const Eigen::MatrixXd& face_interp(int f, bool forward) const
        {
            return forward ? face_interp_fwd_[f] : face_interp_rev_[f];
        }

        /// mass_inv * face_interp^T * diag(gauss weights); lifts face-quadrature
        /// densities into nodal right-hand sides. Physical scaling is
        /// len/(2 det J). (n_nodes x n_fq)
        const Eigen::MatrixXd& lift(int f, bool forward) const
        {
            return forward ? lift_fwd_[f] : lift_rev_[f];
        }

        /// Volume quadrature exact for polynomials of degree 2q+3 and the
        /// interpolation matrix from nodal values to its points.
        const Eigen::MatrixXd& volume_quad_points() const { return vq_xy_; }
        const Eigen::VectorXd& volume_quad_weights() const { return vq_w_; }
        const Eigen::MatrixXd& volume_interp() const { return vq_interp_; }

        /// Gauss abscissae/weights of the face rule on [-1,1].
        const Eigen::VectorXd& face_quad_xi() const { return fq_xi_; }
        const Eigen::VectorXd& face_quad_w() const { return fq_w_; }

        /// Vandermonde of the orthonormal Dubiner basis at arbitrary points
        /// ((r,s) rows); used for interpolation matrices and tests.
        Eigen::MatrixXd basis_at(const Eigen::MatrixXd& rs) const;

        /// Interpolation matrix from nodal values to arbitrary points.
        Eigen::MatrixXd interp_at(const Eigen::MatrixXd& rs) const;

    private:
        int q_;
        int n_nodes_;
        int n_fq_;
        Eigen::MatrixXd nodes_;
        Eigen::MatrixXd vand_;       // V_ij = phi_j(node_i)
        Eigen::MatrixXd vand_inv_;
        Eigen::MatrixXd mass_, mass_inv_;
        Eigen::MatrixXd Dr_, Ds_;
        std::array<Eigen::MatrixXd, 3> face_interp_fwd_, face_interp_rev_;
        std::array<Eigen::MatrixXd, 3> lift_fwd_, lift_rev_;
        Eigen::VectorXd fq_xi_, fq_w_;
        Eigen::MatrixXd vq_xy_;
        Eigen::VectorXd vq_w_;
        Eigen::MatrixXd vq_interp_;
    };

} // namespace cmx

#endif
