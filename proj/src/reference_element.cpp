#include "cmx/reference_element.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cmx
{
    namespace
    {
        // Orthonormal Jacobi polynomial P_n^(alpha,beta) on [-1,1].
        double jacobi_p(double x, double alpha, double beta, int n)
        {
            const double g0 = std::pow(2.0, alpha + beta + 1.0) / (alpha + beta + 1.0) *
                              std::tgamma(alpha + 1.0) * std::tgamma(beta + 1.0) /
                              std::tgamma(alpha + beta + 1.0);
            double pm1 = 1.0 / std::sqrt(g0);
            if (n == 0)
                return pm1;
            const double g1 = (alpha + 1.0) * (beta + 1.0) / (alpha + beta + 3.0) * g0;
            double p = ((alpha + beta + 2.0) * x / 2.0 + (alpha - beta) / 2.0) / std::sqrt(g1);
            if (n == 1)
                return p;
            double aold = 2.0 / (2.0 + alpha + beta) *
                          std::sqrt((alpha + 1.0) * (beta + 1.0) / (alpha + beta + 3.0));
            for (int i = 1; i < n; ++i)
            {
                const double h1 = 2.0 * i + alpha + beta;
                const double anew =
                    2.0 / (h1 + 2.0) *
                    std::sqrt((i + 1.0) * (i + 1.0 + alpha + beta) * (i + 1.0 + alpha) *
                              (i + 1.0 + beta) / (h1 + 1.0) / (h1 + 3.0));
                const double bnew = -(alpha * alpha - beta * beta) / h1 / (h1 + 2.0);
                const double pnew = (-aold * pm1 + (x - bnew) * p) / anew;
                pm1 = p;
                p = pnew;
                aold = anew;
            }
            return p;
        }

        double grad_jacobi_p(double x, double alpha, double beta, int n)
        {
            if (n == 0)
                return 0.0;
            return std::sqrt(n * (n + alpha + beta + 1.0)) * jacobi_p(x, alpha + 1.0, beta + 1.0, n - 1);
        }

        // Collapsed coordinates of the reference triangle.
        void rs_to_ab(double r, double s, double& a, double& b)
        {
            a = (std::abs(s - 1.0) > 1e-13) ? 2.0 * (1.0 + r) / (1.0 - s) - 1.0 : -1.0;
            b = s;
        }

        // Orthonormal Dubiner mode (i,j) and its (r,s) gradient.
        double dubiner(double r, double s, int i, int j)
        {
            double a, b;
            rs_to_ab(r, s, a, b);
            return std::numbers::sqrt2 * jacobi_p(a, 0, 0, i) * jacobi_p(b, 2.0 * i + 1.0, 0, j) *
                   std::pow(1.0 - b, i);
        }

        void dubiner_grad(double r, double s, int i, int j, double& dr, double& ds)
        {
            double a, b;
            rs_to_ab(r, s, a, b);
            const double fa = jacobi_p(a, 0, 0, i);
            const double dfa = grad_jacobi_p(a, 0, 0, i);
            const double gb = jacobi_p(b, 2.0 * i + 1.0, 0, j);
            const double dgb = grad_jacobi_p(b, 2.0 * i + 1.0, 0, j);

            dr = dfa * gb;
            if (i > 0)
                dr *= std::pow(0.5 * (1.0 - b), i - 1);

            ds = dfa * gb * 0.5 * (1.0 + a);
            if (i > 0)
                ds *= std::pow(0.5 * (1.0 - b), i - 1);
            double tmp = dgb * std::pow(0.5 * (1.0 - b), i);
            if (i > 0)
                tmp -= 0.5 * i * gb * std::pow(0.5 * (1.0 - b), i - 1);
            ds += fa * tmp;

            const double scale = std::pow(2.0, i + 0.5);
            dr *= scale;
            ds *= scale;
        }
    } // namespace

    void gauss_jacobi(int n, double alpha, double beta, Eigen::VectorXd& x, Eigen::VectorXd& w)
    {
        if (n < 1)
            throw std::invalid_argument("gauss_jacobi: need n >= 1");
        const double mu0 = std::pow(2.0, alpha + beta + 1.0) * std::tgamma(alpha + 1.0) *
                           std::tgamma(beta + 1.0) / std::tgamma(alpha + beta + 2.0);
        if (n == 1)
        {
            x.resize(1);
            w.resize(1);
            x[0] = (beta - alpha) / (alpha + beta + 2.0);
            w[0] = mu0;
            return;
        }
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
        for (int k = 0; k < n; ++k)
        {
            if (k == 0)
                J(0, 0) = (beta - alpha) / (alpha + beta + 2.0);
            else
            {
                const double s = 2.0 * k + alpha + beta;
                J(k, k) = (beta * beta - alpha * alpha) / (s * (s + 2.0));
                const double bk = std::sqrt(4.0 * k * (k + alpha) * (k + beta) * (k + alpha + beta) /
                                            (s * s * (s + 1.0) * (s - 1.0)));
                J(k, k - 1) = bk;
                J(k - 1, k) = bk;
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
        x = es.eigenvalues();
        w.resize(n);
        for (int k = 0; k < n; ++k)
        {
            const double v0 = es.eigenvectors()(0, k);
            w[k] = mu0 * v0 * v0;
        }
    }

    ReferenceElement::ReferenceElement(int degree) : q_(degree)
    {
        if (degree != 1 && degree != 3)
            throw std::invalid_argument("ReferenceElement: supported degrees are 1 and 3");
        n_nodes_ = (q_ + 1) * (q_ + 2) / 2;
        n_fq_ = q_ + 1;

        const Eigen::Vector2d V0(-1.0, -1.0), V1(1.0, -1.0), V2(-1.0, 1.0);
        const Eigen::Vector2d verts[3] = {V0, V1, V2};

        nodes_.resize(n_nodes_, 2);
        if (q_ == 1)
        {
            for (int k = 0; k < 3; ++k)
                nodes_.row(k) = verts[k];
        }
        else
        {
            // vertices, then two Gauss-Lobatto points per edge, then the centroid
            const double gl = 1.0 / std::sqrt(5.0);
            int row = 0;
            for (int k = 0; k < 3; ++k)
                nodes_.row(row++) = verts[k];
            for (int f = 0; f < 3; ++f)
            {
                const Eigen::Vector2d a = verts[f], b = verts[(f + 1) % 3];
                for (double xi : {-gl, gl})
                    nodes_.row(row++) = 0.5 * (1.0 - xi) * a + 0.5 * (1.0 + xi) * b;
            }
            nodes_.row(row++) = Eigen::Vector2d(-1.0 / 3.0, -1.0 / 3.0);
        }

        vand_ = basis_at(nodes_);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(vand_);
        if (!lu.isInvertible())
            throw std::runtime_error("ReferenceElement: nodal set is not unisolvent");
        vand_inv_ = lu.inverse();

        mass_ = vand_inv_.transpose() * vand_inv_;   // basis is orthonormal on the triangle
        mass_inv_ = vand_ * vand_.transpose();

        // nodal differentiation from the gradient Vandermonde
        Eigen::MatrixXd Vr(n_nodes_, n_nodes_), Vs(n_nodes_, n_nodes_);
        {
            int m = 0;
            for (int i = 0; i <= q_; ++i)
                for (int j = 0; j <= q_ - i; ++j, ++m)
                    for (int p = 0; p < n_nodes_; ++p)
                    {
                        double dr, ds;
                        dubiner_grad(nodes_(p, 0), nodes_(p, 1), i, j, dr, ds);
                        Vr(p, m) = dr;
                        Vs(p, m) = ds;
                    }
        }
        Dr_ = Vr * vand_inv_;
        Ds_ = Vs * vand_inv_;

        // face quadrature and lifts
        gauss_jacobi(n_fq_, 0.0, 0.0, fq_xi_, fq_w_);
        const Eigen::VectorXd& fx = fq_xi_;
        const Eigen::VectorXd& fw = fq_w_;
        for (int f = 0; f < 3; ++f)
        {
            const Eigen::Vector2d a = Eigen::Vector2d(verts[f]), b = Eigen::Vector2d(verts[(f + 1) % 3]);
            Eigen::MatrixXd pts_fwd(n_fq_, 2), pts_rev(n_fq_, 2);
            for (int k = 0; k < n_fq_; ++k)
            {
                pts_fwd.row(k) = 0.5 * (1.0 - fx[k]) * a + 0.5 * (1.0 + fx[k]) * b;
                pts_rev.row(k) = 0.5 * (1.0 - fx[k]) * b + 0.5 * (1.0 + fx[k]) * a;
            }
            face_interp_fwd_[f] = interp_at(pts_fwd);
            face_interp_rev_[f] = interp_at(pts_rev);
            lift_fwd_[f] = mass_inv_ * face_interp_fwd_[f].transpose() * fw.asDiagonal();
            lift_rev_[f] = mass_inv_ * face_interp_rev_[f].transpose() * fw.asDiagonal();
        }

        // collapsed-product volume quadrature, exact to degree 2q+3
        {
            const int n1 = q_ + 2;
            Eigen::VectorXd ga, wa, gb, wb;
            gauss_jacobi(n1, 0.0, 0.0, ga, wa);
            gauss_jacobi(n1, 1.0, 0.0, gb, wb);
            vq_xy_.resize(n1 * n1, 2);
            vq_w_.resize(n1 * n1);
            int m = 0;
            for (int ib = 0; ib < n1; ++ib)
                for (int ia = 0; ia < n1; ++ia, ++m)
                {
                    const double aa = ga[ia], bb = gb[ib];
                    vq_xy_(m, 0) = 0.5 * (1.0 + aa) * (1.0 - bb) - 1.0;
                    vq_xy_(m, 1) = bb;
                    vq_w_[m] = 0.5 * wa[ia] * wb[ib];
                }
            vq_interp_ = interp_at(vq_xy_);
        }
    }

    Eigen::MatrixXd ReferenceElement::basis_at(const Eigen::MatrixXd& rs) const
    {
        const int np = static_cast<int>(rs.rows());
        Eigen::MatrixXd V(np, n_nodes_);
        int m = 0;
        for (int i = 0; i <= q_; ++i)
            for (int j = 0; j <= q_ - i; ++j, ++m)
                for (int p = 0; p < np; ++p)
                    V(p, m) = dubiner(rs(p, 0), rs(p, 1), i, j);
        return V;
    }

    Eigen::MatrixXd ReferenceElement::interp_at(const Eigen::MatrixXd& rs) const
    {
        return basis_at(rs) * vand_inv_;
    }

} // namespace cmx
