#include "cmx/dg.hpp"

// Serial reference for apply_B: a plain face-major assembly that computes each
// flux once and scatters it to both adjacent elements. Independent of the
// owner-writes kernel in dg.cpp; the two paths are cross-checked in the tests
// and raced in the benchmark tool.

namespace cmx
{
    void DgOperator::apply_B_serial(const double* u, double* out) const
    {
        const DgSpace& sp = *space_;
        const ReferenceElement& ref = sp.ref();
        const Mesh& mesh = sp.mesh();
        const MaterialField& mat = *materials_;
        const int n = sp.nodes_per_elem();
        const int nfq = ref.n_face_quad();
        using Block3 = Eigen::Matrix<double, Eigen::Dynamic, 3>;

        // volume terms
        for (int e = 0; e < sp.n_elements(); ++e)
        {
            Eigen::Map<const Block3> U(u + sp.block(e, 0), n, 3);
            Eigen::Map<Block3> OUT(out + sp.block(e, 0), n, 3);
            const auto& [rx, sx, ry, sy] = sp.metric(e);
            const Eigen::VectorXd dEdx = rx * (ref.Dr() * U.col(0)) + sx * (ref.Ds() * U.col(0));
            const Eigen::VectorXd dEdy = ry * (ref.Dr() * U.col(0)) + sy * (ref.Ds() * U.col(0));
            const Eigen::VectorXd dH1dy = ry * (ref.Dr() * U.col(1)) + sy * (ref.Ds() * U.col(1));
            const Eigen::VectorXd dH2dx = rx * (ref.Dr() * U.col(2)) + sx * (ref.Ds() * U.col(2));
            OUT.col(0) = (-mat.sigma[e] * U.col(0) - (dH2dx - dH1dy)) / mat.eps[e];
            OUT.col(1) = dEdy / mat.mu[e];
            OUT.col(2) = -dEdx / mat.mu[e];
        }

        if (!opts_.include_face_terms)
            return;

        Eigen::VectorXd E_o(nfq), E_n(nfq), Ht_o(nfq), Ht_n(nfq);
        Eigen::VectorXd Ehat(nfq), Hthat(nfq);
        Block3 dens(nfq, 3);

        for (int fi = 0; fi < mesh.n_faces(); ++fi)
        {
            const Face& face = mesh.faces[fi];
            const FaceCoef& c = face_coef_[fi];
            const Vec2 t = face.tangent;
            const int eo = face.owner;

            Eigen::Map<const Block3> Uo(u + sp.block(eo, 0), n, 3);
            const Eigen::MatrixXd& Io = ref.face_interp(face.owner_lf, true);
            E_o = Io * Uo.col(0);
            Ht_o = t.x * (Io * Uo.col(1)) + t.y * (Io * Uo.col(2));

            if (!face.is_boundary())
            {
                const int en = face.neighbor;
                Eigen::Map<const Block3> Un(u + sp.block(en, 0), n, 3);
                const Eigen::MatrixXd& In = ref.face_interp(face.neighbor_lf, false);
                E_n = In * Un.col(0);
                Ht_n = t.x * (In * Un.col(1)) + t.y * (In * Un.col(2));
                const double a = opts_.upwind;
                for (int k = 0; k < nfq; ++k)
                {
                    Ehat[k] = (c.y_o * E_o[k] + c.y_n * E_n[k] + a * (Ht_o[k] - Ht_n[k])) *
                              c.inv_sum_y;
                    Hthat[k] = (c.z_o * Ht_o[k] + c.z_n * Ht_n[k] + a * (E_o[k] - E_n[k])) *
                               c.inv_sum_z;
                }
                // owner side (+1), then neighbor side (-1)
                for (int k = 0; k < nfq; ++k)
                {
                    const double dE = -(Hthat[k] - Ht_o[k]);
                    const double dH = -(Ehat[k] - E_o[k]);
                    dens(k, 0) = dE;
                    dens(k, 1) = dH * t.x;
                    dens(k, 2) = dH * t.y;
                }
                {
                    const double s = face.length / (2.0 * sp.det_jacobian(eo));
                    dens.col(0) *= s / mat.eps[eo];
                    dens.col(1) *= s / mat.mu[eo];
                    dens.col(2) *= s / mat.mu[eo];
                    Eigen::Map<Block3> OUT(out + sp.block(eo, 0), n, 3);
                    OUT.noalias() += ref.lift(face.owner_lf, true) * dens;
                }
                for (int k = 0; k < nfq; ++k)
                {
                    const double dE = +(Hthat[k] - Ht_n[k]);
                    const double dH = +(Ehat[k] - E_n[k]);
                    dens(k, 0) = dE;
                    dens(k, 1) = dH * t.x;
                    dens(k, 2) = dH * t.y;
                }
                {
                    const double s = face.length / (2.0 * sp.det_jacobian(en));
                    dens.col(0) *= s / mat.eps[en];
                    dens.col(1) *= s / mat.mu[en];
                    dens.col(2) *= s / mat.mu[en];
                    Eigen::Map<Block3> OUT(out + sp.block(en, 0), n, 3);
                    OUT.noalias() += ref.lift(face.neighbor_lf, false) * dens;
                }
            }
            else
            {
                if (face.tag == BoundaryTag::PEC)
                {
                    for (int k = 0; k < nfq; ++k)
                    {
                        Ehat[k] = 0.0;
                        Hthat[k] = Ht_o[k] + c.y_o * E_o[k];
                    }
                }
                else
                {
                    for (int k = 0; k < nfq; ++k)
                    {
                        const double w = E_o[k] + c.z_bc * Ht_o[k];
                        Ehat[k] = 0.5 * w;
                        Hthat[k] = 0.5 * c.y_bc * w;
                    }
                }
                for (int k = 0; k < nfq; ++k)
                {
                    const double dE = -(Hthat[k] - Ht_o[k]);
                    const double dH = -(Ehat[k] - E_o[k]);
                    dens(k, 0) = dE;
                    dens(k, 1) = dH * t.x;
                    dens(k, 2) = dH * t.y;
                }
                const double s = face.length / (2.0 * sp.det_jacobian(eo));
                dens.col(0) *= s / mat.eps[eo];
                dens.col(1) *= s / mat.mu[eo];
                dens.col(2) *= s / mat.mu[eo];
                Eigen::Map<Block3> OUT(out + sp.block(eo, 0), n, 3);
                OUT.noalias() += ref.lift(face.owner_lf, true) * dens;
            }
        }
    }

} // namespace cmx
