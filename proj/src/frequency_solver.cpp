#include "cmx/frequency_solver.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>

namespace cmx
{
    using C = std::complex<double>;
    using SpMat = Eigen::SparseMatrix<C>;

    struct FrequencySystem::Impl
    {
        bool assembled = false;
        SpMat A;   // i w I - B (mass-normalized system)
        std::unique_ptr<Eigen::SparseLU<SpMat>> lu;
        std::unique_ptr<Eigen::PartialPivLU<Eigen::MatrixXcd>> dense_lu;
        std::vector<Eigen::MatrixXcd> block_inv;   // element-block Jacobi (large systems)
    };

    // Above this many complex dofs the sparse factorization does not fit desk
    // memory; switch to block-Jacobi preconditioned restarted GMRES.
    static constexpr int kDirectLimit = 60000;

    FrequencySystem::FrequencySystem(const DgOperator& op, const SourceSpec& sources)
        : op_(&op), omega_(sources.omega), impl_(std::make_unique<Impl>())
    {
        if (!(omega_ > 0.0))
            throw std::invalid_argument("FrequencySystem: sources.omega must be positive");
        S_ = op.source_vector(sources);
        load_ = op.apply_mass(S_);
    }

    FrequencySystem::~FrequencySystem() = default;
    FrequencySystem::FrequencySystem(FrequencySystem&&) noexcept = default;

    ComplexField FrequencySystem::apply(const ComplexField& u) const
    {
        const std::size_t nd = u.size();
        check_same_size(nd, static_cast<std::size_t>(op_->space().n_dof()), "FrequencySystem");
        FieldState re(nd), im(nd), Bre(nd), Bim(nd);
        for (std::size_t i = 0; i < nd; ++i)
        {
            re[i] = u[i].real();
            im[i] = u[i].imag();
        }
        op_->apply_B(re.data(), Bre.data());
        op_->apply_B(im.data(), Bim.data());
        ComplexField w(nd);
        for (std::size_t i = 0; i < nd; ++i)
            w[i] = C{0.0, omega_} * u[i] - C{Bre[i], Bim[i]};
        return op_->apply_mass(w);   // (i w M + K) u with K = -M B
    }

    namespace
    {
        // distance-2 greedy coloring of the element adjacency graph; same-color
        // elements have disjoint output supports under apply_B, so B's sparse
        // matrix is recovered with (colors x 3n) operator applications.
        std::vector<int> color_elements(const Mesh& mesh)
        {
            const int K = mesh.n_elements();
            std::vector<std::array<int, 3>> adj(K, {-1, -1, -1});
            for (int e = 0; e < K; ++e)
                for (int lf = 0; lf < 3; ++lf)
                {
                    const Face& f = mesh.faces[mesh.element_faces[e][lf]];
                    adj[e][lf] = f.is_boundary() ? -1 : (f.owner == e ? f.neighbor : f.owner);
                }

            std::vector<int> color(K, -1);
            std::vector<int> forbidden;
            for (int e = 0; e < K; ++e)
            {
                forbidden.clear();
                auto mark = [&](int other)
                {
                    if (other >= 0 && color[other] >= 0)
                        forbidden.push_back(color[other]);
                };
                for (int a : adj[e])
                {
                    mark(a);
                    if (a >= 0)
                        for (int b : adj[a])
                            if (b != e)
                                mark(b);
                }
                int c = 0;
                for (;; ++c)
                {
                    bool used = false;
                    for (int fc : forbidden)
                        if (fc == c)
                        {
                            used = true;
                            break;
                        }
                    if (!used)
                        break;
                }
                color[e] = c;
            }
            return color;
        }
    } // namespace

    namespace
    {
        // distance-1 greedy coloring: same-color elements are never adjacent, so
        // probing them together keeps their own-block outputs separated.
        std::vector<int> color_elements_adjacent(const Mesh& mesh)
        {
            const int K = mesh.n_elements();
            std::vector<int> color(K, -1);
            for (int e = 0; e < K; ++e)
            {
                int forbidden[3] = {-1, -1, -1};
                for (int lf = 0; lf < 3; ++lf)
                {
                    const Face& f = mesh.faces[mesh.element_faces[e][lf]];
                    const int other = f.is_boundary() ? -1 : (f.owner == e ? f.neighbor : f.owner);
                    if (other >= 0)
                        forbidden[lf] = color[other];
                }
                int c = 0;
                while (c == forbidden[0] || c == forbidden[1] || c == forbidden[2])
                    ++c;
                color[e] = c;
            }
            return color;
        }
    } // namespace

    Eigen::VectorXcd FrequencySystem::solve_iterative(double tol) const
    {
        const DgSpace& sp = op_->space();
        const Mesh& mesh = sp.mesh();
        const int nd = sp.n_dof();
        const int bs = 3 * sp.nodes_per_elem();
        const int K = sp.n_elements();

        auto apply_normalized = [&](const Eigen::VectorXcd& x) -> Eigen::VectorXcd
        {
            FieldState re(nd), im(nd), Bre(nd), Bim(nd);
            for (int i = 0; i < nd; ++i)
            {
                re[i] = x[i].real();
                im[i] = x[i].imag();
            }
            op_->apply_B(re.data(), Bre.data());
            op_->apply_B(im.data(), Bim.data());
            Eigen::VectorXcd y(nd);
            for (int i = 0; i < nd; ++i)
                y[i] = C{0.0, omega_} * x[i] - C{Bre[i], Bim[i]};
            return y;
        };

        if (impl_->block_inv.empty())
        {
            const std::vector<int> color = color_elements_adjacent(mesh);
            int n_colors = 0;
            for (int c : color)
                n_colors = std::max(n_colors, c + 1);
            std::vector<Eigen::MatrixXcd> blocks(K, Eigen::MatrixXcd::Zero(bs, bs));
            FieldState probe(nd, 0.0), out(nd, 0.0);
            for (int c = 0; c < n_colors; ++c)
            {
                for (int ld = 0; ld < bs; ++ld)
                {
                    for (int e = 0; e < K; ++e)
                        if (color[e] == c)
                            probe[bs * e + ld] = 1.0;
                    op_->apply_B(probe.data(), out.data());
                    for (int e = 0; e < K; ++e)
                        if (color[e] == c)
                        {
                            for (int m = 0; m < bs; ++m)
                                blocks[e](m, ld) = C{-out[bs * e + m], 0.0};
                            blocks[e](ld, ld) += C{0.0, omega_};
                            probe[bs * e + ld] = 0.0;
                        }
                }
            }
            impl_->block_inv.resize(K);
            for (int e = 0; e < K; ++e)
                impl_->block_inv[e] = blocks[e].partialPivLu().inverse();
        }

        auto precondition = [&](const Eigen::VectorXcd& x) -> Eigen::VectorXcd
        {
            Eigen::VectorXcd y(nd);
            for (int e = 0; e < K; ++e)
                y.segment(bs * e, bs).noalias() = impl_->block_inv[e] * x.segment(bs * e, bs);
            return y;
        };

        // right-preconditioned restarted GMRES
        Eigen::Map<const Eigen::VectorXcd> b(S_.data(), nd);
        const double bnorm = b.norm();
        Eigen::VectorXcd x = Eigen::VectorXcd::Zero(nd);
        if (bnorm == 0.0)
            return x;

        const int restart = 300;
        const int max_outer = 40;
        const double target = 0.05 * tol;   // headroom for the M-weighted final check

        Eigen::MatrixXcd V(nd, restart + 1);
        Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(restart + 1, restart);
        Eigen::VectorXcd cs(restart), sn(restart), g(restart + 1);

        for (int outer = 0; outer < max_outer; ++outer)
        {
            Eigen::VectorXcd r = b - apply_normalized(x);
            double beta = r.norm();
            if (beta / bnorm <= target)
                return x;
            V.col(0) = r / beta;
            g.setZero();
            g[0] = beta;
            int j = 0;
            for (; j < restart; ++j)
            {
                Eigen::VectorXcd w = apply_normalized(precondition(V.col(j)));
                for (int i = 0; i <= j; ++i)
                {
                    H(i, j) = V.col(i).dot(w);
                    w -= H(i, j) * V.col(i);
                }
                H(j + 1, j) = w.norm();
                if (std::abs(H(j + 1, j)) > 0.0)
                    V.col(j + 1) = w / H(j + 1, j);
                for (int i = 0; i < j; ++i)
                {
                    const C t = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
                    H(i + 1, j) = -std::conj(sn[i]) * H(i, j) + std::conj(cs[i]) * H(i + 1, j);
                    H(i, j) = t;
                }
                const double denom =
                    std::sqrt(std::norm(H(j, j)) + std::norm(H(j + 1, j)));
                cs[j] = std::conj(H(j, j)) / denom;
                sn[j] = std::conj(H(j + 1, j)) / denom;
                H(j, j) = cs[j] * H(j, j) + sn[j] * H(j + 1, j);
                H(j + 1, j) = 0.0;
                g[j + 1] = -std::conj(sn[j]) * g[j];
                g[j] = cs[j] * g[j];
                if (std::abs(g[j + 1]) / bnorm <= target)
                {
                    ++j;
                    break;
                }
            }
            Eigen::VectorXcd y =
                H.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
            Eigen::VectorXcd update = Eigen::VectorXcd::Zero(nd);
            for (int i = 0; i < j; ++i)
                update += y[i] * V.col(i);
            x += precondition(update);
        }
        return x;   // residual verified (and rejected) by the caller
    }

    ComplexField FrequencySystem::solve(double tol) const
    {
        const DgSpace& sp = op_->space();
        const int nd = sp.n_dof();
        const int bs = 3 * sp.nodes_per_elem();
        const int K = sp.n_elements();

        if (nd > kDirectLimit)
        {
            const Eigen::VectorXcd x = solve_iterative(tol);
            ComplexField u(nd);
            for (int i = 0; i < nd; ++i)
                u[i] = x[i];
            const ComplexField r = apply(u);
            double num = 0.0, den = 0.0;
            for (int i = 0; i < nd; ++i)
            {
                num += std::norm(r[i] - load_[i]);
                den += std::norm(load_[i]);
            }
            const double rel = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
            if (!(rel <= tol))
                throw SolveError("FrequencySystem: GMRES residual " + std::to_string(rel) +
                                     " exceeds tolerance " + std::to_string(tol),
                                 rel);
            return u;
        }

        if (!impl_->assembled)
        {
            const Mesh& mesh = sp.mesh();
            const std::vector<int> color = color_elements(mesh);
            int n_colors = 0;
            for (int c : color)
                n_colors = std::max(n_colors, c + 1);
            std::vector<std::vector<int>> by_color(n_colors);
            for (int e = 0; e < K; ++e)
                by_color[color[e]].push_back(e);

            std::vector<Eigen::Triplet<C>> trips;
            trips.reserve(static_cast<std::size_t>(K) * 4 * bs * (sp.degree() + 2));
            FieldState probe(nd, 0.0), out(nd, 0.0);

            auto neighborhood = [&](int e, std::array<int, 4>& rows)
            {
                rows = {e, -1, -1, -1};
                int c = 1;
                for (int lf = 0; lf < 3; ++lf)
                {
                    const Face& f = mesh.faces[mesh.element_faces[e][lf]];
                    if (!f.is_boundary())
                        rows[c++] = (f.owner == e) ? f.neighbor : f.owner;
                }
            };

            for (int c = 0; c < n_colors; ++c)
                for (int ld = 0; ld < bs; ++ld)
                {
                    for (int e : by_color[c])
                        probe[bs * e + ld] = 1.0;
                    op_->apply_B(probe.data(), out.data());
                    for (int e : by_color[c])
                    {
                        std::array<int, 4> rows;
                        neighborhood(e, rows);
                        const int col = bs * e + ld;
                        for (int r : rows)
                        {
                            if (r < 0)
                                continue;
                            for (int m = 0; m < bs; ++m)
                            {
                                const double v = out[bs * r + m];
                                if (v != 0.0)
                                    trips.emplace_back(bs * r + m, col, C{-v, 0.0});
                            }
                        }
                        probe[col] = 0.0;
                    }
                }

            // diagonal shift i w
            for (int i = 0; i < nd; ++i)
                trips.emplace_back(i, i, C{0.0, omega_});

            impl_->A.resize(nd, nd);
            impl_->A.setFromTriplets(trips.begin(), trips.end());
            impl_->A.makeCompressed();
            impl_->assembled = true;
        }

        // factor and solve the mass-normalized system (i w I - B) u = S
        Eigen::Map<const Eigen::VectorXcd> b(S_.data(), nd);
        Eigen::VectorXcd x;
        if (nd <= 5000)
        {
            if (!impl_->dense_lu)
                impl_->dense_lu = std::make_unique<Eigen::PartialPivLU<Eigen::MatrixXcd>>(
                    Eigen::MatrixXcd(impl_->A));
            x = impl_->dense_lu->solve(b);
        }
        else
        {
            if (!impl_->lu)
            {
                impl_->lu = std::make_unique<Eigen::SparseLU<SpMat>>();
                impl_->lu->compute(impl_->A);
                if (impl_->lu->info() != Eigen::Success)
                    throw SolveError("FrequencySystem: sparse LU factorization failed", -1.0);
            }
            x = impl_->lu->solve(b);
        }

        ComplexField u(nd);
        for (int i = 0; i < nd; ++i)
            u[i] = x[i];

        // residual of the M-weighted system
        const ComplexField r = apply(u);
        double num = 0.0, den = 0.0;
        for (int i = 0; i < nd; ++i)
        {
            num += std::norm(r[i] - load_[i]);
            den += std::norm(load_[i]);
        }
        const double rel = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
        if (!(rel <= tol))
            throw SolveError("FrequencySystem: direct solve residual " + std::to_string(rel) +
                                 " exceeds tolerance " + std::to_string(tol),
                             rel);
        return u;
    }

} // namespace cmx
